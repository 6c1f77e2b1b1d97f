//! Closed-form SOP and ESR for the four combining schemes and both CSI modes.
//!
//! Each metric is the total-probability mix
//! `P_off · (direct link only) + P_on · (combined links)` with
//! `P_on = e^{-β_sr γ_th}`. Shorthand used below: `a = α_se`, `b = α_re`,
//! `s = β_sd`, `r = β_rd`, `p = ρ`, `E(x) = e^x Ei(-x)`.
//!
//! Terms with a `1/(s-r)` or `1/(a-b)` factor are singular when the two rates
//! coincide; those relay-on terms are computed by quadrature instead and
//! tagged [`Method::LimitForm`].

use crate::error::Result;
use crate::fading_model::{decode_probability, nearly_equal_rates, Combiner, CsiMode, Scheme, SystemParams};
use crate::oracles::quadrature::{relay_state_esr, relay_state_sop};
use crate::scalar::Scalar;
use crate::special_fn::ee;

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    /// A rate pair was degenerate and the relay-on term came from quadrature.
    LimitForm,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::LimitForm => "limit_form",
        }
    }
}

/// Secrecy performance measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Sop,
    Esr,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Sop, Metric::Esr];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Sop => "SOP",
            Metric::Esr => "ESR",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Metric {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sop" => Ok(Metric::Sop),
            "esr" => Ok(Metric::Esr),
            _ => Err(crate::error::Error::Usage(format!("unknown metric '{s}' (expected SOP or ESR)"))),
        }
    }
}

/// Evaluates `metric` in closed form.
pub fn evaluate<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode, metric: Metric) -> Result<SecrecyMetric<T>> {
    match metric {
        Metric::Sop => sop(params, scheme, csi),
        Metric::Esr => esr(params, scheme, csi),
    }
}

/// SOP (probability) or ESR (bits per channel use) with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyMetric<T> {
    pub value: T,
    pub method: Method,
}

#[derive(Clone, Copy)]
pub(crate) struct Sym<T> {
    pub(crate) a: T,
    pub(crate) b: T,
    pub(crate) s: T,
    pub(crate) r: T,
    pub(crate) p: T,
}

impl<T: Scalar> Sym<T> {
    pub(crate) fn of(params: &SystemParams<T>) -> Self {
        Sym { a: params.alpha_se(), b: params.alpha_re(), s: params.beta_sd(), r: params.beta_rd(), p: params.rho() }
    }

    /// `e^{-x(ρ-1)}`
    pub(crate) fn decay(&self, x: T) -> T {
        (-x * (self.p - T::one())).exp()
    }

    /// `ab / ((a+x)(b+x))`, the Laplace transform of `γ_se + γ_re`.
    pub(crate) fn sum_block(&self, x: T) -> T {
        self.a * self.b / ((self.a + x) * (self.b + x))
    }

    /// `ab(a+b+2x) / ((a+x)(b+x)(a+b+x))`, the Laplace transform of `max(γ_se, γ_re)`.
    pub(crate) fn max_block(&self, x: T) -> T {
        let (a, b) = (self.a, self.b);
        a * b * (a + b + T::lit(2.0) * x) / ((a + x) * (b + x) * (a + b + x))
    }

    pub(crate) fn eaves_block(&self, scheme: Scheme, x: T) -> T {
        match scheme.eavesdropper() {
            Combiner::Mrc => self.sum_block(x),
            Combiner::Sc => self.max_block(x),
        }
    }
}

/// `α_se e^{-β_sd(ρ-1)} / (α_se + ρ β_sd)`, the probability that the direct
/// link alone supports `R_s` against the S–E link.
pub fn direct_link_block<T: Scalar>(params: &SystemParams<T>) -> T {
    let x = Sym::of(params);
    x.a * x.decay(x.s) / (x.a + x.p * x.s)
}

/// Conditional SOP given that the relay stays silent.
pub fn sop_relay_off<T: Scalar>(params: &SystemParams<T>, csi: CsiMode) -> T {
    let x = Sym::of(params);
    match csi {
        CsiMode::NoCsi => T::one() - direct_link_block(params),
        CsiMode::Csi => x.a / (x.a + x.s) - direct_link_block(params),
    }
}

pub(crate) fn sop_relay_on_closed<T: Scalar>(x: &Sym<T>, scheme: Scheme, csi: CsiMode) -> T {
    let (s, r, p) = (x.s, x.r, x.p);
    let l = |v: T| x.eaves_block(scheme, v);
    match (scheme.destination(), csi) {
        (Combiner::Mrc, CsiMode::NoCsi) => T::one() - (r * x.decay(s) * l(p * s) - s * x.decay(r) * l(p * r)) / (r - s),
        (Combiner::Mrc, CsiMode::Csi) => {
            (r * (l(s) - x.decay(s) * l(p * s)) - s * (l(r) - x.decay(r) * l(p * r))) / (r - s)
        }
        (Combiner::Sc, CsiMode::NoCsi) => {
            T::one() - x.decay(s) * l(p * s) - x.decay(r) * l(p * r) + x.decay(s + r) * l(p * (s + r))
        }
        (Combiner::Sc, CsiMode::Csi) => {
            l(s) + l(r) - l(s + r) - x.decay(s) * l(p * s) - x.decay(r) * l(p * r) + x.decay(s + r) * l(p * (s + r))
        }
    }
}

fn destination_degenerate<T: Scalar>(params: &SystemParams<T>, scheme: Scheme) -> bool {
    scheme.destination() == Combiner::Mrc && nearly_equal_rates(params.beta_sd(), params.beta_rd())
}

fn eavesdropper_degenerate<T: Scalar>(params: &SystemParams<T>, scheme: Scheme) -> bool {
    scheme.eavesdropper() == Combiner::Mrc && nearly_equal_rates(params.alpha_se(), params.alpha_re())
}

/// Conditional SOP given that the relay decodes and forwards.
pub fn sop_relay_on<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode) -> Result<SecrecyMetric<T>> {
    if destination_degenerate(params, scheme) {
        let q = relay_state_sop(params, scheme, csi, true, T::fallback_quad_tol())?;
        return Ok(SecrecyMetric { value: q.value, method: Method::LimitForm });
    }
    Ok(SecrecyMetric { value: sop_relay_on_closed(&Sym::of(params), scheme, csi), method: Method::ClosedForm })
}

/// Secrecy outage probability.
///
/// Under CSI this is the probability of outage jointly with `γ_M > γ_E`
/// (transmission happens only then), not renormalized.
pub fn sop<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode) -> Result<SecrecyMetric<T>> {
    let p_on = decode_probability(params);
    let p_off = -(-params.beta_sr() * params.gamma_th()).exp_m1();
    let on = sop_relay_on(params, scheme, csi)?;
    let value = p_off * sop_relay_off(params, csi) + p_on * on.value;
    Ok(SecrecyMetric { value: value.max(T::zero()).min(T::one()), method: on.method })
}

pub(crate) fn to_bits<T: Scalar>(nats: T) -> T {
    nats / (T::lit(2.0) * T::LN_2())
}

/// Conditional ESR given that the relay stays silent, in bits per channel use.
pub fn esr_relay_off<T: Scalar>(params: &SystemParams<T>, csi: CsiMode) -> T {
    let x = Sym::of(params);
    to_bits(match csi {
        CsiMode::NoCsi => ee(x.a) - ee(x.s),
        CsiMode::Csi => ee(x.s + x.a) - ee(x.s),
    })
}

pub(crate) fn esr_relay_on_closed<T: Scalar>(x: &Sym<T>, scheme: Scheme, csi: CsiMode) -> T {
    let (a, b, s, r) = (x.a, x.b, x.s, x.r);
    let e = ee::<T>;
    let nats = match (scheme, csi) {
        (Scheme::MrcSc, CsiMode::NoCsi) => (r * e(s) - s * e(r)) / (s - r) + e(a) + e(b) - e(a + b),
        (Scheme::MrcMrc, CsiMode::NoCsi) => (r * e(s) - s * e(r)) / (s - r) - (b * e(a) - a * e(b)) / (a - b),
        (Scheme::ScSc, CsiMode::NoCsi) => e(a) + e(b) - e(s) - e(r) + e(s + r) - e(a + b),
        (Scheme::ScMrc, CsiMode::NoCsi) => e(s + r) - e(s) - e(r) + (a * e(b) - b * e(a)) / (a - b),
        (Scheme::MrcSc, CsiMode::Csi) => {
            (r * e(s) - s * e(r) + s * e(r + a) - r * e(s + a) + s * e(r + b) - r * e(s + b) + r * e(s + a + b)
                - s * e(r + a + b))
                / (s - r)
        }
        (Scheme::MrcMrc, CsiMode::Csi) => {
            let cross = (s * a * e(r + b) - r * a * e(s + b) + r * b * e(s + a) - s * b * e(r + a)) / (a - b);
            (r * e(s) - s * e(r) + cross) / (s - r)
        }
        (Scheme::ScSc, CsiMode::Csi) => {
            e(s + a) - e(s) - e(r) + e(s + r) + e(s + b) + e(r + a) + e(r + b)
                - e(s + a + b)
                - e(r + a + b)
                - e(s + r + a)
                - e(s + r + b)
                + e(s + r + a + b)
        }
        (Scheme::ScMrc, CsiMode::Csi) => {
            a / (a - b) * (e(s + b) + e(r + b) - e(s + r + b)) - b / (a - b) * (e(s + a) + e(r + a) - e(s + r + a))
                - e(s)
                - e(r)
                + e(s + r)
        }
    };
    to_bits(nats)
}

/// Conditional ESR given that the relay decodes and forwards.
pub fn esr_relay_on<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode) -> Result<SecrecyMetric<T>> {
    if destination_degenerate(params, scheme) || eavesdropper_degenerate(params, scheme) {
        let q = relay_state_esr(params, scheme, csi, true, T::fallback_quad_tol())?;
        return Ok(SecrecyMetric { value: q.value, method: Method::LimitForm });
    }
    Ok(SecrecyMetric { value: esr_relay_on_closed(&Sym::of(params), scheme, csi), method: Method::ClosedForm })
}

/// Ergodic secrecy rate in bits per channel use.
///
/// NOCSI is the unclipped mean of `½ log2((1+γ_M)/(1+γ_E))` and can be
/// negative. CSI averages the same log ratio over `γ_M > γ_E` only.
pub fn esr<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode) -> Result<SecrecyMetric<T>> {
    let p_on = decode_probability(params);
    let p_off = -(-params.beta_sr() * params.gamma_th()).exp_m1();
    let on = esr_relay_on(params, scheme, csi)?;
    let mut value = p_off * esr_relay_off(params, csi) + p_on * on.value;
    if csi == CsiMode::Csi {
        value = value.max(T::zero());
    }
    Ok(SecrecyMetric { value, method: on.method })
}

/// The closed-form expressions exactly as typeset in the source tables.
///
/// Several printed entries differ from the integrals they claim to solve. The
/// functions here evaluate the printed algebra so the discrepancy can be
/// measured; [`sop`] and [`esr`] ship the corrected forms. Entries that were
/// printed correctly delegate to the corrected implementation.
pub mod published {
    use super::*;

    /// A printed expression that disagrees with its defining integral.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
    pub enum Defect {
        /// SC-MRC CSI SOP: relay-on bracket bears no relation to the integral.
        ScMrcCsiSop,
        /// MRC-SC CSI ESR: `β_rd e^{β_sd} Ei(-β_rd)` should read `β_rd e^{β_sd} Ei(-β_sd)`.
        MrcScCsiEsrMismatchedExponent,
        /// SC-MRC NOCSI ESR: relay-on bracket lacks `-e^{β_sd} Ei(-β_sd)`.
        ScMrcNoCsiEsrMissingTerm,
        /// SC-MRC CSI ESR: relay-on bracket has its terms regrouped wrongly.
        ScMrcCsiEsrRelayOn,
        /// MRC-MRC, SC-SC and SC-MRC CSI ESR: relay-off bracket uses `β_rd` in place of `α_se`.
        CsiEsrRelayOffRate,
    }

    impl Defect {
        pub const ALL: [Defect; 5] = [
            Defect::ScMrcCsiSop,
            Defect::MrcScCsiEsrMismatchedExponent,
            Defect::ScMrcNoCsiEsrMissingTerm,
            Defect::ScMrcCsiEsrRelayOn,
            Defect::CsiEsrRelayOffRate,
        ];

        pub fn describe(self) -> &'static str {
            match self {
                Defect::ScMrcCsiSop => "SC-MRC CSI SOP relay-on bracket",
                Defect::MrcScCsiEsrMismatchedExponent => "MRC-SC CSI ESR term b_rd*e^{b_sd}*Ei(-b_rd)",
                Defect::ScMrcNoCsiEsrMissingTerm => "SC-MRC NOCSI ESR missing -e^{b_sd}Ei(-b_sd)",
                Defect::ScMrcCsiEsrRelayOn => "SC-MRC CSI ESR relay-on bracket",
                Defect::CsiEsrRelayOffRate => "CSI ESR relay-off bracket uses b_rd for a_se",
            }
        }
    }

    /// Printed defects that affect the given SOP entry.
    pub fn sop_defects(scheme: Scheme, csi: CsiMode) -> Vec<Defect> {
        match (scheme, csi) {
            (Scheme::ScMrc, CsiMode::Csi) => vec![Defect::ScMrcCsiSop],
            _ => Vec::new(),
        }
    }

    /// Printed defects that affect the given ESR entry.
    pub fn esr_defects(scheme: Scheme, csi: CsiMode) -> Vec<Defect> {
        match (scheme, csi) {
            (Scheme::MrcSc, CsiMode::Csi) => vec![Defect::MrcScCsiEsrMismatchedExponent],
            (Scheme::MrcMrc, CsiMode::Csi) | (Scheme::ScSc, CsiMode::Csi) => vec![Defect::CsiEsrRelayOffRate],
            (Scheme::ScMrc, CsiMode::Csi) => vec![Defect::ScMrcCsiEsrRelayOn, Defect::CsiEsrRelayOffRate],
            (Scheme::ScMrc, CsiMode::NoCsi) => vec![Defect::ScMrcNoCsiEsrMissingTerm],
            _ => Vec::new(),
        }
    }

    /// SOP evaluated with the printed expression (no degeneracy routing).
    pub fn sop<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode) -> T {
        let x = Sym::of(params);
        let on = match (scheme, csi) {
            (Scheme::ScMrc, CsiMode::Csi) => {
                let (a, b, s, r, p) = (x.a, x.b, x.s, x.r, x.p);
                let one = T::one();
                (p - one) * ((a + b + a * b) / (a * b)) + a * b / ((a + s) * (b + s)) * (one / (a + s) + one / (b + s))
                    - a * b * x.decay(s) / ((a + p * s) * (b + p * r)) * (p - one + p / (a + p * s) + p / (b + p * s))
            }
            _ => sop_relay_on_closed(&x, scheme, csi),
        };
        let p_on = decode_probability(params);
        (T::one() - p_on) * sop_relay_off(params, csi) + p_on * on
    }

    /// ESR evaluated with the printed expression (no degeneracy routing).
    pub fn esr<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode) -> T {
        let x = Sym::of(params);
        let (a, b, s, r) = (x.a, x.b, x.s, x.r);
        let e = ee::<T>;
        let on = match (scheme, csi) {
            (Scheme::MrcSc, CsiMode::Csi) => {
                // r e^{s} Ei(-r) = r e^{s-r} E(r)
                let printed = r * (s - r).exp() * e(r);
                to_bits(
                    (printed - s * e(r) + s * e(r + a) - r * e(s + a) + s * e(r + b) - r * e(s + b) + r * e(s + a + b)
                        - s * e(r + a + b))
                        / (s - r),
                )
            }
            (Scheme::ScMrc, CsiMode::NoCsi) => to_bits(e(s + r) - e(r) + (a * e(b) - b * e(a)) / (a - b)),
            (Scheme::ScMrc, CsiMode::Csi) => to_bits(
                a / (a - b) * (e(s + b) - e(s + a) + e(r + b)) - b / (a - b) * (e(r + a) - e(s + r + b)) - e(s) - e(r)
                    + e(s + r),
            ),
            _ => esr_relay_on_closed(&x, scheme, csi),
        };
        let off = match (scheme, csi) {
            (Scheme::MrcMrc | Scheme::ScSc | Scheme::ScMrc, CsiMode::Csi) => to_bits(e(s + r) - e(s)),
            _ => esr_relay_off(params, csi),
        };
        let p_on = decode_probability(params);
        (T::one() - p_on) * off + p_on * on
    }
}
