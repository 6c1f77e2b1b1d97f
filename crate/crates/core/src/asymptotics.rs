//! High-SNR behaviour of the SOP and the limiting decoding models.
//!
//! With `β` the rate of the link(s) whose mean SNR grows without bound, every
//! asymptote has the form `SOP ≈ constant_term + coefficient · β`:
//!
//! - balanced (`β_sr = β_rd = β → 0`): no constant, slope `γ_th W + κ`;
//! - Case I (`β_sr` fixed, `β_rd = β → 0`): floor `P_off W`, slope `P_on κ`;
//! - Case II (`β_rd` fixed, `β_sr = β → 0`): floor equal to the relay-on SOP
//!   `S_on`, slope `γ_th (W − S_on)`;
//!
//! where `W` is the relay-off (direct link) SOP and `κ` the slope of the
//! relay-on SOP in `β_rd` at `β_rd = 0`. SC-SC is not covered.

use crate::closed_form::{sop_relay_off, sop_relay_on, to_bits, Method, SecrecyMetric, Sym};
use crate::error::{Error, Result};
use crate::fading_model::{decode_probability, nearly_equal_rates, CsiMode, Scheme, SystemParams};
use crate::oracles::quadrature::{relay_state_esr, relay_state_sop};
use crate::scalar::Scalar;
use crate::special_fn::ee;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AsymptoteKind {
    BalancedSlope,
    UnbalancedCaseI,
    UnbalancedCaseII,
}

/// Straight-line high-SNR approximation `constant_term + coefficient · β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote<T> {
    pub kind: AsymptoteKind,
    pub constant_term: T,
    pub coefficient: T,
}

impl<T: Scalar> Asymptote<T> {
    /// Predicted SOP at rate `beta` (reciprocal of the growing mean SNR).
    pub fn predict(&self, beta: T) -> T {
        self.constant_term + self.coefficient * beta
    }
}

/// Which of the two dual-hop links stays fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnbalancedCase {
    /// S–R fixed, R–D mean SNR grows.
    I,
    /// R–D fixed, S–R mean SNR grows.
    II,
}

fn supported(scheme: Scheme) -> Result<()> {
    if scheme == Scheme::ScSc {
        Err(Error::UnsupportedScheme(scheme))
    } else {
        Ok(())
    }
}

/// `ρ − 1 + ρ/(a+ρs) + ρ/(b+ρs)`
fn sc_tail<T: Scalar>(x: &Sym<T>) -> T {
    let (a, b, s, p) = (x.a, x.b, x.s, x.p);
    p - T::one() + p / (a + p * s) + p / (b + p * s)
}

/// Slope `κ` of the relay-on SOP in `β_rd` at `β_rd = 0`.
fn relay_on_slope<T: Scalar>(x: &Sym<T>, scheme: Scheme, csi: CsiMode) -> T {
    let (a, b, s, p) = (x.a, x.b, x.s, x.p);
    let one = T::one();
    let es = x.decay(s);
    let ps = p * s;
    let inv_sum = (a + b + a * b) / (a * b);
    match (scheme, csi) {
        (Scheme::MrcSc, CsiMode::NoCsi) => {
            -one - one / s + p * (a * a + b * b + a * b * (a + b + one)) / (a * b * (a + b)) + es * x.max_block(ps) / s
        }
        (Scheme::MrcMrc, CsiMode::NoCsi) => -one - one / s + p * inv_sum + es * x.sum_block(ps) / s,
        (Scheme::ScMrc, CsiMode::NoCsi) => -one + p * inv_sum - es * x.sum_block(ps) * sc_tail(x),
        (Scheme::MrcSc, CsiMode::Csi) => {
            (p - one) * (one + one / a + one / b - one / (a + b)) - (x.max_block(s) - es * x.max_block(ps)) / s
        }
        (Scheme::MrcMrc, CsiMode::Csi) => (p - one) * inv_sum - (x.sum_block(s) - es * x.sum_block(ps)) / s,
        (Scheme::ScMrc, CsiMode::Csi) => {
            (p - one) * inv_sum + x.sum_block(s) * (one / (a + s) + one / (b + s)) - es * x.sum_block(ps) * sc_tail(x)
        }
        (Scheme::ScSc, _) => unreachable!("SC-SC is rejected before evaluation"),
    }
}

/// Balanced asymptote; `β_sr` and `β_rd` of `params` are not used.
pub fn sop_asymptote_balanced<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode) -> Result<Asymptote<T>> {
    supported(scheme)?;
    let x = Sym::of(params);
    let coefficient = params.gamma_th() * sop_relay_off(params, csi) + relay_on_slope(&x, scheme, csi);
    Ok(Asymptote { kind: AsymptoteKind::BalancedSlope, constant_term: T::zero(), coefficient })
}

/// Unbalanced asymptote. Case I ignores `β_rd`, Case II ignores `β_sr`.
pub fn sop_asymptote_unbalanced<T: Scalar>(
    params: &SystemParams<T>,
    scheme: Scheme,
    csi: CsiMode,
    case: UnbalancedCase,
) -> Result<Asymptote<T>> {
    supported(scheme)?;
    let w = sop_relay_off(params, csi);
    match case {
        UnbalancedCase::I => {
            let p_on = decode_probability(params);
            let p_off = -(-params.beta_sr() * params.gamma_th()).exp_m1();
            Ok(Asymptote {
                kind: AsymptoteKind::UnbalancedCaseI,
                constant_term: p_off * w,
                coefficient: p_on * relay_on_slope(&Sym::of(params), scheme, csi),
            })
        }
        UnbalancedCase::II => {
            let on = sop_relay_on(params, scheme, csi)?.value;
            Ok(Asymptote { kind: AsymptoteKind::UnbalancedCaseII, constant_term: on, coefficient: params.gamma_th() * (w - on) })
        }
    }
}

/// MRC-MRC NOCSI SOP when the relay always decodes (`γ_th → 0`).
pub fn sop_perfect_decoding<T: Scalar>(params: &SystemParams<T>) -> Result<SecrecyMetric<T>> {
    let x = Sym::of(params);
    let (a, b, s, r, p) = (x.a, x.b, x.s, x.r, x.p);
    if nearly_equal_rates(s, r) {
        let q = relay_state_sop(params, Scheme::MrcMrc, CsiMode::NoCsi, true, T::fallback_quad_tol())?;
        return Ok(SecrecyMetric { value: q.value, method: Method::LimitForm });
    }
    let value = T::one()
        - a * b / (s - r) * (s * x.decay(r) / ((a + p * r) * (b + p * r)) - r * x.decay(s) / ((a + p * s) * (b + p * s)));
    Ok(SecrecyMetric { value, method: Method::ClosedForm })
}

/// NOCSI SOP when the relay never forwards (`γ_th → ∞`): the classic wiretap
/// channel, `1 − α_se e^{-β_sd(ρ-1)}/(α_se + ρβ_sd)`.
pub fn sop_wiretap<T: Scalar>(params: &SystemParams<T>) -> T {
    sop_relay_off(params, CsiMode::NoCsi)
}

/// CSI counterpart of [`sop_wiretap`].
pub fn sop_wiretap_csi<T: Scalar>(params: &SystemParams<T>) -> T {
    sop_relay_off(params, CsiMode::Csi)
}

/// MRC-MRC NOCSI ESR when the relay always decodes (`γ_th → 0`).
pub fn esr_perfect_decoding<T: Scalar>(params: &SystemParams<T>) -> Result<SecrecyMetric<T>> {
    let x = Sym::of(params);
    let (a, b, s, r) = (x.a, x.b, x.s, x.r);
    if nearly_equal_rates(s, r) || nearly_equal_rates(a, b) {
        let q = relay_state_esr(params, Scheme::MrcMrc, CsiMode::NoCsi, true, T::fallback_quad_tol())?;
        return Ok(SecrecyMetric { value: q.value, method: Method::LimitForm });
    }
    let e = ee::<T>;
    let value = to_bits((r * e(s) - s * e(r)) / (s - r) - (b * e(a) - a * e(b)) / (a - b));
    Ok(SecrecyMetric { value, method: Method::ClosedForm })
}

/// Limit of the MRC-SC CSI ESR as the S–R mean SNR grows with `β_rd` fixed.
pub fn esr_saturation_case2_mrc_sc<T: Scalar>(params: &SystemParams<T>) -> Result<SecrecyMetric<T>> {
    let x = Sym::of(params);
    let (a, b, s, r) = (x.a, x.b, x.s, x.r);
    if nearly_equal_rates(s, r) {
        let q = relay_state_esr(params, Scheme::MrcSc, CsiMode::Csi, true, T::fallback_quad_tol())?;
        return Ok(SecrecyMetric { value: q.value, method: Method::LimitForm });
    }
    let e = ee::<T>;
    let branch = |u: T| e(u) - e(u + a) - e(u + b) + e(u + a + b);
    let value = to_bits((r * branch(s) - s * branch(r)) / (s - r));
    Ok(SecrecyMetric { value, method: Method::ClosedForm })
}

/// Asymptotes exactly as typeset in the source tables.
///
/// Entries that agree with the defining limits delegate to the corrected
/// functions above.
pub mod published {
    use super::*;

    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
    pub enum Defect {
        /// Balanced MRC-SC NOCSI slope: wrong eavesdropper term.
        BalancedMrcScNoCsi,
        /// Case I MRC-MRC NOCSI slope: missing `−1/β_sd`.
        CaseIMrcMrcNoCsi,
        /// Case I SC-MRC NOCSI slope: sign of the `(ρ−1)` term.
        CaseIScMrcNoCsi,
        /// Case II MRC-SC NOCSI floor: mis-paired eavesdropper rates.
        CaseIIMrcScNoCsi,
        /// Case II SC-MRC NOCSI floor: `β_sd + β_sd` for `β_sd + β_rd` in an exponent.
        CaseIIScMrcNoCsi,
        /// Case II MRC-SC CSI floor: sign of the `β_rd` branch.
        CaseIIMrcScCsi,
        /// Case II SC-MRC CSI floor: overall sign and the `β_sd + β_sd` exponent.
        CaseIIScMrcCsi,
        /// Perfect-decoding ESR: missing the `1/(2 ln 2)` factor.
        PerfectDecodingEsrScale,
    }

    impl Defect {
        pub fn describe(self) -> &'static str {
            match self {
                Defect::BalancedMrcScNoCsi => "balanced MRC-SC NOCSI slope",
                Defect::CaseIMrcMrcNoCsi => "Case I MRC-MRC NOCSI slope missing -1/b_sd",
                Defect::CaseIScMrcNoCsi => "Case I SC-MRC NOCSI slope sign of (rho-1) term",
                Defect::CaseIIMrcScNoCsi => "Case II MRC-SC NOCSI floor",
                Defect::CaseIIScMrcNoCsi => "Case II SC-MRC NOCSI floor exponent b_sd+b_sd",
                Defect::CaseIIMrcScCsi => "Case II MRC-SC CSI floor sign of b_rd branch",
                Defect::CaseIIScMrcCsi => "Case II SC-MRC CSI floor sign and exponent",
                Defect::PerfectDecodingEsrScale => "perfect-decoding ESR missing 1/(2 ln 2)",
            }
        }
    }

    pub fn balanced_defect(scheme: Scheme, csi: CsiMode) -> Option<Defect> {
        (scheme == Scheme::MrcSc && csi == CsiMode::NoCsi).then_some(Defect::BalancedMrcScNoCsi)
    }

    pub fn unbalanced_defect(scheme: Scheme, csi: CsiMode, case: UnbalancedCase) -> Option<Defect> {
        match (case, scheme, csi) {
            (UnbalancedCase::I, Scheme::MrcMrc, CsiMode::NoCsi) => Some(Defect::CaseIMrcMrcNoCsi),
            (UnbalancedCase::I, Scheme::ScMrc, CsiMode::NoCsi) => Some(Defect::CaseIScMrcNoCsi),
            (UnbalancedCase::II, Scheme::MrcSc, CsiMode::NoCsi) => Some(Defect::CaseIIMrcScNoCsi),
            (UnbalancedCase::II, Scheme::ScMrc, CsiMode::NoCsi) => Some(Defect::CaseIIScMrcNoCsi),
            (UnbalancedCase::II, Scheme::MrcSc, CsiMode::Csi) => Some(Defect::CaseIIMrcScCsi),
            (UnbalancedCase::II, Scheme::ScMrc, CsiMode::Csi) => Some(Defect::CaseIIScMrcCsi),
            _ => None,
        }
    }

    pub fn sop_asymptote_balanced<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode) -> Result<Asymptote<T>> {
        if balanced_defect(scheme, csi).is_none() {
            return super::sop_asymptote_balanced(params, scheme, csi);
        }
        let x = Sym::of(params);
        let (a, b, s, p, g) = (x.a, x.b, x.s, x.p, params.gamma_th());
        let one = T::one();
        let coefficient = g - one - one / s
            + p * (a * a + b * b + a * b * (a + b + one)) / (a * b * (a + b))
            + a * x.decay(s) / (s * (a + p * s)) * (b * (a + b + T::lit(2.0) * p * s) - g * s);
        Ok(Asymptote { kind: AsymptoteKind::BalancedSlope, constant_term: T::zero(), coefficient })
    }

    pub fn sop_asymptote_unbalanced<T: Scalar>(
        params: &SystemParams<T>,
        scheme: Scheme,
        csi: CsiMode,
        case: UnbalancedCase,
    ) -> Result<Asymptote<T>> {
        let Some(defect) = unbalanced_defect(scheme, csi, case) else {
            return super::sop_asymptote_unbalanced(params, scheme, csi, case);
        };
        let x = Sym::of(params);
        let (a, b, s, r, p, g) = (x.a, x.b, x.s, x.r, x.p, params.gamma_th());
        let one = T::one();
        let (es, er) = (x.decay(s), x.decay(r));
        let doubled = x.decay(s + s);
        let (ps, pr) = (p * s, p * r);
        let inv_sum = (a + b + a * b) / (a * b);
        let case_one = |slope: T| {
            let p_on = decode_probability(params);
            Asymptote {
                kind: AsymptoteKind::UnbalancedCaseI,
                constant_term: (one - p_on) * sop_relay_off(params, csi),
                coefficient: p_on * slope,
            }
        };
        let case_two = |on: T| Asymptote {
            kind: AsymptoteKind::UnbalancedCaseII,
            constant_term: on,
            coefficient: g * (sop_relay_off(params, csi) - on),
        };
        Ok(match defect {
            Defect::CaseIMrcMrcNoCsi => case_one(p * inv_sum - one + es * x.sum_block(ps) / s),
            Defect::CaseIScMrcNoCsi => {
                let (u, v) = (a + ps, b + ps);
                case_one(
                    p * inv_sum
                        - one
                        - a * b * (p * (a + b + T::lit(2.0) * ps) - (p - one) * u * v) * es / (u * u * v * v),
                )
            }
            Defect::CaseIIMrcScNoCsi => case_two(
                one - s * a * er / ((s - r) * (a + pr)) - r * b * es / ((r - s) * (b + ps))
                    + s * a * er / ((s - r) * (b + ps) * (a + b + pr))
                    + r * b * es / ((r - s) * (a + ps) * (a + b + ps)),
            ),
            Defect::CaseIIScMrcNoCsi => {
                case_two(one - (es * x.sum_block(ps) + er * x.sum_block(pr) - doubled * x.sum_block(ps + pr)))
            }
            Defect::CaseIIMrcScCsi => case_two(
                s / (s - r) * (x.max_block(r) - er * x.max_block(pr)) - r / (r - s) * (x.max_block(s) - es * x.max_block(ps)),
            ),
            Defect::CaseIIScMrcCsi => case_two(
                es * x.sum_block(ps) - x.sum_block(s) - x.sum_block(r) + er * x.sum_block(pr) + x.sum_block(s + r)
                    - doubled * x.sum_block(ps + pr),
            ),
            Defect::BalancedMrcScNoCsi | Defect::PerfectDecodingEsrScale => unreachable!("not an unbalanced defect"),
        })
    }

    /// Perfect-decoding ESR as printed, in nats-over-two rather than bits.
    pub fn esr_perfect_decoding<T: Scalar>(params: &SystemParams<T>) -> T {
        let x = Sym::of(params);
        let (a, b, s, r) = (x.a, x.b, x.s, x.r);
        let e = ee::<T>;
        (r * e(s) - s * e(r)) / (s - r) - (b * e(a) - a * e(b)) / (a - b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{esr, sop};
    use crate::fading_model::{params_from_db, LinkRates, LinkSnrDb};

    const SUPPORTED: [Scheme; 3] = [Scheme::MrcSc, Scheme::MrcMrc, Scheme::ScMrc];

    fn fig3(beta_db: f64) -> SystemParams<f64> {
        params_from_db(LinkSnrDb { alpha_se: 0.0, alpha_re: 3.0, beta_sd: 9.0, beta_sr: beta_db, beta_rd: beta_db }, 3.0, 1.0)
            .unwrap()
    }

    fn fig5(beta_sr_db: f64, beta_rd_db: f64) -> SystemParams<f64> {
        params_from_db(
            LinkSnrDb { alpha_se: 0.0, alpha_re: 3.0, beta_sd: 3.0, beta_sr: beta_sr_db, beta_rd: beta_rd_db },
            3.0,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn sc_sc_is_unsupported() {
        let p = fig3(10.0);
        assert!(matches!(sop_asymptote_balanced(&p, Scheme::ScSc, CsiMode::Csi), Err(Error::UnsupportedScheme(Scheme::ScSc))));
        assert!(sop_asymptote_unbalanced(&p, Scheme::ScSc, CsiMode::NoCsi, UnbalancedCase::I).is_err());
    }

    #[test]
    fn balanced_slope_law() {
        let p = fig3(60.0);
        let beta = p.beta_rd();
        for s in SUPPORTED {
            for c in CsiMode::ALL {
                let a = sop_asymptote_balanced(&p, s, c).unwrap();
                assert_eq!(a.constant_term, 0.0);
                let ratio = sop(&p, s, c).unwrap().value / a.predict(beta);
                assert!((ratio - 1.0).abs() < 0.02, "{s} {c}: {ratio}");
            }
        }
    }

    #[test]
    fn unbalanced_floor_law() {
        for s in SUPPORTED {
            for c in CsiMode::ALL {
                let p = fig5(30.0, 80.0);
                let a = sop_asymptote_unbalanced(&p, s, c, UnbalancedCase::I).unwrap();
                let v = sop(&p, s, c).unwrap().value;
                assert!((v - a.constant_term).abs() <= a.coefficient.abs() * 1e-8 + 1e-6, "I {s} {c}");
                let p = fig5(80.0, 30.0);
                let a = sop_asymptote_unbalanced(&p, s, c, UnbalancedCase::II).unwrap();
                let v = sop(&p, s, c).unwrap().value;
                assert!((v - a.constant_term).abs() <= a.coefficient.abs() * 1e-8 + 1e-6, "II {s} {c}");
            }
        }
    }

    #[test]
    fn unbalanced_slopes_match_finite_differences() {
        for s in SUPPORTED {
            for c in CsiMode::ALL {
                let (lo, hi) = (fig5(30.0, 70.0), fig5(30.0, 60.0));
                let a = sop_asymptote_unbalanced(&lo, s, c, UnbalancedCase::I).unwrap();
                let slope = (sop(&hi, s, c).unwrap().value - sop(&lo, s, c).unwrap().value) / (hi.beta_rd() - lo.beta_rd());
                assert!((slope / a.coefficient - 1.0).abs() < 1e-3, "I {s} {c}");
                let (lo, hi) = (fig5(70.0, 30.0), fig5(60.0, 30.0));
                let a = sop_asymptote_unbalanced(&lo, s, c, UnbalancedCase::II).unwrap();
                let slope = (sop(&hi, s, c).unwrap().value - sop(&lo, s, c).unwrap().value) / (hi.beta_sr() - lo.beta_sr());
                assert!((slope / a.coefficient - 1.0).abs() < 1e-3, "II {s} {c}");
            }
        }
    }

    #[test]
    fn case_one_floors_agree_and_case_two_floors_differ() {
        for c in CsiMode::ALL {
            let p = fig5(30.0, 30.0);
            let floors: Vec<f64> =
                SUPPORTED.iter().map(|&s| sop_asymptote_unbalanced(&p, s, c, UnbalancedCase::I).unwrap().constant_term).collect();
            assert!(floors.iter().all(|f| *f == floors[0]));
            let floors: Vec<f64> =
                SUPPORTED.iter().map(|&s| sop_asymptote_unbalanced(&p, s, c, UnbalancedCase::II).unwrap().constant_term).collect();
            for i in 0..3 {
                for j in i + 1..3 {
                    assert!((floors[i] - floors[j]).abs() > 1e-6, "{c}: {floors:?}");
                }
            }
        }
    }

    #[test]
    fn limiting_models() {
        let r = LinkRates::<f64> { alpha_se: 1.0, alpha_re: 0.5, beta_sd: 1.0, beta_sr: 0.1, beta_rd: 0.3 };
        let p = SystemParams::new(r, 0.0, 0.0).unwrap();
        assert!((sop_wiretap(&p) - 0.5).abs() < 1e-15);
        assert!((sop_wiretap(&p.with_rate_rs(40.0).unwrap()) - 1.0).abs() < 1e-15);
        let d = sop_perfect_decoding(&p).unwrap().value;
        assert!((d - sop(&p, Scheme::MrcMrc, CsiMode::NoCsi).unwrap().value).abs() < 1e-14);
        let other = p.with_rates(LinkRates { beta_sr: 10.0, ..r }).unwrap();
        assert_eq!(sop_perfect_decoding(&other).unwrap().value, d);
        let e = esr_perfect_decoding(&p).unwrap().value;
        assert!((e - esr(&p, Scheme::MrcMrc, CsiMode::NoCsi).unwrap().value).abs() < 1e-12);
        assert!((published::esr_perfect_decoding(&p) / e - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
        let sym = SystemParams::new(LinkRates::<f64> { alpha_se: 0.4, alpha_re: 2.0, beta_sd: 0.4, beta_sr: 1.0, beta_rd: 2.0 }, 0.0, 1.0)
            .unwrap();
        assert!(esr_perfect_decoding(&sym).unwrap().value.abs() < 1e-15);
    }

    #[test]
    fn case_two_esr_saturation() {
        let p = params_from_db(LinkSnrDb::<f64> { alpha_se: 0.0, alpha_re: 3.5, beta_sd: 3.0, beta_sr: 80.0, beta_rd: 30.0 }, 3.0, 1.0)
            .unwrap();
        let sat = esr_saturation_case2_mrc_sc(&p).unwrap().value;
        assert!((sat - esr(&p, Scheme::MrcSc, CsiMode::Csi).unwrap().value).abs() < 1e-4);
    }

    #[test]
    fn published_asymptote_defects_are_visible() {
        let p = fig5(30.0, 30.0);
        for s in SUPPORTED {
            for c in CsiMode::ALL {
                let good = sop_asymptote_balanced(&p, s, c).unwrap();
                let printed = published::sop_asymptote_balanced(&p, s, c).unwrap();
                assert_eq!((good.coefficient - printed.coefficient).abs() > 1e-9, published::balanced_defect(s, c).is_some());
                for case in [UnbalancedCase::I, UnbalancedCase::II] {
                    let good = sop_asymptote_unbalanced(&p, s, c, case).unwrap();
                    let printed = published::sop_asymptote_unbalanced(&p, s, c, case).unwrap();
                    let gap = (good.constant_term - printed.constant_term).abs() + (good.coefficient - printed.coefficient).abs();
                    assert_eq!(gap > 1e-9, published::unbalanced_defect(s, c, case).is_some(), "{case:?} {s} {c}: {gap}");
                }
            }
        }
    }
}
