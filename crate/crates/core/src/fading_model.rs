//! Rayleigh-fading system model: link parameters, SNR laws, combiners and
//! instantaneous secrecy rate.
//!
//! Every link SNR `γ_xy` is exponential with rate `λ_xy` (mean `1/λ_xy`).
//! Rates of the links towards the eavesdropper are `alpha_*`, the others are
//! `beta_*`. The relay forwards only when `γ_sr ≥ γ_th`; otherwise it stays
//! silent and both receivers see only the direct link.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::rng::TrialStream;
use crate::scalar::Scalar;

/// Relative rate difference below which two rates are treated as equal.
pub const DEGENERACY_RTOL: f64 = 1e-9;

/// True when `r1` and `r2` are within [`DEGENERACY_RTOL`] of each other.
#[inline]
pub fn nearly_equal_rates<T: Scalar>(r1: T, r2: T) -> bool {
    (r1 - r2).abs() < T::lit(DEGENERACY_RTOL) * r1.max(r2)
}

/// Exponential rates of the five links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkRates<T> {
    pub alpha_se: T,
    pub alpha_re: T,
    pub beta_sd: T,
    pub beta_sr: T,
    pub beta_rd: T,
}

/// Mean link SNRs in dB, the way figure captions quote them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSnrDb<T> {
    pub alpha_se: T,
    pub alpha_re: T,
    pub beta_sd: T,
    pub beta_sr: T,
    pub beta_rd: T,
}

/// Validated system parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    rates: LinkRates<T>,
    gamma_th: T,
    rate_rs: T,
    rho: T,
}

fn check_rate<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be a finite positive rate, got {v}")))
    }
}

impl<T: Scalar> SystemParams<T> {
    pub fn new(rates: LinkRates<T>, gamma_th: T, rate_rs: T) -> Result<Self> {
        check_rate("alpha_se", rates.alpha_se)?;
        check_rate("alpha_re", rates.alpha_re)?;
        check_rate("beta_sd", rates.beta_sd)?;
        check_rate("beta_sr", rates.beta_sr)?;
        check_rate("beta_rd", rates.beta_rd)?;
        if !gamma_th.is_finite() || gamma_th < T::zero() {
            return Err(domain(format!("gamma_th must be finite and non-negative, got {gamma_th}")));
        }
        if !rate_rs.is_finite() || rate_rs < T::zero() {
            return Err(domain(format!("rate_rs must be finite and non-negative, got {rate_rs}")));
        }
        let rho = (T::lit(2.0) * rate_rs).exp2();
        if !rho.is_finite() {
            return Err(domain(format!("rate_rs = {rate_rs} overflows rho = 2^(2 R_s)")));
        }
        Ok(SystemParams { rates, gamma_th, rate_rs, rho })
    }

    pub fn rates(&self) -> LinkRates<T> {
        self.rates
    }
    pub fn alpha_se(&self) -> T {
        self.rates.alpha_se
    }
    pub fn alpha_re(&self) -> T {
        self.rates.alpha_re
    }
    pub fn beta_sd(&self) -> T {
        self.rates.beta_sd
    }
    pub fn beta_sr(&self) -> T {
        self.rates.beta_sr
    }
    pub fn beta_rd(&self) -> T {
        self.rates.beta_rd
    }
    /// Relay decode threshold (linear SNR).
    pub fn gamma_th(&self) -> T {
        self.gamma_th
    }
    /// Target secrecy rate in bits per channel use.
    pub fn rate_rs(&self) -> T {
        self.rate_rs
    }
    /// `2^(2 R_s)`.
    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn with_rates(&self, rates: LinkRates<T>) -> Result<Self> {
        Self::new(rates, self.gamma_th, self.rate_rs)
    }
    pub fn with_gamma_th(&self, gamma_th: T) -> Result<Self> {
        Self::new(self.rates, gamma_th, self.rate_rs)
    }
    pub fn with_rate_rs(&self, rate_rs: T) -> Result<Self> {
        Self::new(self.rates, self.gamma_th, rate_rs)
    }
}

/// Linear mean SNR `10^{db/10}`.
pub fn db_to_linear<T: Scalar>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Exponential rate of a link with the given mean SNR in dB, `10^{-db/10}`.
pub fn rate_from_mean_db<T: Scalar>(db: T) -> T {
    T::lit(10.0).powf(-db / T::lit(10.0))
}

/// Builds parameters from mean link SNRs and a threshold, all in dB.
pub fn params_from_db<T: Scalar>(snr: LinkSnrDb<T>, gamma_th_db: T, rate_rs: T) -> Result<SystemParams<T>> {
    let all = [snr.alpha_se, snr.alpha_re, snr.beta_sd, snr.beta_sr, snr.beta_rd, gamma_th_db, rate_rs];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(domain("dB inputs must be finite"));
    }
    let rates = LinkRates {
        alpha_se: rate_from_mean_db(snr.alpha_se),
        alpha_re: rate_from_mean_db(snr.alpha_re),
        beta_sd: rate_from_mean_db(snr.beta_sd),
        beta_sr: rate_from_mean_db(snr.beta_sr),
        beta_rd: rate_from_mean_db(snr.beta_rd),
    };
    SystemParams::new(rates, db_to_linear(gamma_th_db), rate_rs)
}

/// Diversity combiner at one receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Combiner {
    /// Maximal-ratio combining: branch SNRs add.
    Mrc,
    /// Selection combining: the stronger branch wins.
    Sc,
}

/// Combiner pair, destination first, eavesdropper second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    MrcSc,
    MrcMrc,
    ScSc,
    ScMrc,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::MrcSc, Scheme::MrcMrc, Scheme::ScSc, Scheme::ScMrc];

    pub fn destination(self) -> Combiner {
        match self {
            Scheme::MrcSc | Scheme::MrcMrc => Combiner::Mrc,
            Scheme::ScSc | Scheme::ScMrc => Combiner::Sc,
        }
    }

    pub fn eavesdropper(self) -> Combiner {
        match self {
            Scheme::MrcSc | Scheme::ScSc => Combiner::Sc,
            Scheme::MrcMrc | Scheme::ScMrc => Combiner::Mrc,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::MrcSc => "MRC-SC",
            Scheme::MrcMrc => "MRC-MRC",
            Scheme::ScSc => "SC-SC",
            Scheme::ScMrc => "SC-MRC",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match norm.as_str() {
            "mrcsc" => Ok(Scheme::MrcSc),
            "mrcmrc" => Ok(Scheme::MrcMrc),
            "scsc" => Ok(Scheme::ScSc),
            "scmrc" => Ok(Scheme::ScMrc),
            _ => Err(Error::Usage(format!("unknown scheme '{s}' (expected MRC-SC, MRC-MRC, SC-SC or SC-MRC)"))),
        }
    }
}

/// Whether the transmitters know the instantaneous channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CsiMode {
    NoCsi,
    Csi,
}

impl CsiMode {
    pub const ALL: [CsiMode; 2] = [CsiMode::NoCsi, CsiMode::Csi];

    pub fn label(self) -> &'static str {
        match self {
            CsiMode::NoCsi => "NOCSI",
            CsiMode::Csi => "CSI",
        }
    }
}

impl fmt::Display for CsiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CsiMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "nocsi" => Ok(CsiMode::NoCsi),
            "csi" => Ok(CsiMode::Csi),
            _ => Err(Error::Usage(format!("unknown CSI mode '{s}' (expected NOCSI or CSI)"))),
        }
    }
}

/// Law of a post-combining SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrLaw<T> {
    /// Single exponential branch.
    Exp(T),
    /// Sum of two independent exponentials (MRC).
    Sum(T, T),
    /// Maximum of two independent exponentials (SC).
    Max(T, T),
}

impl<T: Scalar> SnrLaw<T> {
    pub fn combined(combiner: Combiner, r1: T, r2: T) -> Self {
        match combiner {
            Combiner::Mrc => SnrLaw::Sum(r1, r2),
            Combiner::Sc => SnrLaw::Max(r1, r2),
        }
    }

    pub fn cdf(&self, z: T) -> T {
        match *self {
            SnrLaw::Exp(r) => exp_cdf_unchecked(r, z),
            SnrLaw::Sum(r1, r2) => sum_exp_cdf_unchecked(r1, r2, z),
            SnrLaw::Max(r1, r2) => max_exp_cdf_unchecked(r1, r2, z),
        }
    }

    /// `1 - cdf`, computed without cancellation.
    pub fn ccdf(&self, z: T) -> T {
        if z <= T::zero() {
            return T::one();
        }
        match *self {
            SnrLaw::Exp(r) => (-r * z).exp(),
            SnrLaw::Sum(r1, r2) => {
                if nearly_equal_rates(r1, r2) {
                    let r = (r1 + r2) / T::lit(2.0);
                    (T::one() + r * z) * (-r * z).exp()
                } else {
                    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
                    let delta = hi - lo;
                    (-lo * z).exp() * (T::one() - lo * (-delta * z).exp_m1() / delta)
                }
            }
            SnrLaw::Max(r1, r2) => {
                let (e1, e2) = ((-r1 * z).exp(), (-r2 * z).exp());
                e1 + e2 - e1 * e2
            }
        }
    }

    pub fn pdf(&self, z: T) -> T {
        if z < T::zero() {
            return T::zero();
        }
        match *self {
            SnrLaw::Exp(r) => r * (-r * z).exp(),
            SnrLaw::Sum(r1, r2) => sum_exp_pdf_unchecked(r1, r2, z),
            SnrLaw::Max(r1, r2) => max_exp_pdf_unchecked(r1, r2, z),
        }
    }
}

fn exp_cdf_unchecked<T: Scalar>(rate: T, z: T) -> T {
    if z <= T::zero() {
        T::zero()
    } else {
        -(-rate * z).exp_m1()
    }
}

fn sum_exp_cdf_unchecked<T: Scalar>(r1: T, r2: T, z: T) -> T {
    if z <= T::zero() {
        return T::zero();
    }
    (T::one() - SnrLaw::Sum(r1, r2).ccdf(z)).max(T::zero()).min(T::one())
}

fn sum_exp_pdf_unchecked<T: Scalar>(r1: T, r2: T, z: T) -> T {
    if nearly_equal_rates(r1, r2) {
        let r = (r1 + r2) / T::lit(2.0);
        r * r * z * (-r * z).exp()
    } else {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let delta = hi - lo;
        -lo * hi * (-lo * z).exp() * (-delta * z).exp_m1() / delta
    }
}

fn max_exp_cdf_unchecked<T: Scalar>(r1: T, r2: T, z: T) -> T {
    if z <= T::zero() {
        T::zero()
    } else {
        (-r1 * z).exp_m1() * (-r2 * z).exp_m1()
    }
}

fn max_exp_pdf_unchecked<T: Scalar>(r1: T, r2: T, z: T) -> T {
    let (e1, e2) = ((-r1 * z).exp(), (-r2 * z).exp());
    r1 * e1 * -(-r2 * z).exp_m1() + r2 * e2 * -(-r1 * z).exp_m1()
}

/// `F(z) = 1 - e^{-rate z}` for `z > 0`, else 0.
pub fn exp_cdf<T: Scalar>(rate: T, z: T) -> Result<T> {
    check_rate("rate", rate)?;
    Ok(exp_cdf_unchecked(rate, z))
}

/// CDF of the sum of two independent exponentials (hypoexponential law).
///
/// Switches to the Erlang-2 form with the mean rate when the rates are
/// within [`DEGENERACY_RTOL`].
pub fn sum_exp_cdf<T: Scalar>(r1: T, r2: T, z: T) -> Result<T> {
    check_rate("r1", r1)?;
    check_rate("r2", r2)?;
    Ok(sum_exp_cdf_unchecked(r1, r2, z))
}

pub fn sum_exp_pdf<T: Scalar>(r1: T, r2: T, z: T) -> Result<T> {
    check_rate("r1", r1)?;
    check_rate("r2", r2)?;
    Ok(SnrLaw::Sum(r1, r2).pdf(z))
}

/// CDF of the maximum of two independent exponentials.
pub fn max_exp_cdf<T: Scalar>(r1: T, r2: T, z: T) -> Result<T> {
    check_rate("r1", r1)?;
    check_rate("r2", r2)?;
    Ok(max_exp_cdf_unchecked(r1, r2, z))
}

pub fn max_exp_pdf<T: Scalar>(r1: T, r2: T, z: T) -> Result<T> {
    check_rate("r1", r1)?;
    check_rate("r2", r2)?;
    Ok(SnrLaw::Max(r1, r2).pdf(z))
}

/// Probability that the relay decodes, `P[γ_sr ≥ γ_th] = e^{-β_sr γ_th}`.
pub fn decode_probability<T: Scalar>(params: &SystemParams<T>) -> T {
    (-params.beta_sr() * params.gamma_th()).exp()
}

/// Laws of `(γ_M, γ_E)`, conditioned on the relay decoding or staying silent.
pub fn conditional_laws<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, relay_on: bool) -> (SnrLaw<T>, SnrLaw<T>) {
    let r = params.rates();
    if relay_on {
        (
            SnrLaw::combined(scheme.destination(), r.beta_sd, r.beta_rd),
            SnrLaw::combined(scheme.eavesdropper(), r.alpha_se, r.alpha_re),
        )
    } else {
        (SnrLaw::Exp(r.beta_sd), SnrLaw::Exp(r.alpha_se))
    }
}

/// One realization of the five link SNRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialDraw<T> {
    pub g_sd: T,
    pub g_sr: T,
    pub g_rd: T,
    pub g_se: T,
    pub g_re: T,
    pub relay_on: bool,
}

fn apply<T: Scalar>(combiner: Combiner, a: T, b: T) -> T {
    match combiner {
        Combiner::Mrc => a + b,
        Combiner::Sc => a.max(b),
    }
}

/// Post-combining SNRs `(γ_M, γ_E)` of a draw.
pub fn combine<T: Scalar>(scheme: Scheme, draw: &TrialDraw<T>) -> (T, T) {
    if draw.relay_on {
        (
            apply(scheme.destination(), draw.g_sd, draw.g_rd),
            apply(scheme.eavesdropper(), draw.g_se, draw.g_re),
        )
    } else {
        (draw.g_sd, draw.g_se)
    }
}

/// Signed rate `½ log2((1+γ_M)/(1+γ_E))`, before clipping at zero.
#[inline]
pub fn log_ratio_rate<T: Scalar>(gamma_m: T, gamma_e: T) -> T {
    (gamma_m.ln_1p() - gamma_e.ln_1p()) / (T::lit(2.0) * T::LN_2())
}

/// Instantaneous secrecy rate `[½ log2((1+γ_M)/(1+γ_E))]^+`.
pub fn secrecy_rate<T: Scalar>(gamma_m: T, gamma_e: T) -> T {
    log_ratio_rate(gamma_m, gamma_e).max(T::zero())
}

/// Draws the five link SNRs of one trial from `stream`.
pub fn sample_trial<T: Scalar>(params: &SystemParams<T>, stream: &mut TrialStream) -> TrialDraw<T> {
    let r = params.rates();
    let mut next = |rate: T| T::lit(stream.exponential(rate.to_f64_lossy()));
    let g_sd = next(r.beta_sd);
    let g_sr = next(r.beta_sr);
    let g_rd = next(r.beta_rd);
    let g_se = next(r.alpha_se);
    let g_re = next(r.alpha_re);
    TrialDraw { g_sd, g_sr, g_rd, g_se, g_re, relay_on: g_sr >= params.gamma_th() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_params() -> SystemParams<f64> {
        let r = LinkRates { alpha_se: 1.0, alpha_re: 0.5, beta_sd: 0.5, beta_sr: 0.1, beta_rd: 0.25 };
        SystemParams::new(r, 1.995_262_314_968_879_5, 1.0).unwrap()
    }

    #[test]
    fn db_conversions() {
        let p = params_from_db(
            LinkSnrDb { alpha_se: 0.0, alpha_re: 3.0, beta_sd: 3.0, beta_sr: 10.0, beta_rd: 10.0 },
            3.0,
            1.0,
        )
        .unwrap();
        assert_eq!(p.alpha_se(), 1.0);
        assert_relative_eq!(p.alpha_re(), 0.501_187_233_627_272_3, max_relative = 1e-15);
        assert_relative_eq!(p.gamma_th(), 1.995_262_314_968_879_5, max_relative = 1e-15);
        assert_eq!(p.rho(), 4.0);
        assert!(params_from_db(
            LinkSnrDb { alpha_se: f64::NAN, alpha_re: 0.0, beta_sd: 0.0, beta_sr: 0.0, beta_rd: 0.0 },
            0.0,
            1.0
        )
        .is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        let r = LinkRates { alpha_se: 1.0, alpha_re: 1.0, beta_sd: 1.0, beta_sr: 1.0, beta_rd: 1.0 };
        assert!(SystemParams::new(LinkRates { alpha_se: 0.0, ..r }, 1.0, 1.0).is_err());
        assert!(SystemParams::new(LinkRates { beta_rd: f64::INFINITY, ..r }, 1.0, 1.0).is_err());
        assert!(SystemParams::new(r, -1.0, 1.0).is_err());
        assert!(SystemParams::new(r, 1.0, -0.1).is_err());
        assert!(SystemParams::new(r, 1.0, 1e6).is_err());
        assert_eq!(SystemParams::new(r, 0.0, 0.0).unwrap().rho(), 1.0);
    }

    #[test]
    fn exp_cdf_examples() {
        assert_eq!(exp_cdf(1.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(exp_cdf(1.0, 2f64.ln()).unwrap(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(exp_cdf(0.5, 3.0).unwrap(), 1.0 - (-1.5f64).exp(), max_relative = 1e-15);
        assert!(exp_cdf(0.0, 1.0).is_err());
    }

    #[test]
    fn sum_exp_cdf_examples() {
        assert_eq!(sum_exp_cdf(1.0, 2.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(sum_exp_cdf(1.0, 1.0, 1.0).unwrap(), 1.0 - 2.0 * (-1.0f64).exp(), max_relative = 1e-14);
        // 1 - 2e^{-1.5} + e^{-3}, confirmed by a 10^7-sample simulation
        assert_relative_eq!(sum_exp_cdf(1.0, 2.0, 1.5).unwrap(), 0.603_526_748_071_004_4, max_relative = 1e-12);
        assert!(sum_exp_cdf(-1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn sum_cdf_continuous_across_degeneracy_switch() {
        for z in [0.01, 0.3, 1.0, 4.0, 20.0] {
            for r1 in [0.05f64, 1.0, 17.0] {
                let r2 = r1 * (1.0 + 1e-6);
                let near = sum_exp_cdf(r1, r2, z).unwrap();
                let r = 0.5 * (r1 + r2);
                let equal = 1.0 - (1.0 + r * z) * (-r * z).exp();
                assert!((near - equal).abs() <= 1e-8, "r1={r1} z={z}: {near} vs {equal}");
            }
        }
    }

    #[test]
    fn max_exp_examples() {
        assert_eq!(max_exp_cdf(1.0, 2.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(max_exp_cdf(1.0, 1.0, 2f64.ln()).unwrap(), 0.25, max_relative = 1e-14);
        let pdf = max_exp_pdf(1.0, 2.0, 1.0).unwrap();
        let h = 1e-5;
        let fd = (max_exp_cdf(1.0, 2.0, 1.0 + h).unwrap() - max_exp_cdf(1.0, 2.0, 1.0 - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(pdf, fd, max_relative = 1e-8);
        assert_relative_eq!(pdf, 0.489_188_802_541_075_9, max_relative = 1e-12);
    }

    #[test]
    fn pdfs_integrate_to_one() {
        let laws = [SnrLaw::Exp(0.7), SnrLaw::Sum(0.3, 2.0), SnrLaw::Sum(0.9, 0.9), SnrLaw::Max(0.3, 2.0)];
        for law in laws {
            // trapezoid on a fine grid out to where the tail is negligible
            let h = 1e-3;
            let n = 200_000;
            let mut s = 0.5 * (law.pdf(0.0) + law.pdf(n as f64 * h));
            for i in 1..n {
                s += law.pdf(i as f64 * h);
            }
            assert!((s * h - 1.0).abs() < 1e-6, "{law:?}: {}", s * h);
        }
    }

    #[test]
    fn decode_probability_cases() {
        let p = unit_params();
        assert_relative_eq!(decode_probability(&p), (-0.1f64 * 1.995_262_314_968_879_5).exp(), max_relative = 1e-15);
        assert_relative_eq!(decode_probability(&p), 0.819_12, max_relative = 1e-5);
        assert_eq!(decode_probability(&p.with_gamma_th(0.0).unwrap()), 1.0);
        let strong = p.with_rates(LinkRates { beta_sr: 1e4, ..p.rates() }).unwrap();
        assert!(decode_probability(&strong) < 1e-300);
    }

    #[test]
    fn combine_examples() {
        let d = TrialDraw { g_sd: 2.0, g_sr: 10.0, g_rd: 3.0, g_se: 1.0, g_re: 4.0, relay_on: true };
        assert_eq!(combine(Scheme::MrcMrc, &d), (5.0, 5.0));
        assert_eq!(combine(Scheme::ScSc, &d), (3.0, 4.0));
        assert_eq!(combine(Scheme::MrcSc, &d), (5.0, 4.0));
        assert_eq!(combine(Scheme::ScMrc, &d), (3.0, 5.0));
        let off = TrialDraw { relay_on: false, ..d };
        for s in Scheme::ALL {
            assert_eq!(combine(s, &off), (2.0, 1.0));
        }
    }

    #[test]
    fn secrecy_rate_examples() {
        assert_eq!(secrecy_rate(3.0, 3.0), 0.0);
        assert_relative_eq!(secrecy_rate(3.0, 0.0), 1.0, max_relative = 1e-15);
        assert_eq!(secrecy_rate(0.0, 5.0), 0.0);
    }

    #[test]
    fn scheme_and_mode_parsing() {
        for s in Scheme::ALL {
            assert_eq!(s.label().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!("mrc_sc".parse::<Scheme>().unwrap(), Scheme::MrcSc);
        assert!("mrc".parse::<Scheme>().is_err());
        assert_eq!("NOCSI".parse::<CsiMode>().unwrap(), CsiMode::NoCsi);
        assert_eq!("csi".parse::<CsiMode>().unwrap(), CsiMode::Csi);
    }

    #[test]
    fn sampling_is_reproducible() {
        let p = unit_params();
        let run = || {
            let mut s = TrialStream::new(StreamKey::new(42, 0, 0));
            (0..100).map(|_| sample_trial(&p, &mut s)).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn sampled_moments() {
        let p = unit_params();
        let mut s = TrialStream::new(StreamKey::new(7, 0, 0));
        let n = 1_000_000;
        let (mut sum, mut sumsq, mut below_median, mut on) = (0.0, 0.0, 0usize, 0usize);
        for _ in 0..n {
            let d = sample_trial(&p, &mut s);
            sum += d.g_sd;
            sumsq += d.g_sd * d.g_sd;
            if d.g_se <= 2f64.ln() {
                below_median += 1;
            }
            if d.relay_on {
                on += 1;
            }
            assert_eq!(d.relay_on, d.g_sr >= p.gamma_th());
        }
        let mean = sum / n as f64;
        let se = ((sumsq / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 1.0 / p.beta_sd()).abs() < 5.0 * se);
        assert!((below_median as f64 / n as f64 - 0.5).abs() < 0.0015);
        let pon = decode_probability(&p);
        assert!((on as f64 / n as f64 - pon).abs() < 5.0 * (pon * (1.0 - pon) / n as f64).sqrt());
    }

    #[test]
    fn empirical_mrc_snr_matches_hypoexponential_cdf() {
        // Kolmogorov–Smirnov distance against the closed-form CDF
        let (r1, r2) = (0.5, 0.25);
        let mut s = TrialStream::new(StreamKey::new(11, 0, 0));
        let n = 1_000_000;
        let mut v: Vec<f64> = (0..n).map(|_| s.exponential(r1) + s.exponential(r2)).collect();
        v.sort_by(f64::total_cmp);
        let mut d: f64 = 0.0;
        for (i, x) in v.iter().enumerate() {
            let f = sum_exp_cdf(r1, r2, *x).unwrap();
            d = d.max((f - i as f64 / n as f64).abs()).max(((i + 1) as f64 / n as f64 - f).abs());
        }
        // 3σ band of the KS statistic ≈ 1.63/√n at 1% significance
        assert!(d * (n as f64).sqrt() < 1.63, "KS distance {d}");
    }

    proptest! {
        #[test]
        fn cdfs_are_monotone_and_bounded(r1 in 0.01f64..50.0, r2 in 0.01f64..50.0, z1 in 0.0f64..100.0, dz in 0.0f64..10.0) {
            for law in [SnrLaw::Exp(r1), SnrLaw::Sum(r1, r2), SnrLaw::Max(r1, r2)] {
                let (a, b) = (law.cdf(z1), law.cdf(z1 + dz));
                prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
                prop_assert!(b >= a - 1e-15);
                prop_assert!((law.cdf(z1) + law.ccdf(z1) - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn combine_is_symmetric(a in 0.0f64..10.0, b in 0.0f64..10.0, c in 0.0f64..10.0, d in 0.0f64..10.0) {
            let x = TrialDraw { g_sd: a, g_sr: 1.0, g_rd: b, g_se: c, g_re: d, relay_on: true };
            let y = TrialDraw { g_sd: b, g_sr: 1.0, g_rd: a, g_se: d, g_re: c, relay_on: true };
            for s in Scheme::ALL {
                prop_assert_eq!(combine(s, &x), combine(s, &y));
            }
        }

        #[test]
        fn secrecy_rate_monotone(m in 0.0f64..100.0, dm in 0.0f64..10.0, e in 0.0f64..100.0, de in 0.0f64..10.0) {
            prop_assert!(secrecy_rate(m + dm, e) >= secrecy_rate(m, e));
            prop_assert!(secrecy_rate(m, e + de) <= secrecy_rate(m, e));
            prop_assert!(secrecy_rate(m, e) >= 0.0);
        }
    }
}
