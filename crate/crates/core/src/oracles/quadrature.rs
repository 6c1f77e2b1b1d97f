//! Adaptive Gauss–Kronrod quadrature of the defining SOP and ESR integrals.
//!
//! Every integral lives on `y ∈ [0, ∞)` and is mapped onto `t ∈ (0, 1)` with
//! `y = t/(1-t)`. Intervals are bisected globally, largest error first, using
//! the 7-point Gauss / 15-point Kronrod pair with QUADPACK's error heuristic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};
use crate::fading_model::{conditional_laws, decode_probability, CsiMode, Scheme, SnrLaw, SystemParams};
use crate::scalar::Scalar;

/// Default absolute tolerance of the oracle.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default cap on integrand evaluations per integral.
pub const DEFAULT_MAX_EVALUATIONS: usize = 200_000;

/// Densities below this are treated as zero.
const DENSITY_FLOOR: f64 = 1e-300;

const INITIAL_PIECES: usize = 8;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Value of an integral with its certified absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub abs_error_bound: T,
    pub evaluations: usize,
}

impl<T: Scalar> QuadratureResult<T> {
    fn scaled(self, w: T) -> Self {
        QuadratureResult { value: self.value * w, abs_error_bound: self.abs_error_bound * w.abs(), evaluations: self.evaluations }
    }

    fn plus(self, other: Self) -> Self {
        QuadratureResult {
            value: self.value + other.value,
            abs_error_bound: self.abs_error_bound + other.abs_error_bound,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

struct Segment<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Segment<T> {}
impl<T: Scalar> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod<T: Scalar, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> Segment<T> {
    let half = T::lit(0.5);
    let center = half * (lo + hi);
    let radius = half * (hi - lo);
    let fc = f(center);
    let mut gauss = fc * T::lit(WG[3]);
    let mut k = fc * T::lit(WGK[7]);
    let mut abs_k = fc.abs() * T::lit(WGK[7]);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = radius * T::lit(XGK[j]);
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        k = k + w * (f1 + f2);
        abs_k = abs_k + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = k * half;
    let mut asc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        asc = asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = k * radius;
    let res_abs = abs_k * radius.abs();
    let res_asc = asc * radius.abs();
    let mut error = ((k - gauss) * radius).abs();
    if res_asc != T::zero() && error != T::zero() {
        error = res_asc * T::one().min((T::lit(200.0) * error / res_asc).powf(T::lit(1.5)));
    }
    let fifty_eps = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / fifty_eps {
        error = error.max(fifty_eps * res_abs);
    }
    Segment { lo, hi, value, error }
}

/// Integrates `f` over `[0, ∞)` to absolute tolerance `tol`.
///
/// `f` is evaluated only at finite `y`; non-finite integrand values are an error.
pub fn integrate_semi_infinite<T: Scalar, F: Fn(T) -> T>(f: F, tol: T, max_evaluations: usize) -> Result<QuadratureResult<T>> {
    if !(tol >= T::zero()) || !tol.is_finite() {
        return Err(domain(format!("quadrature tolerance must be finite and non-negative, got {tol}")));
    }
    let g = |t: T| {
        let one_minus = T::one() - t;
        if one_minus <= T::zero() {
            return T::zero();
        }
        let y = t / one_minus;
        let v = f(y);
        if v == T::zero() {
            v
        } else {
            v / (one_minus * one_minus)
        }
    };

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let (mut total, mut total_err) = (T::zero(), T::zero());
    for i in 0..INITIAL_PIECES {
        let lo = T::lit(i as f64 / INITIAL_PIECES as f64);
        let hi = T::lit((i + 1) as f64 / INITIAL_PIECES as f64);
        let seg = kronrod(&g, lo, hi);
        evaluations += 15;
        total = total + seg.value;
        total_err = total_err + seg.error;
        heap.push(seg);
    }

    let fail = |total: T, total_err: T, evaluations| Error::Quadrature {
        estimate: total.to_f64_lossy(),
        error_bound: total_err.to_f64_lossy(),
        tolerance: tol.to_f64_lossy(),
        evaluations,
    };

    while total_err > tol {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(fail(total, total_err, evaluations));
        }
        if evaluations + 30 > max_evaluations {
            return Err(fail(total, total_err, evaluations));
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = T::lit(0.5) * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // the segment cannot be split further at this precision
            return Err(fail(total, total_err, evaluations));
        }
        let left = kronrod(&g, worst.lo, mid);
        let right = kronrod(&g, mid, worst.hi);
        evaluations += 30;
        total = total - worst.value + left.value + right.value;
        total_err = total_err - worst.error + left.error + right.error;
        heap.push(left);
        heap.push(right);
        // re-sum periodically so running updates never drift
        if evaluations % 3000 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let value: T = heap.iter().map(|s| s.value).sum();
    let abs_error_bound: T = heap.iter().map(|s| s.error).sum();
    if !value.is_finite() {
        return Err(fail(value, abs_error_bound, evaluations));
    }
    Ok(QuadratureResult { value, abs_error_bound, evaluations })
}

/// Conditional SOP integral for known laws of `γ_M` and `γ_E`.
fn sop_integrand<T: Scalar>(m: SnrLaw<T>, e: SnrLaw<T>, rho: T, csi: CsiMode) -> impl Fn(T) -> T {
    move |y: T| {
        let density = e.pdf(y);
        if density < T::lit(DENSITY_FLOOR) {
            return T::zero();
        }
        let upper = rho * (T::one() + y) - T::one();
        let mass = match csi {
            CsiMode::NoCsi => m.cdf(upper),
            // F(u) - F(y) = Fc(y) - Fc(u), which keeps precision in the far tail
            CsiMode::Csi => m.ccdf(y) - m.ccdf(upper),
        };
        mass * density
    }
}

/// `(Ī_M − Ī_E)` integrand in nats.
fn esr_integrand<T: Scalar>(m: SnrLaw<T>, e: SnrLaw<T>, csi: CsiMode) -> impl Fn(T) -> T {
    move |x: T| {
        let (fm, fe) = (m.pdf(x), e.pdf(x));
        let floor = T::lit(DENSITY_FLOOR);
        if fm < floor && fe < floor {
            return T::zero();
        }
        let w = match csi {
            CsiMode::NoCsi => fm - fe,
            CsiMode::Csi => e.cdf(x) * fm - m.ccdf(x) * fe,
        };
        x.ln_1p() * w
    }
}

pub(crate) fn relay_state_sop<T: Scalar>(
    params: &SystemParams<T>,
    scheme: Scheme,
    csi: CsiMode,
    relay_on: bool,
    tol: T,
) -> Result<QuadratureResult<T>> {
    let (m, e) = conditional_laws(params, scheme, relay_on);
    integrate_semi_infinite(sop_integrand(m, e, params.rho(), csi), tol, DEFAULT_MAX_EVALUATIONS)
}

/// Conditional ESR in bits per channel use.
pub(crate) fn relay_state_esr<T: Scalar>(
    params: &SystemParams<T>,
    scheme: Scheme,
    csi: CsiMode,
    relay_on: bool,
    tol: T,
) -> Result<QuadratureResult<T>> {
    let (m, e) = conditional_laws(params, scheme, relay_on);
    let to_bits = T::lit(2.0) * T::LN_2();
    let r = integrate_semi_infinite(esr_integrand(m, e, csi), tol * to_bits, DEFAULT_MAX_EVALUATIONS)?;
    Ok(r.scaled(to_bits.recip()))
}

fn mix<T: Scalar, F>(params: &SystemParams<T>, tol: T, part: F) -> Result<QuadratureResult<T>>
where
    F: Fn(bool, T) -> Result<QuadratureResult<T>>,
{
    let p_on = decode_probability(params);
    let p_off = -(-params.beta_sr() * params.gamma_th()).exp_m1();
    let half = tol * T::lit(0.5);
    let mut out = QuadratureResult { value: T::zero(), abs_error_bound: T::zero(), evaluations: 0 };
    if p_off > T::zero() {
        out = out.plus(part(false, half)?.scaled(p_off));
    }
    if p_on > T::zero() {
        out = out.plus(part(true, half)?.scaled(p_on));
    }
    Ok(out)
}

/// SOP by quadrature of the total-probability decomposition.
///
/// NOCSI integrates `F_M(ρ(1+y)−1) f_E(y)`; CSI integrates
/// `[F_M(ρ(1+y)−1) − F_M(y)] f_E(y)`, the probability of outage jointly with
/// `γ_M > γ_E`.
pub fn quadrature_sop<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode, tol: T) -> Result<QuadratureResult<T>> {
    check_tol(tol)?;
    mix(params, tol, |on, t| relay_state_sop(params, scheme, csi, on, t))
}

/// ESR by quadrature.
///
/// NOCSI is the unclipped expectation of the log ratio. CSI keeps only
/// realizations with `γ_M > γ_E`, as
/// `∫ ln(1+x) F_E(x) f_M(x) dx − ∫ ln(1+y) F^c_M(y) f_E(y) dy`.
pub fn quadrature_esr<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode, tol: T) -> Result<QuadratureResult<T>> {
    check_tol(tol)?;
    mix(params, tol, |on, t| relay_state_esr(params, scheme, csi, on, t))
}

fn check_tol<T: Scalar>(tol: T) -> Result<()> {
    if tol.is_finite() && tol > T::zero() {
        Ok(())
    } else {
        Err(domain(format!("quadrature tolerance must be finite and positive, got {tol}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading_model::LinkRates;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_known_functions() {
        let r = integrate_semi_infinite(|y: f64| (-y).exp(), 1e-12, DEFAULT_MAX_EVALUATIONS).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12 && r.abs_error_bound <= 1e-12);
        let r = integrate_semi_infinite(|y: f64| 1.0 / (1.0 + y * y), 1e-10, DEFAULT_MAX_EVALUATIONS).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        // E[ln(1+X)], X ~ Exp(1)
        let r = integrate_semi_infinite(|y: f64| y.ln_1p() * (-y).exp(), 1e-12, DEFAULT_MAX_EVALUATIONS).unwrap();
        assert_relative_eq!(r.value, 0.596_347_362_323_194_07, max_relative = 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let err = integrate_semi_infinite(|y: f64| 1.0 / (1.0 + y), 1e-9, 3_000).unwrap_err();
        assert!(matches!(err, Error::Quadrature { evaluations, .. } if evaluations <= 3_000));
        assert!(quadrature_sop(&wiretap_params(1.0), Scheme::MrcSc, CsiMode::NoCsi, 0.0).is_err());
    }

    fn wiretap_params(rate_rs: f64) -> SystemParams<f64> {
        let r = LinkRates { alpha_se: 1.0, alpha_re: 0.7, beta_sd: 1.0, beta_sr: 1.0, beta_rd: 0.4 };
        SystemParams::new(r, 1e4, rate_rs).unwrap()
    }

    #[test]
    fn wiretap_limit() {
        let p = wiretap_params(0.0);
        for s in Scheme::ALL {
            let r = quadrature_sop(&p, s, CsiMode::NoCsi, 1e-10).unwrap();
            assert!((r.value - 0.5).abs() < 1e-10);
            assert!(quadrature_esr(&p, s, CsiMode::NoCsi, 1e-10).unwrap().value.abs() < 1e-10);
            let csi = quadrature_esr(&p, s, CsiMode::Csi, 1e-10).unwrap().value;
            // (eiexp(2) - eiexp(1)) / (2 ln 2)
            assert!((csi - 0.169_530_189_277_489_9).abs() < 1e-9, "{csi}");
        }
    }

    #[test]
    fn equal_rates_are_well_posed() {
        let r = LinkRates { alpha_se: 1.0, alpha_re: 0.5, beta_sd: 0.5, beta_sr: 0.5, beta_rd: 0.5 };
        let p = SystemParams::new(r, 2.0, 1.0).unwrap();
        let v = quadrature_sop(&p, Scheme::MrcMrc, CsiMode::NoCsi, 1e-9).unwrap().value;
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn halving_tolerance_stays_within_previous_bound() {
        let r = LinkRates { alpha_se: 0.3, alpha_re: 2.0, beta_sd: 0.07, beta_sr: 1.3, beta_rd: 11.0 };
        let p = SystemParams::new(r, 3.0, 1.4).unwrap();
        for s in Scheme::ALL {
            for c in CsiMode::ALL {
                let mut prev = quadrature_esr(&p, s, c, 1e-6).unwrap();
                let mut tol = 1e-6f64;
                for _ in 0..6 {
                    tol /= 2.0;
                    let next = quadrature_esr(&p, s, c, tol).unwrap();
                    assert!((next.value - prev.value).abs() <= prev.abs_error_bound + 1e-15);
                    prev = next;
                }
            }
        }
    }
}
