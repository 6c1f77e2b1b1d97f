//! Parameter sweeps, figure presets and the validation suite behind the CLI.

mod presets;
mod validate;

pub use presets::{check_preset, figure_preset, CheckOutcome, PRESET_NAMES};
pub use validate::{random_grid, validate, validate_points, Tolerances, ValidationLine, ValidationReport};

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::asymptotics::{
    esr_perfect_decoding, esr_saturation_case2_mrc_sc, sop_asymptote_balanced, sop_asymptote_unbalanced,
    sop_perfect_decoding, UnbalancedCase,
};
use crate::closed_form::{esr_relay_off, esr_relay_on, evaluate, sop_relay_off, sop_relay_on, Metric, Method};
use crate::error::{Error, Result};
use crate::fading_model::{params_from_db, CsiMode, LinkSnrDb, Scheme};
use crate::oracles::monte_carlo::{monte_carlo_all, McTable};
use crate::oracles::quadrature::{quadrature_esr, quadrature_sop};
use crate::Params;

/// Swept quantity; all values are in dB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// `1/β_sr = 1/β_rd`
    BalancedSnrDb,
    /// `1/β_rd` with `1/β_sr` fixed (Case I).
    BetaRdDb,
    /// `1/β_sr` with `1/β_rd` fixed (Case II).
    BetaSrDb,
    /// Decoding threshold `γ_th`.
    GammaThDb,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::BalancedSnrDb, Axis::BetaRdDb, Axis::BetaSrDb, Axis::GammaThDb];

    pub fn label(self) -> &'static str {
        match self {
            Axis::BalancedSnrDb => "balanced_snr_db",
            Axis::BetaRdDb => "beta_rd_db",
            Axis::BetaSrDb => "beta_sr_db",
            Axis::GammaThDb => "gamma_th_db",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "balanced" | "balancedsnrdb" => Ok(Axis::BalancedSnrDb),
            "betard" | "betarddb" | "rd" => Ok(Axis::BetaRdDb),
            "betasr" | "betasrdb" | "sr" => Ok(Axis::BetaSrDb),
            "gammath" | "gammathdb" | "threshold" => Ok(Axis::GammaThDb),
            _ => Err(Error::Usage(format!("unknown axis `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oracle {
    MonteCarlo { trials: u64, seed: u64 },
    Quadrature { tol: f64 },
}

/// Fixed parameters of a sweep, in the units of the CLI flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Template {
    /// Mean link SNRs `1/α`, `1/β` in dB.
    pub snr_db: LinkSnrDb<f64>,
    pub gamma_th_db: f64,
    /// Target secrecy rate in bits per channel use.
    pub rate_rs: f64,
}

impl Default for Template {
    fn default() -> Self {
        Template {
            snr_db: LinkSnrDb { alpha_se: 0.0, alpha_re: 3.0, beta_sd: 3.0, beta_sr: 3.0, beta_rd: 3.0 },
            gamma_th_db: 3.0,
            rate_rs: 1.0,
        }
    }
}

impl Template {
    /// Parameters with the swept quantity set to `x` dB.
    pub fn at(&self, axis: Axis, x: f64) -> Result<Params> {
        let mut t = *self;
        match axis {
            Axis::BalancedSnrDb => {
                t.snr_db.beta_sr = x;
                t.snr_db.beta_rd = x;
            }
            Axis::BetaRdDb => t.snr_db.beta_rd = x,
            Axis::BetaSrDb => t.snr_db.beta_sr = x,
            Axis::GammaThDb => t.gamma_th_db = x,
        }
        params_from_db(t.snr_db, t.gamma_th_db, t.rate_rs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Free-form label copied into every row.
    pub series: String,
    pub axis: Axis,
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
    pub fixed: Template,
    pub schemes: Vec<Scheme>,
    pub modes: Vec<CsiMode>,
    pub metrics: Vec<Metric>,
    pub oracle: Option<Oracle>,
    pub asymptote: bool,
}

impl SweepSpec {
    pub fn check(&self) -> Result<()> {
        let finite = [self.start_db, self.stop_db, self.step_db].iter().all(|v| v.is_finite());
        if !finite || self.step_db <= 0.0 || self.start_db > self.stop_db {
            return Err(Error::Usage(format!(
                "invalid range {}:{}:{} (need step > 0 and start <= stop)",
                self.start_db, self.step_db, self.stop_db
            )));
        }
        if self.schemes.is_empty() || self.modes.is_empty() || self.metrics.is_empty() {
            return Err(Error::Usage("scheme, mode and metric sets must be non-empty".into()));
        }
        match self.oracle {
            Some(Oracle::MonteCarlo { trials: 0, .. }) => Err(Error::Usage("Monte Carlo needs at least one trial".into())),
            Some(Oracle::Quadrature { tol }) if !(tol > 0.0) => Err(Error::Usage("quadrature tolerance must be positive".into())),
            _ => Ok(()),
        }
    }

    /// Axis values in dB, `start + i·step` up to `stop` inclusive.
    pub fn axis_values(&self) -> Vec<f64> {
        let n = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start_db + i as f64 * self.step_db).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub series: String,
    pub axis: Axis,
    pub axis_value_db: f64,
    pub scheme: Scheme,
    pub csi: CsiMode,
    pub metric: Metric,
    pub method: Option<Method>,
    pub closed_form_value: f64,
    pub oracle_value: Option<f64>,
    pub oracle_stderr: Option<f64>,
    /// Straight-line asymptote, or the low-threshold floor on a `γ_th` axis.
    pub asymptote_value: Option<f64>,
    /// Limit approached at the far end of the axis.
    pub saturation_value: Option<f64>,
    pub note: String,
}

/// High-SNR reference values for `(asymptote, saturation)`.
fn references(params: &Params, axis: Axis, scheme: Scheme, csi: CsiMode, metric: Metric) -> Result<(Option<f64>, Option<f64>)> {
    match (axis, metric) {
        (Axis::BalancedSnrDb, Metric::Sop) => {
            let a = sop_asymptote_balanced(params, scheme, csi)?;
            Ok((Some(a.predict(params.beta_rd())), None))
        }
        (Axis::BetaRdDb, Metric::Sop) => {
            let a = sop_asymptote_unbalanced(params, scheme, csi, UnbalancedCase::I)?;
            Ok((Some(a.predict(params.beta_rd())), Some(a.constant_term)))
        }
        (Axis::BetaSrDb, Metric::Sop) => {
            let a = sop_asymptote_unbalanced(params, scheme, csi, UnbalancedCase::II)?;
            Ok((Some(a.predict(params.beta_sr())), Some(a.constant_term)))
        }
        (Axis::BetaSrDb, Metric::Esr) => {
            let sat = if (scheme, csi) == (Scheme::MrcSc, CsiMode::Csi) {
                esr_saturation_case2_mrc_sc(params)?
            } else {
                esr_relay_on(params, scheme, csi)?
            };
            Ok((None, Some(sat.value)))
        }
        (Axis::GammaThDb, Metric::Sop) => {
            let floor = if (scheme, csi) == (Scheme::MrcMrc, CsiMode::NoCsi) {
                sop_perfect_decoding(params)?
            } else {
                sop_relay_on(params, scheme, csi)?
            };
            Ok((Some(floor.value), Some(sop_relay_off(params, csi))))
        }
        (Axis::GammaThDb, Metric::Esr) => {
            let floor = if (scheme, csi) == (Scheme::MrcMrc, CsiMode::NoCsi) {
                esr_perfect_decoding(params)?
            } else {
                esr_relay_on(params, scheme, csi)?
            };
            Ok((Some(floor.value), Some(esr_relay_off(params, csi))))
        }
        (Axis::BalancedSnrDb | Axis::BetaRdDb, Metric::Esr) => Ok((None, None)),
    }
}

fn push_note(note: &mut String, msg: impl fmt::Display) {
    if !note.is_empty() {
        note.push_str("; ");
    }
    note.push_str(&msg.to_string());
}

fn point_rows(spec: &SweepSpec, x: f64, stream_point: u64) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(spec.schemes.len() * spec.modes.len() * spec.metrics.len());
    let params = spec.fixed.at(spec.axis, x);
    let mc: Option<McTable> = match (&params, spec.oracle) {
        (Ok(p), Some(Oracle::MonteCarlo { trials, seed })) => Some(monte_carlo_all(p, trials, seed, stream_point)),
        _ => None,
    };
    for &scheme in &spec.schemes {
        for &csi in &spec.modes {
            for &metric in &spec.metrics {
                let mut row = SweepRow {
                    series: spec.series.clone(),
                    axis: spec.axis,
                    axis_value_db: x,
                    scheme,
                    csi,
                    metric,
                    method: None,
                    closed_form_value: f64::NAN,
                    oracle_value: None,
                    oracle_stderr: None,
                    asymptote_value: None,
                    saturation_value: None,
                    note: String::new(),
                };
                let params = match &params {
                    Ok(p) => p,
                    Err(e) => {
                        push_note(&mut row.note, e);
                        rows.push(row);
                        continue;
                    }
                };
                match evaluate(params, scheme, csi, metric) {
                    Ok(v) => {
                        row.closed_form_value = v.value;
                        row.method = Some(v.method);
                    }
                    Err(e) => push_note(&mut row.note, e),
                }
                if let Some(t) = &mc {
                    let e = t.get(scheme, csi, metric);
                    row.oracle_value = Some(e.value);
                    row.oracle_stderr = Some(e.stderr);
                }
                if let Some(Oracle::Quadrature { tol }) = spec.oracle {
                    let q = match metric {
                        Metric::Sop => quadrature_sop(params, scheme, csi, tol),
                        Metric::Esr => quadrature_esr(params, scheme, csi, tol),
                    };
                    match q {
                        Ok(q) => {
                            row.oracle_value = Some(q.value);
                            row.oracle_stderr = Some(q.abs_error_bound);
                        }
                        Err(e) => push_note(&mut row.note, e),
                    }
                }
                if spec.asymptote {
                    match references(params, spec.axis, scheme, csi, metric) {
                        Ok((a, s)) => {
                            row.asymptote_value = a;
                            row.saturation_value = s;
                        }
                        Err(e) => push_note(&mut row.note, e),
                    }
                }
                rows.push(row);
            }
        }
    }
    rows
}

/// Evaluates every `(axis point, scheme, mode, metric)` cell.
///
/// Points run concurrently; rows come back axis-major, then scheme, mode and
/// metric in the order listed in the spec. Failures are reported in the
/// row's `note` and do not stop the sweep. `stream` separates the Monte
/// Carlo streams of sweeps that share a seed.
pub fn run_sweep(spec: &SweepSpec, stream: u32) -> Result<Vec<SweepRow>> {
    spec.check()?;
    let xs = spec.axis_values();
    let per_point: Vec<Vec<SweepRow>> = xs
        .par_iter()
        .enumerate()
        .map(|(i, &x)| point_rows(spec, x, (u64::from(stream) << 32) | i as u64))
        .collect();
    Ok(per_point.into_iter().flatten().collect())
}

/// Runs several sweeps into one table, keeping their Monte Carlo streams apart.
pub fn run_sweeps(specs: &[SweepSpec]) -> Result<Vec<SweepRow>> {
    let mut out = Vec::new();
    for (k, spec) in specs.iter().enumerate() {
        out.extend(run_sweep(spec, k as u32)?);
    }
    Ok(out)
}

pub const CSV_HEADER: [&str; 13] = [
    "series",
    "axis",
    "axis_value_db",
    "scheme",
    "csi",
    "metric",
    "method",
    "closed_form_value",
    "oracle_value",
    "oracle_stderr",
    "asymptote_value",
    "saturation_value",
    "note",
];

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Usage(format!("cannot write CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.series.clone(),
            r.axis.label().to_string(),
            num(r.axis_value_db),
            r.scheme.label().to_string(),
            r.csi.label().to_string(),
            r.metric.label().to_string(),
            r.method.map(|m| m.label().to_string()).unwrap_or_default(),
            num(r.closed_form_value),
            opt(r.oracle_value),
            opt(r.oracle_stderr),
            opt(r.asymptote_value),
            opt(r.saturation_value),
            r.note.clone(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Usage(format!("cannot write CSV: {e}")))?;
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}
