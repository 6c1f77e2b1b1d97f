use std::collections::BTreeMap;

use super::validate::ORDER_PAIRS;
use super::{Axis, SweepRow, SweepSpec, Template};
use crate::closed_form::Metric;
use crate::error::{Error, Result};
use crate::fading_model::{CsiMode, LinkSnrDb, Scheme};

pub const PRESET_NAMES: [&str; 6] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

/// Qualitative check applied to the rows of a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, violations: Vec<String>, checked: usize) -> Self {
        let passed = violations.is_empty() && checked > 0;
        let detail = match violations.first() {
            None if checked == 0 => "nothing to check".to_string(),
            None => format!("{checked} checked"),
            Some(first) => format!("{} of {checked} violated, first: {first}", violations.len()),
        };
        CheckOutcome { name: name.into(), passed, detail }
    }
}

fn base(series: String, axis: Axis, range: (f64, f64), fixed: Template) -> SweepSpec {
    SweepSpec {
        series,
        axis,
        start_db: range.0,
        stop_db: range.1,
        step_db: 2.0,
        fixed,
        schemes: Scheme::ALL.to_vec(),
        modes: CsiMode::ALL.to_vec(),
        metrics: vec![Metric::Sop],
        oracle: None,
        asymptote: false,
    }
}

fn with_snr(f: impl Fn(&mut LinkSnrDb<f64>)) -> Template {
    let mut t = Template::default();
    f(&mut t.snr_db);
    t
}

fn fig6_label(alpha_se_db: f64, beta_sd_db: f64) -> String {
    format!("ase={alpha_se_db}dB bsd={beta_sd_db}dB")
}

const FIG6_ALPHA_SE: [f64; 3] = [0.0, 3.0, 6.0];
const FIG6_BETA_SD: [f64; 2] = [9.5, 3.5];

/// Sweeps reproducing one figure; unknown names are usage errors.
///
/// Multi-curve figures become one spec per curve, distinguished by `series`.
pub fn figure_preset(name: &str) -> Result<Vec<SweepSpec>> {
    let specs = match name {
        "fig2" => [0.1, 1.0]
            .iter()
            .map(|&rs| {
                let fixed = Template { rate_rs: rs, ..Template::default() };
                base(format!("Rs={rs}"), Axis::BalancedSnrDb, (0.0, 40.0), fixed)
            })
            .collect(),
        "fig3" => {
            let mut out = Vec::new();
            for ase in [0.0, 6.0] {
                for bsd in [9.0, 3.0] {
                    let fixed = with_snr(|s| {
                        s.alpha_se = ase;
                        s.beta_sd = bsd;
                    });
                    let mut spec = base(format!("ase={ase}dB bsd={bsd}dB"), Axis::BalancedSnrDb, (0.0, 60.0), fixed);
                    spec.schemes = vec![Scheme::MrcMrc];
                    spec.modes = vec![CsiMode::Csi];
                    spec.asymptote = true;
                    out.push(spec);
                }
            }
            out
        }
        "fig4" => [(40.0, 3.0), (3.0, 40.0)]
            .iter()
            .map(|&(bsd, brd)| {
                let fixed = with_snr(|s| {
                    s.beta_sd = bsd;
                    s.beta_sr = brd;
                    s.beta_rd = brd;
                });
                let mut spec = base(format!("bsd={bsd}dB brd={brd}dB"), Axis::GammaThDb, (-40.0, 70.0), fixed);
                spec.schemes = vec![Scheme::MrcMrc];
                spec.asymptote = true;
                spec
            })
            .collect(),
        "fig5" => {
            let case1 = with_snr(|s| s.beta_sr = 30.0);
            let case2 = with_snr(|s| s.beta_rd = 30.0);
            let mut out = vec![
                base("case I".into(), Axis::BetaRdDb, (0.0, 60.0), case1),
                base("case II".into(), Axis::BetaSrDb, (0.0, 60.0), case2),
            ];
            for spec in &mut out {
                spec.schemes = vec![Scheme::MrcMrc];
                spec.asymptote = true;
            }
            out
        }
        "fig6" => {
            let mut out = Vec::new();
            for ase in FIG6_ALPHA_SE {
                for bsd in FIG6_BETA_SD {
                    let fixed = with_snr(|s| {
                        s.alpha_se = ase;
                        s.alpha_re = 3.5;
                        s.beta_sd = bsd;
                    });
                    let mut spec = base(fig6_label(ase, bsd), Axis::BalancedSnrDb, (0.0, 40.0), fixed);
                    spec.schemes = vec![Scheme::MrcSc, Scheme::ScMrc];
                    spec.metrics = vec![Metric::Esr];
                    out.push(spec);
                }
            }
            out
        }
        "fig7" => {
            let case1 = with_snr(|s| {
                s.alpha_re = 3.5;
                s.beta_sr = 30.0;
            });
            let case2 = with_snr(|s| {
                s.alpha_re = 3.5;
                s.beta_rd = 30.0;
            });
            let mut out = vec![
                base("case I".into(), Axis::BetaRdDb, (0.0, 60.0), case1),
                base("case II".into(), Axis::BetaSrDb, (0.0, 60.0), case2),
            ];
            for spec in &mut out {
                spec.schemes = vec![Scheme::MrcSc, Scheme::ScMrc];
                spec.metrics = vec![Metric::Esr];
                spec.asymptote = true;
            }
            out
        }
        _ => return Err(Error::Usage(format!("unknown preset `{name}` (expected one of {})", PRESET_NAMES.join(", ")))),
    };
    Ok(specs)
}

type Key = (String, Scheme, CsiMode, Metric);

/// Rows grouped by curve, each in axis order.
fn curves(rows: &[SweepRow]) -> BTreeMap<Key, Vec<&SweepRow>> {
    let mut out: BTreeMap<Key, Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        out.entry((r.series.clone(), r.scheme, r.csi, r.metric)).or_default().push(r);
    }
    out
}

fn lookup<'a>(rows: &'a [SweepRow]) -> BTreeMap<(String, u64, Scheme, CsiMode, Metric), &'a SweepRow> {
    rows.iter().map(|r| ((r.series.clone(), r.axis_value_db.to_bits(), r.scheme, r.csi, r.metric), r)).collect()
}

fn describe(r: &SweepRow) -> String {
    format!("{} {} {} {} at {} dB", r.series, r.scheme, r.csi, r.metric, r.axis_value_db)
}

const SLACK: f64 = 1e-12;

fn combiner_order(rows: &[SweepRow], csi: CsiMode) -> CheckOutcome {
    let table = lookup(rows);
    let (mut bad, mut n) = (Vec::new(), 0);
    for r in rows.iter().filter(|r| r.scheme == Scheme::MrcSc && r.csi == csi && r.metric == Metric::Sop) {
        let get = |s| table.get(&(r.series.clone(), r.axis_value_db.to_bits(), s, csi, Metric::Sop)).map(|x| x.closed_form_value);
        for (lo, hi) in ORDER_PAIRS {
            let (Some(a), Some(b)) = (get(lo), get(hi)) else { continue };
            n += 1;
            if a > b + SLACK {
                bad.push(format!("{} at {} dB: {lo} {a:.6e} > {hi} {b:.6e}", r.series, r.axis_value_db));
            }
        }
    }
    CheckOutcome::new(format!("combiner order {csi}"), bad, n)
}

fn csi_gain(rows: &[SweepRow]) -> CheckOutcome {
    let table = lookup(rows);
    let (mut bad, mut n) = (Vec::new(), 0);
    for r in rows.iter().filter(|r| r.csi == CsiMode::Csi) {
        let Some(no) = table.get(&(r.series.clone(), r.axis_value_db.to_bits(), r.scheme, CsiMode::NoCsi, r.metric)) else {
            continue;
        };
        n += 1;
        let ok = match r.metric {
            Metric::Sop => r.closed_form_value <= no.closed_form_value + SLACK,
            Metric::Esr => r.closed_form_value + SLACK >= no.closed_form_value.max(0.0),
        };
        if !ok {
            bad.push(format!("{} (CSI {:.6e}, NOCSI {:.6e})", describe(r), r.closed_form_value, no.closed_form_value));
        }
    }
    CheckOutcome::new("CSI never hurts", bad, n)
}

fn non_increasing(rows: &[SweepRow]) -> CheckOutcome {
    let (mut bad, mut n) = (Vec::new(), 0);
    for curve in curves(rows).values() {
        for w in curve.windows(2) {
            n += 1;
            let step = w[1].closed_form_value - w[0].closed_form_value;
            if step > SLACK {
                bad.push(format!("{} to {} dB", describe(w[0]), w[1].axis_value_db));
            }
        }
    }
    CheckOutcome::new("SOP non-increasing", bad, n)
}

/// `|value − saturation|` never grows and the final two points differ by less than `1e-3`.
fn saturation(rows: &[SweepRow], series: &str) -> CheckOutcome {
    let (mut bad, mut n) = (Vec::new(), 0);
    for ((s, ..), curve) in curves(rows) {
        if s != series {
            continue;
        }
        n += 1;
        let gap = |r: &SweepRow| r.saturation_value.map(|v| (r.closed_form_value - v).abs());
        for w in curve.windows(2) {
            match (gap(w[0]), gap(w[1])) {
                (Some(g0), Some(g1)) if g1 <= g0 + SLACK => {}
                _ => bad.push(format!("gap grows after {}", describe(w[0]))),
            }
        }
        if let [.., p, q] = curve.as_slice() {
            if (p.closed_form_value - q.closed_form_value).abs() >= 1e-3 {
                bad.push(format!("not settled at {}", describe(q)));
            }
        }
    }
    CheckOutcome::new(format!("{series} saturation"), bad, n)
}

fn floors(rows: &[SweepRow]) -> CheckOutcome {
    let (mut bad, mut n) = (Vec::new(), 0);
    for curve in curves(rows).values() {
        let (Some(lo), Some(hi)) = (curve.first(), curve.last()) else { continue };
        n += 1;
        match (lo.asymptote_value, hi.saturation_value) {
            (Some(f), Some(w)) if (lo.closed_form_value - f).abs() < 1e-3 && (hi.closed_form_value - w).abs() < 1e-3 => {}
            (f, w) => bad.push(format!(
                "{}: {:.6e} vs floor {f:?}, {:.6e} vs ceiling {w:?}",
                describe(lo),
                lo.closed_form_value,
                hi.closed_form_value
            )),
        }
    }
    CheckOutcome::new("threshold floors", bad, n)
}

fn balanced_slope(rows: &[SweepRow]) -> CheckOutcome {
    let (mut bad, mut n) = (Vec::new(), 0);
    for curve in curves(rows).values() {
        let Some(last) = curve.last() else { continue };
        n += 1;
        match last.asymptote_value {
            Some(a) if (last.closed_form_value / a - 1.0).abs() < 0.02 => {}
            a => bad.push(format!("{}: {:.6e} vs asymptote {a:?}", describe(last), last.closed_form_value)),
        }
    }
    CheckOutcome::new("balanced asymptote", bad, n)
}

fn negative_nocsi_esr(rows: &[SweepRow]) -> CheckOutcome {
    let found = rows.iter().any(|r| r.metric == Metric::Esr && r.csi == CsiMode::NoCsi && r.closed_form_value < 0.0);
    let n = rows.iter().filter(|r| r.metric == Metric::Esr && r.csi == CsiMode::NoCsi).count();
    let bad = if found { vec![] } else { vec!["no negative NOCSI ESR".to_string()] };
    CheckOutcome::new("negative NOCSI ESR", bad, n)
}

/// ESR falls as `1/α_se` grows and rises with `1/β_sd`.
fn fig6_sensitivity(rows: &[SweepRow]) -> CheckOutcome {
    let table = lookup(rows);
    let (mut bad, mut n) = (Vec::new(), 0);
    let value = |ase, bsd, r: &SweepRow| {
        table.get(&(fig6_label(ase, bsd), r.axis_value_db.to_bits(), r.scheme, r.csi, r.metric)).map(|x| x.closed_form_value)
    };
    for r in rows.iter().filter(|r| r.series == fig6_label(FIG6_ALPHA_SE[0], FIG6_BETA_SD[0])) {
        for bsd in FIG6_BETA_SD {
            for w in FIG6_ALPHA_SE.windows(2) {
                if let (Some(better), Some(worse)) = (value(w[0], bsd, r), value(w[1], bsd, r)) {
                    n += 1;
                    if worse > better + SLACK {
                        bad.push(format!("ase {} -> {} dB at bsd {bsd} dB, {}", w[0], w[1], describe(r)));
                    }
                }
            }
        }
        for ase in FIG6_ALPHA_SE {
            if let (Some(hi), Some(lo)) = (value(ase, FIG6_BETA_SD[0], r), value(ase, FIG6_BETA_SD[1], r)) {
                n += 1;
                if lo > hi + SLACK {
                    bad.push(format!("bsd ordering at ase {ase} dB, {}", describe(r)));
                }
            }
        }
    }
    CheckOutcome::new("link sensitivity", bad, n)
}

/// Qualitative checks for the rows produced by [`figure_preset`].
pub fn check_preset(name: &str, rows: &[SweepRow]) -> Result<Vec<CheckOutcome>> {
    Ok(match name {
        "fig2" => vec![
            combiner_order(rows, CsiMode::NoCsi),
            combiner_order(rows, CsiMode::Csi),
            csi_gain(rows),
            non_increasing(rows),
        ],
        "fig3" => vec![balanced_slope(rows)],
        "fig4" => vec![floors(rows), csi_gain(rows)],
        "fig5" => vec![saturation(rows, "case II"), csi_gain(rows)],
        "fig6" => vec![csi_gain(rows), fig6_sensitivity(rows)],
        "fig7" => vec![saturation(rows, "case II"), csi_gain(rows), negative_nocsi_esr(rows)],
        _ => return Err(Error::Usage(format!("unknown preset `{name}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_carry_caption_values() {
        let fig2 = figure_preset("fig2").unwrap();
        assert_eq!(fig2.len(), 2);
        assert_eq!(fig2.iter().map(|s| s.fixed.rate_rs).collect::<Vec<_>>(), vec![0.1, 1.0]);
        assert!(fig2.iter().all(|s| s.axis == Axis::BalancedSnrDb && s.schemes.len() == 4 && s.modes.len() == 2));
        let fig4 = figure_preset("fig4").unwrap();
        let cfg: Vec<_> = fig4.iter().map(|s| (s.fixed.snr_db.beta_sd, s.fixed.snr_db.beta_rd)).collect();
        assert_eq!(cfg, vec![(40.0, 3.0), (3.0, 40.0)]);
        assert!(fig4.iter().all(|s| s.axis == Axis::GammaThDb && s.asymptote));
        let fig6 = figure_preset("fig6").unwrap();
        let ase: Vec<_> = fig6.iter().map(|s| s.fixed.snr_db.alpha_se).collect();
        assert_eq!(ase.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
        assert_eq!(ase.iter().cloned().fold(0.0, f64::max), 6.0);
        assert!(fig6.iter().all(|s| FIG6_BETA_SD.contains(&s.fixed.snr_db.beta_sd) && s.fixed.snr_db.alpha_re == 3.5));
        for name in ["fig5", "fig7"] {
            let axes: Vec<_> = figure_preset(name).unwrap().iter().map(|s| s.axis).collect();
            assert_eq!(axes, vec![Axis::BetaRdDb, Axis::BetaSrDb]);
        }
        assert!(figure_preset("fig3").unwrap().iter().all(|s| s.asymptote));
    }

    #[test]
    fn unknown_preset_is_usage_error() {
        assert!(matches!(figure_preset("fig9"), Err(Error::Usage(_))));
        assert!(matches!(check_preset("fig1", &[]), Err(Error::Usage(_))));
    }

    #[test]
    fn empty_rows_do_not_pass() {
        assert!(check_preset("fig2", &[]).unwrap().iter().all(|c| !c.passed));
    }
}
