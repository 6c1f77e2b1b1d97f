//! Monte Carlo simulation of the raw system model.
//!
//! Trials are grouped into chunks of [`CHUNK_TRIALS`]. Chunks run in parallel,
//! each from its own counter-addressed stream, and their statistics are merged
//! in chunk order. Results therefore depend only on `(seed, point, n)`, never
//! on the number of worker threads.

use rayon::prelude::*;

use crate::closed_form::Metric;
use crate::fading_model::{log_ratio_rate, sample_trial, Combiner, CsiMode, Scheme, SystemParams};
use crate::rng::{StreamKey, TrialStream, CHUNK_TRIALS};
use crate::scalar::Scalar;

/// Sample estimate of an expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Count, mean and centred second moment of a sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments { n, mean: self.mean + d * w, m2: self.m2 + other.m2 + d * d * self.n as f64 * w }
    }
}

const SLOTS: usize = 8;

fn slot(scheme: Scheme, csi: CsiMode) -> usize {
    let s = match scheme {
        Scheme::MrcSc => 0,
        Scheme::MrcMrc => 1,
        Scheme::ScSc => 2,
        Scheme::ScMrc => 3,
    };
    s * 2 + usize::from(csi == CsiMode::Csi)
}

#[derive(Debug, Clone, Copy, Default)]
struct ChunkStats {
    outages: [u64; SLOTS],
    rates: [Moments; SLOTS],
}

impl ChunkStats {
    fn merge(mut self, other: &ChunkStats) -> ChunkStats {
        for i in 0..SLOTS {
            self.outages[i] += other.outages[i];
            self.rates[i] = self.rates[i].merge(other.rates[i]);
        }
        self
    }
}

/// Estimates of every `(scheme, csi, metric)` combination from one shared set
/// of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct McTable {
    trials: u64,
    sop: [Estimate; SLOTS],
    esr: [Estimate; SLOTS],
}

impl McTable {
    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn get(&self, scheme: Scheme, csi: CsiMode, metric: Metric) -> Estimate {
        match metric {
            Metric::Sop => self.sop[slot(scheme, csi)],
            Metric::Esr => self.esr[slot(scheme, csi)],
        }
    }
}

fn run_chunk<T: Scalar>(params: &SystemParams<T>, seed: u64, point: u64, start: u64, len: u64) -> ChunkStats {
    let mut stream = TrialStream::new(StreamKey::new(seed, point, start));
    let mut out = ChunkStats::default();
    let rho = params.rho().to_f64_lossy();
    for _ in 0..len {
        let d = sample_trial(params, &mut stream);
        let (sd, rd, se, re) = (d.g_sd.to_f64_lossy(), d.g_rd.to_f64_lossy(), d.g_se.to_f64_lossy(), d.g_re.to_f64_lossy());
        let (m_mrc, m_sc, e_mrc, e_sc) = if d.relay_on { (sd + rd, sd.max(rd), se + re, se.max(re)) } else { (sd, sd, se, se) };
        for scheme in Scheme::ALL {
            let m = if scheme.destination() == Combiner::Mrc { m_mrc } else { m_sc };
            let e = if scheme.eavesdropper() == Combiner::Mrc { e_mrc } else { e_sc };
            let limit = rho * (1.0 + e) - 1.0;
            let rate = log_ratio_rate(m, e);
            let nocsi = slot(scheme, CsiMode::NoCsi);
            if m < limit {
                out.outages[nocsi] += 1;
                if m > e {
                    out.outages[nocsi + 1] += 1;
                }
            }
            out.rates[nocsi].push(rate);
            out.rates[nocsi + 1].push(if m > e { rate } else { 0.0 });
        }
    }
    out
}

/// Runs `n` trials at sweep point `point` and estimates all sixteen metrics.
pub fn monte_carlo_all<T: Scalar>(params: &SystemParams<T>, n: u64, seed: u64, point: u64) -> McTable {
    let n = n.max(1);
    let chunks = n.div_ceil(CHUNK_TRIALS);
    let stats: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK_TRIALS;
            run_chunk(params, seed, point, start, CHUNK_TRIALS.min(n - start))
        })
        .collect();
    let total = stats.iter().fold(ChunkStats::default(), |acc, s| acc.merge(s));
    let nf = n as f64;
    let sop = std::array::from_fn(|i| {
        let p = total.outages[i] as f64 / nf;
        Estimate { value: p, stderr: (p * (1.0 - p) / nf).sqrt(), trials: n }
    });
    let esr = std::array::from_fn(|i| {
        let m = total.rates[i];
        let var = if m.n > 1 { m.m2 / (m.n - 1) as f64 } else { 0.0 };
        Estimate { value: m.mean, stderr: (var / nf).sqrt(), trials: n }
    });
    McTable { trials: n, sop, esr }
}

/// Fraction of trials in secrecy outage.
///
/// NOCSI counts `γ_M < ρ(1+γ_E) − 1`; CSI counts `γ_E < γ_M < ρ(1+γ_E) − 1`.
pub fn monte_carlo_sop<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode, n: u64, seed: u64) -> Estimate {
    monte_carlo_all(params, n, seed, 0).get(scheme, csi, Metric::Sop)
}

/// Sample mean of the log-ratio rate; CSI zeroes trials with `γ_M ≤ γ_E`.
pub fn monte_carlo_esr<T: Scalar>(params: &SystemParams<T>, scheme: Scheme, csi: CsiMode, n: u64, seed: u64) -> Estimate {
    monte_carlo_all(params, n, seed, 0).get(scheme, csi, Metric::Esr)
}
