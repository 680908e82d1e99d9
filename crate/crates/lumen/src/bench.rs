//! Size and time measurements: one record per relation size, medians over
//! repeated runs, and a report with log-log slope fits.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LumenError, Result};
use crate::pcs::{setup, SetupConfig};
use crate::piop::index;
use crate::piop::relation::generate_satisfiable;
use crate::snark;

pub const BENCH_SCHEMA_VERSION: u32 = 1;
pub const MIN_RUNS: usize = 5;
/// Reference proof size the measured bytes are reported against.
pub const REFERENCE_PROOF_BYTES: usize = 1024;
pub const PROOF_BUDGET_BYTES: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub size: usize,
    pub d: usize,
    pub proof_bytes: usize,
    pub prove_ms: f64,
    pub verify_ms: f64,
    pub seed: u64,
    pub calibration_id: u16,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub ds: Vec<usize>,
    pub alpha: usize,
    pub runs: usize,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(sizes: Vec<usize>, d: usize) -> Self {
        Self { sizes, ds: vec![d], alpha: 2, runs: MIN_RUNS, seed: 1 }
    }
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn time_ms<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

/// One record per `(d, size)`; each time is the median of `runs` repetitions.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if cfg.runs < MIN_RUNS {
        return Err(LumenError::InvalidParams(format!("need at least {MIN_RUNS} runs")));
    }
    let mut out = Vec::new();
    for &d in &cfg.ds {
        let pp = setup(&SetupConfig::new(d, cfg.alpha, &cfg.seed.to_le_bytes()))?;
        for &size in &cfg.sizes {
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed ^ size as u64);
            let (rel, wit) = generate_satisfiable(size, &mut rng)?;
            let idx = index(&rel)?;
            let mut prove_times = Vec::with_capacity(cfg.runs);
            let mut verify_times = Vec::with_capacity(cfg.runs);
            let mut proof_bytes = 0;
            for run in 0..cfg.runs {
                let (proof, t) = time_ms(|| snark::prove(&pp, &idx, &wit, cfg.seed + run as u64));
                let bytes = proof?.to_bytes();
                prove_times.push(t);
                let (ok, t) = time_ms(|| snark::verify(&pp, &idx, &bytes));
                if !ok? {
                    return Err(LumenError::InvalidParams(format!("honest proof rejected at size {size}")));
                }
                verify_times.push(t);
                proof_bytes = bytes.len();
            }
            out.push(BenchRecord {
                size,
                d,
                proof_bytes,
                prove_ms: median(&mut prove_times),
                verify_ms: median(&mut verify_times),
                seed: cfg.seed,
                calibration_id: snark::calibration_id(),
            });
        }
    }
    Ok(out)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub reference_proof_bytes: usize,
    pub proof_budget_bytes: usize,
    pub records: Vec<BenchRecord>,
    /// Verifier time against relation size, at the first `d`.
    pub verify_slope_vs_size: Option<f64>,
    /// Verifier time against `d`, at the first size.
    pub verify_slope_vs_d: Option<f64>,
    /// `max/min − 1` of proof bytes over sizes at the first `d`.
    pub proof_size_spread: f64,
}

fn distinct<T: PartialEq + Copy>(xs: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for x in xs {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

pub fn bench_report(records: &[BenchRecord]) -> Result<BenchReport> {
    let sizes = distinct(records.iter().map(|r| r.size));
    let ds = distinct(records.iter().map(|r| r.d));
    if sizes.len() < 2 && ds.len() < 2 {
        return Err(LumenError::InvalidParams("a report needs at least two sizes".into()));
    }
    let at_d: Vec<&BenchRecord> = records.iter().filter(|r| r.d == ds[0]).collect();
    let at_size: Vec<&BenchRecord> = records.iter().filter(|r| r.size == sizes[0]).collect();
    let bytes = at_d.iter().map(|r| r.proof_bytes as f64);
    let (lo, hi) = bytes.fold((f64::INFINITY, 0.0f64), |(lo, hi), b| (lo.min(b), hi.max(b)));
    Ok(BenchReport {
        schema_version: BENCH_SCHEMA_VERSION,
        reference_proof_bytes: REFERENCE_PROOF_BYTES,
        proof_budget_bytes: PROOF_BUDGET_BYTES,
        verify_slope_vs_size: loglog_slope(&at_d.iter().map(|r| (r.size as f64, r.verify_ms)).collect::<Vec<_>>()),
        verify_slope_vs_d: loglog_slope(&at_size.iter().map(|r| (r.d as f64, r.verify_ms)).collect::<Vec<_>>()),
        proof_size_spread: hi / lo - 1.0,
        records: records.to_vec(),
    })
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Rejects unknown schema versions.
    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s).map_err(|e| LumenError::Malformed(e.to_string()))?;
        if r.schema_version != BENCH_SCHEMA_VERSION {
            return Err(LumenError::Malformed(format!("unsupported bench schema {}", r.schema_version)));
        }
        Ok(r)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("size,d,proof_bytes,prove_ms,verify_ms,seed,calibration_id\n");
        for r in &self.records {
            s.push_str(&format!(
                "{},{},{},{:.3},{:.3},{},{}\n",
                r.size, r.d, r.proof_bytes, r.prove_ms, r.verify_ms, r.seed, r.calibration_id
            ));
        }
        s
    }
}
