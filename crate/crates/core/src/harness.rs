//! Backward errors and the solve/bench workflows behind the `rqr` binary.

use std::time::Instant;

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matio::{gen_iplusj_hessenberg, gen_random_hessenberg, CsvRow};
use crate::pencil::frobenius;
use crate::solver::{Algorithm, SolveOptions, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BackwardErrorReport {
    /// `||Q S Z^H - A_0||_F / ||A_0||_F`
    pub bwe_a: f64,
    /// `||Q T Z^H - I||_F / sqrt(n)`, zero for the QR baseline.
    pub bwe_u: f64,
    pub bwe: f64,
}

/// Relative residuals of the computed equivalence; needs a recorded solve.
pub fn backward_error(a0: &Array2<Complex64>, report: &SolveReport) -> Result<BackwardErrorReport> {
    let (q, z) = match (&report.q, &report.z) {
        (Some(q), Some(z)) => (q, z),
        _ => return Err(Error::RecorderAbsent),
    };
    let n = a0.nrows();
    let zh = z.t().mapv(|v| v.conj());
    let norm = frobenius(a0);
    let ra = frobenius(&(q.dot(&report.a).dot(&zh) - a0));
    let bwe_a = if norm > 0.0 { ra / norm } else { ra };
    let bwe_u = match report.algorithm {
        Algorithm::Qr => 0.0,
        Algorithm::Rqr => {
            let t = report.u.materialize();
            frobenius(&(q.dot(&t).dot(&zh) - Array2::<Complex64>::eye(n))) / (n as f64).sqrt()
        }
    };
    Ok(BackwardErrorReport { bwe_a, bwe_u, bwe: bwe_a.max(bwe_u) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Random,
    IPlusJ,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::IPlusJ => "iplusj",
        }
    }

    pub fn generate(&self, n: usize, seed: u64) -> Array2<Complex64> {
        match self {
            Family::Random => gen_random_hessenberg(n, seed),
            Family::IPlusJ => gen_iplusj_hessenberg(n),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "random" => Ok(Family::Random),
            "iplusj" => Ok(Family::IPlusJ),
            other => Err(format!("unknown family '{other}' (expected random or iplusj)")),
        }
    }
}

/// Seed of trial `trial` at size `n`; both algorithms see the same matrix.
pub fn trial_seed(base: u64, n: usize, trial: usize) -> u64 {
    base.wrapping_add((n as u64).wrapping_mul(1_000_003)).wrapping_add(trial as u64)
}

/// Time source for benchmarks, in seconds.
pub trait Clock {
    fn now(&mut self) -> f64;
}

#[derive(Debug)]
pub struct WallClock(Instant);

impl Default for WallClock {
    fn default() -> Self {
        Self(Instant::now())
    }
}

impl Clock for WallClock {
    fn now(&mut self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Result of one solve plus its measured time and backward error.
#[derive(Debug, Clone)]
pub struct Measured {
    pub report: SolveReport,
    pub time_s: f64,
    pub bwe: BackwardErrorReport,
}

/// Solves with the recorder on; only the solve itself is timed.
pub fn measure(
    a: &Array2<Complex64>,
    algo: Algorithm,
    opts: &SolveOptions,
    clock: &mut dyn Clock,
) -> Result<Measured> {
    let opts = SolveOptions { record: true, ..*opts };
    let input = a.clone();
    let start = clock.now();
    let report = algo.solve(input, &opts)?;
    let time_s = clock.now() - start;
    let bwe = backward_error(a, &report)?;
    Ok(Measured { report, time_s, bwe })
}

pub fn detail_row(name: &str, m: &Measured) -> CsvRow {
    let n = m.report.dim();
    CsvRow {
        name: name.to_string(),
        n,
        algo: m.report.algorithm.as_str().to_string(),
        time_s: m.time_s,
        bwe: m.bwe.bwe,
        iters: m.report.iterations as f64,
        iters_per_n: m.report.iterations as f64 / n as f64,
        status: m.report.status.as_str().to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub family: Family,
    pub algos: Vec<Algorithm>,
    pub seed: u64,
    pub options: SolveOptions,
}

/// Per `(size, algorithm)` statistics, mirroring the detail rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub n: usize,
    pub algo: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub mean_time_s: f64,
    pub median_time_s: f64,
    pub mean_bwe: f64,
    pub mean_iters: f64,
    pub mean_iters_per_n: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BenchOutput {
    /// Detail rows followed by one aggregate row per `(size, algorithm)`.
    pub rows: Vec<CsvRow>,
    pub summaries: Vec<BenchSummary>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Aggregate row recomputed from detail rows.
pub fn aggregate_row(detail: &[CsvRow]) -> Option<CsvRow> {
    let first = detail.first()?;
    Some(CsvRow {
        name: first.name.clone(),
        n: first.n,
        algo: first.algo.clone(),
        time_s: mean(detail.iter().map(|r| r.time_s)),
        bwe: mean(detail.iter().map(|r| r.bwe)),
        iters: mean(detail.iter().map(|r| r.iters)),
        iters_per_n: mean(detail.iter().map(|r| r.iters_per_n)),
        status: "aggregate".to_string(),
    })
}

/// Runs every `(size, trial, algorithm)` case sequentially on one thread.
pub fn run_bench(config: &BenchConfig, clock: &mut dyn Clock) -> Result<BenchOutput> {
    let mut details: Vec<Vec<CsvRow>> = vec![Vec::new(); config.sizes.len() * config.algos.len()];
    for (si, &n) in config.sizes.iter().enumerate() {
        for trial in 0..config.trials {
            let a = config.family.generate(n, trial_seed(config.seed, n, trial));
            for (ai, &algo) in config.algos.iter().enumerate() {
                let m = measure(&a, algo, &config.options, clock)?;
                details[si * config.algos.len() + ai].push(detail_row(config.family.as_str(), &m));
            }
        }
    }

    let mut out = BenchOutput::default();
    for group in &details {
        out.rows.extend(group.iter().cloned());
    }
    for (gi, group) in details.iter().enumerate() {
        let Some(agg) = aggregate_row(group) else { continue };
        let algo = config.algos[gi % config.algos.len()];
        out.summaries.push(BenchSummary {
            n: agg.n,
            algo: algo.as_str(),
            trials: group.len(),
            failures: group.iter().filter(|r| r.status != "converged").count(),
            mean_time_s: agg.time_s,
            median_time_s: median(group.iter().map(|r| r.time_s).collect()),
            mean_bwe: agg.bwe,
            mean_iters: agg.iters,
            mean_iters_per_n: agg.iters_per_n,
        });
        out.rows.push(agg);
    }
    Ok(out)
}
