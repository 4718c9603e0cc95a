//! Ghost sample size selection.
//!
//! The bounds are discrete, non-convex functions of `m'`, so the optimum is
//! found by evaluating every point of a scan. Evaluation may run in
//! parallel; the reduction picks the smallest value and, among equal
//! values, the smallest `m'`, so the answer never depends on scheduling.

use rayon::prelude::*;

use crate::bounds::{evaluate, BoundQuery, Method};
use crate::error::{HtiError, Result};
use crate::growth::GrowthModel;
use crate::logprob::LogProb;

/// Default upper end of a scan, as a multiple of `m`.
pub const DEFAULT_RANGE_FACTOR: u64 = 128;

/// A scan of one bound over a set of ghost sample sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MprimeScan {
    /// Anticipated number of errors, fixed before the scan.
    pub errors: u64,
    pub m: u64,
    pub log_delta: LogProb,
    pub growth: GrowthModel,
    pub method: Method,
    pub lo: u64,
    pub hi: u64,
    /// 1 scans every integer in `[lo, hi]`.
    pub step: u64,
    /// For Catoni, only scan multiples of `m`.
    pub catoni_multiples: bool,
    /// After a strided scan, rescan `±step` around its optimum with step 1.
    pub refine: bool,
    pub keep_trace: bool,
}

impl MprimeScan {
    /// Exhaustive scan of `[1, 128 m]`.
    pub fn new(
        method: Method,
        errors: u64,
        m: u64,
        log_delta: LogProb,
        growth: GrowthModel,
    ) -> Result<Self> {
        if !matches!(
            method,
            Method::Hti | Method::HtiRd | Method::HtiLower | Method::Catoni
        ) {
            return Err(HtiError::NotScannable(method.tag()));
        }
        // validates k, m and δ once up front
        BoundQuery::with_log_delta(errors, m, 1, log_delta, growth)?;
        Ok(Self {
            errors,
            m,
            log_delta,
            growth,
            method,
            lo: 1,
            hi: DEFAULT_RANGE_FACTOR.saturating_mul(m),
            step: 1,
            catoni_multiples: false,
            refine: false,
            keep_trace: false,
        })
    }

    pub fn range(mut self, lo: u64, hi: u64) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    pub fn step(mut self, step: u64) -> Self {
        self.step = step;
        self
    }

    pub fn catoni_multiples(mut self, on: bool) -> Self {
        self.catoni_multiples = on;
        self
    }

    pub fn refine(mut self, on: bool) -> Self {
        self.refine = on;
        self
    }

    pub fn trace(mut self, on: bool) -> Self {
        self.keep_trace = on;
        self
    }

    fn empty(&self) -> HtiError {
        HtiError::EmptyScan {
            lo: self.lo,
            hi: self.hi,
            step: self.step,
        }
    }

    /// The scanned ghost sample sizes, in increasing order.
    pub fn points(&self) -> Result<Vec<u64>> {
        if self.lo == 0 || self.lo > self.hi || self.step == 0 {
            return Err(self.empty());
        }
        let points: Vec<u64> = if self.method == Method::Catoni && self.catoni_multiples {
            let first = self.lo.div_ceil(self.m).max(1);
            (first..=self.hi / self.m).map(|i| i * self.m).collect()
        } else {
            (self.lo..=self.hi).step_by(self.step as usize).collect()
        };
        if points.is_empty() {
            return Err(self.empty());
        }
        Ok(points)
    }

    /// The bound at one ghost sample size.
    pub fn value_at(&self, mprime: u64) -> Result<f64> {
        let q =
            BoundQuery::with_log_delta(self.errors, self.m, mprime, self.log_delta, self.growth)?;
        Ok(evaluate(self.method, &q)?.value)
    }

    /// Lower bounds are maximized; every other bound is minimized.
    fn cost(&self, value: f64) -> f64 {
        if self.method == Method::HtiLower {
            -value
        } else {
            value
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MprimeResult {
    pub mprime_best: u64,
    pub epsilon_best: f64,
    pub evaluations: u64,
    /// `(m', ε)` for every evaluated point, sorted by `m'`.
    pub trace: Option<Vec<(u64, f64)>>,
}

fn better(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    match a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) {
        std::cmp::Ordering::Greater => b,
        _ => a,
    }
}

fn scan_points(scan: &MprimeScan, points: &[u64]) -> Result<Vec<(u64, f64)>> {
    points
        .par_iter()
        .map(|&mp| scan.value_at(mp).map(|v| (mp, v)))
        .collect()
}

fn best_of(scan: &MprimeScan, evaluated: &[(u64, f64)]) -> (f64, u64) {
    evaluated
        .iter()
        .map(|&(mp, v)| (scan.cost(v), mp))
        .reduce(better)
        .expect("scan points are non-empty")
}

/// Minimizes the scan's bound over its points (maximizes for the lower
/// bound) on the current rayon pool.
pub fn optimize_mprime(scan: &MprimeScan) -> Result<MprimeResult> {
    let points = scan.points()?;
    let mut evaluated = scan_points(scan, &points)?;
    let mut best = best_of(scan, &evaluated);

    let strided = scan.step > 1 && !(scan.method == Method::Catoni && scan.catoni_multiples);
    if scan.refine && strided {
        let lo = best.1.saturating_sub(scan.step).max(scan.lo);
        let hi = best.1.saturating_add(scan.step).min(scan.hi);
        let extra: Vec<u64> = (lo..=hi)
            .filter(|p| !(p - scan.lo).is_multiple_of(scan.step))
            .collect();
        let refined = scan_points(scan, &extra)?;
        if !refined.is_empty() {
            best = better(best, best_of(scan, &refined));
        }
        evaluated.extend(refined);
        evaluated.sort_by_key(|&(mp, _)| mp);
    }

    let epsilon_best = if scan.method == Method::HtiLower {
        -best.0
    } else {
        best.0
    };
    Ok(MprimeResult {
        mprime_best: best.1,
        epsilon_best,
        evaluations: evaluated.len() as u64,
        trace: scan.keep_trace.then_some(evaluated),
    })
}

/// [`optimize_mprime`] on a dedicated pool with `threads` workers.
pub fn optimize_mprime_with_threads(scan: &MprimeScan, threads: usize) -> Result<MprimeResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HtiError::ThreadPool(e.to_string()))?;
    pool.install(|| optimize_mprime(scan))
}

/// The rule-of-thumb ghost sample size `4m`.
pub fn heuristic_mprime(m: u64) -> u64 {
    4 * m
}

/// Parameter grid of the gain study.
#[derive(Debug, Clone, PartialEq)]
pub struct GainGrid {
    pub sample_sizes: Vec<u64>,
    pub risks: Vec<f64>,
    pub vc_dims: Vec<u64>,
    pub deltas: Vec<f64>,
}

impl Default for GainGrid {
    fn default() -> Self {
        Self {
            sample_sizes: vec![100, 200, 300, 500, 1000],
            risks: (0..=10).map(|i| i as f64 / 20.0).collect(),
            vc_dims: vec![5, 10, 20, 35],
            deltas: vec![0.0001, 0.0025, 0.05, 0.1],
        }
    }
}

impl GainGrid {
    /// The default grid restricted to zero empirical risk.
    pub fn realizable() -> Self {
        Self {
            risks: vec![0.0],
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.sample_sizes.len() * self.risks.len() * self.vc_dims.len() * self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Options for [`gain_study`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainOptions {
    pub method: Method,
    /// Scan `[1, factor · m]`.
    pub range_factor: u64,
    pub step: u64,
    pub refine: bool,
    /// Explicit `[lo, hi]` replacing `[1, factor · m]`.
    pub range: Option<(u64, u64)>,
}

impl Default for GainOptions {
    fn default() -> Self {
        Self {
            method: Method::Hti,
            range_factor: DEFAULT_RANGE_FACTOR,
            step: 1,
            refine: false,
            range: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainRow {
    pub m: u64,
    pub risk: f64,
    pub errors: u64,
    pub vc_dim: u64,
    pub delta: f64,
    pub mprime_best: u64,
    pub epsilon_best: f64,
    /// The bound at `m' = m`.
    pub epsilon_baseline: f64,
    /// `1 - ε(m'_best) / ε(m)`.
    pub gain: f64,
}

/// Mean and population standard deviation of a set of gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSummary {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
}

impl GainSummary {
    pub fn of(gains: &[f64]) -> Self {
        let count = gains.len();
        if count == 0 {
            return Self {
                count,
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let n = count as f64;
        let mean = gains.iter().sum::<f64>() / n;
        let var = gains.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / n;
        Self {
            count,
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainStudyReport {
    /// One row per grid combination, in grid order (m, risk, d, δ).
    pub rows: Vec<GainRow>,
    pub overall: GainSummary,
    /// Rows with zero errors.
    pub realizable: GainSummary,
}

fn gain_row(m: u64, risk: f64, vc_dim: u64, delta: f64, opts: &GainOptions) -> Result<GainRow> {
    let errors = (m as f64 * risk).round() as u64;
    let log_delta = LogProb::confidence(delta)?;
    let growth = GrowthModel::sauer_shelah(vc_dim)?;
    let (lo, hi) = opts.range.unwrap_or((1, opts.range_factor.max(1) * m));
    let scan = MprimeScan::new(opts.method, errors, m, log_delta, growth)?
        .range(lo, hi)
        .step(opts.step)
        .refine(opts.refine);
    let best = optimize_mprime(&scan)?;
    let baseline = scan.value_at(m)?;
    let gain = if opts.method == Method::HtiLower {
        1.0 - baseline / best.epsilon_best
    } else {
        1.0 - best.epsilon_best / baseline
    };
    Ok(GainRow {
        m,
        risk,
        errors,
        vc_dim,
        delta,
        mprime_best: best.mprime_best,
        epsilon_best: best.epsilon_best,
        epsilon_baseline: baseline,
        gain,
    })
}

/// Relative improvement of the optimized bound over `m' = m` on every
/// combination of the grid.
pub fn gain_study(grid: &GainGrid, opts: &GainOptions) -> Result<GainStudyReport> {
    let mut combos = Vec::with_capacity(grid.len());
    for &m in &grid.sample_sizes {
        for &risk in &grid.risks {
            for &d in &grid.vc_dims {
                for &delta in &grid.deltas {
                    combos.push((m, risk, d, delta));
                }
            }
        }
    }
    let rows: Vec<GainRow> = combos
        .par_iter()
        .map(|&(m, risk, d, delta)| gain_row(m, risk, d, delta, opts))
        .collect::<Result<_>>()?;
    let gains: Vec<f64> = rows.iter().map(|r| r.gain).collect();
    let zero: Vec<f64> = rows
        .iter()
        .filter(|r| r.errors == 0)
        .map(|r| r.gain)
        .collect();
    Ok(GainStudyReport {
        overall: GainSummary::of(&gains),
        realizable: GainSummary::of(&zero),
        rows,
    })
}
