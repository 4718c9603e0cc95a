//! Parameter sweeps producing one CSV row per grid point.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bounds::{evaluate, BoundQuery, BoundResult, Method};
use crate::error::{HtiError, Result};
use crate::growth::GrowthModel;
use crate::logprob::LogProb;
use crate::mprime::{optimize_mprime, MprimeScan, DEFAULT_RANGE_FACTOR};

/// Above this many points an `@opt` scan switches to a strided scan
/// refined around its coarse optimum.
pub const OPT_EXHAUSTIVE_LIMIT: u64 = 20_000;

/// The swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vary {
    Risk,
    M,
    D,
    Mprime,
}

impl FromStr for Vary {
    type Err = HtiError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "risk" => Ok(Vary::Risk),
            "m" => Ok(Vary::M),
            "d" => Ok(Vary::D),
            "mprime" | "m'" => Ok(Vary::Mprime),
            _ => Err(HtiError::InvalidGrid(format!(
                "unknown sweep parameter '{s}' (expected risk, m, d or mprime)"
            ))),
        }
    }
}

impl Vary {
    fn integral(self) -> bool {
        self != Vary::Risk
    }
}

/// Parses a grid: `a,b,c`, `lo:hi:step` or `log:lo:hi:n`.
///
/// Integral grids are rounded to the nearest integer and deduplicated.
/// The result is strictly increasing and non-empty.
pub fn parse_grid(spec: &str, integral: bool) -> Result<Vec<f64>> {
    let bad = |why: &str| HtiError::InvalidGrid(format!("'{spec}': {why}"));
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(&format!("'{s}' is not a number")))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let mut values: Vec<f64> = match parts.as_slice() {
        ["log", lo, hi, n] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| bad("point count must be an integer"))?;
            if !(lo > 0.0 && hi >= lo) || n == 0 {
                return Err(bad("need 0 < lo <= hi and at least one point"));
            }
            if n == 1 {
                vec![lo]
            } else {
                let (a, b) = (lo.ln(), hi.ln());
                (0..n)
                    .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
        }
        [lo, hi, step] => {
            let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
            if step <= 0.0 || hi < lo {
                return Err(bad("need lo <= hi and a positive step"));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize;
            // twelve significant decimals hide the drift of lo + i * step
            (0..=count)
                .map(|i| round_decimals(lo + i as f64 * step, 12))
                .collect()
        }
        [list] => list.split(',').map(num).collect::<Result<_>>()?,
        _ => return Err(bad("expected a list, lo:hi:step or log:lo:hi:n")),
    };
    if integral {
        for v in values.iter_mut() {
            *v = v.round();
        }
        values.dedup();
    }
    if values.is_empty() {
        return Err(bad("grid is empty"));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("grid must be strictly increasing"));
    }
    Ok(values)
}

fn round_decimals(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (x * scale).round() / scale
}

/// How a method's ghost sample size is chosen at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MprimeChoice {
    Fixed(u64),
    /// A multiple of `m`.
    TimesM(u64),
    /// Optimized over `[1, 128m]`; Catoni scans multiples of `m` only.
    Optimized,
}

/// A method tag with an optional `@choice` suffix: `hti@opt`, `hti@6970`,
/// `catoni@m`, `hti-rd@4m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodSpec {
    pub method: Method,
    pub mprime: MprimeChoice,
}

impl FromStr for MethodSpec {
    type Err = HtiError;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, choice) = match s.split_once('@') {
            Some((t, c)) => (t, Some(c)),
            None => (s, None),
        };
        let method: Method = tag.parse().map_err(HtiError::InvalidGrid)?;
        let bad = || HtiError::InvalidGrid(format!("bad m' choice in '{s}'"));
        let mprime = match choice.map(str::trim) {
            None => match method {
                Method::Hti | Method::HtiRd | Method::HtiLower | Method::Catoni => {
                    MprimeChoice::Optimized
                }
                _ => MprimeChoice::TimesM(4),
            },
            Some("opt") => MprimeChoice::Optimized,
            Some("m") => MprimeChoice::TimesM(1),
            Some(c) if c.ends_with('m') => {
                MprimeChoice::TimesM(c[..c.len() - 1].parse().map_err(|_| bad())?)
            }
            Some(c) => MprimeChoice::Fixed(c.parse().map_err(|_| bad())?),
        };
        if matches!(mprime, MprimeChoice::Fixed(0) | MprimeChoice::TimesM(0)) {
            return Err(bad());
        }
        Ok(Self { method, mprime })
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mprime {
            MprimeChoice::Fixed(n) => write!(f, "{}@{n}", self.method),
            MprimeChoice::TimesM(1) => write!(f, "{}@m", self.method),
            MprimeChoice::TimesM(c) => write!(f, "{}@{c}m", self.method),
            MprimeChoice::Optimized => write!(f, "{}@opt", self.method),
        }
    }
}

/// Empirical error given as a count or as a risk rounded to a count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorSpec {
    Count(u64),
    Risk(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthSpec {
    VcDim(u64),
    ClassSize(u64),
}

impl GrowthSpec {
    fn model(self) -> Result<GrowthModel> {
        match self {
            GrowthSpec::VcDim(d) => GrowthModel::sauer_shelah(d),
            GrowthSpec::ClassSize(n) => GrowthModel::constant(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub vary: Vary,
    pub grid: Vec<f64>,
    pub m: u64,
    pub errors: ErrorSpec,
    pub growth: GrowthSpec,
    pub delta: f64,
    pub methods: Vec<MethodSpec>,
}

/// The CSV produced by a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Grid points whose risk did not map to an integral error count.
    pub warnings: Vec<String>,
}

/// Rounds `m · risk` to an error count, with a warning when it is not
/// already integral.
pub fn errors_for_risk(m: u64, risk: f64) -> Result<(u64, Option<String>)> {
    if !(0.0..=1.0).contains(&risk) {
        return Err(HtiError::InvalidProbability(risk));
    }
    let exact = m as f64 * risk;
    let k = exact.round();
    let warning = ((exact - k).abs() > 1e-9 * exact.max(1.0))
        .then(|| format!("risk {risk} at m={m} gives {exact} errors; rounded to k={k}"));
    Ok((k as u64, warning))
}

struct Point {
    m: u64,
    errors: u64,
    growth: GrowthSpec,
    mprime: Option<u64>,
}

fn resolve_mprime(spec: MethodSpec, q: &BoundQuery) -> Result<u64> {
    match spec.mprime {
        MprimeChoice::Fixed(n) => Ok(n),
        MprimeChoice::TimesM(c) => Ok(c * q.m),
        MprimeChoice::Optimized => {
            let hi = DEFAULT_RANGE_FACTOR * q.m;
            let step = hi.div_ceil(OPT_EXHAUSTIVE_LIMIT).max(1);
            let catoni = spec.method == Method::Catoni;
            let scan = MprimeScan::new(spec.method, q.errors, q.m, q.log_delta, q.growth)?
                .range(1, hi)
                .step(if catoni { 1 } else { step })
                .refine(step > 1)
                .catoni_multiples(catoni);
            Ok(optimize_mprime(&scan)?.mprime_best)
        }
    }
}

fn evaluate_spec(spec: MethodSpec, point: &Point, log_delta: LogProb) -> Result<BoundResult> {
    let growth = point.growth.model()?;
    let q = BoundQuery::with_log_delta(point.errors, point.m, 1, log_delta, growth)?;
    if !spec.method.uses_mprime() {
        return evaluate(spec.method, &q);
    }
    let mprime = match point.mprime {
        Some(mp) => mp,
        None => resolve_mprime(spec, &q)?,
    };
    evaluate(spec.method, &q.with_mprime(mprime)?)
}

/// Evaluates every method at every grid point.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    if spec.grid.is_empty() {
        return Err(HtiError::InvalidGrid("grid is empty".into()));
    }
    let log_delta = LogProb::confidence(spec.delta)?;
    if spec.vary == Vary::D && matches!(spec.growth, GrowthSpec::ClassSize(_)) {
        return Err(HtiError::InvalidGrid(
            "sweeping d needs a VC dimension".into(),
        ));
    }

    let mut warnings = Vec::new();
    let mut points = Vec::with_capacity(spec.grid.len());
    for &v in &spec.grid {
        if spec.vary.integral() && (v < 1.0 || v.fract() != 0.0) {
            return Err(HtiError::InvalidGrid(format!(
                "{v} is not a positive integer"
            )));
        }
        let m = if spec.vary == Vary::M {
            v as u64
        } else {
            spec.m
        };
        let risk = match (spec.vary, spec.errors) {
            (Vary::Risk, _) => Some(v),
            (_, ErrorSpec::Risk(r)) => Some(r),
            (_, ErrorSpec::Count(_)) => None,
        };
        let errors = match (risk, spec.errors) {
            (Some(r), _) => {
                let (k, warning) = errors_for_risk(m, r)?;
                warnings.extend(warning);
                k
            }
            (None, ErrorSpec::Count(k)) => k,
            (None, ErrorSpec::Risk(_)) => unreachable!("risk is always resolved above"),
        };
        let growth = if spec.vary == Vary::D {
            GrowthSpec::VcDim(v as u64)
        } else {
            spec.growth
        };
        let mprime = (spec.vary == Vary::Mprime).then_some(v as u64);
        points.push(Point {
            m,
            errors,
            growth,
            mprime,
        });
    }

    let vary_m = spec.vary == Vary::M;
    let results: Vec<Vec<BoundResult>> = points
        .par_iter()
        .map(|p| {
            spec.methods
                .iter()
                .map(|&ms| evaluate_spec(ms, p, log_delta))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut header: Vec<String> = ["m", "errors", "risk", "d", "class_size", "delta", "mprime"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for ms in &spec.methods {
        let tag = ms.to_string();
        for col in ["value", "vacuous", "valid", "mprime_used"] {
            header.push(format!("{tag}_{col}"));
        }
    }
    if vary_m {
        header.push("rate_ref".into());
    }

    let rows = points
        .iter()
        .zip(&results)
        .map(|(p, res)| {
            let (d, n) = match p.growth {
                GrowthSpec::VcDim(d) => (d.to_string(), String::new()),
                GrowthSpec::ClassSize(n) => (String::new(), n.to_string()),
            };
            let mut row = vec![
                p.m.to_string(),
                p.errors.to_string(),
                (p.errors as f64 / p.m as f64).to_string(),
                d,
                n,
                spec.delta.to_string(),
                p.mprime.map(|x| x.to_string()).unwrap_or_default(),
            ];
            for r in res {
                row.push(r.value.to_string());
                row.push(r.vacuous.to_string());
                row.push(r.valid.to_string());
                row.push(r.mprime_used.map(|x| x.to_string()).unwrap_or_default());
            }
            if vary_m {
                let rate = match p.growth {
                    GrowthSpec::VcDim(d) => (d as f64 / p.m as f64).sqrt().to_string(),
                    GrowthSpec::ClassSize(_) => String::new(),
                };
                row.push(rate);
            }
            row
        })
        .collect();

    Ok(SweepTable {
        header,
        rows,
        warnings,
    })
}
