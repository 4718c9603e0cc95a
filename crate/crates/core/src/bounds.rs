//! Generalization bounds on the true risk of a classifier.
//!
//! Every bound takes an integer error count `k` on a sample of size `m`
//! (the empirical risk is `k / m`), a confidence `δ` in log form and a
//! growth model. Values are never clamped to `[0, 1]`; vacuity is reported
//! through [`BoundResult::vacuous`].

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::binomial::bin_tail_inv;
use crate::error::{HtiError, Result};
use crate::growth::GrowthModel;
use crate::hypergeom::{lower_complement_unchecked, upper_inverse_unchecked};
use crate::logprob::LogProb;
use crate::special::{erfcx, log_binom};

const LN_4: f64 = 2.0 * LN_2;

/// Which bound produced a [`BoundResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Hypergeometric tail inversion upper bound.
    Hti,
    /// Relative-deviation variant of the HTI bound.
    HtiRd,
    /// Hypergeometric tail inversion lower bound.
    HtiLower,
    /// HTI bound for margin classifiers with a supplied covering number.
    Margin,
    /// Vapnik's pessimistic bound.
    Vp,
    /// Vapnik's relative deviation bound.
    Vrd,
    /// Lugosi's chaining bound.
    Lugosi,
    /// Catoni's localized bound.
    Catoni,
    /// Sample compression bound through binomial tail inversion.
    SampleCompression,
    /// Langford's binomial tail inversion test bound.
    Langford,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Hti,
        Method::HtiRd,
        Method::HtiLower,
        Method::Margin,
        Method::Vp,
        Method::Vrd,
        Method::Lugosi,
        Method::Catoni,
        Method::SampleCompression,
        Method::Langford,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Hti => "hti",
            Method::HtiRd => "hti-rd",
            Method::HtiLower => "hti-lower",
            Method::Margin => "margin",
            Method::Vp => "vp",
            Method::Vrd => "vrd",
            Method::Lugosi => "lugosi",
            Method::Catoni => "catoni",
            Method::SampleCompression => "sc",
            Method::Langford => "langford",
        }
    }

    /// Whether the bound depends on a ghost (or shadow) sample size.
    pub fn uses_mprime(self) -> bool {
        matches!(
            self,
            Method::Hti | Method::HtiRd | Method::HtiLower | Method::Margin | Method::Catoni
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == lower)
            .or(match lower.as_str() {
                "c46" | "c4.6" => Some(Method::Catoni),
                "compression" => Some(Method::SampleCompression),
                _ => None,
            })
            .ok_or_else(|| {
                let tags: Vec<_> = Method::ALL.iter().map(|m| m.tag()).collect();
                format!("unknown method '{s}' (expected one of {})", tags.join(", "))
            })
    }
}

/// Inputs shared by the ghost-sample bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    /// Number of errors on the sample.
    pub errors: u64,
    /// Sample size.
    pub m: u64,
    /// Ghost sample size `m'`.
    pub mprime: u64,
    pub log_delta: LogProb,
    pub growth: GrowthModel,
}

impl BoundQuery {
    pub fn new(errors: u64, m: u64, mprime: u64, delta: f64, growth: GrowthModel) -> Result<Self> {
        let log_delta = LogProb::confidence(delta)?;
        Self::with_log_delta(errors, m, mprime, log_delta, growth)
    }

    pub fn with_log_delta(
        errors: u64,
        m: u64,
        mprime: u64,
        log_delta: LogProb,
        growth: GrowthModel,
    ) -> Result<Self> {
        if m == 0 {
            return Err(HtiError::EmptySample);
        }
        if errors > m {
            return Err(HtiError::ErrorsExceedSample { errors, m });
        }
        if mprime == 0 {
            return Err(HtiError::EmptyGhostSample);
        }
        log_delta.check_confidence()?;
        Ok(Self {
            errors,
            m,
            mprime,
            log_delta,
            growth,
        })
    }

    pub fn with_mprime(self, mprime: u64) -> Result<Self> {
        Self::with_log_delta(self.errors, self.m, mprime, self.log_delta, self.growth)
    }

    pub fn with_errors(self, errors: u64) -> Result<Self> {
        Self::with_log_delta(errors, self.m, self.mprime, self.log_delta, self.growth)
    }

    pub fn empirical_risk(&self) -> f64 {
        self.errors as f64 / self.m as f64
    }

    fn population(&self) -> u64 {
        self.m + self.mprime
    }

    /// `ln(δ / (4 τ(m + m')))`.
    fn log_threshold(&self) -> f64 {
        self.log_delta.ln() - LN_4 - self.growth.log_growth(self.population())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    /// The bound on the true risk, unclamped.
    pub value: f64,
    /// `value >= 1`.
    pub vacuous: bool,
    /// False only outside a method's stated validity domain.
    pub valid: bool,
    pub method: Method,
    pub mprime_used: Option<u64>,
}

impl BoundResult {
    fn new(method: Method, value: f64, mprime_used: Option<u64>) -> Self {
        Self {
            value,
            vacuous: value >= 1.0,
            valid: true,
            method,
            mprime_used,
        }
    }
}

/// `(1/m') max{1, H̄ - 1 - k}` with `H̄` the upper pseudo-inverse at the given
/// log threshold and population `m + m'`.
fn ghost_epsilon(k: u64, m: u64, mprime: u64, log_threshold: f64) -> f64 {
    if k == m {
        return 1.0;
    }
    let inverse = upper_inverse_unchecked(k, m, log_threshold, m + mprime);
    let excess = (inverse - 1 - k).max(1);
    excess as f64 / mprime as f64
}

/// Hypergeometric tail inversion bound:
/// `ε(k) = (1/m') max{1, H̄(k, m, δ / (4 τ(m + m')), m + m') - 1 - k}`,
/// and `ε(m) = 1`.
pub fn hti_epsilon(q: &BoundQuery) -> BoundResult {
    let value = ghost_epsilon(q.errors, q.m, q.mprime, q.log_threshold());
    BoundResult::new(Method::Hti, value, Some(q.mprime))
}

/// Relative-deviation form of the HTI bound,
/// `R + (η²/2)(1 + √(1 + 4R/η²))`.
///
/// With `u = (H̄ - 1) / (m + m')`,
/// `η = max{1/√m', ((m + m')/m') (u - R) / √u}`; `η = 0` at `k = m`. When
/// `u = 0` the second branch is taken at its limit, 0.
pub fn hti_rd_epsilon(q: &BoundQuery) -> BoundResult {
    let risk = q.empirical_risk();
    if q.errors == q.m {
        return BoundResult::new(Method::HtiRd, risk, Some(q.mprime));
    }
    let population = q.population();
    let inverse = upper_inverse_unchecked(q.errors, q.m, q.log_threshold(), population);
    let u = (inverse - 1) as f64 / population as f64;
    let mprime = q.mprime as f64;
    let deviation = if u > 0.0 {
        (population as f64 / mprime) * (u - risk) / u.sqrt()
    } else {
        0.0
    };
    let eta = (1.0 / mprime.sqrt()).max(deviation);
    let eta2 = eta * eta;
    let value = risk + 0.5 * eta2 * (1.0 + (1.0 + 4.0 * risk / eta2).sqrt());
    BoundResult::new(Method::HtiRd, value, Some(q.mprime))
}

/// Hypergeometric tail inversion lower bound:
/// `ε(k) = (1/m') min{m' - 1, H̲(k - 1, m, 1 - δ/(4τ(m + m')), m + m') + 1 - k}`,
/// and `ε(0) = 0`.
///
/// The level `1 - δ/(4τ)` is never formed; the lower pseudo-inverse is
/// located on the complementary upper tail against `δ/(4τ)` directly.
pub fn hti_lower_epsilon(q: &BoundQuery) -> BoundResult {
    if q.errors == 0 {
        return BoundResult::new(Method::HtiLower, 0.0, Some(q.mprime));
    }
    let population = q.population();
    let inverse = lower_complement_unchecked(q.errors - 1, q.m, q.log_threshold(), population);
    let count = (inverse + 1 - q.errors).min(q.mprime - 1);
    BoundResult::new(
        Method::HtiLower,
        count as f64 / q.mprime as f64,
        Some(q.mprime),
    )
}

/// HTI bound for margin classifiers. `log_cover` is the log of the uniform
/// covering number of the score class at scale `γ / 2^{2 - 1/p}` on
/// `m + m'` points; it takes the place of the log growth function.
pub fn margin_epsilon(
    margin_errors: u64,
    m: u64,
    mprime: u64,
    log_delta: LogProb,
    log_cover: f64,
) -> Result<BoundResult> {
    if !(log_cover.is_finite() && log_cover >= 0.0) {
        return Err(HtiError::InvalidCover(log_cover));
    }
    // validates the remaining arguments; the growth model is unused here
    let q = BoundQuery::with_log_delta(
        margin_errors,
        m,
        mprime,
        log_delta,
        GrowthModel::Constant { class_size: 1 },
    )?;
    let log_threshold = q.log_delta.ln() - LN_4 - log_cover;
    let value = ghost_epsilon(q.errors, q.m, q.mprime, log_threshold);
    Ok(BoundResult::new(Method::Margin, value, Some(mprime)))
}

/// `E(m) = (ln 4τ(2m) - ln δ) / m`.
fn vapnik_complexity(q: &BoundQuery) -> f64 {
    (LN_4 + q.growth.log_growth(2 * q.m) - q.log_delta.ln()) / q.m as f64
}

/// Vapnik's pessimistic bound `R + 1/m + √E(m)`. The ghost sample is fixed
/// at `m`; `q.mprime` is ignored.
pub fn vp_bound(q: &BoundQuery) -> BoundResult {
    let value = q.empirical_risk() + 1.0 / q.m as f64 + vapnik_complexity(q).sqrt();
    BoundResult::new(Method::Vp, value, None)
}

/// Vapnik's relative deviation bound `R + 2E(m)(1 + √(1 + R/E(m)))`.
pub fn vrd_bound(q: &BoundQuery) -> BoundResult {
    let e = vapnik_complexity(q);
    let risk = q.empirical_risk();
    let value = risk + 2.0 * e * (1.0 + (1.0 + risk / e).sqrt());
    BoundResult::new(Method::Vrd, value, None)
}

/// `a = (d + 1)(2 + ln 2) / (2d)` in Lugosi's chaining bound.
pub fn lugosi_exponent(vc_dim: u64) -> f64 {
    let d = vc_dim as f64;
    (d + 1.0) * (2.0 + LN_2) / (2.0 * d)
}

/// Lugosi's chaining bound
/// `R + 24√(2d/m)(√a + (√π/2) e^a (1 - erf √a)) + √(-ln δ / (2m))`.
pub fn lugosi_bound(q: &BoundQuery) -> Result<BoundResult> {
    let vc_dim = q
        .growth
        .vc_dim()
        .ok_or(HtiError::NeedsVcDimension { method: "lugosi" })?;
    let m = q.m as f64;
    let a = lugosi_exponent(vc_dim);
    let root_a = a.sqrt();
    let chain = root_a + 0.5 * PI.sqrt() * erfcx(root_a);
    let value = q.empirical_risk()
        + 24.0 * (2.0 * vc_dim as f64 / m).sqrt() * chain
        + (-q.log_delta.ln() / (2.0 * m)).sqrt();
    Ok(BoundResult::new(Method::Lugosi, value, None))
}

/// Sample size at which Lugosi's chaining bound overtakes Vapnik's
/// pessimistic bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    /// The constant `c` solving `24 √((d+1)(2 + ln 2)) = √(2 (d+1) c)`.
    pub constant: f64,
    /// `log10(m/d)` from `c = ln(4em/d)`, the pessimistic expected-deviation
    /// bound after absorbing `ln 2` into the VC term.
    pub log10_ratio: f64,
    /// `log10(m/d)` from the tighter `c = ln(2em/d)`.
    pub log10_ratio_tight: f64,
}

pub fn lugosi_vp_crossover(vc_dim: u64) -> Crossover {
    // 24² (d+1)(2 + ln 2) = 2 (d+1) c; the (d+1) factors cancel
    let _ = vc_dim;
    let constant = 288.0 * (2.0 + LN_2);
    let ln10 = std::f64::consts::LN_10;
    Crossover {
        constant,
        log10_ratio: (constant - 1.0 - LN_4) / ln10,
        log10_ratio_tight: (constant - 1.0 - LN_2) / ln10,
    }
}

/// Catoni's localized bound with shadow sample size `m'`:
/// `(1 + 2d'/m)^{-1} (R + d'/m + (1/m)√(2d' m R(1-R) + d'²))`,
/// `d' = ((m + m')/m')² (ln τ(m + m') - ln δ)`.
///
/// Only valid when both `R` and the bound are at most 1/2.
pub fn catoni_bound(q: &BoundQuery) -> BoundResult {
    let m = q.m as f64;
    let mprime = q.mprime as f64;
    let risk = q.empirical_risk();
    let ratio = (m + mprime) / mprime;
    let dp = ratio * ratio * (q.growth.log_growth(q.population()) - q.log_delta.ln());
    let radical = (2.0 * dp * m * risk * (1.0 - risk) + dp * dp).sqrt();
    let value = (risk + dp / m + radical / m) / (1.0 + 2.0 * dp / m);
    let mut result = BoundResult::new(Method::Catoni, value, Some(q.mprime));
    result.valid = risk <= 0.5 && value <= 0.5;
    result
}

/// Sample compression bound `B̄in(k, m - d, δ / (m C(m, d)))` for a
/// compression set of size `d` and `k` errors on the sample.
pub fn sc_bound(errors: u64, m: u64, compression: u64, log_delta: LogProb) -> Result<BoundResult> {
    if compression >= m {
        return Err(HtiError::CompressionTooLarge { d: compression, m });
    }
    if errors > m - compression {
        return Err(HtiError::ErrorsExceedSample {
            errors,
            m: m - compression,
        });
    }
    log_delta.check_confidence()?;
    let level = log_delta.scale(-(m as f64).ln() - log_binom(m, compression as i64))?;
    let value = bin_tail_inv(m - compression, errors, level)?;
    Ok(BoundResult::new(Method::SampleCompression, value, None))
}

/// Binomial tail inversion test bound for a single fixed classifier.
pub fn langford_test_bound(errors: u64, m: u64, log_delta: LogProb) -> Result<BoundResult> {
    let value = bin_tail_inv(m, errors, log_delta)?;
    Ok(BoundResult::new(Method::Langford, value, None))
}

/// Closed-form relaxation of the HTI bound through Hoeffding's inequality
/// on the hypergeometric tail:
/// `((m + m')/m') √((ln 4τ(m + m') - ln δ) / (2m)) + k/m`.
pub fn hti_hoeffding_relaxed(q: &BoundQuery) -> f64 {
    let m = q.m as f64;
    let scale = q.population() as f64 / q.mprime as f64;
    scale * (-q.log_threshold() / (2.0 * m)).sqrt() + q.empirical_risk()
}

/// Realizable-case relaxation `(1 + m/m') (1/m) ln(4τ(m + m')/δ)`.
pub fn hti_realizable_relaxed(q: &BoundQuery) -> Result<f64> {
    if q.errors != 0 {
        return Err(HtiError::NotRealizable(q.errors));
    }
    let m = q.m as f64;
    Ok((1.0 + m / q.mprime as f64) * (-q.log_threshold()) / m)
}

/// Evaluates `method` on `q`.
///
/// The sample compression bound uses the VC dimension as compression size;
/// the margin bound uses `ln τ(m + m')` as its log covering number.
pub fn evaluate(method: Method, q: &BoundQuery) -> Result<BoundResult> {
    match method {
        Method::Hti => Ok(hti_epsilon(q)),
        Method::HtiRd => Ok(hti_rd_epsilon(q)),
        Method::HtiLower => Ok(hti_lower_epsilon(q)),
        Method::Margin => margin_epsilon(
            q.errors,
            q.m,
            q.mprime,
            q.log_delta,
            q.growth.log_growth(q.population()),
        ),
        Method::Vp => Ok(vp_bound(q)),
        Method::Vrd => Ok(vrd_bound(q)),
        Method::Lugosi => lugosi_bound(q),
        Method::Catoni => Ok(catoni_bound(q)),
        Method::SampleCompression => {
            let d = q
                .growth
                .vc_dim()
                .ok_or(HtiError::NeedsVcDimension { method: "sc" })?;
            sc_bound(q.errors, q.m, d, q.log_delta)
        }
        Method::Langford => langford_test_bound(q.errors, q.m, q.log_delta),
    }
}
