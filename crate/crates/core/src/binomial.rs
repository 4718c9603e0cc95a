//! Binomial tail `Bin(m, k, p) = Σ_{j<=k} C(m, j) p^j (1-p)^{m-j}` and its
//! inverse in `p`.

use crate::error::{HtiError, Result};
use crate::logprob::LogProb;
use crate::special::{log_binom, CompensatedSum};

const MAX_BISECTIONS: u32 = 60;
const BISECTION_WIDTH: f64 = 1e-13;
const TAIL_CUTOFF: f64 = 1e-17;

/// `ln Bin(m, k, p)`, the log-probability of at most `k` successes.
pub fn bin_tail_log(m: u64, k: u64, p: f64) -> Result<LogProb> {
    if k > m {
        return Err(HtiError::ErrorsExceedSample { errors: k, m });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(HtiError::InvalidProbability(p));
    }
    Ok(LogProb::saturating(bin_tail_ln(m, k, p)))
}

fn term_ln(m: u64, j: u64, ln_p: f64, ln_q: f64) -> f64 {
    log_binom(m, j as i64) + j as f64 * ln_p + (m - j) as f64 * ln_q
}

pub(crate) fn bin_tail_ln(m: u64, k: u64, p: f64) -> f64 {
    if k >= m || p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return f64::NEG_INFINITY;
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let odds = p / (1.0 - p);
    let mode = (((m + 1) as f64) * p).floor() as u64;
    let anchor = mode.min(k);
    let anchor_ln = term_ln(m, anchor, ln_p, ln_q);

    let mut sum = CompensatedSum::new();
    sum.add(1.0);
    let mut term = 1.0;
    let mut j = anchor;
    while j > 0 {
        // t(j-1) / t(j) = j / ((m - j + 1) * odds)
        term *= j as f64 / ((m - j + 1) as f64 * odds);
        j -= 1;
        sum.add(term);
        if term * j as f64 <= TAIL_CUTOFF * sum.value() {
            break;
        }
    }
    let mut term = 1.0;
    let mut j = anchor;
    while j < k {
        term *= (m - j) as f64 * odds / (j + 1) as f64;
        j += 1;
        sum.add(term);
        if term * (k - j) as f64 <= TAIL_CUTOFF * sum.value() {
            break;
        }
    }
    anchor_ln + sum.value().ln()
}

/// `min { p in (0, 1) : Bin(m, k, p) <= δ }`, or exactly 1 when `k = m`.
///
/// The tail is continuous and strictly decreasing in `p`, so this is the
/// root of `Bin(m, k, p) = δ`, found by bisection to an absolute width of
/// `1e-13`. The returned point is the upper end of the final bracket, so
/// `Bin(m, k, result) <= δ` always holds.
pub fn bin_tail_inv(m: u64, k: u64, log_delta: LogProb) -> Result<f64> {
    if k > m {
        return Err(HtiError::ErrorsExceedSample { errors: k, m });
    }
    log_delta.check_confidence()?;
    if k == m {
        return Ok(1.0);
    }
    let target = log_delta.ln();
    let (mut low, mut high) = (0.0f64, 1.0f64);
    for _ in 0..MAX_BISECTIONS {
        if high - low <= BISECTION_WIDTH {
            break;
        }
        let mid = 0.5 * (low + high);
        if bin_tail_ln(m, k, mid) > target {
            low = mid;
        } else {
            high = mid;
        }
    }
    Ok(high)
}
