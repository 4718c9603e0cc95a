//! Hypergeometric probabilities and tail pseudo-inverses.
//!
//! `Hyp(k, m, K, M)` is the probability of drawing at most `k` successes in
//! `m` draws without replacement from a population of `M` items containing
//! `K` successes. The generalization bounds need the smallest `K` that pushes
//! this tail to or below a confidence threshold (the upper pseudo-inverse)
//! and, for the lower bound, the largest `K` keeping it at or above one.
//!
//! Everything is evaluated in log space. Populations small enough for every
//! binomial coefficient to fit in 53 bits take an exact integer path instead,
//! so that a tail exactly equal to the threshold compares as equal.

use crate::error::{HtiError, Result};
use crate::logprob::LogProb;
use crate::special::{log_add, log_binom, log_sum_exp, CompensatedSum};

/// Relative size below which the remaining tail terms are dropped.
const TAIL_CUTOFF: f64 = 1e-17;

/// Populations at or below this size may use exact integer arithmetic.
const EXACT_MAX_POPULATION: u64 = 62;

/// Largest integer that `f64` represents exactly.
const F64_EXACT_INT: u128 = 1 << 53;

/// The four integer arguments of a hypergeometric tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HypParams {
    /// Successes drawn (`k`).
    pub successes_drawn: u64,
    /// Sample size (`m`).
    pub draws: u64,
    /// Successes in the population (`K`).
    pub successes: u64,
    /// Population size (`M`).
    pub population: u64,
}

impl HypParams {
    pub fn new(successes_drawn: u64, draws: u64, successes: u64, population: u64) -> Result<Self> {
        if successes_drawn > draws || draws > population || successes > population {
            return Err(HtiError::InvalidHypParams {
                successes_drawn,
                draws,
                successes,
                population,
            });
        }
        Ok(Self {
            successes_drawn,
            draws,
            successes,
            population,
        })
    }

    fn unpack(&self) -> (u64, u64, u64, u64) {
        (
            self.successes_drawn,
            self.draws,
            self.successes,
            self.population,
        )
    }
}

/// `ln hyp(k, m, K, M)`; `-inf` for impossible configurations.
pub fn hyp_pmf_log(p: &HypParams) -> LogProb {
    let (k, m, big_k, big_m) = p.unpack();
    LogProb::saturating(pmf_ln(k, m, big_k, big_m))
}

/// `ln Hyp(k, m, K, M) = ln Σ_{j<=k} hyp(j, m, K, M)`.
pub fn hyp_tail_log(p: &HypParams) -> LogProb {
    let (k, m, big_k, big_m) = p.unpack();
    LogProb::saturating(tail_ln(k, m, big_k, big_m))
}

/// `ln(1 - Hyp(k, m, K, M))`, the probability of more than `k` successes,
/// evaluated without forming `1 - Hyp`.
pub fn hyp_upper_tail_log(p: &HypParams) -> LogProb {
    let (k, m, big_k, big_m) = p.unpack();
    LogProb::saturating(upper_tail_ln(k, m, big_k, big_m))
}

/// The tail through Berkopec's identity:
/// `Σ_{J=K}^{M-m+k} C(J, k) C(M-J-1, m-k-1) / C(M, m)`.
///
/// Much slower than [`hyp_tail_log`] (one term per population count); it is
/// an independent evaluation route used for cross-checking.
pub fn hyp_tail_berkopec_log(p: &HypParams) -> LogProb {
    let (k, m, big_k, big_m) = p.unpack();
    if k >= m || big_k <= k {
        return LogProb::ONE;
    }
    if big_k > big_m - m + k {
        return LogProb::ZERO;
    }
    let denom = log_binom(big_m, m as i64);
    let terms: Vec<f64> = (big_k..=big_m - m + k)
        .map(|j| log_binom(j, k as i64) + log_binom(big_m - j - 1, (m - k - 1) as i64) - denom)
        .collect();
    LogProb::saturating(log_sum_exp(&terms))
}

fn check_inverse_args(k: u64, m: u64, log_delta: LogProb, big_m: u64) -> Result<()> {
    if m > big_m {
        return Err(HtiError::DrawsExceedPopulation {
            m,
            population: big_m,
        });
    }
    if k >= m {
        return Err(HtiError::InverseUndefined { k, m });
    }
    log_delta.check_confidence()?;
    Ok(())
}

/// Upper pseudo-inverse `min { K : Hyp(k, m, K, M) <= δ }` by discrete
/// bisection on `K`.
///
/// Costs `O(log(M - m))` tail evaluations. The result lies in
/// `(k, M - m + k + 1]`.
pub fn hyp_tail_inv_bisect(k: u64, m: u64, log_delta: LogProb, big_m: u64) -> Result<u64> {
    check_inverse_args(k, m, log_delta, big_m)?;
    Ok(upper_inverse_unchecked(k, m, log_delta.ln(), big_m))
}

pub(crate) fn upper_inverse_unchecked(k: u64, m: u64, log_delta: f64, big_m: u64) -> u64 {
    let mut low = k;
    let mut high = big_m - m + k + 1;
    while high - low > 1 {
        let mid = low + (high - low).div_ceil(2);
        if tail_ln(k, m, mid, big_m) > log_delta {
            low = mid;
        } else {
            high = mid;
        }
    }
    high
}

/// Upper pseudo-inverse by linear search from `K = M - m + k` downwards,
/// adding one Berkopec term per step until the partial sum exceeds `δ`.
///
/// Runs in between `O(1)` and `O(M - m)` steps, so it wins over bisection
/// when the answer sits near the top of the range.
pub fn hyp_tail_inv_linear(k: u64, m: u64, log_delta: LogProb, big_m: u64) -> Result<u64> {
    check_inverse_args(k, m, log_delta, big_m)?;
    let log_delta = log_delta.ln();
    if let Some(denom) = exact_binom_bounded(big_m, m) {
        return Ok(linear_inverse_exact(k, m, log_delta, big_m, denom));
    }

    let log_denom = log_binom(big_m, m as i64);
    let mut big_k = big_m - m + k;
    // C(M-K-1, M-K-m+k) is 1 at the starting point
    let mut term = log_binom(big_k, k as i64) - log_denom;
    let mut partial = term;
    while partial <= log_delta && big_k > k {
        let (kk, kf) = (big_k as f64, k as f64);
        let rest = (big_m - big_k) as f64;
        let gap = (big_m + k + 1 - big_k - m) as f64;
        term += (kk - kf).ln() + rest.ln() - kk.ln() - gap.ln();
        partial = log_add(partial, term);
        big_k -= 1;
    }
    Ok(big_k + 1)
}

fn linear_inverse_exact(k: u64, m: u64, log_delta: f64, big_m: u64, denom: u128) -> u64 {
    let mut big_k = big_m - m + k;
    let mut term = exact_binom(big_k, k);
    let mut partial = term;
    while ratio_ln(partial, denom) <= log_delta && big_k > k {
        let num = term * u128::from(big_k - k) * u128::from(big_m - big_k);
        let den = u128::from(big_k) * u128::from(big_m + k + 1 - big_k - m);
        term = num / den;
        partial += term;
        big_k -= 1;
    }
    big_k + 1
}

/// Lower pseudo-inverse `max { K : Hyp(k, m, K, M) >= δ }`.
///
/// Defined for every `0 <= k <= m` because `Hyp(k, m, 0, M) = 1`; for
/// `k = m` the tail is one everywhere and the answer is `M`.
pub fn hyp_tail_lower_inv(k: u64, m: u64, log_delta: LogProb, big_m: u64) -> Result<u64> {
    if k > m {
        return Err(HtiError::ErrorsExceedSample { errors: k, m });
    }
    if m > big_m {
        return Err(HtiError::DrawsExceedPopulation {
            m,
            population: big_m,
        });
    }
    log_delta.check_confidence()?;
    if k == m {
        return Ok(big_m);
    }
    // Hyp(K <= k) = 1 >= δ and Hyp(M - m + k + 1) = 0 < δ
    let mut low = k;
    let mut high = big_m - m + k + 1;
    while high - low > 1 {
        let mid = low + (high - low) / 2;
        if tail_ln(k, m, mid, big_m) >= log_delta.ln() {
            low = mid;
        } else {
            high = mid;
        }
    }
    Ok(low)
}

/// `max { K : Hyp(k, m, K, M) >= 1 - ε }` for a tiny `ε` given as `ln ε`.
///
/// The condition is tested as `1 - Hyp <= ε` on the upper tail, so the
/// answer stays exact even when `1 - ε` rounds to one.
pub fn hyp_tail_lower_inv_complement(
    k: u64,
    m: u64,
    log_epsilon: LogProb,
    big_m: u64,
) -> Result<u64> {
    if k > m {
        return Err(HtiError::ErrorsExceedSample { errors: k, m });
    }
    if m > big_m {
        return Err(HtiError::DrawsExceedPopulation {
            m,
            population: big_m,
        });
    }
    log_epsilon.check_confidence()?;
    Ok(lower_complement_unchecked(k, m, log_epsilon.ln(), big_m))
}

pub(crate) fn lower_complement_unchecked(k: u64, m: u64, log_epsilon: f64, big_m: u64) -> u64 {
    if k >= m {
        return big_m;
    }
    let mut low = k;
    let mut high = big_m - m + k + 1;
    while high - low > 1 {
        let mid = low + (high - low) / 2;
        if upper_tail_ln(k, m, mid, big_m) <= log_epsilon {
            low = mid;
        } else {
            high = mid;
        }
    }
    low
}

pub(crate) fn pmf_ln(k: u64, m: u64, big_k: u64, big_m: u64) -> f64 {
    if k > m || k > big_k || m - k > big_m - big_k {
        return f64::NEG_INFINITY;
    }
    log_binom(big_k, k as i64) + log_binom(big_m - big_k, (m - k) as i64)
        - log_binom(big_m, m as i64)
}

pub(crate) fn upper_tail_ln(k: u64, m: u64, big_k: u64, big_m: u64) -> f64 {
    if k >= m {
        return f64::NEG_INFINITY;
    }
    // m - X counts the failures drawn, itself hypergeometric with M - K successes
    tail_ln(m - k - 1, m, big_m - big_k, big_m)
}

/// Unchecked lower tail; callers guarantee `k <= m <= M`, `K <= M`.
pub(crate) fn tail_ln(k: u64, m: u64, big_k: u64, big_m: u64) -> f64 {
    if k >= m || big_k <= k {
        return 0.0;
    }
    let support_low = (m + big_k).saturating_sub(big_m);
    if k < support_low {
        return f64::NEG_INFINITY;
    }
    if let Some(denom) = exact_binom_bounded(big_m, m) {
        let mut num: u128 = 0;
        for j in support_low..=k {
            num += exact_binom(big_k, j) * exact_binom(big_m - big_k, m - j);
        }
        return ratio_ln(num, denom).min(0.0);
    }

    // Terms are unimodal in j; anchor at the largest one inside [support_low, k]
    // and walk outwards with the term ratios.
    let mode = ((u128::from(m) + 1) * (u128::from(big_k) + 1) / (u128::from(big_m) + 2)) as u64;
    let anchor = mode.clamp(support_low, k);
    let anchor_ln = pmf_ln(anchor, m, big_k, big_m);
    let fail = big_m - big_k;

    let mut sum = CompensatedSum::new();
    sum.add(1.0);

    let mut term = 1.0;
    let mut j = anchor;
    while j > support_low {
        let jf = j as f64;
        term *= jf * (fail + j - m) as f64 / ((big_k - j + 1) as f64 * (m - j + 1) as f64);
        j -= 1;
        sum.add(term);
        if term * ((j - support_low) as f64) <= TAIL_CUTOFF * sum.value() {
            break;
        }
    }

    let mut term = 1.0;
    let mut j = anchor;
    while j < k {
        term *= (big_k - j) as f64 * (m - j) as f64 / ((j + 1) as f64 * (fail + j + 1 - m) as f64);
        j += 1;
        sum.add(term);
        if term * ((k - j) as f64) <= TAIL_CUTOFF * sum.value() {
            break;
        }
    }

    (anchor_ln + sum.value().ln()).min(0.0)
}

fn ratio_ln(num: u128, denom: u128) -> f64 {
    // both sides are below 2^53, so the quotient is correctly rounded
    (num as f64 / denom as f64).ln()
}

fn exact_binom(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut c: u128 = 1;
    for i in 0..r {
        c = c * u128::from(n - i) / u128::from(i + 1);
    }
    c
}

/// `C(n, r)` when `n` is small and the coefficient is below 2^53.
fn exact_binom_bounded(n: u64, r: u64) -> Option<u128> {
    if n > EXACT_MAX_POPULATION {
        return None;
    }
    let c = exact_binom(n, r);
    (c <= F64_EXACT_INT).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(k: u64, m: u64, big_k: u64, big_m: u64) -> HypParams {
        HypParams::new(k, m, big_k, big_m).unwrap()
    }

    fn ld(delta: f64) -> LogProb {
        LogProb::confidence(delta).unwrap()
    }

    #[test]
    fn params_reject_bad_orderings() {
        assert!(HypParams::new(3, 2, 1, 5).is_err());
        assert!(HypParams::new(0, 6, 1, 5).is_err());
        assert!(HypParams::new(0, 2, 6, 5).is_err());
    }

    #[test]
    fn pmf_examples() {
        assert!((hyp_pmf_log(&hp(1, 2, 2, 4)).ln() - (2.0f64 / 3.0).ln()).abs() < 1e-15);
        assert_eq!(hyp_pmf_log(&hp(0, 3, 0, 5)).ln(), 0.0);
        assert!(hyp_pmf_log(&HypParams {
            successes_drawn: 3,
            draws: 2,
            successes: 3,
            population: 5
        })
        .is_zero());
    }

    #[test]
    fn tail_examples() {
        assert!((hyp_tail_log(&hp(1, 2, 2, 4)).ln() - (5.0f64 / 6.0).ln()).abs() < 1e-15);
        assert!(hyp_tail_log(&hp(2, 5, 2, 9)).is_one());
        assert!(hyp_tail_log(&hp(1, 3, 3, 3)).is_zero());
        assert!(hyp_tail_log(&hp(4, 4, 2, 9)).is_one());
    }

    #[test]
    fn berkopec_examples() {
        let b = hyp_tail_berkopec_log(&hp(1, 2, 2, 4));
        assert!((b.ln() - (5.0f64 / 6.0).ln()).abs() < 1e-15);
        assert!(hyp_tail_berkopec_log(&hp(0, 7, 0, 12)).ln().abs() < 1e-15);
    }

    #[test]
    fn large_population_tail_matches_berkopec() {
        for &(k, m, big_k, big_m) in &[
            (3u64, 20u64, 10u64, 400u64),
            (0, 1000, 40, 4611),
            (57, 565, 200, 40000),
            (800, 1000, 11000, 13851),
        ] {
            let p = hp(k, m, big_k, big_m);
            let a = hyp_tail_log(&p).ln();
            let b = hyp_tail_berkopec_log(&p).ln();
            assert!(
                (a - b).abs() <= 1e-10 * a.abs().max(1.0),
                "{p:?}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn upper_tail_is_complement() {
        for big_k in 0..=40u64 {
            let p = hp(5, 17, big_k, 40);
            let lower = hyp_tail_log(&p).prob();
            let upper = hyp_upper_tail_log(&p).prob();
            assert!((lower + upper - 1.0).abs() < 1e-14);
        }
        let deep = hyp_upper_tail_log(&hp(0, 1000, 1, 5000));
        assert!((deep.prob() - 0.2).abs() < 1e-11);
    }

    #[test]
    fn bisection_examples() {
        assert_eq!(hyp_tail_inv_bisect(0, 2, ld(0.2), 4).unwrap(), 2);
        assert_eq!(hyp_tail_inv_bisect(0, 2, ld(0.999), 4).unwrap(), 1);
        assert!(matches!(
            hyp_tail_inv_bisect(2, 2, ld(0.2), 4),
            Err(HtiError::InverseUndefined { .. })
        ));
        assert!(hyp_tail_inv_bisect(0, 2, LogProb::ONE, 4).is_err());
    }

    #[test]
    fn linear_agrees_with_bisection() {
        assert_eq!(hyp_tail_inv_linear(0, 2, ld(0.2), 4).unwrap(), 2);
        for &(k, m, delta, big_m) in &[
            (3u64, 20u64, 0.05, 40u64),
            (3, 20, 0.05, 400),
            (0, 1000, 1e-40, 5000),
            (12, 300, 1e-9, 2000),
        ] {
            let a = hyp_tail_inv_linear(k, m, ld(delta), big_m).unwrap();
            let b = hyp_tail_inv_bisect(k, m, ld(delta), big_m).unwrap();
            assert_eq!(a, b, "k={k} m={m} delta={delta} M={big_m}");
        }
    }

    #[test]
    fn lower_inverse_examples() {
        // Hyp(0,2,1,4) = 1/2 >= 0.2 but Hyp(0,2,2,4) = 1/6 < 0.2
        assert_eq!(hyp_tail_lower_inv(0, 2, ld(0.2), 4).unwrap(), 1);
        assert_eq!(hyp_tail_lower_inv(3, 3, ld(0.2), 10).unwrap(), 10);
        let up = hyp_tail_inv_bisect(3, 20, ld(0.05), 40).unwrap();
        let low = hyp_tail_lower_inv(3, 20, ld(0.05), 40).unwrap();
        assert!(up - low <= 1);
    }

    #[test]
    fn lower_complement_handles_underflowing_epsilon() {
        let eps = LogProb::new(-900.0).unwrap();
        let got = hyp_tail_lower_inv_complement(10, 100, eps, 1000).unwrap();
        // 1 - Hyp(10, 100, K, 1000) <= e^-900 only for K far below k's share
        assert!(got >= 10);
        assert!(upper_tail_ln(10, 100, got, 1000) <= -900.0);
        assert!(upper_tail_ln(10, 100, got + 1, 1000) > -900.0);
    }
}
