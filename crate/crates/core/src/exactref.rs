//! Exact rational reference values for small hypergeometric instances.
//!
//! This is a test oracle: every quantity is computed with arbitrary-precision
//! integers, so nothing here is fast and populations are capped.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{HtiError, Result};
use crate::hypergeom::HypParams;

pub const DEFAULT_CAP: u64 = 256;

/// Exact `C(n, r)`; zero when `r < 0` or `r > n`.
pub fn exact_binom(n: u64, r: i64) -> BigUint {
    if r < 0 || r as u64 > n {
        return BigUint::zero();
    }
    let r = (r as u64).min(n - r as u64);
    // each prefix product C(n - r + i, i) is an integer, so the division is exact
    let mut acc = BigUint::one();
    for i in 1..=r {
        acc *= n - r + i;
        acc /= i;
    }
    acc
}

/// Exact evaluator refusing populations above `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub cap: u64,
}

impl Default for Oracle {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP }
    }
}

fn ratio(num: BigUint, den: &BigUint) -> BigRational {
    BigRational::new(num.into(), den.clone().into())
}

impl Oracle {
    pub fn new(cap: u64) -> Self {
        Self { cap }
    }

    fn check(&self, population: u64) -> Result<()> {
        if population > self.cap {
            return Err(HtiError::AboveOracleCap {
                population,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// `hyp(k, m, K, M) = C(K, k) C(M - K, m - k) / C(M, m)`.
    pub fn pmf(&self, p: &HypParams) -> Result<BigRational> {
        self.check(p.population)?;
        Ok(self.pmf_unchecked(p.successes_drawn, p.draws, p.successes, p.population))
    }

    fn pmf_unchecked(&self, k: u64, m: u64, big_k: u64, big_m: u64) -> BigRational {
        if k > m || k > big_k || m - k > big_m - big_k {
            return BigRational::zero();
        }
        let num = exact_binom(big_k, k as i64) * exact_binom(big_m - big_k, (m - k) as i64);
        ratio(num, &exact_binom(big_m, m as i64))
    }

    /// `Σ_{j<=k} C(K, j) C(M - K, m - j) / C(M, m)`.
    pub fn tail(&self, p: &HypParams) -> Result<BigRational> {
        self.check(p.population)?;
        let (k, m, big_k, big_m) = (p.successes_drawn, p.draws, p.successes, p.population);
        Ok(tail_by_counts(k, m, big_k, big_m))
    }

    /// The same tail through Berkopec's identity
    /// `Σ_{J=K}^{M-m+k} C(J, k) C(M - J - 1, m - k - 1) / C(M, m)`.
    pub fn tail_berkopec(&self, p: &HypParams) -> Result<BigRational> {
        self.check(p.population)?;
        let (k, m, big_k, big_m) = (p.successes_drawn, p.draws, p.successes, p.population);
        if k >= m || big_k <= k {
            return Ok(BigRational::one());
        }
        let mut num = BigUint::zero();
        if big_k <= big_m - m + k {
            for j in big_k..=big_m - m + k {
                num += exact_binom(j, k as i64) * exact_binom(big_m - j - 1, (m - k - 1) as i64);
            }
        }
        Ok(ratio(num, &exact_binom(big_m, m as i64)))
    }

    /// Minimal `K` in `(k, M - m + k + 1]` with tail at most `δ`, by a
    /// linear scan from the bottom.
    pub fn tail_inv(&self, k: u64, m: u64, delta: &BigRational, big_m: u64) -> Result<u64> {
        self.check(big_m)?;
        if m > big_m {
            return Err(HtiError::DrawsExceedPopulation {
                m,
                population: big_m,
            });
        }
        if k >= m {
            return Err(HtiError::InverseUndefined { k, m });
        }
        if !(*delta > BigRational::zero() && *delta < BigRational::one()) {
            return Err(HtiError::InvalidConfidence(f64::NAN));
        }
        let top = big_m - m + k + 1;
        Ok((k + 1..=top)
            .find(|&big_k| tail_by_counts(k, m, big_k, big_m) <= *delta)
            .unwrap_or(top))
    }
}

fn tail_by_counts(k: u64, m: u64, big_k: u64, big_m: u64) -> BigRational {
    let upper = k.min(m).min(big_k);
    let mut num = BigUint::zero();
    for j in 0..=upper {
        if m - j <= big_m - big_k {
            num += exact_binom(big_k, j as i64) * exact_binom(big_m - big_k, (m - j) as i64);
        }
    }
    ratio(num, &exact_binom(big_m, m as i64))
}

/// Free-function form of [`Oracle::tail`] with the default cap.
pub fn exact_hyp_tail(p: &HypParams) -> Result<BigRational> {
    Oracle::default().tail(p)
}

/// Free-function form of [`Oracle::tail_inv`] with the default cap.
pub fn exact_hyp_tail_inv(k: u64, m: u64, delta: &BigRational, big_m: u64) -> Result<u64> {
    Oracle::default().tail_inv(k, m, delta, big_m)
}

/// Lossy conversion used when comparing against floating-point routes.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
