//! Grid checks shared by the property tests and the acceptance runner.
//!
//! Each check returns `Ok(summary)` or `Err(first counterexample)`.

#![allow(dead_code)]

use hti_core::exactref::Oracle;
use hti_core::hypergeom::hyp_pmf_log;
use hti_core::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub type Check = std::result::Result<String, String>;

pub const DELTAS: [f64; 4] = [0.9, 0.5, 0.1, 0.01];

pub fn ld(delta: f64) -> LogProb {
    LogProb::confidence(delta).unwrap()
}

pub fn hp(k: u64, m: u64, big_k: u64, big_m: u64) -> HypParams {
    HypParams::new(k, m, big_k, big_m).unwrap()
}

/// The decimal a short literal such as `0.01` stands for, as a rational.
pub fn rational(p: f64) -> BigRational {
    let scale = 1_000_000i64;
    BigRational::new(
        BigInt::from((p * scale as f64).round() as i64),
        BigInt::from(scale),
    )
}

/// `ln` of a non-negative rational, through its numerator and denominator.
pub fn rational_ln(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    let ln_big = |b: &BigInt| {
        let bits = b.bits();
        let shift = bits.saturating_sub(60);
        (b >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    };
    ln_big(r.numer()) - ln_big(r.denom())
}

/// Exact tails `Hyp(k, m, K, M)` for every `M <= max`, indexed
/// `[M][m][K][k]`.
pub struct ExactTable {
    pub max: u64,
    tails: Vec<Vec<Vec<Vec<BigRational>>>>,
}

impl ExactTable {
    pub fn build(max: u64) -> Self {
        let oracle = Oracle::new(max);
        let tails = (0..=max)
            .map(|big_m| {
                (0..=big_m)
                    .map(|m| {
                        (0..=big_m)
                            .map(|big_k| {
                                let mut acc = BigRational::zero();
                                (0..=m)
                                    .map(|k| {
                                        acc += oracle.pmf(&hp(k, m, big_k, big_m)).unwrap();
                                        acc.clone()
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { max, tails }
    }

    pub fn tail(&self, k: u64, m: u64, big_k: u64, big_m: u64) -> &BigRational {
        &self.tails[big_m as usize][m as usize][big_k as usize][k as usize]
    }

    /// Every valid `(k, m, K, M)`.
    pub fn params(&self) -> impl Iterator<Item = (u64, u64, u64, u64)> + '_ {
        (0..=self.max).flat_map(|big_m| {
            (0..=big_m).flat_map(move |m| {
                (0..=big_m).flat_map(move |big_k| (0..=m).map(move |k| (k, m, big_k, big_m)))
            })
        })
    }
}

/// Bisection, linear search and the exact brute-force scan return the same
/// upper pseudo-inverse for every `M <= max` and every `δ` in [`DELTAS`].
pub fn oracle_inverse_equivalence(max: u64) -> Check {
    let oracle = Oracle::new(max);
    let mut cases = 0;
    for big_m in 1..=max {
        for m in 1..=big_m {
            for k in 0..m {
                for delta in DELTAS {
                    let b = hyp_tail_inv_bisect(k, m, ld(delta), big_m).unwrap();
                    let l = hyp_tail_inv_linear(k, m, ld(delta), big_m).unwrap();
                    let e = oracle.tail_inv(k, m, &rational(delta), big_m).unwrap();
                    if b != l || b != e {
                        return Err(format!(
                            "k={k} m={m} M={big_m} δ={delta}: bisect {b}, linear {l}, exact {e}"
                        ));
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} inversions agree"))
}

/// `hyp_tail_log` against exact rationals, relative error in probability
/// space. Exhaustive up to `full`, then every `stride`-th parameter of a
/// few populations up to 200.
pub fn float_vs_exact(full: u64, stride: u64) -> Check {
    let oracle = Oracle::new(200);
    let mut worst = 0.0f64;
    let mut cases = 0;
    let mut check = |k: u64, m: u64, big_k: u64, big_m: u64| -> std::result::Result<(), String> {
        let p = hp(k, m, big_k, big_m);
        let exact = oracle.tail(&p).unwrap();
        let got = hyp_tail_log(&p).ln();
        let want = rational_ln(&exact);
        let rel = if want == f64::NEG_INFINITY {
            if got == want {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (got - want).exp_m1().abs()
        };
        worst = worst.max(rel);
        cases += 1;
        if rel > 1e-10 {
            return Err(format!(
                "k={k} m={m} K={big_k} M={big_m}: relative error {rel:e}"
            ));
        }
        Ok(())
    };
    for big_m in 1..=full {
        for m in 0..=big_m {
            for big_k in 0..=big_m {
                for k in 0..=m {
                    check(k, m, big_k, big_m)?;
                }
            }
        }
    }
    for big_m in [60u64, 101, 150, 200] {
        for m in (1..=big_m).step_by(stride as usize) {
            for big_k in (0..=big_m).step_by(stride as usize) {
                for k in (0..=m).step_by(3) {
                    check(k, m, big_k, big_m)?;
                }
            }
        }
    }
    Ok(format!("{cases} tails, worst relative error {worst:.2e}"))
}

/// Tail monotonicity in all four arguments, strict under
/// `0 <= k < min(m, K)` and `m - k <= M - K`, on exact values.
pub fn tail_monotonicity(t: &ExactTable) -> Check {
    let mut cases = 0;
    for (k, m, big_k, big_m) in t.params() {
        let here = t.tail(k, m, big_k, big_m);
        let strict = k < m.min(big_k) && m - k <= big_m - big_k;
        let mut cmp = |name: &str, next: &BigRational, increasing: bool| {
            let ok = if increasing {
                next > here || (!strict && next == here)
            } else {
                next < here || (!strict && next == here)
            };
            cases += 1;
            if ok {
                Ok(())
            } else {
                Err(format!("{name} at k={k} m={m} K={big_k} M={big_m}"))
            }
        };
        if k < m {
            cmp("k", t.tail(k + 1, m, big_k, big_m), true)?;
        }
        if m < big_m {
            cmp("m", t.tail(k, m + 1, big_k, big_m), false)?;
        }
        if big_k < big_m {
            cmp("K", t.tail(k, m, big_k + 1, big_m), false)?;
        }
        if big_m < t.max {
            cmp("M", t.tail(k, m, big_k, big_m + 1), true)?;
        }
    }
    Ok(format!("{cases} neighbouring pairs ordered"))
}

/// `Hyp(k, m, K, M) = Hyp(k, K, m, M)`, exactly and in floating point.
pub fn tail_symmetry(t: &ExactTable) -> Check {
    let mut cases = 0;
    for (k, m, big_k, big_m) in t.params() {
        if k > big_k {
            continue;
        }
        let (a, b) = (t.tail(k, m, big_k, big_m), t.tail(k, big_k, m, big_m));
        if a != b {
            return Err(format!("exact: k={k} m={m} K={big_k} M={big_m}"));
        }
        let fa = hyp_tail_log(&hp(k, m, big_k, big_m)).ln();
        let fb = hyp_tail_log(&hp(k, big_k, m, big_m)).ln();
        if !(fa == fb || (fa - fb).abs() <= 1e-12) {
            return Err(format!(
                "float: k={k} m={m} K={big_k} M={big_m}: {fa} vs {fb}"
            ));
        }
        cases += 1;
    }
    Ok(format!("{cases} swaps"))
}

/// `Hyp(k, m, K, M+1) = (m/(M+1)) Hyp(k, m-1, K, M) + ((M+1-m)/(M+1)) Hyp(k, m, K, M)`.
pub fn pascal_decomposition(max: u64) -> Check {
    let mut cases = 0;
    for big_m in 1..=max {
        for m in 1..=big_m {
            for big_k in 0..=big_m {
                for k in 0..m {
                    let lhs = hyp_tail_log(&hp(k, m, big_k, big_m + 1)).prob();
                    let n = (big_m + 1) as f64;
                    let rhs = m as f64 / n * hyp_tail_log(&hp(k, m - 1, big_k, big_m)).prob()
                        + (n - m as f64) / n * hyp_tail_log(&hp(k, m, big_k, big_m)).prob();
                    if (lhs - rhs).abs() > 1e-12 * lhs.abs().max(rhs.abs()) {
                        return Err(format!("k={k} m={m} K={big_k} M={big_m}: {lhs} vs {rhs}"));
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} decompositions"))
}

/// Berkopec's form equals the direct sum: exactly on the oracle and to
/// `1e-12` in log space on the float routes.
pub fn berkopec_identity(max: u64) -> Check {
    let oracle = Oracle::new(max);
    let mut cases = 0;
    for big_m in 1..=max {
        for m in 1..=big_m {
            for big_k in 0..=big_m {
                for k in 0..=m.min(big_k) {
                    let p = hp(k, m, big_k, big_m);
                    if oracle.tail(&p).unwrap() != oracle.tail_berkopec(&p).unwrap() {
                        return Err(format!("exact: k={k} m={m} K={big_k} M={big_m}"));
                    }
                    let (a, b) = (hyp_tail_log(&p).ln(), hyp_tail_berkopec_log(&p).ln());
                    if !(a == b || (a - b).abs() <= 1e-12) {
                        return Err(format!(
                            "float: k={k} m={m} K={big_k} M={big_m}: {a} vs {b}"
                        ));
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} identities"))
}

/// Minimality of the upper inverse and maximality of the lower inverse;
/// the two differ by at most one.
pub fn inverse_definitions(max: u64) -> Check {
    let tail = |k, m, big_k, big_m| hyp_tail_log(&hp(k, m, big_k, big_m)).ln();
    let mut cases = 0;
    for big_m in 1..=max {
        for m in 1..=big_m {
            for k in 0..=m {
                for delta in DELTAS {
                    let lnd = delta.ln();
                    let low = hyp_tail_lower_inv(k, m, ld(delta), big_m).unwrap();
                    if tail(k, m, low, big_m) < lnd {
                        return Err(format!("lower not admissible: k={k} m={m} M={big_m}"));
                    }
                    if low < big_m - m + k && tail(k, m, low + 1, big_m) >= lnd {
                        return Err(format!("lower not maximal: k={k} m={m} M={big_m}"));
                    }
                    if k == m {
                        continue;
                    }
                    let up = hyp_tail_inv_bisect(k, m, ld(delta), big_m).unwrap();
                    if tail(k, m, up, big_m) > lnd {
                        return Err(format!("upper not admissible: k={k} m={m} M={big_m}"));
                    }
                    if up > k + 1 && tail(k, m, up - 1, big_m) <= lnd {
                        return Err(format!("upper not minimal: k={k} m={m} M={big_m}"));
                    }
                    if up.abs_diff(low) > 1 {
                        return Err(format!("inverses {up} and {low} at k={k} m={m} M={big_m}"));
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} inverse pairs"))
}

/// The upper inverse is strictly increasing in k, nondecreasing in M and
/// nonincreasing in m and δ.
pub fn inverse_monotonicity(max: u64) -> Check {
    let inv = |k, m, d: f64, big_m| hyp_tail_inv_bisect(k, m, ld(d), big_m).unwrap();
    let mut cases = 0;
    for big_m in 1..=max {
        for m in 1..=big_m {
            for k in 0..m {
                for (i, &delta) in DELTAS.iter().enumerate() {
                    let here = inv(k, m, delta, big_m);
                    let bad =
                        |what: &str| Err(format!("{what} at k={k} m={m} M={big_m} δ={delta}"));
                    if k + 1 < m && inv(k + 1, m, delta, big_m) <= here {
                        return bad("not strictly increasing in k");
                    }
                    if big_m < max && inv(k, m, delta, big_m + 1) < here {
                        return bad("decreasing in M");
                    }
                    if m < big_m && inv(k, m + 1, delta, big_m) > here {
                        return bad("increasing in m");
                    }
                    // DELTAS is decreasing, so the inverse must not drop
                    if i + 1 < DELTAS.len() && inv(k, m, DELTAS[i + 1], big_m) < here {
                        return bad("increasing in δ");
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} grid points"))
}

/// `Hyp(k, m, K, M) <= exp(-2 t² m)` for `t = K/M - k/m >= 0`, and
/// `Hyp(0, m, K, M) <= ((M - K)/M)^m`, with the implied inverse bound.
pub fn tail_dominations(max: u64) -> Check {
    let mut cases = 0;
    for big_m in 1..=max {
        for m in 1..=big_m {
            for big_k in 0..=big_m {
                let frac = big_k as f64 / big_m as f64;
                for k in 0..=m {
                    let t = frac - k as f64 / m as f64;
                    if t < 0.0 {
                        continue;
                    }
                    let tail = hyp_tail_log(&hp(k, m, big_k, big_m)).ln();
                    if tail > -2.0 * t * t * m as f64 + 1e-12 {
                        return Err(format!("Hoeffding: k={k} m={m} K={big_k} M={big_m}"));
                    }
                    cases += 1;
                }
                let zero = hyp_tail_log(&hp(0, m, big_k, big_m)).ln();
                if zero > m as f64 * (1.0 - frac).ln() + 1e-12 {
                    return Err(format!("realizable: m={m} K={big_k} M={big_m}"));
                }
            }
            for delta in DELTAS {
                let inv = hyp_tail_inv_bisect(0, m, ld(delta), big_m).unwrap() as f64;
                let cap = big_m as f64 * (1.0 - delta.powf(1.0 / m as f64)) + 1.0;
                if inv > cap + 1e-9 {
                    return Err(format!("realizable inverse: m={m} M={big_m} δ={delta}"));
                }
            }
        }
    }
    Ok(format!("{cases} dominations"))
}

fn growths() -> Vec<GrowthModel> {
    vec![
        GrowthModel::constant(1).unwrap(),
        GrowthModel::constant(1000).unwrap(),
        GrowthModel::sauer_shelah(3).unwrap(),
        GrowthModel::sauer_shelah(20).unwrap(),
    ]
}

/// `hti(k) = 1 - hti_lower(m - k)` to `1e-12` absolute.
pub fn upper_lower_symmetry() -> Check {
    let mut cases = 0;
    for growth in growths() {
        for m in [1u64, 2, 7, 30, 101] {
            for mprime in [1u64, 2, 5, m, 4 * m, 13 * m + 1] {
                for delta in [0.5, 0.05, 1e-4] {
                    for k in 0..=m {
                        let up = BoundQuery::new(k, m, mprime, delta, growth).unwrap();
                        let low = up.with_errors(m - k).unwrap();
                        let (a, b) = (hti_epsilon(&up).value, hti_lower_epsilon(&low).value);
                        if (a - (1.0 - b)).abs() > 1e-12 {
                            return Err(format!(
                                "k={k} m={m} m'={mprime} δ={delta} {growth}: {a} vs 1 - {b}"
                            ));
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} mirrored pairs"))
}

/// The margin bound at `log_cover = ln N` is the HTI bound for a class of
/// `N` hypotheses.
pub fn margin_reduction() -> Check {
    let mut cases = 0;
    for n in [1u64, 2, 17, 1_000_000] {
        let growth = GrowthModel::constant(n).unwrap();
        for m in [1u64, 10, 64, 300] {
            for mprime in [1u64, m, 3 * m + 2] {
                for k in (0..=m).step_by(((m / 7) as usize).max(1)) {
                    let q = BoundQuery::new(k, m, mprime, 0.05, growth).unwrap();
                    let margin =
                        margin_epsilon(k, m, mprime, q.log_delta, (n as f64).ln()).unwrap();
                    if margin.value != hti_epsilon(&q).value {
                        return Err(format!("N={n} m={m} m'={mprime} k={k}"));
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} reductions"))
}

/// Identical results on 1, 2 and 3 worker threads.
pub fn thread_determinism() -> Check {
    let growth = GrowthModel::sauer_shelah(10).unwrap();
    for (method, k) in [
        (Method::Hti, 0u64),
        (Method::HtiRd, 12),
        (Method::HtiLower, 40),
    ] {
        let scan = MprimeScan::new(method, k, 200, ld(0.05), growth)
            .unwrap()
            .range(1, 6000)
            .trace(true);
        let base = optimize_mprime_with_threads(&scan, 1).unwrap();
        for threads in [2, 3] {
            let other = optimize_mprime_with_threads(&scan, threads).unwrap();
            let same_bits = base.epsilon_best.to_bits() == other.epsilon_best.to_bits();
            if base.mprime_best != other.mprime_best || !same_bits || base.trace != other.trace {
                return Err(format!("{method} differs on {threads} threads"));
            }
        }
    }
    Ok("3 scans bit-identical across thread counts".into())
}

/// `Σ_k hyp(k, m, K, M) = 1` in floating point.
pub fn pmf_normalization(max: u64) -> Check {
    for big_m in 1..=max {
        for m in 0..=big_m {
            for big_k in 0..=big_m {
                let total: f64 = (0..=m)
                    .map(|k| hyp_pmf_log(&hp(k, m, big_k, big_m)).prob())
                    .sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(format!("m={m} K={big_k} M={big_m}: {total}"));
                }
            }
        }
    }
    Ok("all pmfs sum to one".into())
}
