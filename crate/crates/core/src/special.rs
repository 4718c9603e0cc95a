//! Log-domain special functions shared by the tail and bound code.

use std::f64::consts::{LN_2, PI};

/// `0.5 * ln(2π)`.
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Largest `n` whose binomial coefficients all fit below 2^53, so that
/// `C(n, r)` converts to `f64` without rounding.
const EXACT_BINOM_MAX_N: u64 = 55;

/// Stirling remainder `ln n! - [(n + 1/2) ln n - n + ln √(2π)]` for
/// `n = 1..=15`, to 20 significant digits.
#[allow(clippy::excessive_precision)]
const STIRLING_REMAINDER: [f64; 16] = [
    0.0, // unused: n = 0 never reaches the table
    0.081_061_466_795_327_258_22,
    0.041_340_695_955_409_294_094,
    0.027_677_925_684_998_339_149,
    0.020_790_672_103_765_093_112,
    0.016_644_691_189_821_192_163,
    0.013_876_128_823_070_747_999,
    0.011_896_709_945_891_770_095,
    0.010_411_265_261_972_096_497,
    0.009_255_462_182_712_732_917_7,
    0.008_330_563_433_362_871_256_5,
    0.007_573_675_487_951_840_795,
    0.006_942_840_107_209_529_865_7,
    0.006_408_994_188_004_207_068_4,
    0.005_951_370_112_758_847_735_6,
    0.005_554_733_551_962_801_371,
];

/// Remainder of Stirling's series for `ln n!`, `n >= 1`.
fn stirling_remainder(n: u64) -> f64 {
    if n < STIRLING_REMAINDER.len() as u64 {
        return STIRLING_REMAINDER[n as usize];
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let x = n as f64;
    let x2 = x * x;
    (S0 - (S1 - (S2 - (S3 - S4 / x2) / x2) / x2) / x2) / x
}

/// Exact `C(n, r)` for `n <= 55` (fits in 53 bits).
fn small_binom(n: u64, r: u64) -> u64 {
    let r = r.min(n - r);
    let mut c: u64 = 1;
    for i in 0..r {
        // C(n, i+1) = C(n, i) * (n - i) / (i + 1), exact at every step
        c = c * (n - i) / (i + 1);
    }
    c
}

/// Natural logarithm of the binomial coefficient `C(n, r)`.
///
/// Returns `-inf` when `r < 0` or `r > n`. Small arguments are evaluated
/// exactly; large ones through Stirling's series written so that no two
/// large terms cancel, which keeps the relative error near machine
/// precision even for `n` in the millions.
pub fn log_binom(n: u64, r: i64) -> f64 {
    if r < 0 || r as u64 > n {
        return f64::NEG_INFINITY;
    }
    let r = r as u64;
    if r == 0 || r == n {
        return 0.0;
    }
    if n <= EXACT_BINOM_MAX_N {
        return (small_binom(n, r) as f64).ln();
    }
    let s = n - r;
    let (nf, rf, sf) = (n as f64, r as f64, s as f64);
    // n ln n - r ln r - s ln s = r ln(n/r) + s ln(n/s)
    let entropy = rf * (sf / rf).ln_1p() + sf * (rf / sf).ln_1p();
    let prefactor = 0.5 * (nf.ln() - rf.ln() - sf.ln()) - HALF_LN_2PI;
    let remainder = stirling_remainder(n) - stirling_remainder(r) - stirling_remainder(s);
    entropy + prefactor + remainder
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `ln(e^a + e^b)`.
pub fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}` with every term scaled by the maximum before summing.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut acc = CompensatedSum::new();
    for &t in terms {
        acc.add((t - max).exp());
    }
    max + acc.value().ln()
}

/// `ln(1 - e^x)` for `x <= 0`, accurate both near 0 and for very negative `x`.
pub fn ln_one_minus_exp(x: f64) -> f64 {
    debug_assert!(x <= 0.0);
    if x > -LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// Scaled complementary error function `e^{x²} erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x < 25.0 {
        return (x * x).exp() * statrs::function::erf::erfc(x);
    }
    // asymptotic expansion, four terms suffice at x >= 25
    let inv2 = 1.0 / (2.0 * x * x);
    let series = 1.0 - inv2 + 3.0 * inv2 * inv2 - 15.0 * inv2 * inv2 * inv2;
    series / (x * PI.sqrt())
}
