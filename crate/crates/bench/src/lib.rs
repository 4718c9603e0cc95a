//! Shared fixtures for the criterion benchmarks.

use hti_core::{GrowthModel, LogProb};

/// `ln(δ / (4 τ(M)))` at `δ = 0.05` for a class of VC dimension `d`.
pub fn threshold(d: u64, population: u64) -> LogProb {
    let growth = GrowthModel::sauer_shelah(d).expect("d >= 1");
    let ln = 0.05f64.ln() - 4f64.ln() - growth.log_growth(population);
    LogProb::new(ln).expect("threshold is a probability")
}
