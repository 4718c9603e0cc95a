//! Growth-function models `ln τ_H(n)`.

use std::fmt;

use crate::error::{HtiError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthModel {
    /// Binary class of VC dimension `d`, bounded by Sauer-Shelah.
    SauerShelah { vc_dim: u64 },
    /// Finite class with this many hypotheses.
    Constant { class_size: u64 },
}

impl GrowthModel {
    pub fn sauer_shelah(vc_dim: u64) -> Result<Self> {
        if vc_dim == 0 {
            return Err(HtiError::InvalidGrowth("VC dimension must be at least 1"));
        }
        Ok(GrowthModel::SauerShelah { vc_dim })
    }

    pub fn constant(class_size: u64) -> Result<Self> {
        if class_size == 0 {
            return Err(HtiError::InvalidGrowth("class size must be at least 1"));
        }
        Ok(GrowthModel::Constant { class_size })
    }

    pub fn vc_dim(&self) -> Option<u64> {
        match *self {
            GrowthModel::SauerShelah { vc_dim } => Some(vc_dim),
            GrowthModel::Constant { .. } => None,
        }
    }

    /// `ln τ_H(n)`.
    ///
    /// Sauer-Shelah gives `d ln(e n / d)` once `n >= d`; below that every
    /// labeling is realizable and the exact value `n ln 2` is used.
    pub fn log_growth(&self, n: u64) -> f64 {
        match *self {
            GrowthModel::SauerShelah { vc_dim } => {
                if n < vc_dim {
                    n as f64 * std::f64::consts::LN_2
                } else {
                    let d = vc_dim as f64;
                    d * (1.0 + (n as f64 / d).ln())
                }
            }
            GrowthModel::Constant { class_size } => (class_size as f64).ln(),
        }
    }
}

impl fmt::Display for GrowthModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthModel::SauerShelah { vc_dim } => write!(f, "vc-dim {vc_dim}"),
            GrowthModel::Constant { class_size } => write!(f, "class-size {class_size}"),
        }
    }
}
