use std::fmt;

use crate::error::{HtiError, Result};
use crate::special::ln_one_minus_exp;

/// A probability stored as its natural logarithm.
///
/// `-inf` encodes probability zero. Thresholds such as `δ / (4 τ(2m))` are
/// routinely far below `f64::MIN_POSITIVE`, so every tail and every
/// confidence level in this crate travels in this form.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub const ONE: LogProb = LogProb(0.0);
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);

    pub fn new(ln: f64) -> Result<Self> {
        if ln.is_nan() || ln > 0.0 {
            return Err(HtiError::InvalidLogProb(ln));
        }
        Ok(LogProb(ln))
    }

    pub fn from_prob(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(HtiError::InvalidProbability(p));
        }
        Ok(LogProb(p.ln()))
    }

    /// A confidence level: the probability must lie strictly inside (0, 1).
    pub fn confidence(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(HtiError::InvalidProbability(delta));
        }
        Ok(LogProb(delta.ln()))
    }

    /// Rounds tiny positive excursions (accumulated rounding) down to 0.
    pub(crate) fn saturating(ln: f64) -> Self {
        debug_assert!(!ln.is_nan());
        LogProb(ln.min(0.0))
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn is_one(self) -> bool {
        self.0 == 0.0
    }

    /// `ln(1 - p)`, accurate when `p` is tiny.
    pub fn complement(self) -> LogProb {
        LogProb(ln_one_minus_exp(self.0))
    }

    /// Multiplies the probability by `e^{ln_factor}`; the factor must not
    /// raise it above one.
    pub fn scale(self, ln_factor: f64) -> Result<LogProb> {
        LogProb::new(self.0 + ln_factor)
    }

    /// Rejects anything that is not a confidence level in (0, 1).
    pub(crate) fn check_confidence(self) -> Result<Self> {
        if self.0 == f64::NEG_INFINITY || self.0 >= 0.0 {
            return Err(HtiError::InvalidConfidence(self.0));
        }
        Ok(self)
    }
}

impl fmt::Display for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_positive_and_nan() {
        assert!(LogProb::new(0.1).is_err());
        assert!(LogProb::new(f64::NAN).is_err());
        assert!(LogProb::new(f64::NEG_INFINITY).unwrap().is_zero());
        assert!(LogProb::from_prob(1.5).is_err());
    }

    #[test]
    fn confidence_is_open_interval() {
        assert!(LogProb::confidence(0.0).is_err());
        assert!(LogProb::confidence(1.0).is_err());
        assert!((LogProb::confidence(0.05).unwrap().prob() - 0.05).abs() < 1e-17);
        assert!(LogProb::ONE.check_confidence().is_err());
        assert!(LogProb::ZERO.check_confidence().is_err());
    }

    #[test]
    fn complement_of_tiny_probability() {
        let p = LogProb::new(-800.0).unwrap();
        let c = p.complement();
        assert!(c.ln() <= 0.0 && c.ln() > -1e-300);
        let half = LogProb::from_prob(0.5).unwrap();
        assert!((half.complement().prob() - 0.5).abs() < 1e-16);
    }
}
