use crate::error::{Error, Result};

/// When the iterative methods stop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    /// Two values agree once they round to the same `sig_digits` digits.
    pub sig_digits: u32,
    /// ... or once their gap is at most `rel_tol` times the reference value.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Inverse iteration additionally needs the eigen-equation residual
    /// below this.
    pub residual_tol: f64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            sig_digits: 6,
            rel_tol: 5e-7,
            max_iter: 100_000,
            residual_tol: 1e-6,
        }
    }
}

impl StopRule {
    pub fn validate(&self) -> Result<()> {
        if self.sig_digits < 1 || self.sig_digits > 17 {
            return Err(Error::InvalidStopRule(format!(
                "sig_digits must lie in 1..=17 (got {})",
                self.sig_digits
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidStopRule(format!(
                "rel_tol must be positive (got {})",
                self.rel_tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidStopRule("max_iter must be at least 1".into()));
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidStopRule(format!(
                "residual_tol must be positive (got {})",
                self.residual_tol
            )));
        }
        Ok(())
    }

    pub fn agree(&self, a: f64, b: f64, reference: f64) -> bool {
        (a - b).abs() <= self.rel_tol * reference.abs()
            || round_sig(a, self.sig_digits) == round_sig(b, self.sig_digits)
    }
}

/// Rounds to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: u32) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1) as usize, x);
    s.parse().unwrap_or(x)
}
