//! Closed-form parameter sequences indexed by `n >= 1`.
//!
//! Every sequence the solver consumes (`r_n`, `s_n`, `alpha_n`, `lambda_n`,
//! `mu_n`) is one of these rules, so summability, limits and bounds are read
//! off the rule instead of being estimated from samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Schedule {
    Zero,
    Constant { value: f64 },
    /// `scale / n^2`
    InverseSquare { scale: f64 },
    /// `scale / n`
    Harmonic { scale: f64 },
    /// `scale * ratio^n`, `0 <= ratio < 1`
    Geometric { scale: f64, ratio: f64 },
    /// `base + scale / n`
    ShiftedHarmonic { base: f64, scale: f64 },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Zero
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        let finite = match *self {
            Schedule::Zero => true,
            Schedule::Constant { value } => value.is_finite(),
            Schedule::InverseSquare { scale } | Schedule::Harmonic { scale } => scale.is_finite(),
            Schedule::Geometric { scale, ratio } => {
                if !(0.0..1.0).contains(&ratio) {
                    return Err(Error::InvalidArgument(format!(
                        "geometric ratio must lie in [0, 1), got {ratio}"
                    )));
                }
                scale.is_finite()
            }
            Schedule::ShiftedHarmonic { base, scale } => base.is_finite() && scale.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("schedule {self:?} has non-finite parameters")))
        }
    }

    /// Value at `n` (`n >= 1`).
    pub fn value(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            Schedule::Zero => 0.0,
            Schedule::Constant { value } => value,
            Schedule::InverseSquare { scale } => scale / (nf * nf),
            Schedule::Harmonic { scale } => scale / nf,
            Schedule::Geometric { scale, ratio } => scale * ratio.powf(nf),
            Schedule::ShiftedHarmonic { base, scale } => base + scale / nf,
        }
    }

    /// Limit as `n -> inf` (all rules converge).
    pub fn limit(&self) -> f64 {
        match *self {
            Schedule::Constant { value } => value,
            Schedule::ShiftedHarmonic { base, .. } => base,
            _ => 0.0,
        }
    }

    /// For convergent sequences the liminf is the limit.
    pub fn liminf(&self) -> f64 {
        self.limit()
    }

    /// Infimum and supremum over `n >= 1`. Every rule is monotone in `n`, so
    /// the extremes are the first value and the limit.
    pub fn bounds(&self) -> (f64, f64) {
        let first = self.value(1);
        let lim = self.limit();
        (first.min(lim), first.max(lim))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.bounds().0 >= 0.0
    }

    /// Whether `sum_n value(n)` converges.
    pub fn is_summable(&self) -> bool {
        match *self {
            Schedule::Zero | Schedule::InverseSquare { .. } | Schedule::Geometric { .. } => true,
            Schedule::Constant { value } => value == 0.0,
            Schedule::Harmonic { scale } => scale == 0.0,
            Schedule::ShiftedHarmonic { base, scale } => base == 0.0 && scale == 0.0,
        }
    }
}
