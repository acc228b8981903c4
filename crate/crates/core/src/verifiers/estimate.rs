use serde::Serialize;

use crate::linalg::ComplexMatrix;
use crate::parallel::{MatrixStats, ScalarStats};

/// Absolute float slack added on top of the sigma margin, scaled by
/// `max(1, |bound|)`. Keeps exact equality cases (zero variance) from failing
/// on the last bit.
pub const BOUND_FLOAT_SLACK: f64 = 1e-9;

/// Default number of standard errors allowed by inequality checks.
pub const SIGMA_MARGIN: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl MonteCarloEstimate {
    /// Deterministic value with zero spread, e.g. an exact quantity.
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            std_error: 0.0,
            samples: 0,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            mean: self.mean * s,
            std_error: self.std_error * s.abs(),
            samples: self.samples,
        }
    }

    /// `|mean - target| <= k·std_error` (plus float slack).
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error + BOUND_FLOAT_SLACK * target.abs().max(1.0)
    }
}

impl From<ScalarStats> for MonteCarloEstimate {
    fn from(s: ScalarStats) -> Self {
        Self {
            mean: s.mean,
            std_error: s.std_error(),
            samples: s.count,
        }
    }
}

/// Entrywise mean and standard error of a matrix-valued estimator.
#[derive(Clone, Debug)]
pub struct MatrixEstimate {
    pub mean: ComplexMatrix,
    /// Row-major, one per entry.
    pub std_error: Vec<f64>,
    pub samples: u64,
}

impl MatrixEstimate {
    /// `max_ij |mean_ij - target_ij|`.
    pub fn max_deviation(&self, target: &ComplexMatrix) -> f64 {
        self.mean.max_abs_diff(target)
    }

    pub fn max_std_error(&self) -> f64 {
        self.std_error.iter().copied().fold(0.0, f64::max)
    }
}

impl From<MatrixStats> for MatrixEstimate {
    fn from(s: MatrixStats) -> Self {
        Self {
            mean: s.mean_matrix(),
            std_error: s.std_errors(),
            samples: s.count,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    OutsideTheoremScope,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }

    /// Fail dominates; a scope warning dominates pass.
    pub fn combine(self, other: Self) -> Self {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (OutsideTheoremScope, _) | (_, OutsideTheoremScope) => OutsideTheoremScope,
            _ => Pass,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub estimate: MonteCarloEstimate,
    pub bound_value: f64,
    pub direction: Direction,
    pub sigma_margin: f64,
    pub verdict: Verdict,
}

impl BoundCheck {
    pub fn evaluate(
        estimate: MonteCarloEstimate,
        bound_value: f64,
        direction: Direction,
        sigma_margin: f64,
    ) -> Self {
        let slack =
            sigma_margin * estimate.std_error + BOUND_FLOAT_SLACK * bound_value.abs().max(1.0);
        let ok = match direction {
            Direction::AtMost => estimate.mean <= bound_value + slack,
            Direction::AtLeast => estimate.mean >= bound_value - slack,
        };
        Self {
            estimate,
            bound_value,
            direction,
            sigma_margin,
            verdict: Verdict::from_bool(ok),
        }
    }

    pub fn at_most(estimate: MonteCarloEstimate, bound_value: f64) -> Self {
        Self::evaluate(estimate, bound_value, Direction::AtMost, SIGMA_MARGIN)
    }

    pub fn at_least(estimate: MonteCarloEstimate, bound_value: f64) -> Self {
        Self::evaluate(estimate, bound_value, Direction::AtLeast, SIGMA_MARGIN)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Bernoulli frequency estimate with the binomial standard error
/// `sqrt(p(1-p)/n)`.
pub fn frequency(hits: u64, n: u64) -> MonteCarloEstimate {
    let p = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
    MonteCarloEstimate {
        mean: p,
        std_error: if n == 0 {
            0.0
        } else {
            (p * (1.0 - p) / n as f64).sqrt()
        },
        samples: n,
    }
}
