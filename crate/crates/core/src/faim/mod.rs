//! Fitting per-group fair score maps.
//!
//! Three target distributions are built for every group: `mu_a` (scores
//! replaced by the within-bin positive rate, so the group is calibrated),
//! `mu_b` (the truly negative members transported onto the cross-group
//! barycenter of negative-class score distributions) and `mu_c` (the same for
//! the positive class). The group's fair distribution is their
//! Wasserstein-2 barycenter under the group's [`ThetaWeights`], and the final
//! map is the optimal transport map from the raw distribution onto it.

mod diagnostics;
mod fit;
mod format;
mod model;

use std::fmt;

use crate::error::{Error, Result};

pub use diagnostics::{class_mean_scores, incompatibility_determinant, Incompatibility};
pub use fit::{
    conditional_distribution, fit, fit_balance_target, fit_calibration, BalanceTarget, Calibration,
};
pub use model::{apply, FaimModel, GroupModel};

/// Ground-truth class of an individual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScoreClass {
    Negative,
    Positive,
}

impl ScoreClass {
    pub fn matches(&self, positive: bool) -> bool {
        positive == (*self == ScoreClass::Positive)
    }
}

impl fmt::Display for ScoreClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreClass::Negative => "negative",
            ScoreClass::Positive => "positive",
        })
    }
}

/// Weights on calibration (`a`), negative-class balance (`b`) and
/// positive-class balance (`c`). Each lies in `[0, 1]` and they sum to one
/// within 1e-9; inputs are never renormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaWeights {
    a: f64,
    b: f64,
    c: f64,
}

impl ThetaWeights {
    pub const CALIBRATION: ThetaWeights = ThetaWeights { a: 1.0, b: 0.0, c: 0.0 };
    pub const NEGATIVE_BALANCE: ThetaWeights = ThetaWeights { a: 0.0, b: 1.0, c: 0.0 };
    pub const POSITIVE_BALANCE: ThetaWeights = ThetaWeights { a: 0.0, b: 0.0, c: 1.0 };

    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let in_range = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
        if !(in_range(a) && in_range(b) && in_range(c)) || (a + b + c - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidTheta { a, b, c });
        }
        Ok(Self { a, b, c })
    }

    /// `(1/3, 1/3, 1/3)`.
    pub fn equal() -> Self {
        Self { a: 1.0 / 3.0, b: 1.0 / 3.0, c: 1.0 / 3.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// Weight on the balance target for `class`.
    pub fn balance(&self, class: ScoreClass) -> f64 {
        match class {
            ScoreClass::Negative => self.b,
            ScoreClass::Positive => self.c,
        }
    }
}
