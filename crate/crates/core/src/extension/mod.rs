//! Restriction along curves, the extendability test, the coefficient ladder
//! and the pinched domain it produces.

mod curve;
mod ladder;
mod pinch;
mod ring;
mod verdict;

use num_complex::Complex64;
use thiserror::Error;

use crate::boundary::{BoundaryError, DEFAULT_GRID};
use crate::rational::{RationalConfig, RationalError};

pub use curve::DiscFunction;
pub use ladder::{
    coefficient_ladder, verify_coefficient_bounds, BoundViolation, CoefficientLadder, CurveRecord,
    LadderConfig, LadderEntry, PinchPoint, PoleLine, MAX_DEPTH,
};
pub use pinch::{evaluate_extension, pinch_estimate, ExtensionValue, PinchDescriptor};
pub use ring::{BivariateLaurent, LaurentTerm, RingFunction};
pub use verdict::{extension_test, restrict_along_curve, ExtensionVerdict, VerdictKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtensionError {
    #[error("evaluator domain violation at (λ = {lambda}, z = {z}): {reason}")]
    Domain {
        lambda: Complex64,
        z: Complex64,
        reason: String,
    },
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("curve {curve} is not extendable with at most {n_max} poles")]
    CurveNotExtendable { curve: usize, n_max: usize },
    #[error("ladder did not converge: {0}")]
    NonConvergence(String),
    #[error("level {level} carries {count} poles, more than the budget {budget}")]
    PoleBudget {
        level: usize,
        count: usize,
        budget: usize,
    },
    #[error("level {level} has a pole at {pole} outside the accumulated zeros and pole lines")]
    UnexpectedPole { level: usize, pole: Complex64 },
    #[error("the ladder is empty or too shallow (need depth >= 2)")]
    EmptyLadder,
    #[error("(λ = {lambda}, z = {z}) lies outside the pinched domain (|z| must be < {limit:e})")]
    OutsideDomain {
        lambda: Complex64,
        z: Complex64,
        limit: f64,
    },
    #[error("λ = {lambda} lies on the pole line {pole}")]
    OnPoleLine { lambda: Complex64, pole: Complex64 },
    #[error("truncation bound {bound:e} exceeds the requested tolerance {tol:e}")]
    TruncationTooLarge { bound: f64, tol: f64 },
}

/// Settings shared by the restriction and extendability test.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionConfig {
    /// Grid on `|λ| = 1`.
    pub grid: usize,
    /// Sup norm of `P(F(φ))` below which the restriction counts as holomorphic.
    pub holo_tolerance: f64,
    /// Detection settings; `delta_pole` is overridden by `ε/2` of the ring.
    pub rational: RationalConfig,
}

impl Default for ExtensionConfig {
    fn default() -> Self {
        ExtensionConfig {
            grid: DEFAULT_GRID,
            holo_tolerance: 1e-8,
            rational: RationalConfig::default(),
        }
    }
}
