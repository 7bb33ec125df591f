//! Numerical meromorphic extension along analytic curves.
//!
//! The crate works with functions `f(λ, z)` known on a ring domain
//! `{1 − ε < |λ| < 1 + ε} × {|z| < 1}` and asks whether, and how far, they
//! extend into the bidisc. It is organised bottom-up:
//!
//! - [`boundary`]: uniformly sampled functions on a circle, their Laurent
//!   coefficients, the Hardy projection `P`, the Hilbert transform `S`,
//!   Sobolev norms and winding numbers.
//! - [`rational`]: Hankel-rank detection of rational boundary functions,
//!   pole recovery, principal parts and Blaschke products.
//! - [`extension`]: restriction of `f` along graphs `z = φ(λ)`, the
//!   extendability test `P(f(λ, φ(λ)))`, the coefficient ladder
//!   `A₀, A₁, …`, pinched-domain estimation and evaluation of the extension.
//! - [`families`]: test-sequence, test-family and general-position checks,
//!   winding profiles of parametric families.
//! - [`gallery`]: closed-form witnesses (`e^{z/λ}` and two series examples).
//! - [`report`]: canonical JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod boundary;
pub mod extension;
pub mod families;
pub mod gallery;
pub mod poly;
pub mod rational;
pub mod report;

pub use num_complex::Complex64;

pub use boundary::{
    analyze, hardy_project_minus, hardy_split, hilbert_transform, sobolev_norm, winding_number,
    winding_number_with, BoundaryError, CircleFunction, HardySplit, WindingConfig,
};
pub use extension::{
    coefficient_ladder, evaluate_extension, extension_test, pinch_estimate, restrict_along_curve,
    verify_coefficient_bounds, BivariateLaurent, CoefficientLadder, DiscFunction, ExtensionConfig,
    ExtensionError, ExtensionVerdict, LadderConfig, PinchDescriptor, RingFunction, VerdictKind,
};
pub use rational::{
    blaschke_from_zeros, detect_rational, evaluate_rational, BlaschkeProduct, Pole, RationalConfig,
    RationalError, RationalPart, RationalityKind, RationalityVerdict,
};
