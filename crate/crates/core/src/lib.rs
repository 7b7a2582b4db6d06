//! Chebyshev systems, generalized divided differences and higher-order
//! convexity.
//!
//! For a system `ω = (ω₁,…,ω_n)` of basis functions on an interval `I` this
//! crate evaluates the collocation determinants `V_n` and the bordered
//! determinants `D_n`, the generalized divided differences
//! `[x₁,…,x_n; f]_ω = D_{n-1} / V_n`, and certifies ω-n-convexity of a target
//! function on sampled grids. It also constructs support-type combinations
//! `ω = c₁ω₁ + ⋯ + c_nω_n` through `n − 1` knots.
//!
//! All certificates are grid-sampled: they are necessary evidence, not proofs
//! on the continuum.

// `!(a < b)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod dd;
pub mod det;
pub mod error;
pub mod interp;
mod serde_ext;
pub mod source;
pub mod support;
pub mod system;
pub mod tuples;

pub use certify::{
    certify_corollary1, certify_theorem_a, scan_theorem2, verify_definition, CertVerdict, ConvexityCertificate, Method,
    MonotonicityReport, Tolerances, Witness,
};
pub use dd::{classical_dd, gdd, gdd_fast, gdd_sliding, recurrence_identity_residual, DividedDifference, Residual};
pub use det::{d_det, v_det, PointTuple, Sign, SignedValue};
pub use error::{Error, Result};
pub use interp::{constrained_interpolate, interpolate, lemma1_residual, OmegaCombination};
pub use source::{load_table, parse_table, Expression, FunctionSource, Table, TableInterpolation};
pub use support::{
    build_support, estimate_cn, estimate_cn_with, verify_sign_pattern, LimitDiagnostics, LimitOptions,
    SignPatternReport, SupportResult,
};
pub use system::{
    classify_on_grid, uniform_grid, BasisFunction, ChebyshevSystem, Interval, SystemClassification, Verdict,
};
pub use tuples::Sampling;
