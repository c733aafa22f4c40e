//! Solver and geometric verifier for minimal graphs of arbitrary codimension.
//!
//! A map `f : D ⊂ R^n → R^m` spans an `n`-dimensional graph in `R^{n+m}`.
//! This crate computes the pointwise geometry of such graphs (singular
//! values of `df`, induced metric, volume element, adapted frames, second
//! fundamental form), discretizes the minimal surface system on box grids,
//! solves its Dirichlet problem by mean-curvature-flow relaxation or damped
//! Newton iteration, and audits the differential-geometric identities and
//! inequalities that hold on area-decreasing minimal graphs.
//!
//! The crate is `no_std`-compatible (with `alloc`); the companion crate
//! `minsurf-cli` carries file formats and the command-line front end.

#![cfg_attr(not(feature = "std"), no_std)]
// Indexed loops over small fixed-size matrices read better than iterator
// chains here; `!(x > 0.0)` is the NaN-catching comparison.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod audit;
pub mod calculus;
pub mod error;
pub mod grid;
mod linalg;
pub mod pointwise;
pub mod preset;
pub mod solve;

pub use error::{AuditError, GeomError, GridError, SolveError};
pub use grid::{BoundaryData, GridDomain, JetSample, VectorField};
pub use pointwise::{
    log_star_omega_laplacian_rhs, AdaptedFrames, GrassmannPoint, Jacobian, MetricData, ShapeTensor,
    SingularDecomposition,
};
pub use preset::Preset;
pub use solve::{SolveConfig, SolveMethod, SolveReport};
