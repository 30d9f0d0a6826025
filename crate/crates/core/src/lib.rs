//! Positive vectors in random subspaces: exact odds and sampling checks.
//!
//! A vector is *positive* when all of its coordinates are nonnegative and at
//! least one is nonzero. For a Haar-random `k`-dimensional subspace of `Rⁿ`
//! the probability of containing one is
//!
//! ```text
//! p(n, k) = 2^{-(n-1)} · Σ_{j=0}^{k-1} C(n-1, j)
//! ```
//!
//! [`exact`] evaluates this with big rationals. [`linalg`] samples random
//! subspaces, [`decide`] tests them with a small simplex solver, and
//! [`montecarlo`] compares the two.
//!
//! The numeric code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64`/`*32` aliases below name the common instantiations.

pub mod decide;
mod error;
pub mod exact;
pub mod linalg;
pub mod montecarlo;
mod scalar;

pub use decide::{Decision, PointCloud};
pub use error::{Error, Result};
pub use exact::{p_exact, wendel_halfspace_prob, ProbTableRow, Rational};
pub use linalg::{Matrix, RngStream, SamplingMethod, SubspaceBasis};
pub use montecarlo::{DualityReport, Estimate, Method};
pub use scalar::Scalar;

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type SubspaceBasis64 = SubspaceBasis<f64>;
pub type SubspaceBasis32 = SubspaceBasis<f32>;
pub type Decision64 = Decision<f64>;
pub type Decision32 = Decision<f32>;
pub type PointCloud64 = PointCloud<f64>;
pub type PointCloud32 = PointCloud<f32>;
