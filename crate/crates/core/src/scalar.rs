//! Floating-point element type shared by the linear algebra and decision code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Real scalar usable by [`Matrix`](crate::Matrix) and the LP solver: `f32` or `f64`.
///
/// The tolerance constants are expressed in `f64` and converted with
/// [`Scalar::lit`]; single precision gets looser values so the same contracts
/// remain satisfiable.
pub trait Scalar:
    Float + FromPrimitive + NumAssignOps + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative pivot threshold below which a triangular factor is treated as singular.
    const RANK_TOL: f64;
    /// Allowed max-norm deviation of `BᵀB` from the identity.
    const ORTHO_TOL: f64;
    /// Reduced costs above `-LP_EPS` count as nonnegative in the simplex.
    const LP_EPS: f64;
    /// Smallest tableau entry the simplex will pivot on.
    const PIVOT_TOL: f64;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Scalar for f64 {
    const RANK_TOL: f64 = 1e-10;
    const ORTHO_TOL: f64 = 1e-10;
    const LP_EPS: f64 = 1e-9;
    const PIVOT_TOL: f64 = 1e-9;

    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Scalar for f32 {
    const RANK_TOL: f64 = 1e-5;
    const ORTHO_TOL: f64 = 1e-5;
    const LP_EPS: f64 = 1e-5;
    const PIVOT_TOL: f64 = 1e-4;

    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}
