//! Positivity and convex-hull decisions.
//!
//! All three questions reduce to the same linear program: over vectors `t`
//! in some subspace with `Σ tᵢ = 1`, maximize the smallest coordinate `δ`.
//! The subspace contains a positive vector iff `δ* ≥ 0`, a strictly
//! positive one iff `δ* > 0`, and for points `z₁…zₙ` the hull contains the
//! origin iff the kernel of `t ↦ Σ tᵢzᵢ` contains a positive vector. The
//! optimal `δ*` doubles as the margin used to flag near-boundary instances.

pub mod simplex;

use crate::error::{domain, Error, Result};
use crate::linalg::{Matrix, SubspaceBasis};
use crate::Scalar;
use simplex::LpOutcome;

/// Default absolute tolerance on normalized certificates.
pub const DEFAULT_TOL: f64 = 1e-9;
/// A positive certificate needs at least one entry this large.
pub const STRICT_TOL: f64 = 1e-7;
/// Verdicts whose margin lies within this band of zero are flagged boundary.
pub const BOUNDARY_BAND: f64 = 1e-6;

/// Feasibility verdict.
///
/// `margin` is the smallest slack of the certificate (the optimal `δ*`);
/// it is `-inf` when not even the normalization can be met. `boundary` is
/// set when the margin is too close to zero for the verdict to be trusted.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision<T> {
    pub feasible: bool,
    pub certificate: Option<Vec<T>>,
    pub margin: T,
    pub boundary: bool,
}

/// `n` points in `R^d`, stored one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    points: Matrix<T>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn new(points: Matrix<T>) -> Self {
        Self { points }
    }

    /// Treats each column of a `d×n` matrix as one point.
    pub fn from_columns(a: &Matrix<T>) -> Self {
        Self { points: a.transpose() }
    }

    pub fn count(&self) -> usize {
        self.points.rows()
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn points(&self) -> &Matrix<T> {
        &self.points
    }

    /// Largest absolute coordinate.
    pub fn scale(&self) -> T {
        self.points.max_abs()
    }
}

/// Outcome of the max-δ program.
enum MaxMin<T> {
    Solved { t: Vec<T>, delta: T },
    NoNormalizedPoint { residual: T },
}

fn feas_tol<T: Scalar>() -> T {
    T::lit(T::LP_EPS)
}

// δ ≤ 1/n whenever Σt = 1, so both programs are bounded above.
fn unexpected_unbounded<T>() -> Result<T> {
    Err(Error::NumericalFailure("max-min program reported unbounded".into()))
}

/// max δ  s.t.  t = B·c,  t ≥ δ·1,  Σt = 1.
///
/// Columns: `c⁺ (k) | c⁻ (k) | δ⁺ | δ⁻ | s (n)` with `t = δ·1 + s`.
fn max_min_in_span<T: Scalar>(b: &SubspaceBasis<T>) -> Result<MaxMin<T>> {
    let basis = b.basis();
    let (n, k) = (basis.rows(), basis.cols());
    let cols = 2 * k + 2 + n;
    let mut a = Matrix::zeros(n + 1, cols);
    for i in 0..n {
        for j in 0..k {
            let v = basis[(i, j)];
            a[(i, j)] = v;
            a[(i, k + j)] = -v;
            a[(n, j)] += v;
            a[(n, k + j)] -= v;
        }
        a[(i, 2 * k)] = -T::one();
        a[(i, 2 * k + 1)] = T::one();
        a[(i, 2 * k + 2 + i)] = -T::one();
    }
    let mut rhs = vec![T::zero(); n + 1];
    rhs[n] = T::one();
    let mut obj = vec![T::zero(); cols];
    obj[2 * k] = T::one();
    obj[2 * k + 1] = -T::one();

    match simplex::solve_bounded(&a, &rhs, &obj, feas_tol())? {
        LpOutcome::Optimal { x, value } => {
            let coef: Vec<T> = (0..k).map(|j| x[j] - x[k + j]).collect();
            Ok(MaxMin::Solved { t: basis.mul_vec(&coef), delta: value })
        }
        LpOutcome::Infeasible { residual } => Ok(MaxMin::NoNormalizedPoint { residual }),
        LpOutcome::Unbounded => unexpected_unbounded(),
    }
}

/// max δ  s.t.  Σ λᵢ zᵢ = 0,  λ ≥ δ·1,  Σλ = 1.
///
/// Columns: `δ⁺ | δ⁻ | s (n)` with `λ = δ·1 + s`.
fn max_min_in_hull<T: Scalar>(p: &PointCloud<T>) -> Result<MaxMin<T>> {
    let (n, d) = (p.count(), p.dim());
    let z = p.points();
    let cols = 2 + n;
    let mut a = Matrix::zeros(d + 1, cols);
    for r in 0..d {
        let mut sum = T::zero();
        for i in 0..n {
            a[(r, 2 + i)] = z[(i, r)];
            sum += z[(i, r)];
        }
        a[(r, 0)] = sum;
        a[(r, 1)] = -sum;
    }
    a[(d, 0)] = T::from_usize(n).unwrap();
    a[(d, 1)] = -T::from_usize(n).unwrap();
    for i in 0..n {
        a[(d, 2 + i)] = T::one();
    }
    let mut rhs = vec![T::zero(); d + 1];
    rhs[d] = T::one();
    let mut obj = vec![T::zero(); cols];
    obj[0] = T::one();
    obj[1] = -T::one();

    match simplex::solve_bounded(&a, &rhs, &obj, feas_tol())? {
        LpOutcome::Optimal { x, value } => {
            let delta = x[0] - x[1];
            let lambda = (0..n).map(|i| delta + x[2 + i]).collect();
            Ok(MaxMin::Solved { t: lambda, delta: value })
        }
        LpOutcome::Infeasible { residual } => Ok(MaxMin::NoNormalizedPoint { residual }),
        LpOutcome::Unbounded => unexpected_unbounded(),
    }
}

fn check_tol<T: Scalar>(tol: T) -> Result<()> {
    if !(tol > T::zero()) {
        return domain("tolerance must be positive");
    }
    Ok(())
}

fn min_entry<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::infinity(), |m, &x| m.min(x))
}

/// Turns the max-δ outcome into a verdict, accepting when `accept(δ*)`.
fn verdict<T: Scalar>(outcome: MaxMin<T>, accept: impl Fn(T) -> bool) -> Decision<T> {
    let band = T::lit(BOUNDARY_BAND);
    match outcome {
        MaxMin::Solved { t, delta } => {
            let feasible = accept(delta);
            let margin = min_entry(&t);
            Decision { feasible, certificate: feasible.then_some(t), margin, boundary: delta.abs() < band }
        }
        MaxMin::NoNormalizedPoint { residual } => {
            Decision { feasible: false, certificate: None, margin: T::neg_infinity(), boundary: residual < band }
        }
    }
}

/// Does `span(B)` contain a vector with all entries `≥ −tol` summing to one?
/// The certificate is that vector.
pub fn contains_positive<T: Scalar>(b: &SubspaceBasis<T>, tol: T) -> Result<Decision<T>> {
    check_tol(tol)?;
    Ok(verdict(max_min_in_span(b)?, |delta| delta >= -tol))
}

/// Does `span(B)` contain a vector with every entry above `tol`, summing to one?
pub fn contains_strictly_positive<T: Scalar>(b: &SubspaceBasis<T>, tol: T) -> Result<Decision<T>> {
    check_tol(tol)?;
    Ok(verdict(max_min_in_span(b)?, |delta| delta > tol))
}

/// Is the origin a convex combination of the points? The certificate holds
/// the weights `λ`.
pub fn hull_contains_origin<T: Scalar>(p: &PointCloud<T>, tol: T) -> Result<Decision<T>> {
    check_tol(tol)?;
    if p.count() == 0 {
        return domain("empty point cloud");
    }
    Ok(verdict(max_min_in_hull(p)?, |delta| delta >= -tol))
}

fn nonzero<T: Scalar>(v: &[T]) -> Result<()> {
    if v.iter().all(|&x| x == T::zero()) {
        return domain("zero vector");
    }
    Ok(())
}

/// Does the line spanned by `v` contain a positive vector? True iff the
/// nonzero entries of `v` all share a sign.
pub fn sign_oracle_line<T: Scalar>(v: &[T]) -> Result<bool> {
    nonzero(v)?;
    let has_pos = v.iter().any(|&x| x > T::zero());
    let has_neg = v.iter().any(|&x| x < T::zero());
    Ok(!(has_pos && has_neg))
}

/// Does the hyperplane `{t : aᵀt = 0}` contain a positive vector? True iff
/// `a` has a zero entry or entries of both signs.
pub fn sign_oracle_hyperplane<T: Scalar>(a: &[T]) -> Result<bool> {
    nonzero(a)?;
    if a.len() < 2 {
        return domain("hyperplane oracle needs n >= 2");
    }
    let has_zero = a.iter().any(|&x| x == T::zero());
    let has_pos = a.iter().any(|&x| x > T::zero());
    let has_neg = a.iter().any(|&x| x < T::zero());
    Ok(has_zero || (has_pos && has_neg))
}

/// Re-checks a positivity certificate against the raw constraints with
/// slack `10·tol`: membership in `span(B)`, entries `≥ −10·tol`, sum one,
/// and some entry at least [`STRICT_TOL`].
pub fn verify_positive_certificate<T: Scalar>(b: &SubspaceBasis<T>, t: &[T], tol: T) -> bool {
    let slack = T::lit(10.0) * tol;
    let basis = b.basis();
    if t.len() != basis.rows() {
        return false;
    }
    let coef: Vec<T> = (0..basis.cols()).map(|j| (0..basis.rows()).map(|i| basis[(i, j)] * t[i]).sum()).collect();
    let projected = basis.mul_vec(&coef);
    let off_span = projected.iter().zip(t).fold(T::zero(), |m, (&p, &x)| m.max((p - x).abs()));
    let sum: T = t.iter().copied().sum();
    let max = t.iter().fold(T::neg_infinity(), |m, &x| m.max(x));
    off_span <= slack && t.iter().all(|&x| x >= -slack) && (sum - T::one()).abs() <= slack && max >= T::lit(STRICT_TOL)
}

/// As [`verify_positive_certificate`], additionally requiring every entry
/// to be strictly positive.
pub fn verify_strict_certificate<T: Scalar>(b: &SubspaceBasis<T>, t: &[T], tol: T) -> bool {
    verify_positive_certificate(b, t, tol) && t.iter().all(|&x| x > T::zero())
}

/// Re-checks convex weights: `λ ≥ −10·tol`, `Σλ = 1` and
/// `‖Σ λᵢ zᵢ‖∞ ≤ 10·tol·scale`.
pub fn verify_hull_certificate<T: Scalar>(p: &PointCloud<T>, lambda: &[T], tol: T) -> bool {
    let slack = T::lit(10.0) * tol;
    if lambda.len() != p.count() {
        return false;
    }
    let z = p.points();
    let combo =
        (0..p.dim()).map(|r| (0..p.count()).map(|i| lambda[i] * z[(i, r)]).sum::<T>().abs()).fold(T::zero(), T::max);
    let sum: T = lambda.iter().copied().sum();
    lambda.iter().all(|&x| x >= -slack)
        && (sum - T::one()).abs() <= slack
        && combo <= slack * p.scale().max(T::min_positive_value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kernel_basis, orthonormal_columns};

    const TOL: f64 = DEFAULT_TOL;

    fn col(v: &[f64]) -> SubspaceBasis<f64> {
        orthonormal_columns(&Matrix::column_vector(v).unwrap()).unwrap()
    }

    fn cloud(rows: &[&[f64]]) -> PointCloud<f64> {
        PointCloud::new(Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap())
    }

    #[test]
    fn positive_examples() {
        let b = col(&[1.0, 2.0, 3.0]);
        let d = contains_positive(&b, TOL).unwrap();
        assert!(d.feasible && !d.boundary);
        let t = d.certificate.unwrap();
        for (x, e) in t.iter().zip([1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]) {
            assert!((x - e).abs() < 1e-12);
        }
        assert!(verify_positive_certificate(&b, &t, TOL));

        assert!(!contains_positive(&col(&[1.0, -1.0]), TOL).unwrap().feasible);

        let plane = kernel_basis(&Matrix::row_vector(&[1.0, 1.0, 1.0]).unwrap()).unwrap();
        let d = contains_positive(&plane, TOL).unwrap();
        assert!(!d.feasible && d.certificate.is_none() && d.margin == f64::NEG_INFINITY && !d.boundary);

        let k = kernel_basis(&Matrix::row_vector(&[1.0, -1.0, 0.0]).unwrap()).unwrap();
        let d = contains_positive(&k, TOL).unwrap();
        assert!(d.feasible);
        assert!(verify_positive_certificate(&k, d.certificate.as_ref().unwrap(), TOL));
    }

    #[test]
    fn strict_examples() {
        let b = col(&[1.0, 1.0]);
        let d = contains_strictly_positive(&b, TOL).unwrap();
        assert!(d.feasible);
        let t = d.certificate.unwrap();
        assert!((t[0] - 0.5).abs() < 1e-12 && (t[1] - 0.5).abs() < 1e-12);
        assert!(verify_strict_certificate(&b, &t, TOL));

        let e2 = col(&[0.0, 1.0]);
        assert!(!contains_strictly_positive(&e2, TOL).unwrap().feasible);
        let d = contains_positive(&e2, TOL).unwrap();
        assert!(d.feasible && d.boundary);

        let plane = kernel_basis(&Matrix::row_vector(&[1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!(!contains_strictly_positive(&plane, TOL).unwrap().feasible);
    }

    #[test]
    fn hull_examples() {
        let p = cloud(&[&[1.0], &[-1.0]]);
        let d = hull_contains_origin(&p, TOL).unwrap();
        assert!(d.feasible);
        let l = d.certificate.unwrap();
        assert!((l[0] - 0.5).abs() < 1e-12 && (l[1] - 0.5).abs() < 1e-12);
        assert!(verify_hull_certificate(&p, &l, TOL));

        let d = hull_contains_origin(&cloud(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]), TOL).unwrap();
        assert!(!d.feasible && d.margin < 0.0);

        let p = cloud(&[&[1.0, 0.0], &[-1.0, 1.0], &[-1.0, -1.0]]);
        let d = hull_contains_origin(&p, TOL).unwrap();
        assert!(d.feasible);
        let l = d.certificate.unwrap();
        for (x, e) in l.iter().zip([0.5, 0.25, 0.25]) {
            assert!((x - e).abs() < 1e-12);
        }
        assert!(verify_hull_certificate(&p, &l, TOL));
    }

    #[test]
    fn fewer_points_than_dimension() {
        // Two generic points in R³ never surround the origin.
        let d = hull_contains_origin(&cloud(&[&[1.0, 2.0, 0.5], &[-0.3, 1.0, 2.0]]), TOL).unwrap();
        assert!(!d.feasible);
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(contains_positive(&col(&[1.0]), 0.0).is_err());
        assert!(hull_contains_origin(&cloud(&[&[1.0]]), -1.0).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert!(sign_oracle_line(&[0.0, 2.0, 5.0]).unwrap());
        assert!(!sign_oracle_line(&[1.0, -1.0, 0.0]).unwrap());
        assert!(sign_oracle_line(&[-3.0, 0.0, -1.0]).unwrap());
        assert!(sign_oracle_line(&[0.0, 0.0]).is_err());

        assert!(!sign_oracle_hyperplane(&[1.0, 1.0, 1.0]).unwrap());
        assert!(sign_oracle_hyperplane(&[1.0, -2.0, 3.0]).unwrap());
        assert!(sign_oracle_hyperplane(&[1.0, 0.0]).unwrap());
        assert!(sign_oracle_hyperplane(&[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn verifier_rejects_bad_certificates() {
        let b = col(&[1.0, 2.0, 3.0]);
        assert!(!verify_positive_certificate(&b, &[1.0, 0.0, 0.0], TOL));
        assert!(!verify_positive_certificate(&b, &[2.0 / 6.0, 4.0 / 6.0, 1.0], TOL));
        let p = cloud(&[&[1.0], &[-1.0]]);
        assert!(!verify_hull_certificate(&p, &[0.7, 0.3], TOL));
        assert!(!verify_hull_certificate(&p, &[1.5, -0.5], TOL));
    }

    #[test]
    fn single_precision_decision() {
        let b = orthonormal_columns(&Matrix::<f32>::column_vector(&[1.0, 2.0, 3.0]).unwrap()).unwrap();
        let d = contains_positive(&b, 1e-5f32).unwrap();
        assert!(d.feasible);
    }
}
