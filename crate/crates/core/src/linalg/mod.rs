//! Dense linear algebra for sampling Haar-random subspaces.
//!
//! A subspace is represented by an orthonormal basis matrix. Kernels and
//! orthogonal complements both come out of one Householder factorization:
//! for a full-column-rank `n×m` matrix `M = Q·R`, the trailing `n−m` columns
//! of the full `Q` span the complement of the column space of `M`.

mod householder;
mod matrix;
mod rng;

use rand::RngCore;
use serde::{Deserialize, Serialize};

pub use householder::HouseholderQr;
pub use matrix::Matrix;
pub use rng::RngStream;

use crate::error::{domain, Error, Result};
use crate::Scalar;

/// Orthonormal `n×k` basis of a point of the Grassmannian `G(n, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis<T> {
    basis: Matrix<T>,
}

impl<T: Scalar> SubspaceBasis<T> {
    /// Wraps `basis` after checking that its columns are orthonormal to
    /// within `T::ORTHO_TOL`.
    pub fn new(basis: Matrix<T>) -> Result<Self> {
        if basis.cols() > basis.rows() {
            return domain(format!("basis has {} columns in R^{}", basis.cols(), basis.rows()));
        }
        let dev = basis.tr_matmul(&basis).sub(&Matrix::identity(basis.cols())).max_abs();
        if dev > T::lit(T::ORTHO_TOL) {
            return domain(format!("columns not orthonormal (deviation {dev})"));
        }
        Ok(Self { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.basis
    }

    /// Orthogonal projector `B·Bᵀ` onto the subspace.
    pub fn projector(&self) -> Matrix<T> {
        self.basis.matmul(&self.basis.transpose())
    }

    /// Same subspace, basis rotated by an orthogonal `k×k` matrix.
    pub fn rotate_basis(&self, q: &Matrix<T>) -> Result<Self> {
        Self::new(self.basis.matmul(q))
    }
}

/// How [`haar_subspace`] builds its sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMethod {
    /// Kernel of an `(n−k)×n` Gaussian matrix.
    Kernel,
    /// Column span of an `n×k` Gaussian matrix.
    Span,
}

/// Maximum number of draws [`haar_subspace`] makes before giving up.
pub const MAX_SAMPLER_ATTEMPTS: usize = 10;

/// `rows×cols` matrix of iid standard normals, filled row by row.
pub fn gaussian_matrix<T: Scalar, R: RngCore + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| T::standard_normal(rng))
}

/// Orthonormal basis of the column span of `m`, with the sign of each
/// column chosen so the triangular factor has a nonnegative diagonal.
pub fn orthonormal_columns<T: Scalar>(m: &Matrix<T>) -> Result<SubspaceBasis<T>> {
    if m.cols() > m.rows() {
        return Err(Error::RankDeficient { pivot: 0.0, largest: 0.0 });
    }
    let qr = HouseholderQr::new(m);
    qr.check_full_rank()?;
    SubspaceBasis::new(qr.q_thin_signed())
}

/// Orthonormal basis of `ker A` for a full-row-rank `d×n` matrix with `d < n`.
pub fn kernel_basis<T: Scalar>(a: &Matrix<T>) -> Result<SubspaceBasis<T>> {
    let (d, n) = (a.rows(), a.cols());
    if d >= n {
        return domain(format!("kernel_basis needs fewer rows than columns, got {d}x{n}"));
    }
    let qr = HouseholderQr::new(&a.transpose());
    qr.check_full_rank()?;
    SubspaceBasis::new(qr.q_full().columns(d, n))
}

/// Orthonormal basis of the orthogonal complement `V^⊥`.
pub fn complement<T: Scalar>(b: &SubspaceBasis<T>) -> Result<SubspaceBasis<T>> {
    let (n, k) = (b.ambient_dim(), b.dim());
    if k == n {
        return domain("complement of the whole space is the zero subspace");
    }
    let qr = HouseholderQr::new(b.basis());
    SubspaceBasis::new(qr.q_full().columns(k, n))
}

/// Haar-distributed orthogonal `n×n` matrix: QR of a Gaussian matrix with
/// each column of `Q` multiplied by the sign of the matching pivot of `R`.
pub fn random_orthogonal<T: Scalar, R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<Matrix<T>> {
    if n == 0 {
        return domain("random_orthogonal needs n >= 1");
    }
    for _ in 0..MAX_SAMPLER_ATTEMPTS {
        let g = gaussian_matrix::<T, _>(n, n, rng);
        let qr = HouseholderQr::new(&g);
        if qr.check_full_rank().is_ok() {
            return Ok(qr.q_thin_signed());
        }
    }
    Err(Error::SamplerFailure { attempts: MAX_SAMPLER_ATTEMPTS })
}

/// Haar-random `k`-dimensional subspace of `Rⁿ`.
pub fn haar_subspace<T: Scalar, R: RngCore + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
    method: SamplingMethod,
) -> Result<SubspaceBasis<T>> {
    if k < 1 || k > n {
        return domain(format!("subspace dimension must lie in [1, n]; got n={n}, k={k}"));
    }
    if method == SamplingMethod::Kernel && k == n {
        return domain("kernel sampling needs k < n");
    }
    for _ in 0..MAX_SAMPLER_ATTEMPTS {
        let drawn = match method {
            SamplingMethod::Kernel => kernel_basis(&gaussian_matrix::<T, _>(n - k, n, rng)),
            SamplingMethod::Span => orthonormal_columns(&gaussian_matrix::<T, _>(n, k, rng)),
        };
        match drawn {
            Err(Error::RankDeficient { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::SamplerFailure { attempts: MAX_SAMPLER_ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn same_span(a: &SubspaceBasis<f64>, b: &SubspaceBasis<f64>) -> bool {
        a.projector().sub(&b.projector()).max_abs() <= 1e-8
    }

    fn span_contract(src: &Matrix<f64>, q: &SubspaceBasis<f64>) {
        let p = q.projector();
        let resid = p.matmul(src).sub(src).max_abs();
        assert!(resid <= 1e-8 * src.max_abs(), "span residual {resid}");
    }

    #[test]
    fn gaussian_matrix_is_deterministic() {
        let a: Matrix<f64> = gaussian_matrix(4, 5, &mut RngStream::new(11));
        let b: Matrix<f64> = gaussian_matrix(4, 5, &mut RngStream::new(11));
        assert_eq!(a.as_slice(), b.as_slice());
        let one: Matrix<f64> = gaussian_matrix(1, 1, &mut RngStream::new(0));
        assert!(one[(0, 0)].is_finite());
    }

    #[test]
    fn gaussian_matrix_moments() {
        let g: Matrix<f64> = gaussian_matrix(1000, 1000, &mut RngStream::new(2024));
        let n = g.as_slice().len() as f64;
        let mean = g.as_slice().iter().sum::<f64>() / n;
        let var = g.as_slice().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() <= 0.01, "mean {mean}");
        assert!((var - 1.0).abs() <= 0.02, "var {var}");
    }

    #[test]
    fn orthonormal_columns_examples() {
        let e = m(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(orthonormal_columns(&e).unwrap().basis(), &e);

        let s = m(&[&[2.0, 0.0], &[0.0, 0.0], &[0.0, 3.0]]);
        let q = orthonormal_columns(&s).unwrap();
        let b = q.basis();
        assert!((b[(0, 0)].abs() - 1.0).abs() < 1e-14 && (b[(2, 1)].abs() - 1.0).abs() < 1e-14);
        span_contract(&s, &q);

        let dup = m(&[&[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(orthonormal_columns(&dup), Err(Error::RankDeficient { .. })));
        assert!(orthonormal_columns(&m(&[&[1.0, 2.0]])).is_err());
    }

    #[test]
    fn kernel_examples() {
        let a = m(&[&[1.0, 1.0, 1.0]]);
        let b = kernel_basis(&a).unwrap();
        assert_eq!((b.ambient_dim(), b.dim()), (3, 2));
        assert!(a.matmul(b.basis()).max_abs() <= 1e-12);

        let b = kernel_basis(&m(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]])).unwrap();
        assert!((b.basis()[(2, 0)].abs() - 1.0).abs() < 1e-14);

        let rep = m(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]]);
        assert!(matches!(kernel_basis(&rep), Err(Error::RankDeficient { .. })));
        assert!(matches!(kernel_basis(&m(&[&[1.0], &[2.0]])), Err(Error::Domain(_))));
    }

    #[test]
    fn complement_examples() {
        let e3 = SubspaceBasis::new(m(&[&[0.0], &[0.0], &[1.0]])).unwrap();
        let c = complement(&e3).unwrap();
        let e12 = SubspaceBasis::new(m(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]])).unwrap();
        assert!(same_span(&c, &e12));
        assert!(c.basis().tr_matmul(e3.basis()).max_abs() <= 1e-8);

        let s = 1.0 / 3f64.sqrt();
        let ones = orthonormal_columns(&m(&[&[s], &[s], &[s]])).unwrap();
        let plane = kernel_basis(&m(&[&[1.0, 1.0, 1.0]])).unwrap();
        assert!(same_span(&complement(&ones).unwrap(), &plane));

        let mut rng = RngStream::new(5);
        let v: SubspaceBasis<f64> = haar_subspace(6, 2, &mut rng, SamplingMethod::Span).unwrap();
        assert!(same_span(&complement(&complement(&v).unwrap()).unwrap(), &v));

        let full = SubspaceBasis::new(Matrix::<f64>::identity(3)).unwrap();
        assert!(matches!(complement(&full), Err(Error::Domain(_))));
    }

    #[test]
    fn random_orthogonal_contracts() {
        let mut rng = RngStream::new(99);
        for n in 1..8 {
            let g: Matrix<f64> = random_orthogonal(n, &mut rng).unwrap();
            assert!(g.tr_matmul(&g).sub(&Matrix::identity(n)).max_abs() <= 1e-10);
        }
        let a: Matrix<f64> = random_orthogonal(4, &mut RngStream::new(3)).unwrap();
        let b: Matrix<f64> = random_orthogonal(4, &mut RngStream::new(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_orthogonal_one_by_one_is_fair_coin() {
        let mut rng = RngStream::new(123);
        let draws = 10_000;
        let plus = (0..draws).filter(|_| random_orthogonal::<f64, _>(1, &mut rng).unwrap()[(0, 0)] > 0.0).count();
        let freq = plus as f64 / draws as f64;
        assert!((freq - 0.5).abs() <= 0.02, "freq {freq}");
    }

    #[test]
    fn haar_subspace_full_space_and_domain() {
        let mut rng = RngStream::new(1);
        let v: SubspaceBasis<f64> = haar_subspace(3, 3, &mut rng, SamplingMethod::Span).unwrap();
        assert!(v.projector().sub(&Matrix::identity(3)).max_abs() <= 1e-12);
        assert!(haar_subspace::<f64, _>(3, 3, &mut rng, SamplingMethod::Kernel).is_err());
        assert!(haar_subspace::<f64, _>(3, 0, &mut rng, SamplingMethod::Span).is_err());
        assert!(haar_subspace::<f64, _>(3, 4, &mut rng, SamplingMethod::Span).is_err());
    }

    #[test]
    fn equivariance_spot_check() {
        let mut rng = RngStream::new(77);
        let a: Matrix<f64> = gaussian_matrix(2, 5, &mut rng);
        let g: Matrix<f64> = random_orthogonal(5, &mut rng).unwrap();
        let lhs = kernel_basis(&a.matmul(&g.transpose())).unwrap().projector();
        let rhs = g.matmul(&kernel_basis(&a).unwrap().projector()).matmul(&g.transpose());
        assert!(lhs.sub(&rhs).max_abs() <= 1e-8);
    }

    #[test]
    fn single_precision_contracts() {
        let mut rng = RngStream::new(8);
        let v: SubspaceBasis<f32> = haar_subspace(6, 3, &mut rng, SamplingMethod::Kernel).unwrap();
        let c = complement(&v).unwrap();
        assert!(c.basis().tr_matmul(v.basis()).max_abs() <= 1e-5);
        let g: Matrix<f32> = random_orthogonal(5, &mut rng).unwrap();
        assert!(g.tr_matmul(&g).sub(&Matrix::identity(5)).max_abs() <= 1e-5);
    }
}
