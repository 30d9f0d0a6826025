//! Householder QR for tall matrices.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::Scalar;

/// Compact QR factorization `M = Q·R` of an `m×n` matrix with `m ≥ n`.
///
/// Reflector `j` acts on rows `j..m` and is stored as a unit vector; a
/// `None` reflector marks an all-zero column (identity step).
pub struct HouseholderQr<T> {
    rows: usize,
    cols: usize,
    reflectors: Vec<Option<Vec<T>>>,
    /// Upper-triangular factor, `n×n`.
    r: Matrix<T>,
}

impl<T: Scalar> HouseholderQr<T> {
    pub fn new(m: &Matrix<T>) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        assert!(cols <= rows, "HouseholderQr needs rows >= cols");
        let mut a = m.clone();
        let mut reflectors = Vec::with_capacity(cols);
        let two = T::lit(2.0);

        for j in 0..cols {
            let norm = (j..rows).map(|i| a[(i, j)] * a[(i, j)]).sum::<T>().sqrt();
            if norm == T::zero() {
                reflectors.push(None);
                continue;
            }
            let x0 = a[(j, j)];
            let alpha = if x0 >= T::zero() { -norm } else { norm };
            let mut v: Vec<T> = (j..rows).map(|i| a[(i, j)]).collect();
            v[0] -= alpha;
            let vnorm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
            for x in &mut v {
                *x /= vnorm;
            }
            a[(j, j)] = alpha;
            for i in j + 1..rows {
                a[(i, j)] = T::zero();
            }
            for c in j + 1..cols {
                let dot: T = v.iter().enumerate().map(|(l, &vl)| vl * a[(j + l, c)]).sum();
                let f = two * dot;
                for (l, &vl) in v.iter().enumerate() {
                    a[(j + l, c)] -= f * vl;
                }
            }
            reflectors.push(Some(v));
        }

        let r = Matrix::from_fn(cols, cols, |i, j| if i <= j { a[(i, j)] } else { T::zero() });
        Self { rows, cols, reflectors, r }
    }

    pub fn r(&self) -> &Matrix<T> {
        &self.r
    }

    /// Diagonal of `R`.
    pub fn pivots(&self) -> Vec<T> {
        (0..self.cols).map(|i| self.r[(i, i)]).collect()
    }

    /// Fails with [`Error::RankDeficient`] when some pivot is smaller than
    /// `T::RANK_TOL` times the largest one.
    pub fn check_full_rank(&self) -> Result<()> {
        let pivots = self.pivots();
        let largest = pivots.iter().fold(T::zero(), |m, p| m.max(p.abs()));
        let threshold = T::lit(T::RANK_TOL) * largest;
        let smallest = pivots.iter().fold(T::infinity(), |m, p| m.min(p.abs()));
        if largest == T::zero() || smallest < threshold {
            return Err(Error::RankDeficient {
                pivot: smallest.to_f64().unwrap_or(0.0),
                largest: largest.to_f64().unwrap_or(0.0),
            });
        }
        Ok(())
    }

    /// Applies `Q = H₀·H₁·…` to the columns of `x` in place.
    fn apply_q(&self, x: &mut Matrix<T>) {
        let two = T::lit(2.0);
        for (j, refl) in self.reflectors.iter().enumerate().rev() {
            let Some(v) = refl else { continue };
            for c in 0..x.cols() {
                let dot: T = v.iter().enumerate().map(|(l, &vl)| vl * x[(j + l, c)]).sum();
                let f = two * dot;
                for (l, &vl) in v.iter().enumerate() {
                    x[(j + l, c)] -= f * vl;
                }
            }
        }
    }

    /// Full `m×m` orthogonal factor. Columns `n..m` span the orthogonal
    /// complement of the column space when `M` has full column rank.
    pub fn q_full(&self) -> Matrix<T> {
        let mut q = Matrix::identity(self.rows);
        self.apply_q(&mut q);
        q
    }

    /// First `n` columns of `Q`, each flipped so the matching pivot of `R`
    /// is nonnegative.
    pub fn q_thin_signed(&self) -> Matrix<T> {
        let mut q = Matrix::from_fn(self.rows, self.cols, |i, j| if i == j { T::one() } else { T::zero() });
        self.apply_q(&mut q);
        for (j, p) in self.pivots().into_iter().enumerate() {
            if p < T::zero() {
                q.negate_column(j);
            }
        }
        q
    }
}
