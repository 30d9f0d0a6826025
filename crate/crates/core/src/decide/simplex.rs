//! Dense tableau simplex for `max cᵀx  s.t.  A·x = b, x ≥ 0`.
//!
//! Phase one minimizes the sum of artificials on rows without a ready
//! basic column; phase two optimizes the real objective from the basis
//! phase one leaves behind.
//! Entering and leaving variables follow Bland's rule throughout.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal {
        x: Vec<T>,
        value: T,
    },
    /// Phase one stopped with positive infeasibility `residual`.
    Infeasible {
        residual: T,
    },
    Unbounded,
}

/// Iterations allowed per solve: `50·(rows + cols)`.
pub fn iteration_cap(rows: usize, cols: usize) -> usize {
    50 * (rows + cols)
}

struct Tableau<T> {
    /// Constraint rows followed by the objective row; each has `width` entries,
    /// the last being the right-hand side.
    data: Vec<T>,
    width: usize,
    rows: usize,
    basis: Vec<usize>,
    eps: T,
    pivot_tol: T,
}

impl<T: Scalar> Tableau<T> {
    #[inline]
    fn at(&self, r: usize, c: usize) -> T {
        self.data[r * self.width + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> T {
        self.at(r, self.width - 1)
    }

    fn objective_row(&self) -> usize {
        self.rows
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let p = self.at(r, e);
        for c in 0..w {
            self.data[r * w + c] /= p;
        }
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.at(i, e);
            if f == T::zero() {
                continue;
            }
            for c in 0..w {
                let v = self.data[r * w + c];
                self.data[i * w + c] -= f * v;
            }
            self.data[i * w + e] = T::zero();
        }
        self.basis[r] = e;
    }

    /// Bland's rule iterations over columns `0..allowed`. Returns `false`
    /// when an improving column has no positive entry. With `bounded` set
    /// the objective is known to be bounded, so such a column only carries
    /// roundoff in its reduced cost and is passed over instead.
    fn optimize(&mut self, allowed: usize, bounded: bool, budget: &mut usize) -> Result<bool> {
        let obj = self.objective_row();
        let mut skip_below = 0;
        loop {
            let Some(e) = (skip_below..allowed).find(|&j| self.at(obj, j) < -self.eps) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows {
                let a = self.at(r, e);
                if a <= self.pivot_tol {
                    continue;
                }
                let ratio = self.rhs(r).max(T::zero()) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - self.eps || (ratio <= lratio + self.eps && self.basis[r] < self.basis[lr]) {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                if bounded {
                    skip_below = e + 1;
                    continue;
                }
                return Ok(false);
            };
            if *budget == 0 {
                return Err(Error::NumericalFailure("simplex iteration cap exceeded".into()));
            }
            *budget -= 1;
            self.pivot(r, e);
            skip_below = 0;
        }
    }
}

/// Solves `max cᵀx` over `{x ≥ 0 : A·x = b}`.
///
/// `feas_tol` is the phase-one residual above which the system is declared
/// infeasible.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T], c: &[T], feas_tol: T) -> Result<LpOutcome<T>> {
    solve_impl(a, b, c, feas_tol, false)
}

/// [`solve`] for programs whose objective is known to be bounded above on
/// the feasible set. Never returns [`LpOutcome::Unbounded`]; improving
/// directions without a pivot row are treated as roundoff and skipped.
pub fn solve_bounded<T: Scalar>(a: &Matrix<T>, b: &[T], c: &[T], feas_tol: T) -> Result<LpOutcome<T>> {
    solve_impl(a, b, c, feas_tol, true)
}

fn solve_impl<T: Scalar>(a: &Matrix<T>, b: &[T], c: &[T], feas_tol: T, bounded: bool) -> Result<LpOutcome<T>> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    let width = n + m + 1;
    let mut data = vec![T::zero(); (m + 1) * width];
    for i in 0..m {
        let flip = if b[i] < T::zero() { -T::one() } else { T::one() };
        for j in 0..n {
            data[i * width + j] = flip * a[(i, j)];
        }
        data[i * width + n + i] = T::one();
        data[i * width + width - 1] = flip * b[i];
    }

    // Crash basis: a column with a single nonzero, in row i, can start basic
    // there in place of the artificial, provided the scaled right-hand side
    // stays nonnegative. Slack-like columns make most rows start feasible.
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut used = vec![false; n];
    for j in 0..n {
        let mut nz = (0..m).filter(|&i| data[i * width + j] != T::zero());
        let (Some(i), None) = (nz.next(), nz.next()) else { continue };
        let p = data[i * width + j];
        let rhs = data[i * width + width - 1];
        if used[j] || basis[i] < n || (p < T::zero() && rhs != T::zero()) {
            continue;
        }
        for c in 0..width {
            data[i * width + c] /= p;
        }
        basis[i] = j;
        used[j] = true;
    }

    // Phase-one objective: maximize −Σ artificials, written as reduced costs.
    for i in (0..m).filter(|&i| basis[i] >= n) {
        for j in 0..n {
            let v = data[i * width + j];
            data[m * width + j] -= v;
        }
        let v = data[i * width + width - 1];
        data[m * width + width - 1] -= v;
    }
    let mut t = Tableau { data, width, rows: m, basis, eps: T::lit(T::LP_EPS), pivot_tol: T::lit(T::PIVOT_TOL) };
    let mut budget = iteration_cap(m, n);

    // Artificials that leave the basis never return.
    t.optimize(n, true, &mut budget)?;
    let residual = -t.rhs(t.objective_row());
    if residual > feas_tol {
        return Ok(LpOutcome::Infeasible { residual });
    }

    // Drive remaining artificials out of the basis; rows where that is
    // impossible are redundant and get dropped.
    let mut r = 0;
    while r < t.rows {
        if t.basis[r] >= n {
            match (0..n).find(|&j| t.at(r, j).abs() > t.pivot_tol) {
                Some(e) => t.pivot(r, e),
                None => {
                    drop_row(&mut t, r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase-two reduced costs: d_j = Σ_i c_{B_i}·a_ij − c_j.
    let obj = t.objective_row();
    for j in 0..width {
        let mut d = if j < n { -c[j] } else { T::zero() };
        for i in 0..t.rows {
            d += c[t.basis[i]] * t.at(i, j);
        }
        t.data[obj * width + j] = d;
    }
    if !t.optimize(n, bounded, &mut budget)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![T::zero(); n];
    for i in 0..t.rows {
        x[t.basis[i]] = t.rhs(i).max(T::zero());
    }
    let value = x.iter().zip(c).map(|(&xi, &ci)| xi * ci).sum();
    Ok(LpOutcome::Optimal { x, value })
}

fn drop_row<T: Scalar>(t: &mut Tableau<T>, r: usize) {
    let w = t.width;
    t.data.drain(r * w..(r + 1) * w);
    t.basis.remove(r);
    t.rows -= 1;
}
