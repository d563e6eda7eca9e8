//! Small dense symmetric linear algebra used by the Gaussian machinery.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Largest condition number accepted before an inversion is refused.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Relative asymmetry tolerated by [`check_symmetric`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Cholesky factorisation of a symmetric positive-definite matrix, vetted by
/// its spectral condition number.
pub struct SpdFactor<T: Real> {
    chol: Cholesky<T, Dyn>,
    condition: T,
}

impl<T: Real> SpdFactor<T> {
    pub fn new(m: &DMatrix<T>, context: &'static str) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "{context}: {}x{} is not square",
                m.nrows(),
                m.ncols()
            )));
        }
        let sym = symmetrize(m);
        let eig = SymmetricEigen::new(sym.clone());
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        if !(min > T::zero()) {
            return Err(Error::NotPositiveDefinite);
        }
        let condition = max / min;
        if to_f64(condition) > CONDITION_LIMIT {
            return Err(Error::Conditioning {
                context,
                condition: to_f64(condition),
                limit: CONDITION_LIMIT,
            });
        }
        let chol = Cholesky::new(sym).ok_or(Error::NotPositiveDefinite)?;
        Ok(Self { chol, condition })
    }

    pub fn condition(&self) -> T {
        self.condition
    }

    pub fn log_det(&self) -> T {
        let l = self.chol.l_dirty();
        (0..l.nrows()).fold(T::zero(), |acc, i| acc + l[(i, i)].ln()) * lit(2.0)
    }

    pub fn inverse(&self) -> DMatrix<T> {
        symmetrize(&self.chol.inverse())
    }

    pub fn solve(&self, b: &DMatrix<T>) -> DMatrix<T> {
        self.chol.solve(b)
    }

    pub fn solve_vec(&self, b: &DVector<T>) -> DVector<T> {
        self.chol.solve(b)
    }
}

pub fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * lit::<T>(0.5)
}

/// Largest |m_ij - m_ji| relative to the largest entry.
pub fn asymmetry<T: Real>(m: &DMatrix<T>) -> T {
    let scale = m.amax().max(T::one());
    (m - m.transpose()).amax() / scale
}

pub fn check_symmetric<T: Real>(m: &DMatrix<T>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Shape(format!("{}x{} is not square", m.nrows(), m.ncols())));
    }
    let a = asymmetry(m);
    if to_f64(a) > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            asymmetry: to_f64(a),
        });
    }
    Ok(())
}

/// Standard symplectic form for `n_modes` modes in (x1, p1, ..., xN, pN) order.
pub fn symplectic_form<T: Real>(n_modes: usize) -> DMatrix<T> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = T::one();
        omega[(2 * k + 1, 2 * k)] = -T::one();
    }
    omega
}

/// Symplectic eigenvalues of a covariance matrix, ascending.
///
/// With A = γ^{1/2} Ω γ^{1/2} antisymmetric, -A² is symmetric and carries
/// each ν² twice.
pub fn symplectic_eigenvalues<T: Real>(gamma: &DMatrix<T>) -> Vec<T> {
    let n = gamma.nrows() / 2;
    let eig = SymmetricEigen::new(symmetrize(gamma));
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(T::zero()).sqrt());
    let root = &eig.eigenvectors
        * DMatrix::from_diagonal(&sqrt_vals)
        * eig.eigenvectors.transpose();
    let a = &root * symplectic_form::<T>(n) * &root;
    let sq = symmetrize(&(-(&a * &a)));
    let mut nu2: Vec<T> = SymmetricEigen::new(sq).eigenvalues.iter().copied().collect();
    nu2.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    nu2.chunks(2)
        .map(|pair| ((pair[0] + pair[1]) * lit(0.5)).max(T::zero()).sqrt())
        .collect()
}

/// Principal submatrix on the given row/column indices.
pub fn submatrix<T: Real>(m: &DMatrix<T>, idx: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Quadrature indices (x, p) of the listed modes.
pub fn mode_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}

/// Block-diagonal direct sum.
pub fn direct_sum<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let n = a.nrows() + b.nrows();
    let mut out = DMatrix::zeros(n, n);
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// Σ sign_i exp(log_i), scaled by the largest magnitude so no term under- or
/// overflows on its own.
pub fn signed_exp_sum<T: Real>(terms: &[(i32, T)]) -> T {
    let Some(max) = terms.iter().map(|t| t.1).reduce(|a, b| a.max(b)) else {
        return T::zero();
    };
    let scaled = terms.iter().fold(T::zero(), |acc, &(s, l)| {
        let v = (l - max).exp();
        if s >= 0 {
            acc + v
        } else {
            acc - v
        }
    });
    scaled * max.exp()
}
