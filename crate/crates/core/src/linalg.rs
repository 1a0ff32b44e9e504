//! Dense complex linear algebra helpers shared by the model modules.

use nalgebra::linalg::Schur;
use num_complex::Complex64;

use crate::{CMatrix, CVector, Error, Result};

/// Relative pivot size below which an LU factorization is treated as singular.
const PIVOT_FLOOR: f64 = 1e-14;

/// Relative singular-value cutoff used for numerical ranks.
pub const RANK_TOL: f64 = 1e-8;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖a − b‖_F / max(1, ‖a‖_F, ‖b‖_F)`.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = 1f64.max(frobenius(a)).max(frobenius(b));
    frobenius(&(a - b)) / scale
}

pub fn vec_diff(a: &CVector, b: &CVector) -> f64 {
    vec_norm(&(a - b))
}

/// Solves `m x = rhs`; `None` when `m` is numerically singular.
pub fn solve(m: &CMatrix, rhs: &CMatrix) -> Option<CMatrix> {
    let n = m.nrows();
    if n == 0 {
        return Some(CMatrix::zeros(0, rhs.ncols()));
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let scale = m
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    if (0..n).any(|i| u[(i, i)].norm() <= PIVOT_FLOOR * scale) {
        return None;
    }
    lu.solve(rhs)
}

/// `(μ − A)⁻¹ rhs`.
pub fn shifted_solve(a: &CMatrix, mu: Complex64, rhs: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let shifted = CMatrix::from_diagonal_element(n, n, mu) - a;
    solve(&shifted, rhs).ok_or(Error::SingularResolvent(mu))
}

/// `rhs (μ − A)⁻¹`.
pub fn shifted_solve_left(a: &CMatrix, mu: Complex64, rhs: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let shifted = CMatrix::from_diagonal_element(n, n, mu.conj()) - a.adjoint();
    let x = solve(&shifted, &rhs.adjoint()).ok_or(Error::SingularResolvent(mu))?;
    Ok(x.adjoint())
}

pub fn eigenvalues(a: &CMatrix) -> Vec<Complex64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let schur = Schur::new(a.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Largest real part over the spectrum; `-inf` for the empty matrix.
pub fn spectral_abscissa(a: &CMatrix) -> f64 {
    eigenvalues(a)
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = hermitian_part(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn max_singular_value(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Numerical rank with cutoff `RANK_TOL · σ_max`.
pub fn rank(m: &CMatrix) -> usize {
    let sv = singular_values(m);
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Orthonormal basis (as columns) of the numerical range of `m`.
pub fn orth_range(m: &CMatrix) -> CMatrix {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return CMatrix::zeros(rows, 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > RANK_TOL * top)
        .collect();
    CMatrix::from_fn(rows, keep.len(), |r, k| u[(r, keep[k])])
}

/// Orthonormal basis of the orthogonal complement of the columns of `q` in `Cⁿ`.
pub fn orth_complement(q: &CMatrix, n: usize) -> CMatrix {
    if q.ncols() == 0 {
        return identity(n);
    }
    let p = identity(n) - q * q.adjoint();
    // Eigenvalues of `p` are 0 or 1; anything above one half belongs to the complement.
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let svd = p.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 0.5)
        .collect();
    CMatrix::from_fn(n, keep.len(), |r, k| u[(r, keep[k])])
}

pub fn projector(q: &CMatrix) -> CMatrix {
    q * q.adjoint()
}

/// Moore-Penrose inverse of a Hermitian positive semidefinite matrix, discarding
/// eigenvalues below `rel · λ_max`.
pub fn pinv_psd(m: &CMatrix, rel: f64) -> CMatrix {
    let n = m.nrows();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let mut out = CMatrix::zeros(n, n);
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > rel * top && lam > 0.0 {
            let v = eig.eigenvectors.column(i);
            out += (v * v.adjoint()).scale(1.0 / lam);
        }
    }
    out
}

pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

pub fn stack_vec(a: &CVector, b: &CVector) -> CVector {
    CVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Column matrix view of a vector.
pub fn col(v: &CVector) -> CMatrix {
    CMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

pub fn to_vec(m: &CMatrix) -> CVector {
    assert_eq!(m.ncols(), 1, "expected a single column");
    CVector::from_column_slice(m.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_flags_singular_shift() {
        let a = CMatrix::from_element(1, 1, c(1.0, 0.0));
        assert!(shifted_solve(&a, c(1.0, 0.0), &identity(1)).is_err());
        let x = shifted_solve(&a, c(3.0, 0.0), &identity(1)).unwrap();
        assert!((x[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn left_solve_matches_right_solve() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[c(-1.0, 0.3), c(0.2, 0.0), c(0.0, 1.0), c(-2.0, 0.0)],
        );
        let mu = c(0.7, -0.4);
        let inv = shifted_solve(&a, mu, &identity(2)).unwrap();
        let rhs = CMatrix::from_row_slice(1, 2, &[c(1.0, 2.0), c(-0.5, 0.0)]);
        let left = shifted_solve_left(&a, mu, &rhs).unwrap();
        assert!(rel_diff(&left, &(&rhs * inv)) < 1e-14);
    }

    #[test]
    fn complement_and_range_are_orthogonal() {
        let m = CMatrix::from_row_slice(
            3,
            2,
            &[
                c(1.0, 0.0),
                c(2.0, 0.0),
                c(0.0, 1.0),
                c(0.0, 2.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
            ],
        );
        let q = orth_range(&m);
        assert_eq!(q.ncols(), 1);
        let qc = orth_complement(&q, 3);
        assert_eq!(qc.ncols(), 2);
        assert!(frobenius(&(q.adjoint() * &qc)) < 1e-14);
    }

    #[test]
    fn empty_matrices_are_tolerated() {
        let z = CMatrix::zeros(0, 0);
        assert!(eigenvalues(&z).is_empty());
        assert_eq!(rank(&z), 0);
        assert!(hermitian_eigenvalues(&z).is_empty());
        assert_eq!(orth_range(&CMatrix::zeros(2, 0)).ncols(), 0);
    }
}
