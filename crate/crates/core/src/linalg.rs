//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on `DMatrix<Complex64>`. Spectral quantities go
//! through nalgebra's Hermitian eigensolver and SVD; nothing is hand-rolled.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative threshold below which a matrix is treated as singular.
pub const SINGULAR_RTOL: f64 = 1e-12;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

fn check_square(s: &CMatrix) -> Result<usize> {
    if s.nrows() != s.ncols() {
        return Err(Error::NotSquare {
            rows: s.nrows(),
            cols: s.ncols(),
        });
    }
    Ok(s.nrows())
}

fn check_finite(s: &CMatrix) -> Result<()> {
    if s.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// `(S + S*) / 2`.
pub fn herm_part(s: &CMatrix) -> CMatrix {
    (s + s.adjoint()).scale(0.5)
}

/// Smallest eigenvalue of the Hermitian part of `s`, i.e. `min Re <Sx, x>` over unit `x`.
pub fn herm_min_eig(s: &CMatrix) -> Result<f64> {
    check_square(s)?;
    check_finite(s)?;
    if s.nrows() == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    let eig = herm_part(s).symmetric_eigenvalues();
    Ok(eig.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Smallest eigenvalue of the Hermitian part together with a unit eigenvector.
pub fn herm_min_eigpair(s: &CMatrix) -> Result<(f64, CVector)> {
    check_square(s)?;
    check_finite(s)?;
    let eig = herm_part(s).symmetric_eigen();
    let (idx, val) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    Ok((val, eig.eigenvectors.column(idx).into_owned()))
}

pub fn singular_values(s: &CMatrix) -> Result<DVector<f64>> {
    check_finite(s)?;
    Ok(s.clone().singular_values())
}

/// Spectral norm (largest singular value).
pub fn op_norm(s: &CMatrix) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    s.clone().singular_values().max()
}

pub fn smallest_sv(s: &CMatrix) -> Result<f64> {
    check_square(s)?;
    Ok(singular_values(s)?.min())
}

/// `(sigma_min, sigma_max)` in one decomposition.
pub fn sv_extremes(s: &CMatrix) -> Result<(f64, f64)> {
    check_square(s)?;
    let sv = singular_values(s)?;
    Ok((sv.min(), sv.max()))
}

fn check_invertible(s: &CMatrix) -> Result<(f64, f64)> {
    let (lo, hi) = sv_extremes(s)?;
    let threshold = SINGULAR_RTOL * hi;
    if hi == 0.0 || lo <= threshold {
        return Err(Error::Singular {
            sigma_min: lo,
            threshold,
        });
    }
    Ok((lo, hi))
}

/// Solves `S x = b`, refusing matrices whose smallest singular value is
/// below `1e-12 * ||S||`.
pub fn solve(s: &CMatrix, b: &CVector) -> Result<CVector> {
    let n = check_square(s)?;
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "rhs has length {}, matrix is {n}x{n}",
            b.len()
        )));
    }
    check_invertible(s)?;
    s.clone()
        .lu()
        .solve(b)
        .ok_or(Error::Singular {
            sigma_min: 0.0,
            threshold: 0.0,
        })
}

pub fn inverse(s: &CMatrix) -> Result<CMatrix> {
    check_square(s)?;
    check_invertible(s)?;
    s.clone().try_inverse().ok_or(Error::Singular {
        sigma_min: 0.0,
        threshold: 0.0,
    })
}

/// `||S^{-1}|| = 1 / sigma_min(S)`; errors if `S` is numerically singular.
pub fn inverse_norm(s: &CMatrix) -> Result<f64> {
    let (lo, _) = check_invertible(s)?;
    Ok(1.0 / lo)
}

pub fn is_hermitian(s: &CMatrix, rtol: f64) -> bool {
    if s.nrows() != s.ncols() {
        return false;
    }
    let scale = op_norm(s).max(f64::MIN_POSITIVE);
    op_norm(&(s - s.adjoint())) <= rtol * scale
}

pub fn is_real(s: &CMatrix) -> bool {
    s.iter().all(|v| v.im == 0.0)
}

/// Block matrix `[[a, b], [c, d]]` from four square blocks of equal size.
pub fn block2(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((0, n), (n, n)).copy_from(b);
    out.view_mut((n, 0), (n, n)).copy_from(c);
    out.view_mut((n, n), (n, n)).copy_from(d);
    out
}

/// Largest singular value of a real 2x2 matrix, closed form.
pub fn norm2x2(m: [[f64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = m;
    let s = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
    ((s + disc) / 2.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            v.len(),
            v.iter().map(|&x| cx(x, 0.0)),
        ))
    }

    #[test]
    fn herm_min_eig_matches_table() {
        assert_abs_diff_eq!(herm_min_eig(&diag(&[2.0, 3.0])).unwrap(), 2.0, epsilon = 1e-14);
        let skew = CMatrix::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(1.0, 0.0), cx(-1.0, 0.0), cx(0.0, 0.0)]);
        assert_abs_diff_eq!(herm_min_eig(&skew).unwrap(), 0.0, epsilon = 1e-14);
        let m = CMatrix::from_row_slice(1, 1, &[cx(0.5, 7.0)]);
        assert_abs_diff_eq!(herm_min_eig(&m).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn herm_min_eig_rejects_bad_input() {
        assert!(matches!(
            herm_min_eig(&CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        let mut m = identity(2);
        m[(0, 1)] = cx(f64::NAN, 0.0);
        assert!(matches!(herm_min_eig(&m), Err(Error::NonFinite)));
    }

    #[test]
    fn solve_refuses_singular() {
        let m = diag(&[1.0, 1e-14]);
        let b = CVector::from_element(2, cx(1.0, 0.0));
        assert!(matches!(solve(&m, &b), Err(Error::Singular { .. })));
        let x = solve(&diag(&[2.0, 4.0]), &b).unwrap();
        assert_abs_diff_eq!(x[1].re, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn norm2x2_agrees_with_svd() {
        let m = [[3.0, 1.5], [0.0, 1.0]];
        let full = CMatrix::from_row_slice(2, 2, &[cx(3.0, 0.0), cx(1.5, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]);
        assert_abs_diff_eq!(norm2x2(m), op_norm(&full), epsilon = 1e-12);
    }

    #[test]
    fn eigpair_attains_minimum() {
        let m = CMatrix::from_row_slice(2, 2, &[cx(1.0, 0.3), cx(2.0, -1.0), cx(0.0, 1.0), cx(4.0, 0.0)]);
        let (lam, v) = herm_min_eigpair(&m).unwrap();
        let q = (v.adjoint() * &m * &v)[(0, 0)];
        assert_abs_diff_eq!(q.re, lam, epsilon = 1e-12);
    }
}
