//! Spatial operators: the invertible `C`, and the skew block `A = [[0, C*], [-C, 0]]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, block2, CMatrix, CVector, SINGULAR_RTOL};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Dirichlet1d { n: usize },
    UserMatrix { rows: usize, cols: usize, reduced: bool },
}

/// A square invertible `C`; `C*C` is the stiffness operator.
#[derive(Clone, Debug)]
pub struct SpatialC {
    c: CMatrix,
    c_inv: CMatrix,
    sigma_min: f64,
    sigma_max: f64,
    provenance: Provenance,
}

impl SpatialC {
    /// Forward-difference gradient with Dirichlet values on `(0,1)`, reduced
    /// to its `n x n` core so that `C*C = tridiag(-1, 2, -1)/h²`.
    pub fn dirichlet_1d(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dirichlet_1d needs n >= 1".into()));
        }
        let h = 1.0 / (n + 1) as f64;
        let mut g = DMatrix::<f64>::zeros(n + 1, n);
        for j in 0..n {
            g[(j, j)] = 1.0 / h;
            g[(j + 1, j)] = -1.0 / h;
        }
        let mut out = Self::reduce(linalg::to_complex(&g))?;
        out.provenance = Provenance::Dirichlet1d { n };
        Ok(out)
    }

    /// Accepts any full-column-rank matrix; rectangular input is reduced to
    /// `Σ V*` from its singular decomposition (same `C*C`, same `||C⁻¹||`).
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        let (rows, cols) = m.shape();
        let reduced = rows != cols;
        let mut out = if reduced { Self::reduce(m)? } else { Self::square(m)? };
        out.provenance = Provenance::UserMatrix { rows, cols, reduced };
        Ok(out)
    }

    fn reduce(g: CMatrix) -> Result<Self> {
        let (rows, cols) = g.shape();
        if rows < cols || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "C is {rows}x{cols}; it must have full column rank"
            )));
        }
        if linalg::is_real(&g) {
            // keep real input real: the complex SVD may attach phases
            let svd = g.map(|v| v.re).svd(false, true);
            let v_t = svd.v_t.expect("requested right singular vectors");
            return Self::square(linalg::to_complex(&(DMatrix::from_diagonal(&svd.singular_values) * v_t)));
        }
        let svd = g.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let sigma = CMatrix::from_diagonal(&svd.singular_values.map(|s| Complex64::new(s, 0.0)));
        Self::square(sigma * v_t)
    }

    fn square(c: CMatrix) -> Result<Self> {
        let (lo, hi) = linalg::sv_extremes(&c)?;
        if hi == 0.0 || lo <= SINGULAR_RTOL * hi {
            return Err(Error::Singular {
                sigma_min: lo,
                threshold: SINGULAR_RTOL * hi,
            });
        }
        let c_inv = linalg::inverse(&c)?;
        let n = c.nrows();
        Ok(Self {
            c,
            c_inv,
            sigma_min: lo,
            sigma_max: hi,
            provenance: Provenance::UserMatrix {
                rows: n,
                cols: n,
                reduced: false,
            },
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.c
    }

    pub fn inverse(&self) -> &CMatrix {
        &self.c_inv
    }

    pub fn dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    /// `||C⁻¹||`, the discrete Poincaré constant.
    pub fn c_inv_norm(&self) -> f64 {
        1.0 / self.sigma_min
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `C*C`.
    pub fn stiffness(&self) -> CMatrix {
        self.c.adjoint() * &self.c
    }

    pub fn is_real(&self) -> bool {
        linalg::is_real(&self.c)
    }

    pub fn block_a(&self) -> BlockA {
        let n = self.dim();
        let z = CMatrix::zeros(n, n);
        BlockA {
            a: block2(&z, &self.c.adjoint(), &(-&self.c), &z),
            inv_norm: self.c_inv_norm(),
            c: Some(self.clone()),
        }
    }
}

/// The skew block operator; user-supplied accretive matrices are accepted too.
#[derive(Clone, Debug)]
pub struct BlockA {
    a: CMatrix,
    inv_norm: f64,
    c: Option<SpatialC>,
}

impl BlockA {
    /// Accepts `A` if it is accretive (`herm_min_eig >= -1e-12`) and invertible.
    pub fn from_matrix(a: CMatrix) -> Result<Self> {
        let h = linalg::herm_min_eig(&a)?;
        if h < -1e-12 {
            return Err(Error::InvalidParameter(format!(
                "A is not accretive: smallest Hermitian eigenvalue {h}"
            )));
        }
        let inv_norm = linalg::inverse_norm(&a)?;
        Ok(Self { a, inv_norm, c: None })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn inv_norm(&self) -> f64 {
        self.inv_norm
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `A⁻¹(f, g) = (-C⁻¹g, (C*)⁻¹f)` for block operators, a dense solve otherwise.
    pub fn apply_inverse(&self, rhs: &CVector) -> Result<CVector> {
        match &self.c {
            Some(c) => {
                let n = c.dim();
                if rhs.len() != 2 * n {
                    return Err(Error::DimensionMismatch(format!(
                        "rhs length {} for a {}-dimensional block operator",
                        rhs.len(),
                        2 * n
                    )));
                }
                let f = rhs.rows(0, n).into_owned();
                let g = rhs.rows(n, n).into_owned();
                let x = -(c.inverse() * g);
                let y = c.inverse().adjoint() * f;
                let mut out = CVector::zeros(2 * n);
                out.rows_mut(0, n).copy_from(&x);
                out.rows_mut(n, n).copy_from(&y);
                Ok(out)
            }
            None => linalg::solve(&self.a, rhs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dirichlet_examples() {
        let c = SpatialC::dirichlet_1d(3).unwrap();
        assert_abs_diff_eq!(c.sigma_min(), 3.0615, epsilon = 1e-4);
        assert_abs_diff_eq!(c.c_inv_norm(), 0.3266, epsilon = 1e-4);
        let c1 = SpatialC::dirichlet_1d(1).unwrap();
        assert_abs_diff_eq!(c1.stiffness()[(0, 0)].re, 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c1.sigma_min(), 8f64.sqrt(), epsilon = 1e-12);
        let big = SpatialC::dirichlet_1d(200).unwrap();
        assert!((big.sigma_min() - std::f64::consts::PI).abs() / std::f64::consts::PI < 1e-3);
    }

    #[test]
    fn stiffness_is_laplacian() {
        let n = 5;
        let c = SpatialC::dirichlet_1d(n).unwrap();
        let h2 = ((n + 1) as f64).powi(2);
        let k = c.stiffness();
        for i in 0..n {
            for j in 0..n {
                let expect = match (i as i64 - j as i64).abs() {
                    0 => 2.0 * h2,
                    1 => -h2,
                    _ => 0.0,
                };
                assert_abs_diff_eq!(k[(i, j)].re, expect, epsilon = 1e-9);
                assert_abs_diff_eq!(k[(i, j)].im, 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn block_a_examples() {
        let c = SpatialC::from_matrix(CMatrix::from_element(1, 1, Complex64::new(2.0, 0.0))).unwrap();
        let a = c.block_a();
        assert_abs_diff_eq!(a.inv_norm(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(linalg::inverse_norm(a.matrix()).unwrap(), 0.5, epsilon = 1e-12);
        let c = SpatialC::dirichlet_1d(3).unwrap();
        let a = c.block_a();
        assert_abs_diff_eq!(linalg::inverse_norm(a.matrix()).unwrap(), c.c_inv_norm(), epsilon = 1e-10);
        assert_abs_diff_eq!(linalg::herm_min_eig(a.matrix()).unwrap(), 0.0, epsilon = 1e-12);
        let rhs = CVector::from_fn(6, |i, _| Complex64::new(i as f64 + 1.0, 0.5));
        let x = a.apply_inverse(&rhs).unwrap();
        assert!((a.matrix() * x - rhs).norm() < 1e-10);
    }

    #[test]
    fn rectangular_user_matrix_is_reduced() {
        let g = CMatrix::from_row_slice(3, 2, &[
            Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0),
        ]);
        let c = SpatialC::from_matrix(g.clone()).unwrap();
        assert_eq!(c.dim(), 2);
        assert!((c.stiffness() - g.adjoint() * &g).norm() < 1e-12);
        let thin = CMatrix::zeros(2, 3);
        assert!(SpatialC::from_matrix(thin).is_err());
    }

    #[test]
    fn non_accretive_a_rejected() {
        let a = CMatrix::from_diagonal_element(2, 2, Complex64::new(-1.0, 0.0));
        assert!(BlockA::from_matrix(a).is_err());
    }
}
