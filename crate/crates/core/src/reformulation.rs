//! First-order reformulation in the unknowns `v = ∂₀u + d u`, `q = C u`.
//!
//! With `B = [[-M0, (d M0 - M1) C⁻¹], [0, I]]` the block law is
//! `M_d(w) = diag(M0 + w M1, I) + d w B`, so its frequency symbol is
//! `z diag(M0, I) + diag(M1, 0) + d B`. This is again a [`SecondOrderLaw`]
//! with `M0 ↦ diag(M0, I)` and `M1 ↦ diag(M1, 0) + d B`.
//!
//! The split `M1_d = d B̃ + N_d` isolates everything that depends on `M1`:
//! `B̃ = [[-M0, d M0 C⁻¹], [0, I]]` and `N_d = [[M1, -d M1 C⁻¹], [0, 0]]`.

use crate::error::{Error, Result};
use crate::law::{LawExpr, SecondOrderLaw};
use crate::linalg::{self, CMatrix};
use crate::spatial::{BlockA, SpatialC};
use crate::time_domain::Trajectory;

#[derive(Clone, Debug)]
pub struct FirstOrderSystem {
    pub d: f64,
    pub c: SpatialC,
    pub a: BlockA,
    pub source_law: SecondOrderLaw,
    /// Symbol-level form: `z M0_d(z) + M1_d(z)` equals `z M_d(1/z)`.
    pub law: SecondOrderLaw,
    /// `M_d` itself, as a law in the frequency variable.
    pub md: LawExpr,
}

/// `M̃_d` (as a second-order law) and the perturbation `N_d`.
#[derive(Clone, Debug)]
pub struct SplitMd {
    pub tilde: SecondOrderLaw,
    pub n_d: LawExpr,
}

fn c_inv_law(c: &SpatialC) -> LawExpr {
    LawExpr::Const(c.inverse().clone())
}

fn check_dims(law: &SecondOrderLaw, c: &SpatialC) -> Result<usize> {
    if law.dim() != c.dim() {
        return Err(Error::DimensionMismatch(format!(
            "law acts on dimension {}, C on {}",
            law.dim(),
            c.dim()
        )));
    }
    if !(law.r > 0.0) {
        return Err(Error::InvalidParameter("law radius must be positive".into()));
    }
    Ok(law.dim())
}

fn diag_m0(law: &SecondOrderLaw, n: usize) -> Result<LawExpr> {
    LawExpr::block(law.m0.clone(), LawExpr::zero(n), LawExpr::zero(n), LawExpr::identity(n))
}

/// `B = [[-M0, (d M0 - M1) C⁻¹], [0, I]]`.
fn b_block(law: &SecondOrderLaw, c: &SpatialC, d: f64) -> Result<LawExpr> {
    let n = law.dim();
    let top_right = LawExpr::product(
        LawExpr::sum(vec![
            LawExpr::scale(d, law.m0.clone()),
            LawExpr::scale(-1.0, law.m1.clone()),
        ])?,
        c_inv_law(c),
    )?;
    LawExpr::block(
        LawExpr::scale(-1.0, law.m0.clone()),
        top_right,
        LawExpr::zero(n),
        LawExpr::identity(n),
    )
}

pub fn build_md(law: &SecondOrderLaw, c: &SpatialC, d: f64) -> Result<FirstOrderSystem> {
    let n = check_dims(law, c)?;
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!("d = {d} must be non-negative")));
    }
    let b = b_block(law, c, d)?;
    let m1_d = LawExpr::sum(vec![
        LawExpr::block(law.m1.clone(), LawExpr::zero(n), LawExpr::zero(n), LawExpr::zero(n))?,
        LawExpr::scale(d, b.clone()),
    ])?;
    let symbol_law = SecondOrderLaw::new(diag_m0(law, n)?, m1_d, law.r)?;

    let m_full = LawExpr::sum(vec![law.m0.clone(), LawExpr::times_w(law.m1.clone())])?;
    let md = LawExpr::sum(vec![
        LawExpr::block(m_full, LawExpr::zero(n), LawExpr::zero(n), LawExpr::identity(n))?,
        LawExpr::times_w(LawExpr::scale(d, b)),
    ])?;

    Ok(FirstOrderSystem {
        d,
        c: c.clone(),
        a: c.block_a(),
        source_law: law.clone(),
        law: symbol_law,
        md,
    })
}

pub fn split_md(law: &SecondOrderLaw, c: &SpatialC, d: f64) -> Result<SplitMd> {
    let n = check_dims(law, c)?;
    let b_tilde = LawExpr::block(
        LawExpr::scale(-1.0, law.m0.clone()),
        LawExpr::product(LawExpr::scale(d, law.m0.clone()), c_inv_law(c))?,
        LawExpr::zero(n),
        LawExpr::identity(n),
    )?;
    let tilde = SecondOrderLaw::new(diag_m0(law, n)?, LawExpr::scale(d, b_tilde), law.r)?;
    let n_d = LawExpr::block(
        law.m1.clone(),
        LawExpr::scale(-d, LawExpr::product(law.m1.clone(), c_inv_law(c))?),
        LawExpr::zero(n),
        LawExpr::zero(n),
    )?;
    Ok(SplitMd { tilde, n_d })
}

/// `u = C⁻¹ q`, `∂₀u = v - d u`.
pub fn recover_u(v: &Trajectory, q: &Trajectory, c: &SpatialC, d: f64) -> Result<(Trajectory, Trajectory)> {
    v.check_same_grid(q)?;
    if q.dim() != c.dim() {
        return Err(Error::DimensionMismatch(format!(
            "trajectory dimension {} vs C dimension {}",
            q.dim(),
            c.dim()
        )));
    }
    let c_inv = real_part_checked(c.inverse())?;
    let n = c.dim();
    let mut u = Trajectory::zeros(q.t0, q.dt, n, q.len());
    let mut du = Trajectory::zeros(q.t0, q.dt, n, q.len());
    for i in 0..q.len() {
        let qi = nalgebra::DVector::from_column_slice(q.sample(i));
        let ui = &c_inv * qi;
        u.sample_mut(i).copy_from_slice(ui.as_slice());
        for (k, out) in du.sample_mut(i).iter_mut().enumerate() {
            *out = v.sample(i)[k] - d * ui[k];
        }
    }
    Ok((u, du))
}

pub(crate) fn real_part_checked(m: &CMatrix) -> Result<nalgebra::DMatrix<f64>> {
    if !linalg::is_real(m) {
        let scale = linalg::op_norm(m).max(1.0);
        if m.iter().any(|v| v.im.abs() > 1e-12 * scale) {
            return Err(Error::InvalidParameter(
                "time-domain routines need a real spatial operator".into(),
            ));
        }
    }
    Ok(m.map(|v| v.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Kernel;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_c(x: f64) -> SpatialC {
        SpatialC::from_matrix(CMatrix::from_element(1, 1, cx(x, 0.0))).unwrap()
    }

    #[test]
    fn degenerate_d_zero() {
        let c = SpatialC::dirichlet_1d(2).unwrap();
        let law = SecondOrderLaw::new(LawExpr::identity(2), LawExpr::scalar(0.2, 2), 5.0).unwrap();
        let sys = build_md(&law, &c, 0.0).unwrap();
        let z = cx(0.7, -1.3);
        let md = sys.md.eval(z).unwrap();
        let m = LawExpr::identity(2).eval(z).unwrap() + linalg::identity(2) * (cx(0.2, 0.0) / z);
        let expect = linalg::block2(&m, &linalg::zeros(2), &linalg::zeros(2), &linalg::identity(2));
        assert!((md - expect).norm() < 1e-14);
    }

    #[test]
    fn scalar_hand_example() {
        let law = SecondOrderLaw::new(LawExpr::scalar(1.0, 1), LawExpr::scalar(0.2, 1), 5.0).unwrap();
        let sys = build_md(&law, &scalar_c(2.0), 0.1).unwrap();
        let md = sys.md.eval(cx(1.0, 0.0)).unwrap();
        let expect = [[1.1, -0.005], [0.0, 1.1]];
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(md[(i, j)].re, expect[i][j], epsilon = 1e-14);
                assert_abs_diff_eq!(md[(i, j)].im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn symbol_law_matches_md() {
        let k = Kernel::single(0.5, 1.0, 0.25).unwrap();
        let m0 = LawExpr::conv_resolvent(k.clone(), 3).unwrap();
        let m1 = LawExpr::scale(0.1, LawExpr::delay(1.0, LawExpr::conv_resolvent(k, 3).unwrap()).unwrap());
        let law = SecondOrderLaw::new(m0, m1, 2.0).unwrap();
        let c = SpatialC::dirichlet_1d(3).unwrap();
        let sys = build_md(&law, &c, 0.07).unwrap();
        let split = split_md(&law, &c, 0.07).unwrap();
        for z in [cx(0.3, 2.0), cx(-0.1, -0.4), cx(1.5, 9.0)] {
            let a = sys.law.eval_symbol(z).unwrap();
            let b = sys.md.eval(z).unwrap() * z;
            let s = split.tilde.eval_symbol(z).unwrap() + split.n_d.eval(z).unwrap();
            assert!((&a - &b).norm() < 1e-12 * (1.0 + a.norm()));
            assert!((&a - &s).norm() < 1e-12 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn zero_m1_gives_zero_nd() {
        let c = SpatialC::dirichlet_1d(2).unwrap();
        let law = SecondOrderLaw::new(LawExpr::identity(2), LawExpr::zero(2), 5.0).unwrap();
        let split = split_md(&law, &c, 0.3).unwrap();
        assert_eq!(split.n_d.eval(cx(0.2, 0.5)).unwrap().norm(), 0.0);
    }

    #[test]
    fn recover_examples() {
        let c = scalar_c(2.0);
        let q = Trajectory::from_fn(0.0, 0.1, 5, |_| 6.0);
        let v = Trajectory::from_fn(0.0, 0.1, 5, |_| 5.0);
        let (u, du) = recover_u(&v, &q, &c, 1.0).unwrap();
        assert!(u.data().iter().all(|&x| (x - 3.0).abs() < 1e-14));
        assert!(du.data().iter().all(|&x| (x - 2.0).abs() < 1e-14));
        let q0 = Trajectory::from_fn(0.0, 0.1, 5, |_| 0.0);
        let (u, du) = recover_u(&v, &q0, &c, 1.0).unwrap();
        assert!(u.data().iter().all(|&x| x == 0.0));
        assert_eq!(du.data(), v.data());
        let short = Trajectory::from_fn(0.0, 0.1, 4, |_| 0.0);
        assert!(recover_u(&v, &short, &c, 1.0).is_err());
    }
}
