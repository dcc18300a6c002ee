use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::law::{LawExpr, SecondOrderLaw};
use crate::linalg::{CMatrix, CVector};
use crate::reformulation::{recover_u, FirstOrderSystem};

use super::Trajectory;

/// Pivot ratio below which a frequency sample counts as singular.
const PIVOT_RTOL: f64 = 1e-13;

#[derive(Clone, Debug, Serialize)]
pub struct FrequencySolution {
    /// Solution on `[0, T/2)`.
    pub x: Trajectory,
    pub rho: f64,
    /// `e^{-ρT/2}`, the periodization leakage bound.
    pub wrap_factor: f64,
    /// Largest imaginary part discarded when returning to real values.
    pub max_imag: f64,
    pub frequencies: usize,
}

/// Solves `(S(∂₀) + A) x = F(∂₀) f` through the damped discrete Fourier transform.
///
/// The source is damped by `e^{-ρt}`, transformed, divided by the symbol
/// `S(z) + A` at `z̃ = (2/Δt) tanh(zΔt/2)`, `z = iω + ρ`, and transformed
/// back. The bilinear substitution makes the result the exact z-domain
/// solution of the trapezoidal discretization, so only the circular wrap
/// (bounded by `e^{-ρT/2}` for sources vanishing on the second half)
/// separates it from the causal time-stepped solution.
///
/// Undamping multiplies roundoff by up to `e^{ρT/2}`; keep `ρT/2` near 20 or below.
pub fn solve_frequency(
    law: &SecondOrderLaw,
    a: &CMatrix,
    source: &Trajectory,
    source_factor: Option<&LawExpr>,
    rho: f64,
) -> Result<FrequencySolution> {
    let dim = law.dim();
    let len = source.len();
    if a.nrows() != dim || a.ncols() != dim || source.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "law {dim}, A {}x{}, source {}",
            a.nrows(),
            a.ncols(),
            source.dim()
        )));
    }
    if let Some(f) = source_factor {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch(format!("source factor {} vs {dim}", f.dim())));
        }
    }
    if len < 4 || !len.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("need an even number of samples (got {len})")));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("weight ρ = {rho} must be positive")));
    }
    let margin = law.analytic_margin();
    if source.t0 != 0.0 {
        return Err(Error::InvalidParameter("source must start at t = 0".into()));
    }
    let peak = source.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tail = source.data()[dim * len / 2..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if tail > 1e-12 * peak {
        return Err(Error::InvalidParameter(
            "source must vanish on the second half of the window".into(),
        ));
    }
    let dt = source.dt;

    // damped, transformed source per component
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut spectra: Vec<Vec<Complex64>> = (0..dim)
        .map(|k| {
            (0..len)
                .map(|i| Complex64::new(source.sample(i)[k] * (-rho * source.time(i)).exp(), 0.0))
                .collect()
        })
        .collect();
    for s in spectra.iter_mut() {
        fwd.process(s);
    }

    let real = law.is_real() && crate::linalg::is_real(a) && source_factor.is_none_or(|f| f.is_real());
    let count = if real { len / 2 + 1 } else { len };
    // affine symbols zP + Q skip the expression tree
    let affine = law.affine_symbol().map(|(p, q)| (p, q + a));
    let solved: Vec<CVector> = (0..count)
        .into_par_iter()
        .map(|j| {
            let omega = 2.0 * std::f64::consts::PI * j as f64 / (len as f64 * dt);
            let z = Complex64::new(rho, omega);
            let zt = (z * (0.5 * dt)).tanh() * (2.0 / dt);
            if zt.re <= -margin {
                return Err(Error::Domain { z: zt, bound: -margin });
            }
            let mut rhs = CVector::from_fn(dim, |k, _| spectra[k][j]);
            if let Some(f) = source_factor {
                rhs = f.eval(zt)? * rhs;
            }
            let t = match &affine {
                Some((p, qa)) => p * zt + qa,
                None => law.eval_symbol(zt)? + a,
            };
            solve_checked(t, &rhs)
        })
        .collect::<Result<_>>()?;

    let mut out: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); len]; dim];
    for (j, x) in solved.iter().enumerate() {
        for k in 0..dim {
            out[k][j] = x[k];
            if real && j > 0 && j < len - j {
                out[k][len - j] = x[k].conj();
            }
        }
    }
    let half = len / 2;
    let mut x = Trajectory::zeros(0.0, dt, dim, half);
    let mut max_imag = 0.0f64;
    for (k, s) in out.iter_mut().enumerate() {
        inv.process(s);
        for i in 0..half {
            let v = s[i] / len as f64 * (rho * source.time(i)).exp();
            max_imag = max_imag.max(v.im.abs());
            x.sample_mut(i)[k] = v.re;
        }
    }
    Ok(FrequencySolution {
        x,
        rho,
        wrap_factor: (-rho * dt * half as f64).exp(),
        max_imag,
        frequencies: count,
    })
}

fn solve_checked(t: CMatrix, rhs: &CVector) -> Result<CVector> {
    let lu = t.lu();
    let u = lu.u();
    let diag: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].norm()).collect();
    let hi = diag.iter().cloned().fold(0.0, f64::max);
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(lo > PIVOT_RTOL * hi) {
        return Err(Error::Singular {
            sigma_min: lo,
            threshold: PIVOT_RTOL * hi,
        });
    }
    lu.solve(rhs).ok_or(Error::Singular {
        sigma_min: 0.0,
        threshold: 0.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WaveFrequencySolution {
    pub u: Trajectory,
    /// `∂₀u = v - d u`.
    pub du: Trajectory,
    pub wrap_factor: f64,
    pub max_imag: f64,
}

/// Frequency-domain solve of the reformulated wave: source `(F f, 0)` in the
/// unknowns `(v, q)`, then `u = C⁻¹ q`.
pub fn solve_wave_frequency(
    sys: &FirstOrderSystem,
    f: &Trajectory,
    source_factor: Option<&LawExpr>,
    rho: f64,
) -> Result<WaveFrequencySolution> {
    let n = sys.c.dim();
    if f.dim() != n {
        return Err(Error::DimensionMismatch(format!("source dimension {} vs {n}", f.dim())));
    }
    let mut block = Trajectory::zeros(f.t0, f.dt, 2 * n, f.len());
    for i in 0..f.len() {
        block.sample_mut(i)[..n].copy_from_slice(f.sample(i));
    }
    // the factor acts on the first block only
    let factor = match source_factor {
        Some(m) => Some(LawExpr::block(
            m.clone(),
            LawExpr::zero(n),
            LawExpr::zero(n),
            LawExpr::identity(n),
        )?),
        None => None,
    };
    let sol = solve_frequency(&sys.law, sys.a.matrix(), &block, factor.as_ref(), rho)?;
    let len = sol.x.len();
    let mut v = Trajectory::zeros(0.0, f.dt, n, len);
    let mut q = Trajectory::zeros(0.0, f.dt, n, len);
    for i in 0..len {
        let s = sol.x.sample(i);
        v.sample_mut(i).copy_from_slice(&s[..n]);
        q.sample_mut(i).copy_from_slice(&s[n..]);
    }
    let (u, du) = recover_u(&v, &q, &sys.c, sys.d)?;
    Ok(WaveFrequencySolution {
        u,
        du,
        wrap_factor: sol.wrap_factor,
        max_imag: sol.max_imag,
    })
}

/// `‖a - b‖ / ‖b‖` over all samples.
pub fn relative_l2(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    a.check_same_grid(b)?;
    let num: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.data().iter().map(|y| y * y).sum();
    if den == 0.0 {
        return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok((num / den).sqrt())
}
