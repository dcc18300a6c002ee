//! Material laws as expression trees in the frequency variable `z`.
//!
//! A [`LawExpr`] evaluates to an `n x n` matrix at frequency `z`; the
//! material argument of the underlying operator calculus is `w = 1/z`.
//! A [`SecondOrderLaw`] pairs `M0`, `M1` and has frequency symbol
//! `z M0(z) + M1(z)`.
//!
//! Every node knows the half-plane `Re z > -margin` on which it is analytic
//! and carries a certified sup-norm bound over closed half-planes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{self, block2, norm2x2, op_norm, CMatrix};

#[derive(Clone, Debug)]
pub enum LawExpr {
    Const(CMatrix),
    /// `P + Q/z`.
    AffineInW { p: CMatrix, q: CMatrix },
    /// `(I - K(z))⁻¹` with `K` the kernel's Laplace transform, acting on `dim` channels.
    ConvResolvent { kernel: Kernel, dim: usize },
    /// `inner(z) e^{-hz}`.
    DelayFactor { h: f64, inner: Box<LawExpr> },
    Scale { factor: f64, inner: Box<LawExpr> },
    Sum(Vec<LawExpr>),
    Product(Box<LawExpr>, Box<LawExpr>),
    /// `inner(z) / z`.
    TimesW(Box<LawExpr>),
    /// `[[a, b], [c, d]]` from four laws of equal dimension.
    Block(Box<[LawExpr; 4]>),
}

fn dim_mismatch(what: &str, a: usize, b: usize) -> Error {
    Error::DimensionMismatch(format!("{what}: {a} vs {b}"))
}

impl LawExpr {
    pub fn constant(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(LawExpr::Const(m))
    }

    pub fn identity(n: usize) -> Self {
        LawExpr::Const(linalg::identity(n))
    }

    pub fn zero(n: usize) -> Self {
        LawExpr::Const(linalg::zeros(n))
    }

    pub fn scalar(x: f64, n: usize) -> Self {
        LawExpr::Const(linalg::identity(n) * Complex64::new(x, 0.0))
    }

    pub fn affine_in_w(p: CMatrix, q: CMatrix) -> Result<Self> {
        if p.shape() != q.shape() || p.nrows() != p.ncols() {
            return Err(dim_mismatch("affine law blocks", p.nrows(), q.nrows()));
        }
        Ok(LawExpr::AffineInW { p, q })
    }

    /// Checks `|k|_(1,-alpha) < 1` and the channel count.
    pub fn conv_resolvent(kernel: Kernel, dim: usize) -> Result<Self> {
        if let Some(ch) = kernel.channels() {
            if ch != dim {
                return Err(dim_mismatch("kernel channels vs dimension", ch, dim));
            }
        }
        let norm = kernel.weighted_l1_norm(kernel.alpha())?;
        if norm >= 1.0 {
            return Err(Error::InvalidKernel(format!(
                "|k|_(1,-alpha) = {norm} must be below 1 for the resolvent to exist"
            )));
        }
        Ok(LawExpr::ConvResolvent { kernel, dim })
    }

    pub fn delay(h: f64, inner: LawExpr) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!("delay h = {h} must be positive")));
        }
        Ok(LawExpr::DelayFactor {
            h,
            inner: Box::new(inner),
        })
    }

    pub fn scale(factor: f64, inner: LawExpr) -> Self {
        LawExpr::Scale {
            factor,
            inner: Box::new(inner),
        }
    }

    pub fn sum(terms: Vec<LawExpr>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty sum".into()))?
            .dim();
        for t in &terms {
            if t.dim() != first {
                return Err(dim_mismatch("sum terms", first, t.dim()));
            }
        }
        Ok(LawExpr::Sum(terms))
    }

    pub fn product(a: LawExpr, b: LawExpr) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(dim_mismatch("product factors", a.dim(), b.dim()));
        }
        Ok(LawExpr::Product(Box::new(a), Box::new(b)))
    }

    pub fn times_w(inner: LawExpr) -> Self {
        LawExpr::TimesW(Box::new(inner))
    }

    pub fn block(a: LawExpr, b: LawExpr, c: LawExpr, d: LawExpr) -> Result<Self> {
        let n = a.dim();
        for x in [&b, &c, &d] {
            if x.dim() != n {
                return Err(dim_mismatch("block entries", n, x.dim()));
            }
        }
        Ok(LawExpr::Block(Box::new([a, b, c, d])))
    }

    pub fn dim(&self) -> usize {
        match self {
            LawExpr::Const(m) => m.nrows(),
            LawExpr::AffineInW { p, .. } => p.nrows(),
            LawExpr::ConvResolvent { dim, .. } => *dim,
            LawExpr::DelayFactor { inner, .. } | LawExpr::Scale { inner, .. } | LawExpr::TimesW(inner) => {
                inner.dim()
            }
            LawExpr::Sum(v) => v[0].dim(),
            LawExpr::Product(a, _) => a.dim(),
            LawExpr::Block(b) => 2 * b[0].dim(),
        }
    }

    /// `α_dom`: the law is analytic and bounded on `Re z > -α_dom` (away from `z = 0`
    /// for nodes that divide by `z`).
    pub fn analytic_margin(&self) -> f64 {
        match self {
            LawExpr::Const(_) | LawExpr::AffineInW { .. } => f64::INFINITY,
            LawExpr::ConvResolvent { kernel, .. } => kernel.alpha(),
            LawExpr::DelayFactor { inner, .. } | LawExpr::Scale { inner, .. } | LawExpr::TimesW(inner) => {
                inner.analytic_margin()
            }
            LawExpr::Sum(v) => v.iter().map(|t| t.analytic_margin()).fold(f64::INFINITY, f64::min),
            LawExpr::Product(a, b) => a.analytic_margin().min(b.analytic_margin()),
            LawExpr::Block(b) => b.iter().map(|t| t.analytic_margin()).fold(f64::INFINITY, f64::min),
        }
    }

    fn check_domain(&self, z: Complex64) -> Result<()> {
        let m = self.analytic_margin();
        if !(z.re.is_finite() && z.im.is_finite()) || z.re <= -m {
            return Err(Error::Domain { z, bound: -m });
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<CMatrix> {
        self.check_domain(z)?;
        self.eval_unchecked(z)
    }

    fn eval_unchecked(&self, z: Complex64) -> Result<CMatrix> {
        let zero_err = || Error::Domain { z, bound: 0.0 };
        Ok(match self {
            LawExpr::Const(m) => m.clone(),
            LawExpr::AffineInW { p, q } => {
                if z == Complex64::new(0.0, 0.0) {
                    return Err(zero_err());
                }
                p + q / z
            }
            LawExpr::ConvResolvent { kernel, dim } => {
                let ch = kernel.laplace_channels(z)?;
                let one = Complex64::new(1.0, 0.0);
                let mut out = CMatrix::zeros(*dim, *dim);
                for i in 0..*dim {
                    let kv = if ch.len() == 1 { ch[0] } else { ch[i] };
                    let den = one - kv;
                    if den.norm() <= 1e-14 {
                        return Err(Error::Singular {
                            sigma_min: den.norm(),
                            threshold: 1e-14,
                        });
                    }
                    out[(i, i)] = one / den;
                }
                out
            }
            LawExpr::DelayFactor { h, inner } => inner.eval_unchecked(z)? * (-z * *h).exp(),
            LawExpr::Scale { factor, inner } => inner.eval_unchecked(z)? * Complex64::new(*factor, 0.0),
            LawExpr::Sum(v) => {
                let mut acc = v[0].eval_unchecked(z)?;
                for t in &v[1..] {
                    acc += t.eval_unchecked(z)?;
                }
                acc
            }
            LawExpr::Product(a, b) => a.eval_unchecked(z)? * b.eval_unchecked(z)?,
            LawExpr::TimesW(inner) => {
                if z == Complex64::new(0.0, 0.0) {
                    return Err(zero_err());
                }
                inner.eval_unchecked(z)? / z
            }
            LawExpr::Block(b) => block2(
                &b[0].eval_unchecked(z)?,
                &b[1].eval_unchecked(z)?,
                &b[2].eval_unchecked(z)?,
                &b[3].eval_unchecked(z)?,
            ),
        })
    }

    /// `z · law(z)`, evaluated structurally so the limit at `z = 0` is exact
    /// whenever it exists (e.g. `z · (Q/z) = Q`).
    pub fn eval_times_z(&self, z: Complex64) -> Result<CMatrix> {
        self.check_domain(z)?;
        self.eval_times_z_unchecked(z)
    }

    fn eval_times_z_unchecked(&self, z: Complex64) -> Result<CMatrix> {
        Ok(match self {
            LawExpr::Const(m) => m * z,
            LawExpr::AffineInW { p, q } => p * z + q,
            LawExpr::TimesW(inner) => inner.eval_unchecked(z)?,
            LawExpr::Scale { factor, inner } => {
                inner.eval_times_z_unchecked(z)? * Complex64::new(*factor, 0.0)
            }
            LawExpr::Sum(v) => {
                let mut acc = v[0].eval_times_z_unchecked(z)?;
                for t in &v[1..] {
                    acc += t.eval_times_z_unchecked(z)?;
                }
                acc
            }
            LawExpr::Product(a, b) => a.eval_times_z_unchecked(z)? * b.eval_unchecked(z)?,
            LawExpr::DelayFactor { h, inner } => inner.eval_times_z_unchecked(z)? * (-z * *h).exp(),
            LawExpr::ConvResolvent { .. } => self.eval_unchecked(z)? * z,
            LawExpr::Block(b) => block2(
                &b[0].eval_times_z_unchecked(z)?,
                &b[1].eval_times_z_unchecked(z)?,
                &b[2].eval_times_z_unchecked(z)?,
                &b[3].eval_times_z_unchecked(z)?,
            ),
        })
    }

    /// True when the law does not depend on `z`.
    pub fn is_constant(&self) -> bool {
        match self {
            LawExpr::Const(_) => true,
            LawExpr::AffineInW { q, .. } => q.iter().all(|v| v.norm() == 0.0),
            LawExpr::ConvResolvent { kernel, .. } => kernel.weighted_l1_norm(0.0).is_ok_and(|v| v == 0.0),
            LawExpr::DelayFactor { .. } | LawExpr::TimesW(_) => false,
            LawExpr::Scale { inner, .. } => inner.is_constant(),
            LawExpr::Sum(v) => v.iter().all(|t| t.is_constant()),
            LawExpr::Product(a, b) => a.is_constant() && b.is_constant(),
            LawExpr::Block(b) => b.iter().all(|t| t.is_constant()),
        }
    }

    pub fn constant_value(&self) -> Option<CMatrix> {
        if self.is_constant() {
            self.eval(Complex64::new(1.0, 0.0)).ok()
        } else {
            None
        }
    }

    /// `(P, Q)` with `z · law(z) = zP + Q` for all `z`, when the law has that form.
    pub fn affine_times_z(&self) -> Option<(CMatrix, CMatrix)> {
        match self {
            LawExpr::Const(m) => Some((m.clone(), CMatrix::zeros(m.nrows(), m.ncols()))),
            LawExpr::AffineInW { p, q } => Some((p.clone(), q.clone())),
            LawExpr::TimesW(inner) => {
                let q = inner.constant_value()?;
                Some((CMatrix::zeros(q.nrows(), q.ncols()), q))
            }
            LawExpr::Scale { factor, inner } => {
                let (p, q) = inner.affine_times_z()?;
                let f = Complex64::new(*factor, 0.0);
                Some((p * f, q * f))
            }
            LawExpr::Sum(v) => {
                let mut it = v.iter();
                let (mut p, mut q) = it.next()?.affine_times_z()?;
                for t in it {
                    let (pp, qq) = t.affine_times_z()?;
                    p += pp;
                    q += qq;
                }
                Some((p, q))
            }
            LawExpr::Product(a, b) => {
                if let Some(ca) = a.constant_value() {
                    let (p, q) = b.affine_times_z()?;
                    Some((&ca * p, &ca * q))
                } else {
                    let cb = b.constant_value()?;
                    let (p, q) = a.affine_times_z()?;
                    Some((p * &cb, q * &cb))
                }
            }
            LawExpr::Block(b) => {
                let parts: Option<Vec<_>> = b.iter().map(|t| t.affine_times_z()).collect();
                let parts = parts?;
                Some((
                    block2(&parts[0].0, &parts[1].0, &parts[2].0, &parts[3].0),
                    block2(&parts[0].1, &parts[1].1, &parts[2].1, &parts[3].1),
                ))
            }
            LawExpr::ConvResolvent { .. } | LawExpr::DelayFactor { .. } => None,
        }
    }

    /// `law(conj z) = conj(law(z))`: every constant block is real.
    pub fn is_real(&self) -> bool {
        match self {
            LawExpr::Const(m) => linalg::is_real(m),
            LawExpr::AffineInW { p, q } => linalg::is_real(p) && linalg::is_real(q),
            LawExpr::ConvResolvent { .. } => true,
            LawExpr::DelayFactor { inner, .. } | LawExpr::Scale { inner, .. } | LawExpr::TimesW(inner) => {
                inner.is_real()
            }
            LawExpr::Sum(v) => v.iter().all(|t| t.is_real()),
            LawExpr::Product(a, b) => a.is_real() && b.is_real(),
            LawExpr::Block(b) => b.iter().all(|t| t.is_real()),
        }
    }

    /// Certified `sup ||law(z)||` over `Re z >= -rho`.
    ///
    /// Nodes dividing by `z` are only bounded when the region stays away from
    /// the origin (`rho < 0`).
    pub fn sup_bound(&self, rho: f64) -> Result<f64> {
        let margin = self.analytic_margin();
        if rho > margin {
            return Err(Error::Domain {
                z: Complex64::new(-rho, 0.0),
                bound: -margin,
            });
        }
        self.sup_bound_unchecked(rho)
    }

    fn sup_bound_unchecked(&self, rho: f64) -> Result<f64> {
        let inv_dist = |what: &str| -> Result<f64> {
            if rho < 0.0 {
                Ok(1.0 / -rho)
            } else {
                Err(Error::Unbounded(format!("{what} is unbounded near z = 0")))
            }
        };
        Ok(match self {
            LawExpr::Const(m) => op_norm(m),
            LawExpr::AffineInW { p, q } => {
                let qn = op_norm(q);
                if qn == 0.0 {
                    op_norm(p)
                } else {
                    op_norm(p) + qn * inv_dist("affine law")?
                }
            }
            LawExpr::ConvResolvent { kernel, .. } => {
                let n = kernel.weighted_l1_norm(rho)?;
                if n >= 1.0 {
                    return Err(Error::Unbounded(format!(
                        "|k|_(1,-rho) = {n} >= 1 at rho = {rho}"
                    )));
                }
                1.0 / (1.0 - n)
            }
            LawExpr::DelayFactor { h, inner } => (h * rho).exp() * inner.sup_bound_unchecked(rho)?,
            LawExpr::Scale { factor, inner } => factor.abs() * inner.sup_bound_unchecked(rho)?,
            LawExpr::Sum(v) => {
                let mut acc = 0.0;
                for t in v {
                    acc += t.sup_bound_unchecked(rho)?;
                }
                acc
            }
            LawExpr::Product(a, b) => a.sup_bound_unchecked(rho)? * b.sup_bound_unchecked(rho)?,
            LawExpr::TimesW(inner) => {
                let b = inner.sup_bound_unchecked(rho)?;
                if b == 0.0 {
                    0.0
                } else {
                    b * inv_dist("w-multiplied law")?
                }
            }
            LawExpr::Block(b) => {
                let mut m = [[0.0; 2]; 2];
                for (i, t) in b.iter().enumerate() {
                    m[i / 2][i % 2] = t.sup_bound_unchecked(rho)?;
                }
                norm2x2(m)
            }
        })
    }

    /// Certified `sup ||z · law(z)||` over the closed ball `|z| <= radius`.
    pub fn ball_bound_times_z(&self, radius: f64) -> Result<f64> {
        let margin = self.analytic_margin();
        if radius >= margin {
            return Err(Error::Domain {
                z: Complex64::new(-radius, 0.0),
                bound: -margin,
            });
        }
        self.ball_bound_times_z_unchecked(radius)
    }

    fn ball_bound_times_z_unchecked(&self, radius: f64) -> Result<f64> {
        Ok(match self {
            LawExpr::Const(m) => radius * op_norm(m),
            LawExpr::AffineInW { p, q } => radius * op_norm(p) + op_norm(q),
            LawExpr::TimesW(inner) => inner.sup_bound_unchecked(radius)?,
            LawExpr::Scale { factor, inner } => factor.abs() * inner.ball_bound_times_z_unchecked(radius)?,
            LawExpr::Sum(v) => {
                let mut acc = 0.0;
                for t in v {
                    acc += t.ball_bound_times_z_unchecked(radius)?;
                }
                acc
            }
            LawExpr::Product(a, b) => match b.sup_bound_unchecked(radius) {
                Ok(bb) => a.ball_bound_times_z_unchecked(radius)? * bb,
                Err(_) => a.sup_bound_unchecked(radius)? * b.ball_bound_times_z_unchecked(radius)?,
            },
            LawExpr::DelayFactor { h, inner } => {
                (h * radius).exp() * inner.ball_bound_times_z_unchecked(radius)?
            }
            LawExpr::ConvResolvent { .. } => radius * self.sup_bound_unchecked(radius)?,
            LawExpr::Block(b) => {
                let mut m = [[0.0; 2]; 2];
                for (i, t) in b.iter().enumerate() {
                    m[i / 2][i % 2] = t.ball_bound_times_z_unchecked(radius)?;
                }
                norm2x2(m)
            }
        })
    }
}

/// `sup ||z M(1/z)||` over a ball: the certified bound and a sampled value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallSup {
    pub radius: f64,
    /// Closed-form over-estimate; this is what certificates use.
    pub analytic: f64,
    /// Largest sampled value (diagnostic, never above `analytic`).
    pub grid: f64,
    pub argmax: (f64, f64),
    pub samples: usize,
}

/// Material law `M0 + w M1` with exclusion radius `r` in the `w`-domain.
#[derive(Clone, Debug)]
pub struct SecondOrderLaw {
    pub m0: LawExpr,
    pub m1: LawExpr,
    pub r: f64,
}

impl SecondOrderLaw {
    pub fn new(m0: LawExpr, m1: LawExpr, r: f64) -> Result<Self> {
        if m0.dim() != m1.dim() {
            return Err(dim_mismatch("M0 vs M1", m0.dim(), m1.dim()));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("radius r = {r} must be positive")));
        }
        Ok(Self { m0, m1, r })
    }

    pub fn dim(&self) -> usize {
        self.m0.dim()
    }

    pub fn analytic_margin(&self) -> f64 {
        self.m0.analytic_margin().min(self.m1.analytic_margin())
    }

    /// `min(1/(2r), α_dom)`: the half-plane on which certificates may be stated.
    pub fn admissible_rate(&self) -> f64 {
        (0.5 / self.r).min(self.analytic_margin())
    }

    /// `z M0(z) + M1(z)`.
    pub fn eval_symbol(&self, z: Complex64) -> Result<CMatrix> {
        Ok(self.m0.eval_times_z(z)? + self.m1.eval(z)?)
    }

    pub fn is_real(&self) -> bool {
        self.m0.is_real() && self.m1.is_real()
    }

    /// `(P, Q)` with symbol `zP + Q`, when the law has that form.
    pub fn affine_symbol(&self) -> Option<(CMatrix, CMatrix)> {
        let (p, q) = self.m0.affine_times_z()?;
        let q1 = self.m1.constant_value()?;
        Some((p, q + q1))
    }

    /// The constant `K = sup_{|z| <= δ} ||z M(1/z)||`.
    ///
    /// `density` is the number of samples per unit length; the polar grid is
    /// refined fourfold around the sampled maximum.
    pub fn sup_symbol_on_ball(&self, delta: f64, density: usize) -> Result<BallSup> {
        if delta < 0.0 {
            return Err(Error::InvalidParameter(format!("delta = {delta} must be non-negative")));
        }
        if delta == 0.0 {
            // B[0,0] without the origin is empty.
            return Ok(BallSup {
                radius: 0.0,
                analytic: 0.0,
                grid: 0.0,
                argmax: (0.0, 0.0),
                samples: 0,
            });
        }
        if delta >= self.analytic_margin() {
            return Err(Error::InvalidParameter(format!(
                "ball radius {delta} reaches the analyticity boundary {}",
                self.analytic_margin()
            )));
        }
        let analytic = self.m0.ball_bound_times_z(delta)? + self.m1.sup_bound(delta)?;

        let area_pts = (density * density) as f64 * std::f64::consts::PI * delta * delta;
        let total = area_pts.clamp(64.0, 400.0);
        let nr = ((total / 4.0).sqrt().ceil() as usize).max(2);
        let nt = 4 * nr;
        let mut pts = vec![Complex64::new(0.0, 0.0)];
        for i in 1..=nr {
            let rad = delta * i as f64 / nr as f64;
            for j in 0..nt {
                pts.push(Complex64::from_polar(rad, 2.0 * std::f64::consts::PI * j as f64 / nt as f64));
            }
        }
        let (mut best, mut arg) = self.max_norm(&pts)?;
        // refine around the maximum with a 4x finer local polar grid
        let (dr, dt) = (delta / nr as f64, 2.0 * std::f64::consts::PI / nt as f64);
        let (r0, t0) = (arg.norm(), arg.arg());
        let mut local = Vec::new();
        for i in -4i32..=4 {
            for j in -4i32..=4 {
                let rad = (r0 + i as f64 * dr / 4.0).clamp(0.0, delta);
                local.push(Complex64::from_polar(rad, t0 + j as f64 * dt / 4.0));
            }
        }
        let (lb, la) = self.max_norm(&local)?;
        if lb > best {
            best = lb;
            arg = la;
        }
        Ok(BallSup {
            radius: delta,
            analytic,
            grid: best,
            argmax: (arg.re, arg.im),
            samples: pts.len() + local.len(),
        })
    }

    fn max_norm(&self, pts: &[Complex64]) -> Result<(f64, Complex64)> {
        let vals: Result<Vec<f64>> = pts
            .par_iter()
            .map(|&z| Ok(op_norm(&self.eval_symbol(z)?)))
            .collect();
        let vals = vals?;
        let mut best = (f64::NEG_INFINITY, pts[0]);
        for (v, &z) in vals.iter().zip(pts) {
            if *v > best.0 {
                best = (*v, z);
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Kernel;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn conv() -> LawExpr {
        LawExpr::conv_resolvent(Kernel::single(0.5, 1.0, 0.25).unwrap(), 1).unwrap()
    }

    #[test]
    fn eval_examples() {
        let i2 = LawExpr::identity(2);
        assert_eq!(i2.eval(c(2.0, 3.0)).unwrap(), linalg::identity(2));
        assert_abs_diff_eq!(conv().eval(c(1.0, 0.0)).unwrap()[(0, 0)].re, 4.0 / 3.0, epsilon = 1e-14);
        let d = LawExpr::delay(1.0, LawExpr::scale(0.1, conv())).unwrap();
        assert_abs_diff_eq!(d.eval(c(0.0, 0.0)).unwrap()[(0, 0)].re, 0.2, epsilon = 1e-14);
        assert!(matches!(conv().eval(c(-0.3, 0.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn symbol_examples() {
        let law = SecondOrderLaw::new(LawExpr::identity(2), LawExpr::scalar(0.2, 2), 5.0).unwrap();
        let s = law.eval_symbol(c(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!((s[(0, 0)] - c(0.2, 1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(s[(0, 1)], c(0.0, 0.0));
        let law = SecondOrderLaw::new(conv(), LawExpr::zero(1), 2.0).unwrap();
        assert_abs_diff_eq!(law.eval_symbol(c(1.0, 0.0)).unwrap()[(0, 0)].re, 4.0 / 3.0, epsilon = 1e-14);
        assert_eq!(law.eval_symbol(c(0.0, 0.0)).unwrap()[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn sup_bound_examples() {
        assert_abs_diff_eq!(LawExpr::scalar(0.2, 3).sup_bound(1.0).unwrap(), 0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(conv().sup_bound(0.25).unwrap(), 3.0, epsilon = 1e-12);
        let d = LawExpr::delay(1.0, LawExpr::identity(2)).unwrap();
        assert_abs_diff_eq!(d.sup_bound(0.1).unwrap(), 0.1f64.exp(), epsilon = 1e-14);
        let a = LawExpr::affine_in_w(linalg::identity(1), linalg::identity(1)).unwrap();
        assert!(matches!(a.sup_bound(0.1), Err(Error::Unbounded(_))));
    }

    #[test]
    fn ball_examples() {
        let law = SecondOrderLaw::new(LawExpr::identity(2), LawExpr::scalar(0.2, 2), 5.0).unwrap();
        let b = law.sup_symbol_on_ball(0.5, 64).unwrap();
        assert_abs_diff_eq!(b.grid, 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(b.analytic, 0.7, epsilon = 1e-12);
        let law = SecondOrderLaw::new(LawExpr::identity(1), LawExpr::zero(1), 5.0).unwrap();
        assert_abs_diff_eq!(law.sup_symbol_on_ball(0.5, 64).unwrap().grid, 0.5, epsilon = 1e-12);
        let law = SecondOrderLaw::new(conv(), LawExpr::zero(1), 2.0).unwrap();
        let b = law.sup_symbol_on_ball(0.125, 64).unwrap();
        // z(1+z)/(z+1/2) at z = -1/8, where the bound is attained
        assert_abs_diff_eq!(b.analytic, 0.125 * 0.875 / 0.375, epsilon = 1e-12);
        assert_abs_diff_eq!(b.grid, b.analytic, epsilon = 1e-9);
        assert!(b.grid <= b.analytic);
    }

    #[test]
    fn affine_detection() {
        let m0 = LawExpr::affine_in_w(linalg::identity(2), linalg::identity(2) * c(0.3, 0.0)).unwrap();
        let law = SecondOrderLaw::new(m0, LawExpr::scalar(0.2, 2), 1.0).unwrap();
        let (p, q) = law.affine_symbol().unwrap();
        assert_abs_diff_eq!(q[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_eq!(p, linalg::identity(2));
        let law = SecondOrderLaw::new(conv(), LawExpr::zero(1), 1.0).unwrap();
        assert!(law.affine_symbol().is_none());
    }
}
