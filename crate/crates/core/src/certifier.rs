//! Stability certificates.
//!
//! A certificate for `z M(1/z) + A` on `Re z >= -ρ` combines
//!
//! * the ball bound `K ||A⁻¹|| < 1` with `K = sup_{|z|<=δ} ||z M(1/z)||`
//!   (closed-form over-estimate, grid value kept as a diagnostic), and
//! * positivity `Re z M(1/z) >= c > 0` outside the ball, from the minimum over
//!   a truncated frequency grid together with an analytic bound covering the
//!   unbounded tail.
//!
//! The resolvent is then bounded by `max(1/c, ||A⁻¹||/(1 - K||A⁻¹||))`.
//! Pipelines for the damped wave, memory and delay laws choose `d`, `ρ1` and
//! feed the reformulated law through that check.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{positivity_constants_integro, IntegroConstants, Kernel};
use crate::law::{BallSup, LawExpr, SecondOrderLaw};
use crate::linalg::{self, herm_min_eig, op_norm, CMatrix};
use crate::reformulation::{build_md, split_md, FirstOrderSystem};
use crate::spatial::{BlockA, SpatialC};

/// Safety factor applied to every derived constant.
pub const SAFETY: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Samples of `Re z` on `[-ρ, re_max]`.
    pub re_points: usize,
    pub re_max: f64,
    /// Uniform `Im z` samples on `[-w, w]`.
    pub im_dense_half_width: f64,
    pub im_dense_points: usize,
    /// Log-spaced `Im z` samples per side on `[w, T_max]`.
    pub im_log_points: usize,
    /// `T_max = t_max_factor · (1 + ||A||)`.
    pub t_max_factor: f64,
    /// Samples per unit length inside the exclusion ball.
    pub ball_density: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            re_points: 5,
            re_max: 2.0,
            im_dense_half_width: 4.0,
            im_dense_points: 61,
            im_log_points: 30,
            t_max_factor: 50.0,
            ball_density: 64,
        }
    }
}

impl GridSpec {
    /// A smaller grid for quick checks and tests.
    pub fn coarse() -> Self {
        Self {
            re_points: 4,
            im_dense_points: 41,
            im_log_points: 20,
            ball_density: 32,
            ..Self::default()
        }
    }

    fn im_values(&self, t_max: f64) -> Vec<f64> {
        let w = self.im_dense_half_width.min(t_max);
        let nd = self.im_dense_points.max(3) | 1;
        let mut v: Vec<f64> = (0..nd)
            .map(|i| -w + 2.0 * w * i as f64 / (nd - 1) as f64)
            .collect();
        if t_max > w && self.im_log_points > 0 {
            let ratio = t_max / w;
            for j in 1..=self.im_log_points {
                let y = w * ratio.powf(j as f64 / self.im_log_points as f64);
                v.push(y);
                v.push(-y);
            }
        }
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    /// Rectangular grid on `[-rho, re_max] x [-T_max, T_max]`.
    pub fn region_points(&self, rho: f64, a_norm: f64) -> Vec<Complex64> {
        let t_max = self.t_max_factor * (1.0 + a_norm);
        let lo = -rho;
        let hi = if self.re_max > lo { self.re_max } else { lo + 2.0 };
        let nr = self.re_points.max(2);
        let ims = self.im_values(t_max);
        let mut pts = Vec::with_capacity(nr * ims.len());
        for i in 0..nr {
            let re = lo + (hi - lo) * i as f64 / (nr - 1) as f64;
            for &im in &ims {
                pts.push(Complex64::new(re, im));
            }
        }
        pts
    }

    fn ball_points(&self, delta: f64) -> Vec<Complex64> {
        let mut pts = vec![Complex64::new(0.0, 0.0)];
        if delta <= 0.0 {
            return pts;
        }
        let area = (self.ball_density * self.ball_density) as f64 * std::f64::consts::PI * delta * delta;
        let total = area.clamp(32.0, 200.0);
        let nr = ((total / 4.0).sqrt().ceil() as usize).max(2);
        let nt = 4 * nr;
        for i in 1..=nr {
            let r = delta * i as f64 / nr as f64;
            for j in 0..nt {
                pts.push(Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / nt as f64));
            }
        }
        pts
    }
}

/// One evaluated frequency.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridRecord {
    pub re: f64,
    pub im: f64,
    pub inside_ball: bool,
    /// Smallest eigenvalue of the Hermitian part of the symbol (outside the ball only).
    pub herm_min: Option<f64>,
    /// `||(symbol + A)⁻¹||`.
    pub resolvent_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Positivity {
    pub grid_min: f64,
    pub grid_argmin: (f64, f64),
    /// Lower bound valid on the whole half-plane outside the ball.
    pub tail: Option<f64>,
    pub tail_source: Option<String>,
    /// `"grid"` or `"tail"`: which part determined `c`.
    pub binding: String,
}

/// Result of the two-condition resolvent check on one half-plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop31 {
    pub delta: f64,
    pub rho: f64,
    pub a_inv_norm: f64,
    pub ball: BallSup,
    /// Certified `K` (analytic bound).
    pub k: f64,
    pub c: f64,
    pub positivity: Positivity,
    pub positivity_bound: f64,
    pub neumann_bound: Option<f64>,
    pub resolvent_bound: f64,
    pub grid_max_resolvent: f64,
    #[serde(skip)]
    pub evidence: Vec<GridRecord>,
}

/// Affine symbols `zP + Q` with `P ⪰ 0`: `λ_min(Re z P + Herm Q)` is
/// nondecreasing in `Re z` and independent of `Im z`, so its minimum over
/// `Re z >= -ρ` is exact at the boundary.
fn affine_tail(law: &SecondOrderLaw, rho: f64) -> Option<f64> {
    let (p, q) = law.affine_symbol()?;
    if !linalg::is_hermitian(&p, 1e-12) {
        return None;
    }
    if herm_min_eig(&p).ok()? < -1e-12 * op_norm(&p).max(1.0) {
        return None;
    }
    herm_min_eig(&(q - p * Complex64::new(rho, 0.0))).ok()
}

/// Checks the ball bound and positivity for `law` on `Re z >= -rho`.
///
/// `supplied_tail` is an analytic lower bound for the positivity constant on
/// the unbounded part of the region (with a label for the report). Affine
/// symbols get an exact tail automatically.
pub fn check_prop31(
    law: &SecondOrderLaw,
    a: &BlockA,
    delta: f64,
    rho: f64,
    supplied_tail: Option<(f64, &str)>,
    grid: &GridSpec,
) -> Result<Prop31> {
    if law.dim() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "law dimension {} vs A dimension {}",
            law.dim(),
            a.dim()
        )));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rate {rho} must be positive")));
    }
    if rho >= law.admissible_rate() {
        return Err(Error::InvalidParameter(format!(
            "rate {rho} must stay below min(1/(2r), analytic margin) = {}",
            law.admissible_rate()
        )));
    }
    if delta < 0.0 || (delta > 0.0 && delta >= law.analytic_margin()) {
        return Err(Error::InvalidParameter(format!(
            "ball radius {delta} must lie in [0, {})",
            law.analytic_margin()
        )));
    }
    let a_inv = a.inv_norm();
    let a_mat = a.matrix();

    let ball = law.sup_symbol_on_ball(delta, grid.ball_density)?;
    let k = ball.analytic;
    let neumann_bound = if delta > 0.0 {
        if k * a_inv >= 1.0 {
            return Err(Error::not_certified(
                "ball bound",
                format!("K·||A⁻¹|| = {k}·{a_inv} = {} >= 1 on |z| <= {delta}", k * a_inv),
            ));
        }
        Some(a_inv / (1.0 - k * a_inv))
    } else {
        None
    };

    let mut pts = grid.region_points(rho, op_norm(a_mat));
    pts.extend(grid.ball_points(delta).into_iter().filter(|z| z.re >= -rho));
    let evidence: Result<Vec<GridRecord>> = pts
        .par_iter()
        .map(|&z| {
            let s = law.eval_symbol(z)?;
            // with δ = 0 the origin is a limit of the positivity region
            let inside = delta > 0.0 && z.norm() <= delta;
            let herm_min = if inside { None } else { Some(herm_min_eig(&s)?) };
            let resolvent_norm = match linalg::inverse_norm(&(s + a_mat)) {
                Ok(v) => v,
                Err(Error::Singular { .. }) => return Err(Error::Counterexample { z }),
                Err(e) => return Err(e),
            };
            Ok(GridRecord {
                re: z.re,
                im: z.im,
                inside_ball: inside,
                herm_min,
                resolvent_norm,
            })
        })
        .collect();
    let evidence = evidence?;

    let mut grid_min = f64::INFINITY;
    let mut grid_argmin = (0.0, 0.0);
    let mut grid_max_resolvent: f64 = 0.0;
    for r in &evidence {
        if let Some(h) = r.herm_min {
            if h < grid_min {
                grid_min = h;
                grid_argmin = (r.re, r.im);
            }
        }
        grid_max_resolvent = grid_max_resolvent.max(r.resolvent_norm);
    }

    let mut tail: Option<(f64, String)> = affine_tail(law, rho).map(|v| (v, "affine symbol".to_string()));
    if let Some((v, label)) = supplied_tail {
        if tail.as_ref().is_none_or(|(t, _)| v > *t) {
            tail = Some((v, label.to_string()));
        }
    }
    if grid_min <= 0.0 {
        return Err(Error::not_certified(
            "positivity",
            format!(
                "Re symbol has eigenvalue {grid_min} <= 0 at z = {}{:+}i",
                grid_argmin.0, grid_argmin.1
            ),
        ));
    }
    let (tail_value, tail_source) = match tail {
        Some((v, s)) => (v, s),
        None => {
            return Err(Error::not_certified(
                "positivity",
                "no analytic bound covers the frequencies beyond the grid",
            ))
        }
    };
    if tail_value <= 0.0 {
        return Err(Error::not_certified(
            "positivity",
            format!("tail bound ({tail_source}) is {tail_value} <= 0"),
        ));
    }
    let (c, binding) = if grid_min < tail_value {
        (grid_min, "grid")
    } else {
        (tail_value, "tail")
    };
    let positivity_bound = 1.0 / c;
    let resolvent_bound = neumann_bound.map_or(positivity_bound, |n| n.max(positivity_bound));
    Ok(Prop31 {
        delta,
        rho,
        a_inv_norm: a_inv,
        ball,
        k,
        c,
        positivity: Positivity {
            grid_min,
            grid_argmin,
            tail: Some(tail_value),
            tail_source: Some(tail_source),
            binding: binding.to_string(),
        },
        positivity_bound,
        neumann_bound,
        resolvent_bound,
        grid_max_resolvent,
        evidence,
    })
}

/// `K(d) = ||M0|| + (d ||M0|| + ||M1|| ||C⁻¹||)²`.
pub fn k_of_d(d: f64, m0_sup: f64, m1_sup: f64, c_inv_norm: f64) -> f64 {
    m0_sup + (d * m0_sup + m1_sup * c_inv_norm).powi(2)
}

/// `G(d) = sup ||d [[-M0, (d M0 - M1) C⁻¹], [0, I]]||` over `Re z >= -rho`.
pub fn g_of_d(d: f64, law: &SecondOrderLaw, c: &SpatialC, rho: f64) -> Result<f64> {
    let n = law.dim();
    let top_right = LawExpr::product(
        LawExpr::sum(vec![
            LawExpr::scale(d, law.m0.clone()),
            LawExpr::scale(-1.0, law.m1.clone()),
        ])?,
        LawExpr::Const(c.inverse().clone()),
    )?;
    let b = LawExpr::block(
        LawExpr::scale(-1.0, law.m0.clone()),
        top_right,
        LawExpr::zero(n),
        LawExpr::identity(n),
    )?;
    Ok(d * b.sup_bound(rho)?)
}

/// Global positivity constant `inf Re z M(1/z)` over `Re z >= -1/(2r)` for affine symbols.
pub fn global_positivity_constant(law: &SecondOrderLaw) -> Result<f64> {
    let rho = law.admissible_rate();
    let c = affine_tail(law, rho).ok_or_else(|| {
        Error::not_certified(
            "global positivity",
            "only affine symbols zP + Q with P ⪰ 0 have a closed-form constant",
        )
    })?;
    if c <= 0.0 {
        return Err(Error::not_certified(
            "global positivity",
            format!("inf Re z M(1/z) = {c} <= 0 on Re z >= -{rho}: no damping margin"),
        ));
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum D0Mode {
    Global,
    Integro,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct D0Search {
    pub d0: f64,
    pub rho1: f64,
    /// Which of `0.75 d0`, `rho0`, `1/(2r)`, `alpha_dom` fixed `rho1`.
    pub rho1_binding: String,
    pub k_of_d0: f64,
    pub m0_sup: f64,
    pub m1_sup: f64,
    /// Integro mode: `max{δ||M0|| + sup_ball ||M1||, δ} + G(d0)` against `||A⁻¹||⁻¹`.
    pub budget: Option<f64>,
    pub budget_limit: Option<f64>,
    pub log: Vec<String>,
}

/// Largest `d0` in `[1e-6, 1]` (log-bisection, 40 steps) with `d0 K(d0) < 0.9 c`,
/// plus the ball budget in integro mode; then `ρ1 = 0.9 min(0.75 d0, ρ0, 1/(2r), α_dom)`.
pub fn find_d0(
    law: &SecondOrderLaw,
    c_op: &SpatialC,
    mode: D0Mode,
    delta: f64,
    rho0: f64,
    c: f64,
) -> Result<D0Search> {
    if !(c > 0.0) {
        return Err(Error::not_certified("positivity", format!("c = {c} must be positive")));
    }
    let region = law.admissible_rate();
    let m0_sup = law.m0.sup_bound(region)?;
    let m1_sup = law.m1.sup_bound(region)?;
    let cinv = c_op.c_inv_norm();
    let k = |d: f64| k_of_d(d, m0_sup, m1_sup, cinv);
    let ball_part = if mode == D0Mode::Integro {
        let m0_ball = law.m0.sup_bound(delta)?;
        let m1_ball = law.m1.sup_bound(delta)?;
        Some((delta * m0_ball + m1_ball).max(delta))
    } else {
        None
    };
    let limit = c_op.sigma_min();
    let budget = |d: f64| -> Result<Option<f64>> {
        match ball_part {
            Some(b) => Ok(Some(b + g_of_d(d, law, c_op, region)?)),
            None => Ok(None),
        }
    };
    let admissible = |d: f64| -> Result<bool> {
        let pos = d * k(d) < SAFETY * c;
        let bud = budget(d)?.is_none_or(|b| b < limit);
        Ok(pos && bud)
    };
    let (lo_end, hi_end) = (1e-6f64, 1.0f64);
    let mut log = Vec::new();
    let d0 = if admissible(hi_end)? {
        hi_end
    } else if !admissible(lo_end)? {
        return Err(Error::not_certified(
            "d search",
            format!(
                "no admissible d in [1e-6, 1]: d·K(d) = {} vs 0.9c = {}, budget {:?} vs {limit}",
                lo_end * k(lo_end),
                SAFETY * c,
                budget(lo_end)?
            ),
        ));
    } else {
        let (mut a, mut b) = (lo_end.ln(), hi_end.ln());
        for _ in 0..40 {
            let m = 0.5 * (a + b);
            if admissible(m.exp())? {
                a = m;
            } else {
                b = m;
            }
        }
        a.exp()
    };
    log.push(format!("d0 = {d0:.6e}: d0·K(d0) = {:.6e} < 0.9c = {:.6e}", d0 * k(d0), SAFETY * c));
    let bud = budget(d0)?;
    if let Some(b) = bud {
        log.push(format!("ball budget {b:.6e} < sigma_min(C) = {limit:.6e}"));
    }
    let candidates = [
        (0.75 * d0, "0.75·d0"),
        (rho0, "rho0"),
        (0.5 / law.r, "1/(2r)"),
        (law.analytic_margin(), "alpha_dom"),
    ];
    let (m, name) = candidates
        .iter()
        .copied()
        .fold((f64::INFINITY, ""), |acc, x| if x.0 < acc.0 { x } else { acc });
    let rho1 = SAFETY * m;
    log.push(format!("rho1 = 0.9·{name} = {rho1:.6e}"));
    Ok(D0Search {
        d0,
        rho1,
        rho1_binding: name.to_string(),
        k_of_d0: k(d0),
        m0_sup,
        m1_sup,
        budget: bud,
        budget_limit: ball_part.map(|_| limit),
        log,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolventSup {
    pub sup: f64,
    pub argmax: (f64, f64),
    pub samples: usize,
}

/// Sampled `sup ||(z M(1/z) + A)⁻¹||` over `Re z >= -rho`, refined around the maximum.
pub fn resolvent_sup_grid(law: &SecondOrderLaw, a: &CMatrix, rho: f64, grid: &GridSpec) -> Result<ResolventSup> {
    let norm_at = |z: Complex64| -> Result<f64> {
        let s = law.eval_symbol(z)? + a;
        match linalg::inverse_norm(&s) {
            Ok(v) => Ok(v),
            Err(Error::Singular { .. }) => Err(Error::Counterexample { z }),
            Err(e) => Err(e),
        }
    };
    let pts = grid.region_points(rho, op_norm(a));
    let vals: Result<Vec<f64>> = pts.par_iter().map(|&z| norm_at(z)).collect();
    let vals = vals?;
    let (mut best, mut arg) = (f64::NEG_INFINITY, pts[0]);
    for (v, &z) in vals.iter().zip(&pts) {
        if *v > best {
            best = *v;
            arg = z;
        }
    }
    let mut samples = pts.len();
    // Zoom: each round samples a 7x7 patch around the current maximum and halves it.
    let mut h_re = (grid.re_max + rho) / grid.re_points.max(2) as f64;
    let mut h_im = 2.0 * grid.im_dense_half_width / grid.im_dense_points.max(3) as f64;
    h_im = h_im.max(0.05 * arg.im.abs() / grid.im_log_points.max(1) as f64);
    for _ in 0..12 {
        let patch: Vec<Complex64> = (-3i32..=3)
            .flat_map(|i| (-3i32..=3).map(move |j| (i, j)))
            .map(|(i, j)| Complex64::new((arg.re + i as f64 * h_re / 3.0).max(-rho), arg.im + j as f64 * h_im / 3.0))
            .collect();
        let vals: Result<Vec<f64>> = patch.par_iter().map(|&z| norm_at(z)).collect();
        for (v, z) in vals?.into_iter().zip(patch) {
            if v > best {
                best = v;
                arg = z;
            }
        }
        samples += 49;
        h_re *= 0.5;
        h_im *= 0.5;
    }
    Ok(ResolventSup {
        sup: best,
        argmax: (arg.re, arg.im),
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    /// Estimated `ω₀`: the largest real part of a located singularity.
    pub omega0: f64,
    /// Singularities located (real, imaginary parts), rightmost first.
    pub singularities: Vec<(f64, f64)>,
    /// True if no singularity was found in the scanned strip; `omega0` is then its left edge.
    pub below_window: bool,
    pub heuristic: bool,
}

/// Heuristic growth bound: scans `σ_min(z M(1/z) + A)` over a strip, polishes
/// each local minimum with Newton's method on `det`, and bisects on `ρ` for
/// the largest `ρ` whose half-plane still contains a located singularity.
pub fn estimate_growth_bound(law: &SecondOrderLaw, a: &CMatrix, grid: &GridSpec) -> Result<GrowthEstimate> {
    let a_norm = op_norm(a);
    let margin = law.analytic_margin();
    let lo = -(0.999 * margin).min(2.0);
    let hi = 2.0;
    let t_max = grid.t_max_factor * (1.0 + a_norm);
    let ims = grid.im_values(t_max);
    let nre = grid.re_points.max(4) + 3;
    let res: Vec<f64> = (0..nre).map(|i| lo + (hi - lo) * i as f64 / (nre - 1) as f64).collect();
    let tmat = |z: Complex64| -> Result<CMatrix> { Ok(law.eval_symbol(z)? + a) };
    let cells: Vec<(usize, usize)> = (0..nre).flat_map(|i| (0..ims.len()).map(move |j| (i, j))).collect();
    let sig: Result<Vec<f64>> = cells
        .par_iter()
        .map(|&(i, j)| linalg::smallest_sv(&tmat(Complex64::new(res[i], ims[j]))?))
        .collect();
    let sig = sig?;
    let at = |i: usize, j: usize| sig[i * ims.len() + j];
    let mut seeds = Vec::new();
    for i in 0..nre {
        for j in 0..ims.len() {
            let v = at(i, j);
            let mut is_min = true;
            for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (ii, jj) = (i as i64 + di, j as i64 + dj);
                if ii >= 0 && jj >= 0 && (ii as usize) < nre && (jj as usize) < ims.len() && at(ii as usize, jj as usize) < v {
                    is_min = false;
                }
            }
            if is_min {
                seeds.push(Complex64::new(res[i], ims[j]));
            }
        }
    }
    let scale = 1.0 + a_norm;
    let polished: Vec<Option<Complex64>> = seeds
        .par_iter()
        .map(|&z0| newton_det(&tmat, z0, margin, scale))
        .collect();
    let mut poles: Vec<Complex64> = Vec::new();
    for p in polished.into_iter().flatten() {
        if p.re >= lo && p.re <= hi && !poles.iter().any(|q| (q - p).norm() < 1e-6 * (1.0 + p.norm())) {
            poles.push(p);
        }
    }
    poles.sort_by(|x, y| y.re.total_cmp(&x.re).then(x.im.total_cmp(&y.im)));
    // Bisection on ρ for "the half-plane Re z >= ρ contains a located singularity".
    let contains = |rho: f64| poles.iter().any(|p| p.re >= rho);
    let (omega0, below) = if poles.is_empty() {
        (lo, true)
    } else {
        let (mut l, mut h) = (lo, hi);
        for _ in 0..60 {
            let m = 0.5 * (l + h);
            if contains(m) {
                l = m;
            } else {
                h = m;
            }
        }
        (l, false)
    };
    Ok(GrowthEstimate {
        omega0,
        singularities: poles.iter().take(16).map(|p| (p.re, p.im)).collect(),
        below_window: below,
        heuristic: true,
    })
}

/// Newton's method on `det T(z)`: `z ← z - 1/tr(T⁻¹ T')`, with `T'` from a
/// centred difference. Accepts the limit only if `T` is numerically singular there.
fn newton_det(
    tmat: &(dyn Fn(Complex64) -> Result<CMatrix> + Sync),
    z0: Complex64,
    margin: f64,
    scale: f64,
) -> Option<Complex64> {
    let mut z = z0;
    for _ in 0..40 {
        if z.re <= -margin {
            return None;
        }
        let t = tmat(z).ok()?;
        // a seed sitting on the singularity has nothing left to polish
        if linalg::smallest_sv(&t).ok()? < 1e-12 * scale {
            return Some(z);
        }
        let h = 1e-6 * (1.0 + z.norm());
        let dt = (tmat(z + h).ok()? - tmat(z - h).ok()?) / Complex64::new(2.0 * h, 0.0);
        let lu = t.lu();
        let x = lu.solve(&dt)?;
        let tr = x.trace();
        if tr.norm() == 0.0 || !tr.re.is_finite() {
            return None;
        }
        let step = Complex64::new(1.0, 0.0) / tr;
        z -= step;
        if step.norm() < 1e-11 * (1.0 + z.norm()) {
            break;
        }
    }
    let s = linalg::smallest_sv(&tmat(z).ok()?).ok()?;
    if s < 1e-7 * scale {
        Some(z)
    } else {
        None
    }
}

/// Corollary bound `C/(1 - ||N|| C)` for the perturbed resolvent.
pub fn perturbation_margin(c_const: f64, n: &LawExpr, rho: f64) -> Result<f64> {
    perturbation_margin_with_norm(c_const, n.sup_bound(rho)?)
}

pub fn perturbation_margin_with_norm(c_const: f64, n_norm: f64) -> Result<f64> {
    let product = n_norm * c_const;
    if product >= 1.0 {
        return Err(Error::not_certified(
            "perturbation margin",
            format!("||N||·C = {n_norm}·{c_const} = {product} >= 1 (excess {})", product - 1.0),
        ));
    }
    Ok(c_const / (1.0 - product))
}

/// `κ₀ = 0.9 (1 - |k|_(1,-ρ1)) e^{-hρ1} / (C √(1 + d² ||C⁻¹||²))`.
pub fn kappa_threshold(kernel: &Kernel, c_inv_norm: f64, h: f64, d: f64, rho1: f64, c_const: f64) -> Result<f64> {
    let knorm = kernel.weighted_l1_norm(rho1)?;
    if knorm >= 1.0 {
        return Err(Error::not_certified("(c) at rho1", format!("|k|_(1,-rho1) = {knorm} >= 1")));
    }
    Ok(SAFETY * (1.0 - knorm) * (-h * rho1).exp() / (c_const * (1.0 + d * d * c_inv_norm * c_inv_norm).sqrt()))
}

/// The complete record issued by the certification pipelines.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityCertificate {
    pub delta: f64,
    /// Positivity rate of the original law.
    pub rho0: f64,
    /// Positivity constant of the original law.
    pub c_base: f64,
    /// Positivity constant of the reformulated law on `Re z >= -rho1`.
    pub c: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub d0: Option<f64>,
    pub rho1: f64,
    pub resolvent_bound: f64,
    pub growth_bound_estimate: Option<GrowthEstimate>,
    pub d_search: Option<D0Search>,
    pub check: Prop31,
}

impl StabilityCertificate {
    pub fn evidence(&self) -> &[GridRecord] {
        &self.check.evidence
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyOptions {
    pub delta: Option<f64>,
    pub grid: GridSpec,
    pub growth_bound: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            delta: None,
            grid: GridSpec::default(),
            growth_bound: true,
        }
    }
}

fn lemma_tail(c: f64, d: &D0Search) -> f64 {
    (c - d.d0 * d.k_of_d0).min(0.75 * d.d0 - d.rho1)
}

fn finish(
    sys: &FirstOrderSystem,
    delta: f64,
    rho0: f64,
    c_base: f64,
    search: D0Search,
    opts: &CertifyOptions,
) -> Result<StabilityCertificate> {
    let tail = lemma_tail(c_base, &search);
    let check = check_prop31(&sys.law, &sys.a, delta, search.rho1, Some((tail, "reformulation lemma")), &opts.grid)?;
    let growth = if opts.growth_bound {
        Some(estimate_growth_bound(&sys.law, sys.a.matrix(), &opts.grid)?)
    } else {
        None
    };
    Ok(StabilityCertificate {
        delta,
        rho0,
        c_base,
        c: check.c,
        k: check.k,
        d0: Some(search.d0),
        rho1: search.rho1,
        resolvent_bound: check.resolvent_bound,
        growth_bound_estimate: growth,
        d_search: Some(search),
        check,
    })
}

/// Laws whose symbol is positive on the whole half-plane `Re z >= -1/(2r)`
/// (e.g. `M0 = I`, `M1 = m I` with `m > 1/(2r)`).
pub fn certify_global(law: &SecondOrderLaw, c_op: &SpatialC, opts: &CertifyOptions) -> Result<(StabilityCertificate, FirstOrderSystem)> {
    let c_base = global_positivity_constant(law)?;
    let rho0 = law.admissible_rate();
    let search = find_d0(law, c_op, D0Mode::Global, 0.0, rho0, c_base)?;
    let sys = build_md(law, c_op, search.d0)?;
    let cert = finish(&sys, 0.0, rho0, c_base, search, opts)?;
    Ok((cert, sys))
}

/// `δ = min(α_dom/2, 0.9 σ_min(C)/||M0||)`.
pub fn default_delta(law: &SecondOrderLaw, c_op: &SpatialC) -> Result<f64> {
    let margin = law.analytic_margin();
    let m0 = law.m0.sup_bound(law.admissible_rate())?;
    let half = if margin.is_finite() { 0.5 * margin } else { 0.5 / law.r };
    Ok(half.min(SAFETY * c_op.sigma_min() / m0.max(f64::MIN_POSITIVE)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegroCertificate {
    pub constants: IntegroConstants,
    pub certificate: StabilityCertificate,
}

/// Memory law `M0 = (1 - K)⁻¹`, `M1 = 0`.
pub fn certify_integro(
    kernel: &Kernel,
    c_op: &SpatialC,
    opts: &CertifyOptions,
) -> Result<(IntegroCertificate, FirstOrderSystem)> {
    let law = memory_law(kernel, c_op.dim(), None)?;
    let delta = match opts.delta {
        Some(d) => d,
        None => default_delta(&law, c_op)?,
    };
    if delta >= kernel.alpha() {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must be below alpha = {}",
            kernel.alpha()
        )));
    }
    let constants = positivity_constants_integro(kernel, delta)?;
    let search = find_d0(&law, c_op, D0Mode::Integro, delta, constants.rho0, constants.c)?;
    let sys = build_md(&law, c_op, search.d0)?;
    let cert = finish(&sys, delta, constants.rho0, constants.c, search, opts)?;
    Ok((IntegroCertificate { constants, certificate: cert }, sys))
}

/// `M0 = (1 - K)⁻¹`, `M1 = κ (1 - K)⁻¹ e^{-hz}` (or `0` without delay), `r = 1/(2α)`.
pub fn memory_law(kernel: &Kernel, n: usize, delay: Option<(f64, f64)>) -> Result<SecondOrderLaw> {
    let m0 = LawExpr::conv_resolvent(kernel.clone(), n)?;
    let m1 = match delay {
        Some((kappa, h)) if kappa != 0.0 => LawExpr::scale(kappa, LawExpr::delay(h, m0.clone())?),
        _ => LawExpr::zero(n),
    };
    SecondOrderLaw::new(m0, m1, 0.5 / kernel.alpha())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelayCertificate {
    pub kappa: f64,
    pub h: f64,
    pub kappa0: f64,
    /// `1.1 · max(1/c, Neumann bound, sampled sup)` of the undelayed system.
    pub c_const: f64,
    pub n_norm: f64,
    pub certified: bool,
    /// Perturbed resolvent bound when certified.
    pub resolvent_bound: Option<f64>,
    pub failure: Option<String>,
    pub base: IntegroCertificate,
}

/// The undelayed certificate and the constant `C` that every delayed
/// variant of the same kernel is measured against.
#[derive(Clone, Debug)]
pub struct DelayBase {
    pub base: IntegroCertificate,
    pub c_const: f64,
    pub sampled_sup: ResolventSup,
}

pub fn delay_base(kernel: &Kernel, c_op: &SpatialC, opts: &CertifyOptions) -> Result<DelayBase> {
    // the growth scan is diagnostic and the dominant cost; sweeps skip it
    let base_opts = CertifyOptions {
        growth_bound: false,
        ..opts.clone()
    };
    let (base, base_sys) = certify_integro(kernel, c_op, &base_opts)?;
    let cert = &base.certificate;
    let sampled = resolvent_sup_grid(&base_sys.law, base_sys.a.matrix(), cert.rho1, &opts.grid)?;
    let c_const = 1.1 * cert.resolvent_bound.max(sampled.sup);
    Ok(DelayBase {
        base,
        c_const,
        sampled_sup: sampled,
    })
}

/// Memory law plus delayed damping `κ ∂₀u(t - h)`, certified as a perturbation
/// of the undelayed law.
pub fn certify_integro_delay(
    kernel: &Kernel,
    kappa: f64,
    h: f64,
    c_op: &SpatialC,
    opts: &CertifyOptions,
) -> Result<(DelayCertificate, FirstOrderSystem)> {
    let base = delay_base(kernel, c_op, opts)?;
    certify_delay_on_base(&base, kernel, kappa, h, c_op)
}

pub fn certify_delay_on_base(
    base: &DelayBase,
    kernel: &Kernel,
    kappa: f64,
    h: f64,
    c_op: &SpatialC,
) -> Result<(DelayCertificate, FirstOrderSystem)> {
    let cert = &base.base.certificate;
    let d0 = cert.d0.expect("pipeline sets d0");
    let c_const = base.c_const;
    let kappa0 = kappa_threshold(kernel, c_op.c_inv_norm(), h, d0, cert.rho1, c_const)?;
    let law = memory_law(kernel, c_op.dim(), Some((kappa, h)))?;
    let split = split_md(&law, c_op, d0)?;
    let n_norm = split.n_d.sup_bound(cert.rho1)?;
    let margin = perturbation_margin_with_norm(c_const, n_norm);
    let (certified, bound, failure) = match margin {
        Ok(b) if kappa.abs() < kappa0 => (true, Some(b), None),
        Ok(_) => (
            false,
            None,
            Some(format!("kappa = {kappa} is not below the threshold kappa0 = {kappa0}")),
        ),
        Err(e) => (false, None, Some(e.to_string())),
    };
    let sys = build_md(&law, c_op, d0)?;
    Ok((
        DelayCertificate {
            kappa,
            h,
            kappa0,
            c_const,
            n_norm,
            certified,
            resolvent_bound: bound,
            failure,
            base: base.base.clone(),
        },
        sys,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar(x: f64) -> CMatrix {
        CMatrix::from_element(1, 1, cx(x, 0.0))
    }

    #[test]
    fn constant_symbol_certifies() {
        let law = SecondOrderLaw::new(LawExpr::zero(1), LawExpr::scalar(1.0, 1), 1.0).unwrap();
        let a = BlockA::from_matrix(scalar(1.0)).unwrap();
        let p = check_prop31(&law, &a, 0.0, 0.1, None, &GridSpec::coarse()).unwrap();
        assert_abs_diff_eq!(p.c, 1.0, epsilon = 1e-14);
        assert_eq!(p.k, 0.0);
        assert_abs_diff_eq!(p.resolvent_bound, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn pure_m0_split_fails_positivity() {
        let law = SecondOrderLaw::new(LawExpr::scalar(1.0, 1), LawExpr::zero(1), 1.0).unwrap();
        let a = BlockA::from_matrix(scalar(1.0)).unwrap();
        let err = check_prop31(&law, &a, 0.0, 0.1, None, &GridSpec::coarse()).unwrap_err();
        assert!(matches!(err, Error::NotCertified { .. }));
    }

    #[test]
    fn k_of_d_examples() {
        assert_abs_diff_eq!(k_of_d(0.01, 3.0, 0.0, 0.3266), 3.0009, epsilon = 1e-12);
        assert_abs_diff_eq!(k_of_d(0.09, 1.0, 0.2, 0.3266), 1.0 + (0.09f64 + 0.06532).powi(2), epsilon = 1e-12);
    }

    #[test]
    fn g_of_d_vanishes() {
        let c = SpatialC::dirichlet_1d(3).unwrap();
        let law = SecondOrderLaw::new(LawExpr::identity(3), LawExpr::scalar(0.2, 3), 5.0).unwrap();
        assert!(g_of_d(1e-6, &law, &c, 0.1).unwrap() <= 1e-5);
    }

    #[test]
    fn resolvent_sup_examples() {
        let law = SecondOrderLaw::new(LawExpr::scalar(1.0, 1), LawExpr::zero(1), 1.0).unwrap();
        let s = resolvent_sup_grid(&law, &scalar(1.0), 0.5, &GridSpec::coarse()).unwrap();
        assert_abs_diff_eq!(s.sup, 2.0, epsilon = 1e-9);
        let s = resolvent_sup_grid(&law, &scalar(0.0), -0.5, &GridSpec::coarse()).unwrap();
        assert_abs_diff_eq!(s.sup, 2.0, epsilon = 1e-9);
        let law2 = SecondOrderLaw::new(LawExpr::identity(2), LawExpr::zero(2), 1.0).unwrap();
        let rot = CMatrix::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(1.0, 0.0), cx(-1.0, 0.0), cx(0.0, 0.0)]);
        let s = resolvent_sup_grid(&law2, &rot, -0.3, &GridSpec::coarse()).unwrap();
        assert_abs_diff_eq!(s.sup, 1.0 / 0.3, epsilon = 1e-6);
    }

    #[test]
    fn growth_bound_examples() {
        let law = SecondOrderLaw::new(LawExpr::scalar(1.0, 1), LawExpr::zero(1), 1.0).unwrap();
        let g = estimate_growth_bound(&law, &scalar(1.0), &GridSpec::coarse()).unwrap();
        assert_abs_diff_eq!(g.omega0, -1.0, epsilon = 1e-6);
        let g = estimate_growth_bound(&law, &scalar(0.0), &GridSpec::coarse()).unwrap();
        assert_abs_diff_eq!(g.omega0, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn perturbation_examples() {
        assert_abs_diff_eq!(perturbation_margin_with_norm(2.0, 0.25).unwrap(), 4.0, epsilon = 1e-14);
        assert!(perturbation_margin_with_norm(2.0, 0.6).is_err());
    }

    #[test]
    fn kappa_threshold_example() {
        // ExpSum chosen so that |k|_(1,-0.05) = 2/3.
        let k = Kernel::single(2.0 / 3.0 * 0.95, 1.0, 0.25).unwrap();
        let v = kappa_threshold(&k, 0.3266, 1.0, 0.05, 0.05, 50.0).unwrap();
        let expect = 0.9 * (1.0 / 3.0) * (-0.05f64).exp() / (50.0 * (1.0 + 0.0025 * 0.3266f64.powi(2)).sqrt());
        assert_abs_diff_eq!(v, expect, epsilon = 1e-12);
        assert!((v - 0.0057).abs() < 1e-4);
        let half = kappa_threshold(&k, 0.3266, 1.0, 0.05, 0.05, 100.0).unwrap();
        assert_abs_diff_eq!(half, v / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn damped_wave_d0() {
        let c = SpatialC::dirichlet_1d(3).unwrap();
        let law = SecondOrderLaw::new(LawExpr::identity(3), LawExpr::scalar(0.2, 3), 5.0).unwrap();
        let cb = global_positivity_constant(&law).unwrap();
        assert_abs_diff_eq!(cb, 0.1, epsilon = 1e-12);
        let s = find_d0(&law, &c, D0Mode::Global, 0.0, 0.1, cb).unwrap();
        assert!(s.d0 * s.k_of_d0 < 0.09);
        assert!((s.d0 - 0.087).abs() < 0.003, "d0 = {}", s.d0);
        assert!((s.rho1 - 0.059).abs() < 0.002, "rho1 = {}", s.rho1);
        let neg = SecondOrderLaw::new(LawExpr::identity(3), LawExpr::scalar(-1.0, 3), 5.0).unwrap();
        assert!(global_positivity_constant(&neg).is_err());
    }
}
