//! Memory kernels: exponential sums (scalar or diagonal) and sampled tables.
//!
//! Conventions: `laplace` returns `K(z) = ∫₀^∞ e^{-zt} k(t) dt`, and the
//! Fourier-type transform is `k̂(ζ) = K(iζ)/√(2π)`. All certificate
//! quantities below are closed-form for exponential sums.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

fn sqrt_2pi() -> f64 {
    (2.0 * PI).sqrt()
}

/// One mode `weight * exp(-rate * t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub weight: f64,
    pub rate: f64,
}

impl ExpTerm {
    pub fn new(weight: f64, rate: f64) -> Self {
        Self { weight, rate }
    }
}

/// A tabulated kernel with a declared exponential tail `k(T) e^{-λ(t-T)}`
/// beyond the last sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledKernel {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub tail_rate: f64,
}

impl SampledKernel {
    pub fn new(times: Vec<f64>, values: Vec<f64>, tail_rate: f64) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidKernel(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidKernel(
                "sampled kernel needs at least two samples".into(),
            ));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidKernel("samples must start at t = 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidKernel("sample times must increase strictly".into()));
        }
        if !(tail_rate > 0.0) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidKernel(
                "tail rate must be positive and values finite".into(),
            ));
        }
        Ok(Self {
            times,
            values,
            tail_rate,
        })
    }

    /// Samples `terms` on `[0, t_end]` with step `dt`; the tail rate is the slowest mode.
    pub fn from_terms(terms: &[ExpTerm], dt: f64, t_end: f64) -> Result<Self> {
        let n = (t_end / dt).round() as usize;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        let values = times.iter().map(|&t| eval_terms(terms, t)).collect();
        let tail = terms
            .iter()
            .map(|t| t.rate)
            .fold(f64::INFINITY, f64::min);
        Self::new(times, values, if tail.is_finite() { tail } else { 1.0 })
    }

    /// Composite trapezoid for `∫ e^{-zt} k(t) dt` on the table plus the exact
    /// integral of the exponential tail.
    pub fn quadrature(&self, z: Complex64) -> Result<Complex64> {
        if !(z.re > -self.tail_rate) {
            return Err(Error::Domain {
                z,
                bound: -self.tail_rate,
            });
        }
        let f = |i: usize| (-z * self.times[i]).exp() * self.values[i];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.times.len() - 1 {
            acc += (f(i) + f(i + 1)) * (0.5 * (self.times[i + 1] - self.times[i]));
        }
        let last = self.times.len() - 1;
        acc += f(last) / (z + self.tail_rate);
        Ok(acc)
    }

    fn weighted_abs_integral(&self, alpha: f64) -> Result<f64> {
        if alpha >= self.tail_rate {
            return Err(Error::Divergent {
                weight: alpha,
                rate: self.tail_rate,
            });
        }
        let f = |i: usize| (alpha * self.times[i]).exp() * self.values[i].abs();
        let mut acc = 0.0;
        for i in 0..self.times.len() - 1 {
            acc += 0.5 * (f(i) + f(i + 1)) * (self.times[i + 1] - self.times[i]);
        }
        let last = self.times.len() - 1;
        Ok(acc + f(last) / (self.tail_rate - alpha))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelFamily {
    ExpSum { terms: Vec<ExpTerm> },
    /// Diagonal operator-valued kernel: one exponential sum per channel.
    DiagExpSum { channels: Vec<Vec<ExpTerm>> },
    Sampled(SampledKernel),
}

/// A kernel together with its declared exponential weight `alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    family: KernelFamily,
    alpha: f64,
}

fn eval_terms(terms: &[ExpTerm], t: f64) -> f64 {
    terms.iter().map(|m| m.weight * (-m.rate * t).exp()).sum()
}

fn laplace_terms(terms: &[ExpTerm], z: Complex64) -> Complex64 {
    terms
        .iter()
        .filter(|m| m.weight != 0.0)
        .map(|m| m.weight / (m.rate + z))
        .sum()
}

fn min_rate_terms(terms: &[ExpTerm]) -> f64 {
    terms
        .iter()
        .filter(|m| m.weight != 0.0)
        .map(|m| m.rate)
        .fold(f64::INFINITY, f64::min)
}

/// Hypothesis (f) lower bound `g(ρ)` for one non-negative exponential sum.
fn g_terms(terms: &[ExpTerm], delta: f64, rho: f64) -> f64 {
    terms
        .iter()
        .map(|m| m.weight * delta * delta / (sqrt_2pi() * ((m.rate + rho).powi(2) + delta * delta)))
        .sum()
}

fn phi_terms(terms: &[ExpTerm], alpha: f64, t: f64) -> f64 {
    terms
        .iter()
        .map(|m| m.weight * (1.0 + t * t) / (sqrt_2pi() * ((m.rate - alpha).powi(2) + t * t)))
        .sum()
}

/// `inf_{t>0} Φ(t)` term by term: `(1+t²)/(γ²+t²)` is monotone between
/// `1/γ²` (t → 0) and `1` (t → ∞).
fn kernel_est_terms(terms: &[ExpTerm], alpha: f64) -> f64 {
    terms
        .iter()
        .map(|m| m.weight * (1.0f64).min((m.rate - alpha).powi(-2)) / sqrt_2pi())
        .sum()
}

impl Kernel {
    pub fn new(family: KernelFamily, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidKernel(format!("weight alpha = {alpha} must be positive")));
        }
        let check_terms = |terms: &[ExpTerm]| -> Result<()> {
            for m in terms {
                if !(m.rate > 0.0) || !m.rate.is_finite() || !m.weight.is_finite() {
                    return Err(Error::InvalidKernel(format!(
                        "term ({}, {}) needs a positive finite rate",
                        m.weight, m.rate
                    )));
                }
            }
            Ok(())
        };
        let min_rate = match &family {
            KernelFamily::ExpSum { terms } => {
                check_terms(terms)?;
                min_rate_terms(terms)
            }
            KernelFamily::DiagExpSum { channels } => {
                if channels.is_empty() {
                    return Err(Error::InvalidKernel("diagonal kernel without channels".into()));
                }
                let mut r = f64::INFINITY;
                for c in channels {
                    check_terms(c)?;
                    r = r.min(min_rate_terms(c));
                }
                r
            }
            KernelFamily::Sampled(s) => s.tail_rate,
        };
        if alpha >= min_rate {
            return Err(Error::InvalidKernel(format!(
                "alpha = {alpha} must be below the slowest decay rate {min_rate}"
            )));
        }
        Ok(Self { family, alpha })
    }

    pub fn exp_sum(terms: Vec<ExpTerm>, alpha: f64) -> Result<Self> {
        Self::new(KernelFamily::ExpSum { terms }, alpha)
    }

    /// `weight * exp(-rate t)`.
    pub fn single(weight: f64, rate: f64, alpha: f64) -> Result<Self> {
        Self::exp_sum(vec![ExpTerm::new(weight, rate)], alpha)
    }

    pub fn zero(alpha: f64) -> Result<Self> {
        Self::exp_sum(Vec::new(), alpha)
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of diagonal channels; `None` for scalar kernels.
    pub fn channels(&self) -> Option<usize> {
        match &self.family {
            KernelFamily::DiagExpSum { channels } => Some(channels.len()),
            _ => None,
        }
    }

    /// Infimum of the decay rates (the transform is analytic for `Re z > -min_rate`).
    pub fn min_rate(&self) -> f64 {
        match &self.family {
            KernelFamily::ExpSum { terms } => min_rate_terms(terms),
            KernelFamily::DiagExpSum { channels } => channels
                .iter()
                .map(|c| min_rate_terms(c))
                .fold(f64::INFINITY, f64::min),
            KernelFamily::Sampled(s) => s.tail_rate,
        }
    }

    /// Exponential terms per channel (one channel for scalar kernels).
    pub fn channel_terms(&self) -> Option<Vec<&[ExpTerm]>> {
        match &self.family {
            KernelFamily::ExpSum { terms } => Some(vec![terms.as_slice()]),
            KernelFamily::DiagExpSum { channels } => Some(channels.iter().map(|c| c.as_slice()).collect()),
            KernelFamily::Sampled(_) => None,
        }
    }

    fn check_domain(&self, z: Complex64) -> Result<()> {
        let bound = -self.min_rate();
        if z.re > bound {
            Ok(())
        } else {
            Err(Error::Domain { z, bound })
        }
    }

    /// `K(z)` per channel.
    pub fn laplace_channels(&self, z: Complex64) -> Result<Vec<Complex64>> {
        self.check_domain(z)?;
        Ok(match &self.family {
            KernelFamily::ExpSum { terms } => vec![laplace_terms(terms, z)],
            KernelFamily::DiagExpSum { channels } => {
                channels.iter().map(|c| laplace_terms(c, z)).collect()
            }
            KernelFamily::Sampled(s) => vec![s.quadrature(z)?],
        })
    }

    /// Scalar transform; errors for diagonal kernels.
    pub fn laplace(&self, z: Complex64) -> Result<Complex64> {
        if self.channels().is_some() {
            return Err(Error::InvalidKernel("diagonal kernel has no scalar transform".into()));
        }
        Ok(self.laplace_channels(z)?[0])
    }

    /// `K(z)` as an `n x n` matrix (scalar kernels act as multiples of the identity).
    pub fn laplace_transform(&self, z: Complex64, n: usize) -> Result<CMatrix> {
        let ch = self.laplace_channels(z)?;
        match self.channels() {
            Some(m) if m != n => Err(Error::DimensionMismatch(format!(
                "kernel has {m} channels, operator dimension is {n}"
            ))),
            Some(_) => Ok(CMatrix::from_diagonal(&crate::linalg::CVector::from_vec(ch))),
            None => Ok(CMatrix::identity(n, n) * ch[0]),
        }
    }

    /// `k̂(ζ) = K(iζ)/√(2π)` per channel.
    pub fn fourier_hat(&self, zeta: Complex64) -> Result<Vec<Complex64>> {
        let z = Complex64::new(0.0, 1.0) * zeta;
        Ok(self
            .laplace_channels(z)?
            .into_iter()
            .map(|v| v / sqrt_2pi())
            .collect())
    }

    /// Time samples per channel.
    pub fn value(&self, t: f64) -> Vec<f64> {
        match &self.family {
            KernelFamily::ExpSum { terms } => vec![eval_terms(terms, t)],
            KernelFamily::DiagExpSum { channels } => channels.iter().map(|c| eval_terms(c, t)).collect(),
            KernelFamily::Sampled(s) => {
                let i = s.times.partition_point(|&x| x <= t);
                let v = if i == 0 {
                    s.values[0]
                } else if i == s.times.len() {
                    let last = s.times.len() - 1;
                    s.values[last] * (-s.tail_rate * (t - s.times[last])).exp()
                } else {
                    let (t0, t1) = (s.times[i - 1], s.times[i]);
                    let w = (t - t0) / (t1 - t0);
                    s.values[i - 1] * (1.0 - w) + s.values[i] * w
                };
                vec![v]
            }
        }
    }

    /// `|k|_{1,-w} = ∫ e^{wt} ||k(t)|| dt` (maximum over channels).
    ///
    /// Exact for non-negative coefficients; with mixed signs it is the
    /// term-wise upper bound (see [`Kernel::has_mixed_signs`]). Negative `w`
    /// is allowed as long as `rate + |w|` stays positive, which always holds.
    pub fn weighted_l1_norm(&self, w: f64) -> Result<f64> {
        let rate = self.min_rate();
        if w >= rate {
            return Err(Error::Divergent { weight: w, rate });
        }
        let terms_norm =
            |terms: &[ExpTerm]| terms.iter().map(|m| m.weight.abs() / (m.rate - w)).sum::<f64>();
        match &self.family {
            KernelFamily::ExpSum { terms } => Ok(terms_norm(terms)),
            KernelFamily::DiagExpSum { channels } => Ok(channels
                .iter()
                .map(|c| terms_norm(c))
                .fold(0.0, f64::max)),
            KernelFamily::Sampled(s) => s.weighted_abs_integral(w),
        }
    }

    pub fn has_mixed_signs(&self) -> bool {
        match self.channel_terms() {
            Some(chs) => chs.iter().any(|c| {
                c.iter().any(|m| m.weight < 0.0) && c.iter().any(|m| m.weight > 0.0)
            }),
            None => false,
        }
    }

    fn all_nonnegative(&self) -> Option<bool> {
        self.channel_terms()
            .map(|chs| chs.iter().all(|c| c.iter().all(|m| m.weight >= 0.0)))
    }

    pub fn check_hypotheses(&self) -> HypothesisReport {
        let mut report = HypothesisReport {
            measurable: true,
            weighted_norm: None,
            weighted_norm_conservative: self.has_mixed_signs(),
            norm_below_one: false,
            selfadjoint: true,
            commuting: true,
            commutator_norm: 0.0,
            failures: Vec::new(),
        };
        match self.weighted_l1_norm(self.alpha) {
            Ok(v) => {
                report.weighted_norm = Some(v);
                report.norm_below_one = v < 1.0;
                if v >= 1.0 {
                    report
                        .failures
                        .push(format!("(c): |k|_(1,-alpha) = {v} is not below 1"));
                }
            }
            Err(e) => report.failures.push(format!("(c): {e}")),
        }
        report
    }

    /// Lower bound `g(ρ)` with `t Im k̂(t - iρ) <= -g(ρ)` for all `|t| >= δ`.
    ///
    /// Each term `k t²/((β+ρ)²+t²)` increases in `t²`, so for non-negative
    /// coefficients the infimum sits at `|t| = δ`. Diagonal kernels take the
    /// weakest channel.
    pub fn g_lower_bound(&self, delta: f64, rho: f64) -> Result<f64> {
        self.g_lower_bound_at(delta, rho)
    }

    fn g_lower_bound_at(&self, tau: f64, rho: f64) -> Result<f64> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!("threshold {tau} must be positive")));
        }
        if !(rho > -self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "rho = {rho} must exceed -alpha = {}",
                -self.alpha
            )));
        }
        let chs = self.channel_terms().ok_or_else(|| {
            Error::not_certified("(f)", "sampled kernels are not certified by the term-wise bound")
        })?;
        if self.all_nonnegative() != Some(true) {
            return Err(Error::not_certified(
                "(f)",
                "indefinite coefficient signs; term-wise bound does not apply",
            ));
        }
        Ok(chs
            .iter()
            .map(|c| g_terms(c, tau, rho))
            .fold(f64::INFINITY, f64::min))
    }

    /// True iff `k'(t) <= -α₀ k(t)` for all `t`, i.e. every active mode decays at rate `>= α₀`.
    pub fn check_alabau(&self, alpha0: f64) -> Result<bool> {
        let terms = match &self.family {
            KernelFamily::ExpSum { terms } => terms,
            _ => {
                return Err(Error::InvalidKernel(
                    "the derivative condition is only decided for scalar exponential sums".into(),
                ))
            }
        };
        if terms.iter().any(|m| m.weight < 0.0) {
            return Err(Error::InvalidKernel("coefficients must be non-negative".into()));
        }
        if !(terms.iter().map(|m| m.weight).sum::<f64>() > 0.0) {
            return Err(Error::InvalidKernel("k(0) must be positive".into()));
        }
        Ok(min_rate_terms(terms) >= alpha0)
    }

    fn alabau_terms(&self, alpha: f64) -> Result<&[ExpTerm]> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
        }
        let terms = match &self.family {
            KernelFamily::ExpSum { terms } => terms.as_slice(),
            _ => {
                return Err(Error::InvalidKernel(
                    "Phi is only available for scalar exponential sums".into(),
                ))
            }
        };
        if terms.is_empty() || terms.iter().all(|m| m.weight == 0.0) {
            return Ok(terms);
        }
        // Alabau with some α₀ > α holds iff the slowest mode is strictly faster than α.
        if !self.check_alabau(alpha)? || min_rate_terms(terms) <= alpha {
            return Err(Error::not_certified(
                "derivative condition",
                format!("slowest mode {} does not exceed alpha = {alpha}", min_rate_terms(terms)),
            ));
        }
        Ok(terms)
    }

    /// `Φ(t) = -(1+t²)/t · Im k̂(t + iα)`.
    pub fn phi_function(&self, alpha: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
        }
        Ok(phi_terms(self.alabau_terms(alpha)?, alpha, t))
    }

    /// `lim_{t→0+} Φ(t) = (1/√2π) ∫ s e^{αs} k(s) ds`.
    pub fn phi_limit_at_zero(&self, alpha: f64) -> Result<f64> {
        Ok(self
            .alabau_terms(alpha)?
            .iter()
            .map(|m| m.weight / (sqrt_2pi() * (m.rate - alpha).powi(2)))
            .sum())
    }

    /// `inf_{t>0} Φ(t)`; certified when positive.
    pub fn kernel_est_constant(&self, alpha: f64) -> Result<KernelEstimate> {
        let constant = kernel_est_terms(self.alabau_terms(alpha)?, alpha);
        Ok(KernelEstimate {
            constant,
            certified: constant > 0.0,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelEstimate {
    pub constant: f64,
    pub certified: bool,
}

/// Outcome of checking hypotheses (a)–(e).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// (a), (b): automatic for the supported families.
    pub measurable: bool,
    /// (c): `|k|_(1,-alpha)`.
    pub weighted_norm: Option<f64>,
    pub weighted_norm_conservative: bool,
    pub norm_below_one: bool,
    /// (d), (e): diagonal kernels are selfadjoint and commute exactly.
    pub selfadjoint: bool,
    pub commuting: bool,
    pub commutator_norm: f64,
    pub failures: Vec<String>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `c/(√2π (α+ρ+1)²) · δ²/(1+δ²)`.
pub fn cannarsa_g(c: f64, alpha: f64, delta: f64, rho: f64) -> f64 {
    c / (sqrt_2pi() * (alpha + rho + 1.0).powi(2)) * delta * delta / (1.0 + delta * delta)
}

/// Constants from the memory-only positivity argument.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegroConstants {
    pub delta: f64,
    /// Positive root of `-ρ(1+|k|) + √2π g(ρ)` on `(0, min(α, δ))`.
    pub rho_root: f64,
    pub rho0: f64,
    /// Frequency threshold used in g: `√(δ² - ρ0²)`.
    pub g_threshold: f64,
    pub g_at_rho0: f64,
    pub weighted_norm: f64,
    /// Bound on the strip `|Re z| <= ρ0`: `(√2π g(ρ0) - ρ0(1+|k|))/(1+|k|)²`.
    pub first: f64,
    /// Bound for `Re z > ρ0`: `ρ0(1-|k|)/(1+|k|)²`.
    pub second: f64,
    pub c: f64,
}

/// Positivity constants `(ρ0, c)` for the law `(1 - K(z))⁻¹`.
///
/// Outside the ball `|z| <= δ` and for `|Re z| <= ρ0`, `|Im z| >= √(δ²-ρ0²)`,
/// so g is evaluated at that threshold; g decreases in ρ, so its infimum over
/// `[-ρ0, ρ0]` sits at `ρ0`. The root is bracketed by bisection and `ρ0` is
/// taken at 90% of it so the strip bound stays strictly positive.
pub fn positivity_constants_integro(kernel: &Kernel, delta: f64) -> Result<IntegroConstants> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    let alpha = kernel.alpha();
    let knorm = kernel.weighted_l1_norm(alpha)?;
    if knorm >= 1.0 {
        return Err(Error::not_certified("(c)", format!("|k|_(1,-alpha) = {knorm} >= 1")));
    }
    let g = |rho: f64| -> Result<f64> {
        let tau = (delta * delta - rho * rho).max(0.0).sqrt();
        kernel.g_lower_bound_at(tau, rho)
    };
    let g0 = g(0.0)?;
    if !(g0 > 0.0) {
        return Err(Error::not_certified("(f)", "g(0) = 0: the kernel provides no damping"));
    }
    let f = |rho: f64| -> Result<f64> { Ok(-rho * (1.0 + knorm) + sqrt_2pi() * g(rho)?) };
    let hi_end = alpha.min(delta);
    let (mut lo, mut hi) = (0.0, hi_end);
    let root = if f(hi * (1.0 - 1e-12))? > 0.0 {
        hi
    } else {
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if f(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let rho0 = 0.9 * root;
    let g_rho0 = g(rho0)?;
    let denom = (1.0 + knorm).powi(2);
    let first = (sqrt_2pi() * g_rho0 - rho0 * (1.0 + knorm)) / denom;
    let second = rho0 * (1.0 - knorm) / denom;
    let c = first.min(second);
    if !(c > 0.0 && rho0 > 0.0) {
        return Err(Error::not_certified(
            "memory positivity",
            format!("rho0 = {rho0}, c = {c}"),
        ));
    }
    Ok(IntegroConstants {
        delta,
        rho_root: root,
        rho0,
        g_threshold: (delta * delta - rho0 * rho0).sqrt(),
        g_at_rho0: g_rho0,
        weighted_norm: knorm,
        first,
        second,
        c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn k05() -> Kernel {
        Kernel::single(0.5, 1.0, 0.25).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn laplace_examples() {
        let k = k05();
        assert_abs_diff_eq!(k.laplace(c(0.0, 0.0)).unwrap().re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(k.laplace(c(1.0, 0.0)).unwrap().re, 0.25, epsilon = 1e-15);
        assert_eq!(Kernel::zero(0.3).unwrap().laplace(c(2.0, 1.0)).unwrap(), c(0.0, 0.0));
        assert!(matches!(k.laplace(c(-1.0, 0.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn weighted_norm_examples() {
        let k = k05();
        assert_abs_diff_eq!(k.weighted_l1_norm(0.25).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.weighted_l1_norm(0.0).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(k.weighted_l1_norm(1.0), Err(Error::Divergent { .. })));
    }

    #[test]
    fn hypotheses_report() {
        let r = k05().check_hypotheses();
        assert!(r.all_pass());
        assert_abs_diff_eq!(r.weighted_norm.unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        let r = Kernel::single(0.9, 1.0, 0.25).unwrap().check_hypotheses();
        assert!(!r.norm_below_one);
        assert_abs_diff_eq!(r.weighted_norm.unwrap(), 1.2, epsilon = 1e-12);
        let diag = Kernel::new(
            KernelFamily::DiagExpSum {
                channels: vec![vec![ExpTerm::new(0.3, 1.0)], vec![ExpTerm::new(0.2, 2.0)]],
            },
            0.25,
        )
        .unwrap();
        let r = diag.check_hypotheses();
        assert!(r.selfadjoint && r.commuting && r.commutator_norm == 0.0);
    }

    #[test]
    fn g_examples() {
        let k = k05();
        let g = k.g_lower_bound(0.5, 0.0).unwrap();
        assert_abs_diff_eq!(g, 0.5 * 0.25 / (sqrt_2pi() * 1.25), epsilon = 1e-15);
        let k2 = Kernel::single(1.0, 1.0, 0.25).unwrap();
        assert_abs_diff_eq!(k2.g_lower_bound(0.5, 0.0).unwrap(), 2.0 * g, epsilon = 1e-15);
        let mixed = Kernel::exp_sum(vec![ExpTerm::new(1.0, 1.0), ExpTerm::new(-0.6, 2.0)], 0.25).unwrap();
        assert!(matches!(mixed.g_lower_bound(0.5, 0.0), Err(Error::NotCertified { .. })));
    }

    #[test]
    fn alabau_examples() {
        let k = k05();
        assert!(k.check_alabau(0.8).unwrap());
        assert!(k.check_alabau(1.0).unwrap());
        let k = Kernel::exp_sum(vec![ExpTerm::new(0.3, 1.0), ExpTerm::new(0.2, 3.0)], 0.25).unwrap();
        assert!(!k.check_alabau(2.0).unwrap());
    }

    #[test]
    fn phi_examples() {
        let k = k05();
        let s = sqrt_2pi();
        for &t in &[0.1, 1.0, 7.0] {
            let expect = 0.5 * (1.0 + t * t) / (s * (0.5625 + t * t));
            assert_abs_diff_eq!(k.phi_function(0.25, t).unwrap(), expect, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(k.kernel_est_constant(0.25).unwrap().constant, 0.5 / s, epsilon = 1e-15);
        assert_abs_diff_eq!(k.phi_limit_at_zero(0.25).unwrap(), 0.5 / (s * 0.5625), epsilon = 1e-15);
        let est = Kernel::zero(0.25).unwrap().kernel_est_constant(0.25).unwrap();
        assert_eq!(est.constant, 0.0);
        assert!(!est.certified);
    }

    #[test]
    fn cannarsa_examples() {
        assert_abs_diff_eq!(cannarsa_g(1.0, 1.0, 1.0, 0.0), 1.0 / (sqrt_2pi() * 4.0) * 0.5, epsilon = 1e-15);
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let v = cannarsa_g(1.0, 1.0, 1.0, i as f64);
            assert!(v < prev);
            prev = v;
        }
        assert_abs_diff_eq!(cannarsa_g(2.0, 0.5, 1e8, 0.5), 2.0 / (sqrt_2pi() * 4.0), epsilon = 1e-12);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let s = SampledKernel::from_terms(&[ExpTerm::new(0.5, 1.0)], 1e-3, 30.0).unwrap();
        assert_abs_diff_eq!(s.quadrature(c(1.0, 0.0)).unwrap().re, 0.25, epsilon = 1e-6);
        assert_abs_diff_eq!(s.quadrature(c(0.0, 0.0)).unwrap().re, 0.5, epsilon = 1e-6);
        let z = c(0.3, 2.0);
        assert!((s.quadrature(z).unwrap() - 0.5 / (1.0 + z)).norm() < 1e-6);
        assert!(SampledKernel::new(vec![], vec![], 1.0).is_err());
    }

    #[test]
    fn integro_constants_shape() {
        let k = k05();
        let pc = positivity_constants_integro(&k, 0.125).unwrap();
        assert!(pc.rho0 > 0.0 && pc.rho0 < 0.125);
        assert!(pc.c > 0.0);
        assert!(positivity_constants_integro(&Kernel::zero(0.25).unwrap(), 0.125).is_err());
    }
}
