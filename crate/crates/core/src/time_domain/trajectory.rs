use serde::Serialize;

use crate::error::{Error, Result};

/// Uniformly sampled real vector-valued signal, stored sample-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    dim: usize,
    data: Vec<f64>,
}

impl Trajectory {
    pub fn zeros(t0: f64, dt: f64, dim: usize, len: usize) -> Self {
        Self {
            t0,
            dt,
            dim,
            data: vec![0.0; dim * len],
        }
    }

    pub fn from_data(t0: f64, dt: f64, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) || !(dt > 0.0) {
            return Err(Error::DimensionMismatch(format!(
                "{} values do not split into samples of dimension {dim} (dt = {dt})",
                data.len()
            )));
        }
        Ok(Self { t0, dt, dim, data })
    }

    pub fn from_fn(t0: f64, dt: f64, len: usize, f: impl Fn(f64) -> f64) -> Self {
        let data = (0..len).map(|i| f(t0 + i as f64 * dt)).collect();
        Self { t0, dt, dim: 1, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn sample_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn push(&mut self, v: &[f64]) {
        assert_eq!(v.len(), self.dim, "sample dimension");
        self.data.extend_from_slice(v);
    }

    /// First `len` samples.
    pub fn truncated(&self, len: usize) -> Self {
        let len = len.min(self.len());
        Self {
            t0: self.t0,
            dt: self.dt,
            dim: self.dim,
            data: self.data[..len * self.dim].to_vec(),
        }
    }

    /// Euclidean norm of each sample.
    pub fn norms(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.sample(i).iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    }

    /// Discrete `(∫ |f(t)|² e^{-2ρt} dt)^{1/2}` with the rectangle rule on the grid.
    pub fn weighted_norm(&self, rho: f64) -> f64 {
        self.norms()
            .iter()
            .enumerate()
            .map(|(i, n)| n * n * (-2.0 * rho * self.time(i)).exp() * self.dt)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim
            || self.len() != other.len()
            || (self.dt - other.dt).abs() > 1e-12 * self.dt
            || (self.t0 - other.t0).abs() > 1e-12 * self.dt.max(1.0)
        {
            return Err(Error::DimensionMismatch(format!(
                "trajectories on different grids ({} x {} @ {}, {} x {} @ {})",
                self.len(),
                self.dim,
                self.dt,
                other.len(),
                other.dim,
                other.dt
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Causality {
    /// `∫_{t0}^t f`.
    Causal,
    /// `-∫_t^{T} f`.
    Anticausal,
}

/// Trapezoid-rule antiderivative; the anticausal variant integrates from the
/// end of the window, standing in for `+∞` on compactly supported data.
pub fn causal_antiderivative(f: &Trajectory, causality: Causality) -> Trajectory {
    let n = f.len();
    let dim = f.dim();
    let mut out = Trajectory::zeros(f.t0, f.dt, dim, n);
    if n == 0 {
        return out;
    }
    match causality {
        Causality::Causal => {
            for i in 1..n {
                for k in 0..dim {
                    let v = out.sample(i - 1)[k] + 0.5 * f.dt * (f.sample(i - 1)[k] + f.sample(i)[k]);
                    out.sample_mut(i)[k] = v;
                }
            }
        }
        Causality::Anticausal => {
            for i in (0..n - 1).rev() {
                for k in 0..dim {
                    let v = out.sample(i + 1)[k] - 0.5 * f.dt * (f.sample(i)[k] + f.sample(i + 1)[k]);
                    out.sample_mut(i)[k] = v;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn indicator(dt: f64, len: usize) -> Trajectory {
        Trajectory::from_fn(0.0, dt, len, |t| if (0.0..=1.0).contains(&t) { 1.0 } else { 0.0 })
    }

    #[test]
    fn antiderivative_of_indicator() {
        let dt = 1e-3;
        let f = indicator(dt, 3001);
        let a = causal_antiderivative(&f, Causality::Causal);
        for i in (0..3001).step_by(37) {
            let t = a.time(i);
            let exact = t.clamp(0.0, 1.0);
            assert!((a.sample(i)[0] - exact).abs() <= dt);
        }
        let b = causal_antiderivative(&f, Causality::Anticausal);
        for i in (0..3001).step_by(37) {
            let t = b.time(i);
            let exact = -(1.0 - t).clamp(0.0, 1.0);
            assert!((b.sample(i)[0] - exact).abs() <= dt);
        }
    }

    #[test]
    fn weighted_norm_of_decaying_exponential() {
        let dt = 1e-4;
        let f = Trajectory::from_fn(0.0, dt, 400_001, |t| (-t).exp());
        // ∫ e^{-2t} e^{-2ρt} with ρ = 0.5 → 1/3
        assert_abs_diff_eq!(f.weighted_norm(0.5), (1.0f64 / 3.0).sqrt(), epsilon = 1e-3);
        // H_{-ν} with ν = 0.5: ∫ e^{-2t} e^{t} dt = 1
        let g = Trajectory::from_fn(0.0, 1e-3, 30_001, |t| (-t).exp());
        assert_abs_diff_eq!(g.weighted_norm(-0.5), 1.0, epsilon = 1e-3);
        assert_eq!(Trajectory::zeros(0.0, 0.1, 2, 10).weighted_norm(0.3), 0.0);
    }
}
