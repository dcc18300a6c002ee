use serde::Serialize;

use crate::error::{Error, Result};

use super::{SimulationResult, Trajectory};

pub const DEFAULT_WINDOW: f64 = 2.0;
/// Windows whose norm falls below this fraction of the largest are treated as roundoff.
const FLOOR: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowNorm {
    pub t_mid: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    /// `ν̂`, minus the slope of `log ||x||_window` against time.
    pub rate: f64,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    pub t_start: f64,
    pub window: f64,
    pub windows: Vec<WindowNorm>,
}

/// Least-squares decay rate of windowed L² norms after `t_start`.
pub fn fit_decay_series(signal: &Trajectory, t_start: f64, window: f64) -> Result<DecayFit> {
    if !(window > 0.0) {
        return Err(Error::InvalidParameter(format!("window {window} must be positive")));
    }
    let norms = signal.norms();
    let per = ((window / signal.dt).round() as usize).max(1);
    let first = ((t_start - signal.t0) / signal.dt).ceil().max(0.0) as usize;
    let mut windows = Vec::new();
    let mut i = first;
    while i + per <= norms.len() {
        let s: f64 = norms[i..i + per].iter().map(|x| x * x).sum::<f64>() * signal.dt;
        windows.push(WindowNorm {
            t_mid: signal.time(i) + 0.5 * per as f64 * signal.dt,
            norm: s.sqrt(),
        });
        i += per;
    }
    let peak = windows.iter().fold(0.0f64, |m, w| m.max(w.norm));
    let pts: Vec<(f64, f64)> = windows
        .iter()
        .filter(|w| w.norm > FLOOR * peak && w.norm > 0.0)
        .map(|w| (w.t_mid, w.norm.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "only {} usable windows after t = {t_start}; extend the run",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    let slope = sxy / sxx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - ym - slope * (p.0 - tm)).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(DecayFit {
        rate: -slope,
        residual,
        t_start,
        window,
        windows,
    })
}

/// `|u(t)| <= |∂₀u|_{H_{-ν}} e^{-νt} / √(2ν)` along a run, and the variant without `1/√(2ν)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointwiseCheck {
    pub nu: f64,
    pub weighted_velocity_norm: f64,
    pub max_ratio_with_factor: f64,
    pub max_ratio_without_factor: f64,
    pub holds_with_factor: bool,
    pub holds_without_factor: bool,
}

pub fn pointwise_bound_check(u: &Trajectory, du: &Trajectory, nu: f64) -> Result<PointwiseCheck> {
    u.check_same_grid(du)?;
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("ν = {nu} must be positive")));
    }
    let wn = du.weighted_norm(-nu);
    let un = u.norms();
    let mut without = 0.0f64;
    for (i, x) in un.iter().enumerate() {
        let bound = wn * (-nu * u.time(i)).exp();
        if *x > 0.0 {
            without = without.max(if bound > 0.0 { x / bound } else { f64::INFINITY });
        }
    }
    let with = without * (2.0 * nu).sqrt();
    Ok(PointwiseCheck {
        nu,
        weighted_velocity_norm: wn,
        max_ratio_with_factor: with,
        max_ratio_without_factor: without,
        holds_with_factor: with <= 1.0,
        holds_without_factor: without <= 1.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunDecay {
    pub fit: DecayFit,
    pub pointwise: Option<PointwiseCheck>,
}

/// Fits `√E` past the transient `t_source + 2h + 5Δt` and checks the
/// pointwise bound at `ν = 0.9 ν̂`.
pub fn fit_decay_rate(result: &SimulationResult, window: f64) -> Result<RunDecay> {
    let dt = result.energy.dt;
    let t_start = result.source_end + 2.0 * result.delay_h.unwrap_or(0.0) + 5.0 * dt;
    let amp = Trajectory::from_data(
        result.energy.t0,
        dt,
        1,
        result.energy.data().iter().map(|e| e.max(0.0).sqrt()).collect(),
    )?;
    let fit = fit_decay_series(&amp, t_start, window)?;
    let pointwise = if fit.rate > 0.0 {
        Some(pointwise_bound_check(&result.u, &result.w, 0.9 * fit.rate)?)
    } else {
        None
    };
    Ok(RunDecay { fit, pointwise })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_rates() {
        let s = Trajectory::from_fn(0.0, 1e-3, 40_001, |t| (-0.3 * t).exp() * (1.0 + 0.1 * (5.0 * t).sin()));
        let f = fit_decay_series(&s, 0.0, 2.0).unwrap();
        assert!((f.rate - 0.3).abs() < 0.01, "{}", f.rate);
        let c = Trajectory::from_fn(0.0, 1e-2, 2001, |_| 2.0);
        assert!(fit_decay_series(&c, 0.0, 2.0).unwrap().rate.abs() < 0.01);
    }

    #[test]
    fn short_signal_is_rejected() {
        let s = Trajectory::from_fn(0.0, 0.1, 20, |_| 1.0);
        assert!(fit_decay_series(&s, 0.0, 2.0).is_err());
    }

    #[test]
    fn pointwise_bound_on_exponential() {
        // u = e^{-t}, u' = -e^{-t}: |u'|_{H_{-ν}} = 1/√(2(1-ν)); the bound with the factor holds.
        let dt = 1e-3;
        let u = Trajectory::from_fn(0.0, dt, 30_001, |t| (-t).exp());
        let du = Trajectory::from_fn(0.0, dt, 30_001, |t| -(-t).exp());
        let p = pointwise_bound_check(&u, &du, 0.5).unwrap();
        assert!(p.holds_with_factor);
        assert!((p.weighted_velocity_norm - 1.0).abs() < 1e-3);
    }
}
