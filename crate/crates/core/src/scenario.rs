//! JSON scenario files: spatial operator, material law, source and analysis
//! settings, validated as a whole when loaded.
//!
//! ```json
//! {
//!   "name": "damped wave",
//!   "spatial": { "kind": "dirichlet_1d", "n": 31 },
//!   "law": { "kind": "damped_wave", "m1": 0.2 },
//!   "source": { "kind": "bump", "t0": 0.0, "t1": 1.0, "amplitude": 1.0 },
//!   "analysis": { "t_end": 60.0, "dt": 0.001 }
//! }
//! ```
//!
//! Relative file paths are resolved against the directory of the scenario file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::certifier::{memory_law, CertifyOptions, GridSpec};
use crate::error::{Error, Result};
use crate::io;
use crate::kernel::{ExpTerm, Kernel, KernelFamily};
use crate::law::{LawExpr, SecondOrderLaw};
use crate::spatial::SpatialC;
use crate::time_domain::{SimulationOptions, Source, Trajectory, WaveModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialSpec {
    #[serde(rename = "dirichlet_1d")]
    Dirichlet1d { n: usize },
    /// Headerless CSV of complex entries.
    Matrix { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    ExpSum { terms: Vec<ExpTerm> },
    DiagExpSum { channels: Vec<Vec<ExpTerm>> },
    /// Two-column `(t, k)` table; `tail_rate` continues it exponentially.
    Sampled { path: PathBuf, tail_rate: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    /// `M0 = I`, `M1 = m1 I`; `r` defaults to `1/m1`.
    DampedWave {
        m1: f64,
        #[serde(default)]
        r: Option<f64>,
    },
    Integro { kernel: KernelSpec, alpha: f64 },
    IntegroDelay {
        kernel: KernelSpec,
        alpha: f64,
        kappa: f64,
        h: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    /// `amplitude · sin²(π(t - t0)/(t1 - t0)) · sin(πx)` on `[t0, t1]`.
    Bump { t0: f64, t1: f64, amplitude: f64 },
    /// Trajectory CSV `(t, f0, f1, ...)` on the simulation grid.
    File { path: PathBuf },
}

impl Default for SourceSpec {
    fn default() -> Self {
        SourceSpec::Bump {
            t0: 0.0,
            t1: 1.0,
            amplitude: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub kappas: Vec<f64>,
    /// Interpret `kappas` as multiples of the computed threshold `κ₀`.
    pub relative_to_threshold: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            kappas: vec![0.0, 0.5, 1.0, 2.0],
            relative_to_threshold: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSpec {
    /// Exclusion-ball radius; chosen automatically when absent.
    pub delta: Option<f64>,
    pub grid: GridSpec,
    pub growth_bound: bool,
    pub t_end: f64,
    pub dt: f64,
    pub record_stride: usize,
    /// Fit window for the decay rate.
    pub window: f64,
    /// Rates `ν` at which weighted norms `|u|_{H_{-ν}}` are reported.
    pub nu_probes: Vec<f64>,
    pub sweep: SweepSpec,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            delta: None,
            grid: GridSpec::default(),
            growth_bound: true,
            t_end: 60.0,
            dt: 1e-3,
            record_stride: 10,
            window: 2.0,
            nu_probes: vec![0.05, 0.1],
            sweep: SweepSpec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub spatial: SpatialSpec,
    pub law: LawSpec,
    #[serde(default)]
    pub source: SourceSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(skip)]
    base_dir: PathBuf,
}

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, &base)
    }

    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut sc: Scenario = serde_json::from_str(text).map_err(|e| cfg(format!("invalid scenario: {e}")))?;
        sc.base_dir = base_dir.to_path_buf();
        sc.validate()?;
        Ok(sc)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Cross-field checks; every failure is a configuration error.
    pub fn validate(&self) -> Result<()> {
        let a = &self.analysis;
        if let SpatialSpec::Dirichlet1d { n } = self.spatial {
            if n == 0 {
                return Err(cfg("spatial.n must be at least 1"));
            }
        }
        if !(a.dt > 0.0) || !(a.t_end > 0.0) || a.t_end < 2.0 * a.dt {
            return Err(cfg(format!("need 0 < dt and t_end >= 2 dt (dt = {}, t_end = {})", a.dt, a.t_end)));
        }
        if a.record_stride == 0 || !(a.window > 0.0) {
            return Err(cfg("record_stride and window must be positive"));
        }
        if a.nu_probes.iter().any(|v| !(*v > 0.0)) {
            return Err(cfg("nu_probes must be positive"));
        }
        match &self.law {
            LawSpec::DampedWave { m1, r } => {
                if !(*m1 >= 0.0) || !m1.is_finite() {
                    return Err(cfg(format!("m1 = {m1} must be a finite non-negative number")));
                }
                if let Some(r) = r {
                    if !(*r > 0.0) {
                        return Err(cfg(format!("r = {r} must be positive")));
                    }
                }
            }
            LawSpec::Integro { alpha, kernel } => self.check_kernel(kernel, *alpha)?,
            LawSpec::IntegroDelay {
                kernel,
                alpha,
                kappa,
                h,
            } => {
                self.check_kernel(kernel, *alpha)?;
                if !(*h > 0.0) || !kappa.is_finite() {
                    return Err(cfg(format!("need h > 0 and finite kappa (h = {h}, kappa = {kappa})")));
                }
                let m = (h / a.dt).round();
                if m < 1.0 || (m * a.dt - h).abs() > 1e-9 * h {
                    return Err(cfg(format!("dt = {} must divide the delay h = {h}", a.dt)));
                }
            }
        }
        if let Some(delta) = a.delta {
            if !(delta >= 0.0) {
                return Err(cfg(format!("delta = {delta} must be non-negative")));
            }
            if let Some(alpha) = self.alpha() {
                if delta >= alpha {
                    return Err(cfg(format!("delta = {delta} must be below alpha = {alpha}")));
                }
            }
        }
        if let SourceSpec::Bump { t0, t1, amplitude } = self.source {
            if !(t1 > t0) || t0 < 0.0 || !amplitude.is_finite() {
                return Err(cfg(format!("bump needs 0 <= t0 < t1 (t0 = {t0}, t1 = {t1})")));
            }
            if t1 >= a.t_end {
                return Err(cfg(format!("bump ends at {t1}, after t_end = {}", a.t_end)));
            }
        }
        Ok(())
    }

    fn check_kernel(&self, kernel: &KernelSpec, alpha: f64) -> Result<()> {
        if !(alpha > 0.0) {
            return Err(cfg(format!("alpha = {alpha} must be positive")));
        }
        if let KernelSpec::Sampled { .. } = kernel {
            return Ok(()); // read lazily; errors surface when the file is loaded
        }
        self.kernel_from(kernel, alpha).map(|_| ()).map_err(|e| cfg(e.to_string()))
    }

    fn kernel_from(&self, spec: &KernelSpec, alpha: f64) -> Result<Kernel> {
        let family = match spec {
            KernelSpec::ExpSum { terms } => KernelFamily::ExpSum { terms: terms.clone() },
            KernelSpec::DiagExpSum { channels } => KernelFamily::DiagExpSum {
                channels: channels.clone(),
            },
            KernelSpec::Sampled { path, tail_rate } => {
                KernelFamily::Sampled(io::read_kernel_file(&self.resolve(path), *tail_rate)?)
            }
        };
        Kernel::new(family, alpha)
    }

    pub fn alpha(&self) -> Option<f64> {
        match &self.law {
            LawSpec::DampedWave { .. } => None,
            LawSpec::Integro { alpha, .. } | LawSpec::IntegroDelay { alpha, .. } => Some(*alpha),
        }
    }

    pub fn kernel(&self) -> Result<Option<Kernel>> {
        match &self.law {
            LawSpec::DampedWave { .. } => Ok(None),
            LawSpec::Integro { kernel, alpha } | LawSpec::IntegroDelay { kernel, alpha, .. } => {
                Ok(Some(self.kernel_from(kernel, *alpha)?))
            }
        }
    }

    /// `(κ, h)` for delay laws.
    pub fn delay(&self) -> Option<(f64, f64)> {
        match self.law {
            LawSpec::IntegroDelay { kappa, h, .. } => Some((kappa, h)),
            _ => None,
        }
    }

    pub fn spatial_c(&self) -> Result<SpatialC> {
        match &self.spatial {
            SpatialSpec::Dirichlet1d { n } => SpatialC::dirichlet_1d(*n),
            SpatialSpec::Matrix { path } => SpatialC::from_matrix(io::read_matrix_file(&self.resolve(path))?),
        }
    }

    /// The damped-wave radius: explicit `r`, else `1/m1` (any positive value when `m1 = 0`).
    pub fn damped_radius(m1: f64, r: Option<f64>) -> f64 {
        r.unwrap_or(if m1 > 0.0 { 1.0 / m1 } else { 1.0 })
    }

    pub fn law(&self, n: usize) -> Result<SecondOrderLaw> {
        match &self.law {
            LawSpec::DampedWave { m1, r } => SecondOrderLaw::new(
                LawExpr::identity(n),
                LawExpr::scalar(*m1, n),
                Self::damped_radius(*m1, *r),
            ),
            LawSpec::Integro { .. } => memory_law(&self.require_kernel()?, n, None),
            LawSpec::IntegroDelay { kappa, h, .. } => memory_law(&self.require_kernel()?, n, Some((*kappa, *h))),
        }
    }

    fn require_kernel(&self) -> Result<Kernel> {
        self.kernel()?.ok_or_else(|| cfg("law has no kernel"))
    }

    /// The multiplier turning the physical equation into the law form: `(1 - K)⁻¹` for memory laws.
    pub fn source_factor(&self, n: usize) -> Result<Option<LawExpr>> {
        match self.kernel()? {
            Some(k) => Ok(Some(LawExpr::conv_resolvent(k, n)?)),
            None => Ok(None),
        }
    }

    pub fn wave_model(&self, c: &SpatialC) -> Result<WaveModel> {
        let model = WaveModel::new(c)?;
        Ok(match &self.law {
            LawSpec::DampedWave { m1, .. } => model.with_scalar_damping(*m1)?,
            LawSpec::Integro { .. } => model.with_memory(&self.require_kernel()?)?,
            LawSpec::IntegroDelay { kappa, h, .. } => {
                model.with_memory(&self.require_kernel()?)?.with_delay(*kappa, *h)?
            }
        })
    }

    pub fn source(&self, n: usize) -> Result<Source> {
        match &self.source {
            SourceSpec::Bump { t0, t1, amplitude } => Source::bump(*t0, *t1, *amplitude, n),
            SourceSpec::File { path } => {
                let tr: Trajectory = io::read_trajectory_file(&self.resolve(path))?;
                if tr.dim() != n {
                    return Err(cfg(format!("source file has {} channels, expected {n}", tr.dim())));
                }
                if (tr.dt - self.analysis.dt).abs() > 1e-9 * self.analysis.dt || tr.t0 != 0.0 {
                    return Err(cfg("source file must start at t = 0 on the simulation step"));
                }
                Ok(Source::Sampled(tr))
            }
        }
    }

    pub fn certify_options(&self) -> CertifyOptions {
        CertifyOptions {
            delta: self.analysis.delta,
            grid: self.analysis.grid.clone(),
            growth_bound: self.analysis.growth_bound,
        }
    }

    pub fn simulation_options(&self) -> SimulationOptions {
        SimulationOptions {
            t_end: self.analysis.t_end,
            dt: self.analysis.dt,
            record_stride: self.analysis.record_stride,
        }
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        let mut out = self.clone();
        match &mut out.law {
            LawSpec::IntegroDelay { kappa: k, .. } => *k = kappa,
            _ => return Err(cfg("kappa sweeps need an integro_delay law")),
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DAMPED: &str = r#"{
        "spatial": {"kind": "dirichlet_1d", "n": 5},
        "law": {"kind": "damped_wave", "m1": 0.2}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let sc = Scenario::from_json(DAMPED, Path::new(".")).unwrap();
        assert_eq!(sc.analysis.dt, 1e-3);
        assert_eq!(sc.source, SourceSpec::default());
        let law = sc.law(5).unwrap();
        assert!((law.r - 5.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = DAMPED.replace("\"m1\": 0.2", "\"m1\": 0.2, \"m2\": 1");
        assert!(matches!(Scenario::from_json(&bad, Path::new(".")), Err(Error::Config(_))));
    }

    #[test]
    fn cross_field_checks() {
        let delay = r#"{
            "spatial": {"kind": "dirichlet_1d", "n": 3},
            "law": {"kind": "integro_delay", "kernel": {"kind": "exp_sum", "terms": [{"weight": 0.5, "rate": 1.0}]},
                    "alpha": 0.25, "kappa": 0.1, "h": 1.0},
            "analysis": {"dt": 0.003}
        }"#;
        assert!(Scenario::from_json(delay, Path::new(".")).is_err());
        let ok = delay.replace("0.003", "0.004");
        assert!(Scenario::from_json(&ok, Path::new(".")).is_ok());
        let big_delta = ok.replace("\"dt\": 0.004", "\"dt\": 0.004, \"delta\": 0.3");
        assert!(Scenario::from_json(&big_delta, Path::new(".")).is_err());
        let zero_n = DAMPED.replace("\"n\": 5", "\"n\": 0");
        assert!(Scenario::from_json(&zero_n, Path::new(".")).is_err());
        // heavy kernels load; the analysis reports the failed hypothesis
        let heavy = ok.replace("0.5", "0.9");
        assert!(Scenario::from_json(&heavy, Path::new(".")).is_ok());
    }
}
