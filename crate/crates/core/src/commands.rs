//! The five batch commands. Each reads a [`Scenario`], writes `report.json`,
//! `summary.txt` and CSV curves into an output directory, and maps its
//! outcome to an exit code: 0 success/certified, 1 analysis-negative,
//! 2 usage or configuration error.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::certifier::{
    certify_delay_on_base, certify_global, certify_integro, delay_base, resolvent_sup_grid, DelayBase, GridRecord,
};
use crate::error::{Error, Result};
use crate::io::write_trajectory_csv;
use crate::kernel::{positivity_constants_integro, Kernel};
use crate::reformulation::FirstOrderSystem;
use crate::scenario::{LawSpec, Scenario};
use crate::spatial::SpatialC;
use crate::time_domain::{fit_decay_rate, simulate, RunDecay, SimulationResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Tolerance when comparing a sampled resolvent norm with its certified bound.
const BOUND_RTOL: f64 = 1e-8;
/// Allowed shortfall of the fitted rate below the certified rate.
const RATE_SLACK: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Certify,
    Simulate,
    Validate,
    KernelCheck,
    SweepKappa,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Certify => "certify",
            Command::Simulate => "simulate",
            Command::Validate => "validate",
            Command::KernelCheck => "kernel-check",
            Command::SweepKappa => "sweep-kappa",
        }
    }
}

/// What a command produced before it is written to disk.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Value,
    pub summary: Vec<String>,
    /// `(file name, contents)` pairs.
    pub files: Vec<(String, String)>,
}

impl Outcome {
    fn new(exit_code: i32, report: Value) -> Self {
        Self {
            exit_code,
            report,
            summary: Vec::new(),
            files: Vec::new(),
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub fn write(&self, out: &Path) -> Result<()> {
        fs::create_dir_all(out)?;
        let mut text = serde_json::to_string_pretty(&self.report)?;
        text.push('\n');
        fs::write(out.join("report.json"), text)?;
        let mut s = self.summary.join("\n");
        s.push('\n');
        fs::write(out.join("summary.txt"), s)?;
        for (name, body) in &self.files {
            fs::write(out.join(name), body)?;
        }
        Ok(())
    }
}

/// Configuration problems map to exit code 2, everything else to 1.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_USAGE,
        _ => EXIT_NEGATIVE,
    }
}

/// Loads the scenario, runs the command and writes its artifacts; returns the exit code.
pub fn run(command: Command, config: &Path, out: &Path) -> (i32, String) {
    let sc = match Scenario::load(config) {
        Ok(sc) => sc,
        Err(e) => return (exit_code_for(&e), e.to_string()),
    };
    let result = match command {
        Command::Certify => cmd_certify(&sc),
        Command::Simulate => cmd_simulate(&sc),
        Command::Validate => cmd_validate(&sc),
        Command::KernelCheck => cmd_kernel_check(&sc),
        Command::SweepKappa => cmd_sweep_kappa(&sc),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let code = exit_code_for(&e);
            let mut o = Outcome::new(
                code,
                json!({ "command": command.name(), "scenario": sc.name, "error": e.to_string() }),
            );
            o.line(format!("{}: {}", command.name(), e));
            o
        }
    };
    if let Err(e) = outcome.write(out) {
        return (EXIT_USAGE, format!("cannot write results to {}: {e}", out.display()));
    }
    (outcome.exit_code, outcome.summary.join("\n"))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn evidence_csv(records: &[GridRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["re", "im", "inside_ball", "herm_min", "resolvent_norm"])?;
    for r in records {
        w.write_record([
            r.re.to_string(),
            r.im.to_string(),
            r.inside_ball.to_string(),
            r.herm_min.map_or(String::new(), |v| v.to_string()),
            r.resolvent_norm.to_string(),
        ])?;
    }
    csv_string(w)
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

fn trajectory_csv(tr: &crate::time_domain::Trajectory, prefix: &str) -> Result<String> {
    let mut buf = Vec::new();
    write_trajectory_csv(tr, prefix, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))
}

fn evidence_summary(records: &[GridRecord]) -> Value {
    let herm_min = records.iter().filter_map(|r| r.herm_min).fold(f64::INFINITY, f64::min);
    let max_res = records.iter().map(|r| r.resolvent_norm).fold(0.0, f64::max);
    json!({
        "points": records.len(),
        "inside_ball": records.iter().filter(|r| r.inside_ball).count(),
        "min_herm": herm_min,
        "max_resolvent_norm": max_res,
    })
}

/// Result of running the certification pipeline that matches the law.
pub struct CertifyRun {
    pub certified: bool,
    pub rho1: Option<f64>,
    pub resolvent_bound: Option<f64>,
    pub system: Option<FirstOrderSystem>,
    pub detail: Value,
    pub evidence: Vec<GridRecord>,
    pub failure: Option<String>,
}

impl CertifyRun {
    fn refused(e: Error) -> Result<Self> {
        match e {
            Error::NotCertified { .. } | Error::Counterexample { .. } | Error::InvalidKernel(_) | Error::Unbounded(_) => {
                Ok(Self {
                    certified: false,
                    rho1: None,
                    resolvent_bound: None,
                    system: None,
                    detail: Value::Null,
                    evidence: Vec::new(),
                    failure: Some(e.to_string()),
                })
            }
            other => Err(other),
        }
    }
}

fn require_kernel(sc: &Scenario) -> Result<Kernel> {
    sc.kernel()?
        .ok_or_else(|| Error::Config("this command needs a law with a memory kernel".into()))
}

pub fn certify_scenario(sc: &Scenario) -> Result<CertifyRun> {
    let c = sc.spatial_c()?;
    let opts = sc.certify_options();
    let attempt = || -> Result<CertifyRun> {
        match &sc.law {
            LawSpec::DampedWave { .. } => {
                let law = sc.law(c.dim())?;
                let (cert, sys) = certify_global(&law, &c, &opts)?;
                Ok(CertifyRun {
                    certified: true,
                    rho1: Some(cert.rho1),
                    resolvent_bound: Some(cert.resolvent_bound),
                    evidence: cert.evidence().to_vec(),
                    detail: to_value(&cert)?,
                    system: Some(sys),
                    failure: None,
                })
            }
            LawSpec::Integro { .. } => {
                let (cert, sys) = certify_integro(&require_kernel(sc)?, &c, &opts)?;
                Ok(CertifyRun {
                    certified: true,
                    rho1: Some(cert.certificate.rho1),
                    resolvent_bound: Some(cert.certificate.resolvent_bound),
                    evidence: cert.certificate.evidence().to_vec(),
                    detail: to_value(&cert)?,
                    system: Some(sys),
                    failure: None,
                })
            }
            LawSpec::IntegroDelay { kappa, h, .. } => {
                let kernel = require_kernel(sc)?;
                let base = delay_base(&kernel, &c, &opts)?;
                Ok(delay_run(&base, &kernel, *kappa, *h, &c)?)
            }
        }
    };
    attempt().or_else(CertifyRun::refused)
}

fn delay_run(base: &DelayBase, kernel: &Kernel, kappa: f64, h: f64, c: &SpatialC) -> Result<CertifyRun> {
    let (cert, sys) = certify_delay_on_base(base, kernel, kappa, h, c)?;
    let rho1 = cert.base.certificate.rho1;
    Ok(CertifyRun {
        certified: cert.certified,
        rho1: cert.certified.then_some(rho1),
        resolvent_bound: cert.resolvent_bound,
        evidence: cert.base.certificate.evidence().to_vec(),
        failure: cert.failure.clone(),
        detail: to_value(&cert)?,
        system: cert.certified.then_some(sys),
    })
}

fn law_kind(sc: &Scenario) -> &'static str {
    match sc.law {
        LawSpec::DampedWave { .. } => "damped_wave",
        LawSpec::Integro { .. } => "integro",
        LawSpec::IntegroDelay { .. } => "integro_delay",
    }
}

pub fn cmd_certify(sc: &Scenario) -> Result<Outcome> {
    let run = certify_scenario(sc)?;
    let code = if run.certified { EXIT_OK } else { EXIT_NEGATIVE };
    let mut o = Outcome::new(
        code,
        json!({
            "command": "certify",
            "scenario": sc.name,
            "law": law_kind(sc),
            "certified": run.certified,
            "rho1": run.rho1,
            "resolvent_bound": run.resolvent_bound,
            "failure": run.failure,
            "evidence": evidence_summary(&run.evidence),
            "certificate": run.detail,
        }),
    );
    o.line(format!("scenario: {} ({})", sc.name, law_kind(sc)));
    if run.certified {
        o.line(format!("certified: rho1 = {:.6e}", run.rho1.unwrap_or(f64::NAN)));
        o.line(format!("resolvent bound: {:.6e}", run.resolvent_bound.unwrap_or(f64::NAN)));
    } else {
        o.line(format!("not certified: {}", run.failure.as_deref().unwrap_or("unknown")));
    }
    o.line(format!("grid points: {}", run.evidence.len()));
    o.files.push(("evidence.csv".into(), evidence_csv(&run.evidence)?));
    Ok(o)
}

struct SimRun {
    result: SimulationResult,
    decay: Result<RunDecay>,
}

fn run_simulation(sc: &Scenario, c: &SpatialC) -> Result<SimRun> {
    let model = sc.wave_model(c)?;
    let source = sc.source(c.dim())?;
    let result = simulate(&model, &source, &sc.simulation_options())?;
    let decay = fit_decay_rate(&result, sc.analysis.window);
    Ok(SimRun { result, decay })
}

fn decay_value(d: &Result<RunDecay>) -> Value {
    match d {
        Ok(d) => json!({
            "nu_hat": d.fit.rate,
            "residual": d.fit.residual,
            "t_start": d.fit.t_start,
            "window": d.fit.window,
            "windows": d.fit.windows.len(),
            "pointwise": d.pointwise,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn windows_csv(d: &RunDecay) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t_mid", "norm"])?;
    for x in &d.fit.windows {
        w.write_record([x.t_mid.to_string(), x.norm.to_string()])?;
    }
    csv_string(w)
}

pub fn cmd_simulate(sc: &Scenario) -> Result<Outcome> {
    let c = sc.spatial_c()?;
    let run = run_simulation(sc, &c)?;
    let r = &run.result;
    let probes: Vec<Value> = sc
        .analysis
        .nu_probes
        .iter()
        .map(|&nu| {
            json!({
                "nu": nu,
                "u_weighted_norm": r.u.weighted_norm(-nu),
                "du_weighted_norm": r.w.weighted_norm(-nu),
            })
        })
        .collect();
    let energy = r.energy.data();
    let mut o = Outcome::new(
        EXIT_OK,
        json!({
            "command": "simulate",
            "scenario": sc.name,
            "law": law_kind(sc),
            "t_end": sc.analysis.t_end,
            "dt": sc.analysis.dt,
            "samples": r.u.len(),
            "max_residual": r.max_residual,
            "energy_max": energy.iter().cloned().fold(0.0, f64::max),
            "energy_final": energy.last().copied(),
            "decay": decay_value(&run.decay),
            "nu_probes": probes,
        }),
    );
    o.line(format!("scenario: {} ({})", sc.name, law_kind(sc)));
    match &run.decay {
        Ok(d) => o.line(format!("fitted decay rate: {:.6} (residual {:.3e})", d.fit.rate, d.fit.residual)),
        Err(e) => o.line(format!("decay fit unavailable: {e}")),
    }
    o.files.push(("u.csv".into(), trajectory_csv(&r.u, "u")?));
    o.files.push(("du.csv".into(), trajectory_csv(&r.w, "du")?));
    o.files.push(("energy.csv".into(), trajectory_csv(&r.energy, "energy")?));
    if let Some(m) = &r.memory {
        o.files.push(("memory.csv".into(), trajectory_csv(m, "m")?));
    }
    if let Ok(d) = &run.decay {
        o.files.push(("windows.csv".into(), windows_csv(d)?));
    }
    Ok(o)
}

pub fn cmd_validate(sc: &Scenario) -> Result<Outcome> {
    let cert = certify_scenario(sc)?;
    let mut o = Outcome::new(EXIT_NEGATIVE, Value::Null);
    o.line(format!("scenario: {} ({})", sc.name, law_kind(sc)));
    if !cert.certified {
        let why = cert.failure.clone().unwrap_or_default();
        o.report = json!({
            "command": "validate",
            "scenario": sc.name,
            "law": law_kind(sc),
            "certified": false,
            "pass": false,
            "failure": why,
        });
        o.line(format!("not certified, nothing to validate: {why}"));
        return Ok(o);
    }
    let (rho1, bound) = (cert.rho1.unwrap_or(0.0), cert.resolvent_bound.unwrap_or(f64::INFINITY));
    let sys = cert.system.as_ref().expect("certified runs carry their system");
    let sup = resolvent_sup_grid(&sys.law, sys.a.matrix(), rho1, &sc.analysis.grid)?;
    let c = sc.spatial_c()?;
    let sim = run_simulation(sc, &c)?;
    let decay = sim.decay?;
    let nu = decay.fit.rate;
    let rate_ok = nu >= rho1 - RATE_SLACK;
    let bound_ok = sup.sup <= bound * (1.0 + BOUND_RTOL);
    let pass = rate_ok && bound_ok;
    o.exit_code = if pass { EXIT_OK } else { EXIT_NEGATIVE };
    o.report = json!({
        "command": "validate",
        "scenario": sc.name,
        "law": law_kind(sc),
        "certified": true,
        "pass": pass,
        "rho1": rho1,
        "nu_hat": nu,
        "rate_ok": rate_ok,
        "conservatism": if rho1 > 0.0 { nu / rho1 } else { f64::INFINITY },
        "resolvent_bound": bound,
        "resolvent_sup_grid": sup,
        "bound_ok": bound_ok,
        "decay": decay_value(&Ok(decay.clone())),
        "certificate": cert.detail,
    });
    o.line(format!("rho1 = {rho1:.6e}, fitted nu = {nu:.6}"));
    o.line(format!("sampled resolvent sup {:.6e} vs bound {bound:.6e}", sup.sup));
    o.line(format!("validation: {}", if pass { "PASS" } else { "FAIL" }));
    o.files.push(("energy.csv".into(), trajectory_csv(&sim.result.energy, "energy")?));
    o.files.push(("windows.csv".into(), windows_csv(&decay)?));
    o.files.push(("evidence.csv".into(), evidence_csv(&cert.evidence)?));
    Ok(o)
}

pub fn cmd_kernel_check(sc: &Scenario) -> Result<Outcome> {
    let kernel = require_kernel(sc)?;
    let alpha = kernel.alpha();
    let delta = sc.analysis.delta.unwrap_or(0.5 * alpha);
    let hyp = kernel.check_hypotheses();
    let mut failures = hyp.failures.clone();

    // (f): closed-form g(ρ) and its check on a frequency grid
    let rhos: Vec<f64> = (0..=20).map(|i| alpha * i as f64 / 20.0).collect();
    let mut g_rows = Vec::new();
    let mut worst_gap = f64::INFINITY;
    let mut g_error = None;
    for &rho in &rhos {
        match kernel.g_lower_bound(delta, rho) {
            Ok(g) => {
                for j in 0..400 {
                    let t = delta * (1.0 + j as f64 * 0.05).powi(2);
                    for tt in [t, -t] {
                        let hat = kernel.fourier_hat(Complex64::new(tt, -rho))?;
                        for v in hat {
                            worst_gap = worst_gap.min(-g - tt * v.im);
                        }
                    }
                }
                g_rows.push((rho, g));
            }
            Err(e) => {
                g_error = Some(e.to_string());
                break;
            }
        }
    }
    let g0 = g_rows.first().map(|r| r.1);
    let f_ok = g_error.is_none() && g0.is_some_and(|g| g > 0.0) && worst_gap >= -1e-12;
    if !f_ok {
        failures.push(match &g_error {
            Some(e) => format!("(f): {e}"),
            None => format!("(f): g(0) = {g0:?}, worst gap {worst_gap:e}"),
        });
    }
    let constants = if hyp.all_pass() && f_ok {
        positivity_constants_integro(&kernel, delta).map_err(|e| e.to_string())
    } else {
        Err("hypotheses failed".to_string())
    };
    let alabau = kernel.kernel_est_constant(alpha);
    let pass = failures.is_empty() && constants.as_ref().is_ok_and(|c| c.c > 0.0);

    let mut o = Outcome::new(
        if pass { EXIT_OK } else { EXIT_NEGATIVE },
        json!({
            "command": "kernel-check",
            "scenario": sc.name,
            "alpha": alpha,
            "delta": delta,
            "hypotheses": hyp,
            "f_holds": f_ok,
            "f_worst_gap": worst_gap,
            "g_at_zero": g0,
            "positivity_constants": constants.as_ref().ok(),
            "positivity_error": constants.as_ref().err(),
            "kernel_est": alabau.as_ref().ok(),
            "kernel_est_error": alabau.as_ref().err().map(|e| e.to_string()),
            "failures": failures,
            "pass": pass,
        }),
    );
    o.line(format!("scenario: {}", sc.name));
    o.line(format!("alpha = {alpha}, delta = {delta}"));
    o.line(format!("hypotheses (a)-(e): {}", if hyp.all_pass() { "pass" } else { "FAIL" }));
    o.line(format!("hypothesis (f): {}", if f_ok { "pass" } else { "FAIL" }));
    if let Ok(c) = &constants {
        o.line(format!("rho0 = {:.6e}, c = {:.6e}", c.rho0, c.c));
    }
    for f in &failures {
        o.line(format!("failure: {f}"));
    }

    let mut g_csv = csv::Writer::from_writer(Vec::new());
    g_csv.write_record(["rho", "g"])?;
    for (r, g) in &g_rows {
        g_csv.write_record([r.to_string(), g.to_string()])?;
    }
    o.files.push(("g.csv".into(), csv_string(g_csv)?));
    let mut k_csv = csv::Writer::from_writer(Vec::new());
    let ch = kernel.value(0.0).len();
    let mut header = vec!["t".to_string()];
    header.extend((0..ch).map(|i| if ch == 1 { "k".to_string() } else { format!("k{i}") }));
    k_csv.write_record(&header)?;
    let t_end = 10.0 / kernel.min_rate();
    for i in 0..=1000 {
        let t = t_end * i as f64 / 1000.0;
        let mut row = vec![t.to_string()];
        row.extend(kernel.value(t).iter().map(|v| v.to_string()));
        k_csv.write_record(&row)?;
    }
    o.files.push(("kernel.csv".into(), csv_string(k_csv)?));
    Ok(o)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub kappa: f64,
    pub kappa_over_kappa0: f64,
    pub certified: bool,
    pub rho1: Option<f64>,
    pub nu_hat: Option<f64>,
    pub fit_residual: Option<f64>,
    /// `ν̂ >= ρ1 - 0.01` for certified rows.
    pub rate_ok: Option<bool>,
    pub failure: Option<String>,
}

pub const SWEEP_HEADER: [&str; 8] = [
    "kappa",
    "kappa_over_kappa0",
    "certified",
    "rho1",
    "nu_hat",
    "fit_residual",
    "rate_ok",
    "failure",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or(String::new(), |x| x.to_string())
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.kappa.to_string(),
            r.kappa_over_kappa0.to_string(),
            r.certified.to_string(),
            opt(&r.rho1),
            opt(&r.nu_hat),
            opt(&r.fit_residual),
            opt(&r.rate_ok),
            opt(&r.failure),
        ])?;
    }
    csv_string(w)
}

pub fn cmd_sweep_kappa(sc: &Scenario) -> Result<Outcome> {
    let LawSpec::IntegroDelay { h, .. } = sc.law else {
        return Err(Error::Config("sweep-kappa needs an integro_delay law".into()));
    };
    let kernel = require_kernel(sc)?;
    let c = sc.spatial_c()?;
    let base = match delay_base(&kernel, &c, &sc.certify_options()) {
        Ok(b) => b,
        Err(e) => {
            let refused = CertifyRun::refused(e)?;
            let mut o = Outcome::new(
                EXIT_NEGATIVE,
                json!({ "command": "sweep-kappa", "scenario": sc.name, "failure": refused.failure }),
            );
            o.line(format!("undelayed law not certified: {}", refused.failure.unwrap_or_default()));
            o.files.push(("sweep.csv".into(), sweep_csv(&[])?));
            return Ok(o);
        }
    };
    let (probe, _) = certify_delay_on_base(&base, &kernel, 0.0, h, &c)?;
    let kappa0 = probe.kappa0;
    let spec = &sc.analysis.sweep;
    let kappas: Vec<f64> = spec
        .kappas
        .iter()
        .map(|&k| if spec.relative_to_threshold { k * kappa0 } else { k })
        .collect();
    let rows: Vec<SweepRow> = kappas
        .par_iter()
        .map(|&kappa| -> Result<SweepRow> {
            let run = delay_run(&base, &kernel, kappa, h, &c)?;
            let sim = run_simulation(&sc.with_kappa(kappa)?, &c)?;
            let (nu, res) = match &sim.decay {
                Ok(d) => (Some(d.fit.rate), Some(d.fit.residual)),
                Err(_) => (None, None),
            };
            let rate_ok = match (run.rho1, nu) {
                (Some(r), Some(v)) => Some(v >= r - RATE_SLACK),
                _ => None,
            };
            Ok(SweepRow {
                kappa,
                kappa_over_kappa0: if kappa0 > 0.0 { kappa / kappa0 } else { f64::INFINITY },
                certified: run.certified,
                rho1: run.rho1,
                nu_hat: nu,
                fit_residual: res,
                rate_ok,
                failure: run.failure,
            })
        })
        .collect::<Result<_>>()?;
    let mut o = Outcome::new(
        EXIT_OK,
        json!({
            "command": "sweep-kappa",
            "scenario": sc.name,
            "h": h,
            "kappa0": kappa0,
            "c_const": base.c_const,
            "rho1": base.base.certificate.rho1,
            "rows": rows,
        }),
    );
    o.line(format!("scenario: {}", sc.name));
    o.line(format!("kappa0 = {kappa0:.6e} (h = {h})"));
    let mut table = String::new();
    for r in &rows {
        let _ = write!(
            table,
            "kappa = {:.6e}: {}",
            r.kappa,
            if r.certified { "certified" } else { "not certified" }
        );
        if let Some(v) = r.nu_hat {
            let _ = write!(table, ", nu_hat = {v:.4}");
        }
        o.line(std::mem::take(&mut table));
    }
    o.files.push(("sweep.csv".into(), sweep_csv(&rows)?));
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code_for(&Error::Config("x".into())), EXIT_USAGE);
        assert_eq!(exit_code_for(&Error::not_certified("a", "b")), EXIT_NEGATIVE);
    }

    #[test]
    fn empty_sweep_is_header_only() {
        assert_eq!(sweep_csv(&[]).unwrap(), SWEEP_HEADER.join(",") + "\n");
    }

    #[test]
    fn malformed_config_exits_with_usage_code() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.json");
        fs::write(&cfg, "{ not json").unwrap();
        let (code, _) = run(Command::Certify, &cfg, &dir.path().join("out"));
        assert_eq!(code, EXIT_USAGE);
    }
}
