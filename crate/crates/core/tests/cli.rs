use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_evostab"));
    c.env("EVOSTAB_THREADS", "2");
    c
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn run(sub: &str, cfg: &Path, out: &Path) -> Output {
    bin().args([sub, "--config"]).arg(cfg).arg("--out").arg(out).output().unwrap()
}

fn small(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const SMALL_DAMPED: &str = r#"{
  "name": "small damped",
  "spatial": { "kind": "dirichlet_1d", "n": 6 },
  "law": { "kind": "damped_wave", "m1": 0.2 },
  "analysis": { "t_end": 30.0, "dt": 0.01, "record_stride": 1, "growth_bound": false }
}"#;

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let damped = small(dir.path(), "damped.json", SMALL_DAMPED);
    let out = run("certify", &damped, &dir.path().join("a"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("a/report.json").exists());
    assert!(dir.path().join("a/evidence.csv").exists());

    let undamped = small(
        dir.path(),
        "undamped.json",
        r#"{ "spatial": { "kind": "dirichlet_1d", "n": 4 }, "law": { "kind": "damped_wave", "m1": 0.0 } }"#,
    );
    assert_eq!(run("validate", &undamped, &dir.path().join("b")).status.code(), Some(1));

    let broken = small(dir.path(), "broken.json", "{ \"spatial\": ");
    assert_eq!(run("certify", &broken, &dir.path().join("c")).status.code(), Some(2));
    let unknown = small(dir.path(), "unknown.json", r#"{ "spatial": { "kind": "dirichlet_1d", "n": 4 }, "law": { "kind": "damped_wave", "m1": 0.2 }, "extra": 1 }"#);
    assert_eq!(run("certify", &unknown, &dir.path().join("d")).status.code(), Some(2));
    assert_eq!(run("certify", &dir.path().join("missing.json"), &dir.path().join("e")).status.code(), Some(2));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().arg("certify").output().unwrap().status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let damped = small(dir.path(), "damped.json", SMALL_DAMPED);
    let out = bin()
        .env("EVOSTAB_THREADS", "zero")
        .args(["certify", "--config"])
        .arg(&damped)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_csv_columns() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["sweep.csv", "kappa,kappa_over_kappa0", "evidence.csv", "re,im,inside_ball", "EVOSTAB_THREADS"] {
        assert!(text.contains(needle), "help lacks {needle}");
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let damped = small(dir.path(), "damped.json", SMALL_DAMPED);
    for sub in ["certify", "simulate"] {
        let (a, b) = (dir.path().join(format!("{sub}1")), dir.path().join(format!("{sub}2")));
        assert_eq!(run(sub, &damped, &a).status.code(), Some(0));
        assert_eq!(run(sub, &damped, &b).status.code(), Some(0));
        for entry in std::fs::read_dir(&a).unwrap() {
            let name = entry.unwrap().file_name();
            let x = std::fs::read(a.join(&name)).unwrap();
            let y = std::fs::read(b.join(&name)).unwrap();
            assert!(x == y, "{sub}: {name:?} differs between runs");
        }
    }
}

#[test]
fn kernel_check_and_sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("kernel-check", &config("integro_wave.json"), &dir.path().join("k"));
    assert_eq!(out.status.code(), Some(0));
    let g = std::fs::read_to_string(dir.path().join("k/g.csv")).unwrap();
    assert!(g.starts_with("rho,g\n"));

    let text = std::fs::read_to_string(config("integro_delay.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["spatial"]["n"] = 6.into();
    v["analysis"]["t_end"] = 30.0.into();
    v["analysis"]["dt"] = 0.01.into();
    v["analysis"]["sweep"]["kappas"] = serde_json::json!([]);
    let cfg = small(dir.path(), "empty_sweep.json", &v.to_string());
    assert_eq!(run("sweep-kappa", &cfg, &dir.path().join("s")).status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    assert_eq!(csv, "kappa,kappa_over_kappa0,certified,rho1,nu_hat,fit_residual,rate_ok,failure\n");
}

#[test]
fn zero_gain_row_matches_memory_only_validation() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("integro_delay.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["spatial"]["n"] = 6.into();
    v["analysis"]["t_end"] = 30.0.into();
    v["analysis"]["dt"] = 0.01.into();
    v["analysis"]["growth_bound"] = false.into();
    v["analysis"]["sweep"]["kappas"] = serde_json::json!([0.0]);
    let delay_cfg = small(dir.path(), "delay.json", &v.to_string());
    let law = v["law"].as_object_mut().unwrap();
    law.insert("kind".into(), "integro".into());
    law.remove("kappa");
    law.remove("h");
    v["analysis"].as_object_mut().unwrap().remove("sweep");
    let memory_cfg = small(dir.path(), "memory.json", &v.to_string());

    assert_eq!(run("sweep-kappa", &delay_cfg, &dir.path().join("s")).status.code(), Some(0));
    assert_eq!(run("validate", &memory_cfg, &dir.path().join("v")).status.code(), Some(0));
    let read = |p: &str| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(dir.path().join(p)).unwrap()).unwrap()
    };
    let sweep = read("s/report.json");
    let validate = read("v/report.json");
    let row = &sweep["rows"][0];
    assert_eq!(row["certified"], true);
    assert_eq!(row["rho1"], validate["rho1"]);
    assert_eq!(row["nu_hat"], validate["nu_hat"]);
}
