//! Runs every bundled scenario in `examples/configs` through the same
//! commands the `evostab` binary exposes, writing reports under a directory.
//!
//! ```text
//! cargo run --example scenario_files -- /tmp/evostab-reports
//! ```

use std::path::{Path, PathBuf};

use evostab::commands::{run, Command};

fn main() {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("evostab-reports"));
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let plan = [
        ("damped_wave.json", Command::Validate),
        ("integro_wave.json", Command::KernelCheck),
        ("integro_wave.json", Command::Certify),
        ("undamped_wave.json", Command::Validate),
    ];
    for (file, cmd) in plan {
        let dir = out.join(format!("{}-{}", file.trim_end_matches(".json"), cmd.name()));
        let (code, message) = run(cmd, &configs.join(file), &dir);
        println!("== {file} {} -> exit {code} ({})", cmd.name(), dir.display());
        println!("{message}\n");
    }
}
