//! Memory plus delayed feedback `κ ∂₀u(t - h)`: compute the threshold `κ0`
//! and certify/simulate a few gains around it.
//!
//! ```text
//! cargo run --example delay_kappa_sweep
//! ```

use evostab::certifier::{certify_delay_on_base, delay_base, CertifyOptions};
use evostab::kernel::Kernel;
use evostab::spatial::SpatialC;
use evostab::time_domain::{fit_decay_rate, simulate, SimulationOptions, Source, WaveModel};

fn main() -> evostab::Result<()> {
    let n = 15;
    let h = 1.0;
    let c = SpatialC::dirichlet_1d(n)?;
    let k = Kernel::single(0.5, 1.0, 0.25)?;
    let opts = CertifyOptions {
        delta: Some(0.125),
        ..CertifyOptions::default()
    };
    // the undelayed certificate is shared by every gain
    let base = delay_base(&k, &c, &opts)?;
    let (probe, _) = certify_delay_on_base(&base, &k, 0.0, h, &c)?;
    println!("C = {:.4e}, kappa0 = {:.4e}", base.c_const, probe.kappa0);

    println!("\n{:>12} {:>10} {:>10}  note", "kappa", "certified", "nu_hat");
    for factor in [0.0, 0.5, 0.99, 2.0, 1e4] {
        let kappa = factor * probe.kappa0;
        let (cert, _) = certify_delay_on_base(&base, &k, kappa, h, &c)?;
        let model = WaveModel::new(&c)?.with_memory(&k)?.with_delay(kappa, h)?;
        let mut sim = SimulationOptions::new(40.0, 1e-2);
        sim.record_stride = 5;
        let run = simulate(&model, &Source::bump(0.0, 1.0, 1.0, n)?, &sim)?;
        let nu = fit_decay_rate(&run, 2.0)?.fit.rate;
        println!(
            "{kappa:>12.4e} {:>10} {nu:>10.4}  {}",
            cert.certified,
            cert.failure.as_deref().unwrap_or("")
        );
    }
    println!("\nrefusal above kappa0 is not a claim of instability");
    Ok(())
}
