//! Certify the wave equation with exponential memory, then simulate it and
//! check that the observed decay rate is at least the certified one.
//!
//! ```text
//! cargo run --example integro_wave_validate
//! ```

use evostab::certifier::{certify_integro, CertifyOptions};
use evostab::kernel::Kernel;
use evostab::spatial::SpatialC;
use evostab::time_domain::{fit_decay_rate, simulate, SimulationOptions, Source, WaveModel};

fn main() -> evostab::Result<()> {
    let n = 31;
    let c = SpatialC::dirichlet_1d(n)?;
    let k = Kernel::single(0.5, 1.0, 0.25)?;
    let opts = CertifyOptions {
        delta: Some(0.125),
        growth_bound: false,
        ..CertifyOptions::default()
    };
    let (ic, _) = certify_integro(&k, &c, &opts)?;
    let cert = &ic.certificate;
    println!("certified rate rho1 = {:.4e} (d0 = {:.4e})", cert.rho1, cert.d0.unwrap_or(0.0));

    let model = WaveModel::new(&c)?.with_memory(&k)?;
    let mut sim = SimulationOptions::new(60.0, 1e-3);
    sim.record_stride = 10;
    let run = simulate(&model, &Source::bump(0.0, 1.0, 1.0, n)?, &sim)?;
    let decay = fit_decay_rate(&run, 2.0)?;
    println!("fitted rate nu = {:.4} (residual {:.2e}, {} windows)", decay.fit.rate, decay.fit.residual, decay.fit.windows.len());
    println!("nu / rho1 = {:.0}: the certificate is conservative", decay.fit.rate / cert.rho1);
    if let Some(p) = &decay.pointwise {
        println!(
            "pointwise bound at nu = {:.3}: ratio {:.3} with 1/sqrt(2 nu), {:.3} without",
            p.nu, p.max_ratio_with_factor, p.max_ratio_without_factor
        );
    }
    println!("validation: {}", if decay.fit.rate >= cert.rho1 - 0.01 { "PASS" } else { "FAIL" });
    Ok(())
}
