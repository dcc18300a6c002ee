//! Solve the damped wave twice: by Crank–Nicolson time stepping and through the
//! damped Fourier transform of the reformulated first-order system, at two weights.
//!
//! ```text
//! cargo run --example frequency_vs_time_domain
//! ```

use evostab::certifier::{certify_global, CertifyOptions};
use evostab::law::{LawExpr, SecondOrderLaw};
use evostab::spatial::SpatialC;
use evostab::time_domain::{relative_l2, simulate, solve_wave_frequency, SimulationOptions, Source, WaveModel};

fn main() -> evostab::Result<()> {
    let n = 31;
    let c = SpatialC::dirichlet_1d(n)?;
    let law = SecondOrderLaw::new(LawExpr::identity(n), LawExpr::scalar(0.2, n), 5.0)?;
    let opts = CertifyOptions {
        growth_bound: false,
        ..CertifyOptions::default()
    };
    let (_, sys) = certify_global(&law, &c, &opts)?;

    let dt = 0.01;
    let len = 1 << 12; // output covers [0, len·dt/2)
    let source = Source::bump(0.0, 1.0, 1.0, n)?;
    let f = source.sample(n, dt, len);

    let model = WaveModel::new(&c)?.with_scalar_damping(0.2)?;
    let stepped = simulate(&model, &source, &SimulationOptions::new((len / 2 - 1) as f64 * dt, dt))?;
    for rho in [0.5, 1.0] {
        let sol = solve_wave_frequency(&sys, &f, None, rho)?;
        let err = relative_l2(&sol.u, &stepped.u)?;
        println!(
            "rho = {rho}: relative L2 vs time stepping {err:.2e}, wrap factor {:.1e}, discarded imaginary part {:.1e}",
            sol.wrap_factor, sol.max_imag
        );
    }
    Ok(())
}
