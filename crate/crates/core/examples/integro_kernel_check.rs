//! Hypotheses and positivity constants for the memory kernel `k(t) = 0.5 e^{-t}`
//! with exponential weight `α = 0.25`.
//!
//! ```text
//! cargo run --example integro_kernel_check
//! ```

use evostab::kernel::{cannarsa_g, positivity_constants_integro, Kernel};

fn main() -> evostab::Result<()> {
    let alpha = 0.25;
    let k = Kernel::single(0.5, 1.0, alpha)?;

    let report = k.check_hypotheses();
    println!("|k|_(1,-alpha) = {:.6}", report.weighted_norm.unwrap_or(f64::NAN));
    println!("hypotheses (a)-(e): {}", if report.all_pass() { "pass" } else { "FAIL" });
    for f in &report.failures {
        println!("  {f}");
    }

    let delta = alpha / 2.0;
    println!("\n rho      g(rho) at |t| >= delta");
    for rho in [0.0, 0.05, 0.1, 0.2] {
        println!(" {rho:<8} {:.6e}", k.g_lower_bound(delta, rho)?);
    }

    let consts = positivity_constants_integro(&k, delta)?;
    println!("\nrho0 = {:.6e} (root {:.6e})", consts.rho0, consts.rho_root);
    println!("strip bound   {:.6e}", consts.first);
    println!("half-plane    {:.6e}", consts.second);
    println!("c = {:.6e}", consts.c);

    // the derivative condition k' <= -α0 k holds with α0 = 1 > α
    println!("\nk' <= -k everywhere: {}", k.check_alabau(1.0)?);
    let est = k.kernel_est_constant(alpha)?;
    println!("inf Phi = {:.10} (0.5/sqrt(2 pi) = {:.10})", est.constant, 0.5 / (2.0 * std::f64::consts::PI).sqrt());
    println!("generic g from that constant at rho = 0: {:.6e}", cannarsa_g(est.constant, alpha, delta, 0.0));
    Ok(())
}
