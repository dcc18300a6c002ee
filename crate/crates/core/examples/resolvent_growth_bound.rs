//! Sampled resolvent norm and the heuristic growth-bound scan for the
//! reformulated damped wave, next to the certified bound.
//!
//! ```text
//! cargo run --example resolvent_growth_bound
//! ```

use evostab::certifier::{certify_global, estimate_growth_bound, resolvent_sup_grid, CertifyOptions, GridSpec};
use evostab::law::{LawExpr, SecondOrderLaw};
use evostab::spatial::SpatialC;

fn main() -> evostab::Result<()> {
    let n = 10;
    let c = SpatialC::dirichlet_1d(n)?;
    let law = SecondOrderLaw::new(LawExpr::identity(n), LawExpr::scalar(0.2, n), 5.0)?;
    let (cert, sys) = certify_global(&law, &c, &CertifyOptions::default())?;
    let grid = GridSpec::default();

    println!("certified: sup ||T(z)^-1|| <= {:.4} on Re z >= -{:.4}", cert.resolvent_bound, cert.rho1);
    for frac in [1.0, 0.5, 0.0] {
        let rho = frac * cert.rho1;
        let s = resolvent_sup_grid(&sys.law, sys.a.matrix(), rho.max(1e-12), &grid)?;
        println!("  sampled sup on Re z >= -{rho:.4}: {:.4} at {:.3}{:+.3}i", s.sup, s.argmax.0, s.argmax.1);
    }

    let g = estimate_growth_bound(&sys.law, sys.a.matrix(), &grid)?;
    println!("\ngrowth bound estimate {:.5} (heuristic; the damped modes sit at Re z = -0.1)", g.omega0);
    for (re, im) in g.singularities.iter().take(6) {
        println!("  singularity {re:.5}{im:+.5}i");
    }
    Ok(())
}
