//! Causal and anticausal antiderivatives of the indicator of `[0, 1]`.
//!
//! ```text
//! cargo run --example causal_antiderivative
//! ```

use evostab::time_domain::{causal_antiderivative, Causality, Trajectory};

fn main() {
    let dt = 1e-3;
    let chi = Trajectory::from_fn(-1.0, dt, 4001, |t| {
        if t.abs() < 1e-9 || (t - 1.0).abs() < 1e-9 {
            0.5
        } else if (0.0..1.0).contains(&t) {
            1.0
        } else {
            0.0
        }
    });
    let up = causal_antiderivative(&chi, Causality::Causal);
    let down = causal_antiderivative(&chi, Causality::Anticausal);
    println!("{:>6} {:>10} {:>10}", "t", "causal", "anticausal");
    for i in (0..chi.len()).step_by(250) {
        println!("{:>6.2} {:>10.4} {:>10.4}", chi.time(i), up.sample(i)[0], down.sample(i)[0]);
    }
    // t χ[0,1] + χ(1,∞) and -(χ(-∞,0) + (1 - t) χ[0,1])
}
