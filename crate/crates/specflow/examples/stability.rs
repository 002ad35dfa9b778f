//! Stability of the jump-tail certificate under small perturbations:
//! admissible perturbations keep the truncation index with a fresh theta,
//! re-verified directly on f + g.
//!
//! ```bash
//! cargo run --example stability
//! ```

use specflow::circle::CirclePoint;
use specflow::roof::{perturbation_stability, theta_condition, AcComponent, JumpSpec, RoofFunction};

fn main() -> specflow::Result<()> {
    let f = RoofFunction::sawtooth(1.0, &[(CirclePoint::ZERO, 0.5)])?;
    let cert = theta_condition(&f, 2)?.unwrap();
    println!("base roof: j = {}, theta = {}", cert.j, cert.theta);

    for (d, label) in [(1e-6, "tiny"), (1e-3, "small"), (0.8, "huge")] {
        let g = RoofFunction::bv(
            0.0,
            JumpSpec::new(vec![(CirclePoint::HALF, d)], 0.0)?,
            AcComponent::zero(),
        )?;
        let rep = perturbation_stability(&f, &g, 2)?;
        if rep.admissible {
            println!(
                "{label} perturbation (Var g = {:.2e}): admissible, eta_g = {:.3}, theta_sum = {:.3e}, re-verified: {}",
                g.variation(),
                rep.eta_g.unwrap(),
                rep.theta_sum.unwrap(),
                rep.reverified
            );
        } else {
            println!("{label} perturbation (Var g = {:.2e}): rejected", g.variation());
        }
    }
    Ok(())
}
