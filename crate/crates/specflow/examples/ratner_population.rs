//! Population experiment: 200 seeded random pairs at admissible
//! distances, drift-interval search for each, success statistics.
//!
//! ```bash
//! cargo run --release --example ratner_population
//! ```

use specflow::cf::QuadraticIrrational;
use specflow::circle::CirclePoint;
use specflow::ratner::ratner_population_experiment;
use specflow::roof::RoofFunction;

fn main() -> specflow::Result<()> {
    let cf = QuadraticIrrational::parse("(-1+sqrt(5))/2")?.expand(30)?;
    let f = RoofFunction::sawtooth(1.0, &[(CirclePoint::ZERO, 0.5)])?;

    let summary = ratner_population_experiment(&f, &cf, 0.1, 10, 200, 7)?;
    println!("trials {}, seed {}, rng {}", summary.trials, summary.seed, summary.rng_algorithm);
    println!("success fraction: {:?}", summary.success_fraction);
    println!("falsification events: {}", summary.falsification_events);
    println!("rejected (distance/cap): {}", summary.rejected);

    let mut margins = summary.kappa_margins.clone();
    margins.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if !margins.is_empty() {
        println!(
            "kappa margin L/M over kappa: min {:.2}, median {:.2}, max {:.2}",
            margins[0],
            margins[margins.len() / 2],
            margins[margins.len() - 1]
        );
    }
    let mut rhos = summary.rho_values.clone();
    rhos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rhos.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    println!("distinct drift values rho observed: {rhos:?}");
    Ok(())
}
