//! Partial-rigidity statistics: return mass t -> lambda{x : some
//! Birkhoff value lands within eps of t}, scanned over a time window with
//! Birkhoff candidates injected, plus the suspension control.
//!
//! ```bash
//! cargo run --release --example rigidity_scan
//! ```

use specflow::cf::QuadraticIrrational;
use specflow::circle::CirclePoint;
use specflow::mixing::{partial_rigidity_scan, rigidity_statistic};
use specflow::roof::RoofFunction;

fn main() -> specflow::Result<()> {
    let cf = QuadraticIrrational::parse("(-1+sqrt(5))/2")?.expand(25)?;

    // suspension control: mass 1 exactly at multiples of the height
    let unit = RoofFunction::suspension(1.0)?;
    println!("suspension f = 1: mass(t=5) = {}, mass(t=5.5) = {}",
        rigidity_statistic(&unit, &cf, 5.0, 0.1, 400)?,
        rigidity_statistic(&unit, &cf, 5.5, 0.1, 400)?);

    let f = RoofFunction::sawtooth(1.0, &[(CirclePoint::ZERO, 0.5)])?;
    let profile = partial_rigidity_scan(&f, &cf, 0.05, 10.0, 60.0, 200, 1_500, CirclePoint::HALF)?;
    println!("\nf = 1 + 0.5{{x}}, eps = 0.05, t in [10, 60]:");
    println!("  injected Birkhoff candidates: {:?}", profile.injected);
    println!("  sup mass = {:.4} at t = {:.3}", profile.sup, profile.argmax);
    let high: Vec<(f64, f64)> = profile
        .times
        .iter()
        .zip(&profile.mass)
        .filter(|(_, m)| **m > 0.5 * profile.sup)
        .map(|(t, m)| (*t, *m))
        .take(10)
        .collect();
    println!("  highest-mass times (first 10): {high:?}");
    Ok(())
}
