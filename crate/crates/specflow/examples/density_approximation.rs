//! Von Neumann approximants: truncating the jump series so that
//! Var(f - f_n) <= 1/n, with the variation measured two ways.
//!
//! ```bash
//! cargo run --example density_approximation
//! ```

use specflow::circle::CirclePoint;
use specflow::roof::{AcComponent, JumpSpec, RoofFunction};

fn main() -> specflow::Result<()> {
    // 50 jumps with geometric decay
    let jumps: Vec<(CirclePoint, f64)> = (1..=50u64)
        .map(|i| {
            (
                CirclePoint::from_fraction(2 * i - 1, 128).unwrap(),
                0.25 * 0.8f64.powi(i as i32),
            )
        })
        .collect();
    let f = RoofFunction::new(1.0, JumpSpec::new(jumps, 0.0)?, AcComponent::zero())?;
    println!("f: {} jumps, S = {:.6}, Var = {:.6}", f.jumps().len(), f.jump_sum(), f.variation());
    println!("\n{:>3} {:>6} {:>12} {:>12} {:>10}", "n", "kept", "Var(f-f_n)", "oracle", "1/n");
    for n in [1u32, 2, 5, 10, 20] {
        let f_n = f.von_neumann_approx(n)?;
        let diff = f.sub(&f_n)?;
        let exact = diff.variation();
        let oracle = diff.variation_partition_estimate(1 << 14);
        println!(
            "{n:>3} {:>6} {exact:>12.6} {oracle:>12.6} {:>10.4}",
            f_n.jumps().len(),
            1.0 / n as f64
        );
    }
    Ok(())
}
