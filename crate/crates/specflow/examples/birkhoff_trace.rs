//! Cocycle sums f^(n)(x) along the rotation orbit and Denjoy-Koksma
//! residuals at the continued-fraction denominators.
//!
//! ```bash
//! cargo run --example birkhoff_trace
//! ```

use specflow::birkhoff::{denjoy_koksma_residual, BirkhoffLedger};
use specflow::cf::QuadraticIrrational;
use specflow::circle::CirclePoint;
use specflow::roof::RoofFunction;

fn main() -> specflow::Result<()> {
    let cf = QuadraticIrrational::parse("(-1+sqrt(5))/2")?.expand(20)?;
    let f = RoofFunction::sawtooth(1.0, &[(CirclePoint::ZERO, 0.5)])?;
    let x = CirclePoint::from_decimal_str("0.3")?;

    let mut ledger = BirkhoffLedger::new(&f, cf.alpha(), x);
    println!("f = 1 + 0.5{{x}}, x = 0.3, mean = {:.6}", f.integral_mean());
    for n in [-5i64, -1, 0, 1, 5, 25, 1000] {
        println!("  f^({n:>5})(x) = {:+.9}", ledger.value(n)?);
    }
    println!("  accumulated error bound {:.2e}", ledger.err_bound());

    println!("\nDenjoy-Koksma residuals |f^(q_n)(x) - q_n mean|: Var f = {}", f.variation());
    for n in 0..=12 {
        let r = denjoy_koksma_residual(&f, &cf, x, n)?;
        println!("  n = {n:>2}, q_n = {:>4}: {r:.9}", cf.denominator(n)?);
    }
    Ok(())
}
