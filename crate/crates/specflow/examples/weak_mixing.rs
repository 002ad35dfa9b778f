//! Oscillatory-integral weak-mixing probe: |I_(r,q)| over a grid of
//! frequencies and denominators against the integration-by-parts bound.
//!
//! ```bash
//! cargo run --release --example weak_mixing
//! ```

use specflow::cf::QuadraticIrrational;
use specflow::circle::CirclePoint;
use specflow::mixing::weak_mixing_bound_check;
use specflow::roof::RoofFunction;

fn main() -> specflow::Result<()> {
    let cf = QuadraticIrrational::parse("(-1+sqrt(5))/2")?.expand(20)?;
    let f = RoofFunction::sawtooth(
        1.0,
        &[
            (CirclePoint::ZERO, 0.4),
            (CirclePoint::from_decimal_str("1/3")?, 0.05),
            (CirclePoint::from_decimal_str("2/3")?, 0.03),
        ],
    )?;
    let g = f.von_neumann_approx(1)?;
    println!(
        "g keeps {} of {} jumps; Var(h)/S = computed below",
        g.jumps().len(),
        f.jumps().len()
    );

    let report = weak_mixing_bound_check(&f, &g, &cf, &[10.0, 20.0, 40.0, 80.0], &[5, 6, 7, 8, 9, 10])?;
    println!("K = {}, Var(h)/S = {:.4}, c = {:.4}", report.k_discontinuities, report.var_h_over_s, report.bound_c);
    println!("empirical r0 (all larger r below c): {:?}", report.empirical_r0);
    println!("violations of the bound chain: {}\n", report.violations);
    println!("{:>6} {:>6} {:>12} {:>12}", "r", "q", "|I|", "bound");
    for (((r, q), mag), bound) in report
        .grid
        .iter()
        .zip(&report.magnitudes)
        .zip(&report.bounds)
    {
        println!("{r:>6} {q:>6} {mag:>12.6} {bound:>12.6}");
    }
    Ok(())
}
