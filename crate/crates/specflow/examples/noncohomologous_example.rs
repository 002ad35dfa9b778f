//! The constructed roof with infinitely many fast-decaying positive jumps
//! at rationals, and the Birkhoff-distribution diagnostic along q_n: the
//! coboundary-obstruction signature is mass staying away from 0.
//!
//! ```bash
//! cargo run --example noncohomologous_example
//! ```

use specflow::cf::QuadraticIrrational;
use specflow::mixing::birkhoff_distribution_along_qn;
use specflow::roof::{build_noncohomologous_example, AcComponent, JumpSpec, RoofFunction};

fn main() -> specflow::Result<()> {
    let cf = QuadraticIrrational::parse("(-1+sqrt(5))/2")?.expand(20)?;
    let ex = build_noncohomologous_example(
        1.0,
        specflow::roof::JumpSchedule::SquaredExponent { factor: 0.5 },
        6,
        &[0.1, 0.05],
    )?;
    println!("roof: {} jumps at 1/p for ascending primes p, S = {:.6}", ex.roof.jumps().len(), ex.roof.jump_sum());
    for (eps, n) in &ex.n_eps {
        println!("  coherence at eps = {eps}: N_eps = {n}");
    }

    let g = ex.roof.von_neumann_approx(1)?;
    let h = ex.roof.sub(&g)?.recentred();
    let tau = (1.0 - 5.0 * 0.1) * h.jumps().entries()[0].size / 2.0;
    println!("\nh = f - g recentred, tau = {tau:.6}");
    println!("{:>4} {:>6} {:>18} {:>14}", "n", "q_n", "mass inside (-t,t)", "mass outside");
    for n in 6..=10 {
        let d = birkhoff_distribution_along_qn(&h, &cf, n, 4096, tau)?;
        println!("{n:>4} {:>6} {:>18.4} {:>14.4}", d.q, d.mass_within_tau, 1.0 - d.mass_within_tau);
    }

    // the AC-only control concentrates at 0 instead
    let ac = RoofFunction::bv(0.0, JumpSpec::empty(), AcComponent::smooth_bump(0.3))?.recentred();
    println!("\nAC-only control:");
    for n in 6..=10 {
        let d = birkhoff_distribution_along_qn(&ac, &cf, n, 4096, tau)?;
        println!("{n:>4} {:>6} {:>18.4}", d.q, d.mass_within_tau);
    }
    Ok(())
}
