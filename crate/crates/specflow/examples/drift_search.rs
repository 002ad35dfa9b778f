//! One drift-interval search: the quantitative constants, the scale s
//! picked from the pair distance, and the interval J = [M, M+L] on which
//! the cocycle difference stays within eps of a single shift rho.
//!
//! ```bash
//! cargo run --example drift_search
//! ```

use specflow::cf::QuadraticIrrational;
use specflow::circle::CirclePoint;
use specflow::ratner::{find_drift_interval, prepare};
use specflow::roof::RoofFunction;

fn main() -> specflow::Result<()> {
    let cf = QuadraticIrrational::parse("(-1+sqrt(5))/2")?.expand(30)?;
    let f = RoofFunction::sawtooth(1.0, &[(CirclePoint::ZERO, 0.5)])?;

    let params = prepare(&f, &cf, 0.1, 10)?;
    println!("constants for eps = 0.1, N = 10:");
    println!("  tail certificate j = {}, theta = {}", params.theta.j, params.theta.theta);
    println!("  window p = {}, eta = {:.6}, xi = {:.3e}", params.p, params.eta, params.xi);
    println!("  m(eps) = {}, kappa = {}, s0 = {}, delta = {:.6e}", params.m_eps, params.kappa, params.s0, params.delta);

    let x = CirclePoint::from_decimal_str("0.3123")?;
    let y = x.add(CirclePoint::from_f64(params.delta * 0.4));
    let report = find_drift_interval(&f, &cf, x, y, &params)?;
    println!("\npair at distance {:.3e} -> scale s = {}", x.dist(y), report.s);
    println!("  J = [{}, {}], L/M = {:.4}", report.m_start, report.m_start + report.l_len, report.kappa_achieved);
    println!("  rho = {:.6} (dbar_M = {:.6}), hit fraction {:.3}", report.rho, report.dbar_at_m, report.hit_fraction);
    println!("  success: {}", report.success);
    Ok(())
}
