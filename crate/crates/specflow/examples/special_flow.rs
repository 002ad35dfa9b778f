//! The special flow under a roof: unit-speed vertical motion with
//! (x, f(x)) glued to (Tx, 0), and the flow composition law.
//!
//! ```bash
//! cargo run --example special_flow
//! ```

use specflow::birkhoff::{flow_map, SpecialFlowPoint};
use specflow::cf::QuadraticIrrational;
use specflow::circle::CirclePoint;
use specflow::roof::RoofFunction;

fn main() -> specflow::Result<()> {
    let cf = QuadraticIrrational::parse("(-1+sqrt(5))/2")?.expand(20)?;
    let f = RoofFunction::sawtooth(1.0, &[(CirclePoint::ZERO, 0.5)])?;

    let mut pt = SpecialFlowPoint {
        x: CirclePoint::from_decimal_str("0.2")?,
        s: 0.0,
    };
    println!("orbit of (0.2, 0) in steps of t = 0.7:");
    for k in 1..=8 {
        pt = flow_map(&f, &cf, pt, 0.7)?;
        println!("  t = {:.1}: x = {:.9}, s = {:.9}", 0.7 * k as f64, pt.x.to_f64(), pt.s);
    }

    // composition law: T_{t1+t2} = T_{t2} . T_{t1}
    let start = SpecialFlowPoint {
        x: CirclePoint::from_decimal_str("0.41")?,
        s: 0.3,
    };
    let one = flow_map(&f, &cf, flow_map(&f, &cf, start, 13.7)?, -4.2)?;
    let two = flow_map(&f, &cf, start, 13.7 - 4.2)?;
    println!("\ncomposition check: ({:.12}, {:.9}) vs ({:.12}, {:.9})",
        one.x.to_f64(), one.s, two.x.to_f64(), two.s);
    Ok(())
}
