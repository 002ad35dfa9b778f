//! Exact continued-fraction expansion of quadratic irrationals:
//! partial quotients, integer convergents, periodicity and the
//! approximation sandwich.
//!
//! ```bash
//! cargo run --example cf_expansion
//! ```

use specflow::cf::QuadraticIrrational;

fn main() -> specflow::Result<()> {
    for text in ["(-1+sqrt(5))/2", "(-1+sqrt(2))/1", "(3+sqrt(31))/7"] {
        let alpha = QuadraticIrrational::parse(text)?;
        let cf = alpha.expand(16)?;
        println!("alpha = {alpha} ~ {:.12}", cf.alpha().to_f64());
        println!("  quotients  {:?}", cf.quotients());
        let qs: Vec<String> = cf
            .convergents()
            .iter()
            .map(|(p, q)| format!("{p}/{q}"))
            .collect();
        println!("  convergents {}", qs.join(", "));
        println!("  C = sup a_n + 1 = {}", cf.c_bound());
        if let Some((pre, len)) = cf.period() {
            println!("  eventually periodic: preperiod {pre}, period {len}");
        }
        match cf.sandwich_violation() {
            None => println!("  sandwich 1/(2 q_n q_n+1) < |alpha - p/q| < 1/(q_n q_n+1): holds"),
            Some(n) => println!("  sandwich FAILS at n = {n}"),
        }
        println!();
    }
    Ok(())
}
