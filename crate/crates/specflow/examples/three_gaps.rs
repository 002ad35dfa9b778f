//! Three-distance geometry of rotation orbits: gap multisets for the
//! partition by {0, -alpha, ..., -(k-1) alpha} and the empirical gap
//! constants C1, C2.
//!
//! ```bash
//! cargo run --example three_gaps
//! ```

use specflow::cf::QuadraticIrrational;

fn main() -> specflow::Result<()> {
    let cf = QuadraticIrrational::parse("(-1+sqrt(5))/2")?.expand(20)?;
    for k in [1u64, 2, 5, 13, 100] {
        let part = cf.three_gap_partition(k)?;
        println!(
            "k = {k:>3}: {} distinct gap lengths, min {:.6}, max {:.6}, sum {:.12}",
            part.distinct_count(),
            part.min_gap(),
            part.max_gap(),
            part.sum()
        );
    }
    let consts = cf.estimate_gap_constants(500)?;
    println!("\nempirical constants over k <= 500: C1 = {:.6}, C2 = {:.6}", consts.c1, consts.c2);
    println!("every gap lies in [C2/k, C1/k)");
    Ok(())
}
