//! Property tests for the structural invariants.

use proptest::prelude::*;

use specflow::birkhoff::{birkhoff_sum, jump_hit_count};
use specflow::cf::QuadraticIrrational;
use specflow::circle::{nearest_int_distance, CirclePoint};
use specflow::roof::{AcComponent, JumpSpec, RoofFunction};

fn golden() -> specflow::cf::ContinuedFraction {
    QuadraticIrrational::new(-1, 5, 2).unwrap().expand(20).unwrap()
}

/// A small random sawtooth roof with distinct jump locations.
fn arb_roof() -> impl Strategy<Value = RoofFunction> {
    (
        proptest::collection::vec((any::<u64>(), -0.3f64..0.3), 1..6),
        1.5f64..3.0,
    )
        .prop_filter_map("distinct betas, nonzero jumps", |(raw, c)| {
            let mut jumps: Vec<(CirclePoint, f64)> = raw
                .into_iter()
                .filter(|(_, d)| d.abs() > 1e-3)
                .map(|(b, d)| (CirclePoint((b as u128) << 64 | b as u128), d))
                .collect();
            jumps.sort_by_key(|(b, _)| b.0);
            jumps.dedup_by_key(|(b, _)| b.0);
            if jumps.is_empty() {
                return None;
            }
            RoofFunction::new(c, JumpSpec::new(jumps, 0.0).ok()?, AcComponent::zero()).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nearest_int_distance_in_range(t in -1e6f64..1e6) {
        let d = nearest_int_distance(t);
        prop_assert!((0.0..=0.5).contains(&d));
        prop_assert!((nearest_int_distance(-t) - d).abs() < 1e-9);
    }

    #[test]
    fn circle_decimal_round_trip(hi in any::<u64>(), lo in any::<u64>()) {
        let p = CirclePoint((hi as u128) << 64 | lo as u128);
        let back = CirclePoint::from_decimal_str(&p.to_decimal_string()).unwrap();
        prop_assert_eq!(p, back);
    }

    #[test]
    fn arc_membership_partitions_circle(a in any::<u64>(), b in any::<u64>(), p in any::<u64>()) {
        let x = CirclePoint((a as u128) << 64 | a as u128);
        let y = CirclePoint((b as u128) << 64 | b as u128);
        prop_assume!(x != y);
        let pt = CirclePoint((p as u128) << 64 | p as u128);
        // every point lies in exactly one of (x, y], (y, x]
        let one = pt.in_arc(x, y);
        let two = pt.in_arc(y, x);
        prop_assert!(one != two || (pt == x || pt == y));
    }

    #[test]
    fn decompose_is_pointwise_identity(f in arb_roof(), xs in proptest::collection::vec(any::<u64>(), 16)) {
        let (f_ac, f_pl) = f.decompose();
        for x in xs {
            let p = CirclePoint((x as u128) << 64 | x as u128);
            let lhs = f.evaluate(p);
            let rhs = f_ac.eval_point(p) + f_pl.evaluate(p);
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn sorted_tails_never_worse(sizes in proptest::collection::vec(0.01f64..0.5, 2..8)) {
        // the monotone reordering minimizes every tail sum
        let jumps: Vec<(CirclePoint, f64)> = sizes
            .iter()
            .enumerate()
            .map(|(i, &d)| (CirclePoint::from_fraction(2 * i as u64 + 1, 64).unwrap(), d))
            .collect();
        let spec = JumpSpec::new(jumps, 0.0).unwrap();
        for j in 0..sizes.len() {
            let sorted_tail = spec.tail_after(j);
            let input_order_tail: f64 = sizes.iter().skip(j).map(|d| d.abs()).sum();
            prop_assert!(
                sorted_tail <= input_order_tail + 1e-12,
                "sorted tail {sorted_tail} worse than {input_order_tail} at j={j}"
            );
        }
    }

    #[test]
    fn variation_oracle_matches_closed_form(f in arb_roof()) {
        let est = f.variation_partition_estimate(1 << 12);
        prop_assert!((est - f.variation()).abs() < 1e-8);
        prop_assert!(f.variation() <= f.variation_formula_upper() + 1e-12);
    }

    #[test]
    fn cocycle_identity(f in arb_roof(), m in -300i64..300, n in -300i64..300, x in any::<u64>()) {
        let cf = golden();
        let p = CirclePoint((x as u128) << 64 | x as u128);
        let lhs = birkhoff_sum(&f, &cf, p, m + n).unwrap();
        let mid = p.add_signed(cf.alpha(), m);
        let rhs = birkhoff_sum(&f, &cf, p, m).unwrap() + birkhoff_sum(&f, &cf, mid, n).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn hit_count_additivity(beta in any::<u64>(), x in any::<u64>(), mid in any::<u64>(), y in any::<u64>(), n in 1u64..400) {
        let cf = golden();
        let b = CirclePoint((beta as u128) << 64 | beta as u128);
        let px = CirclePoint((x as u128) << 64 | x as u128);
        let pm = CirclePoint((mid as u128) << 64 | mid as u128);
        let py = CirclePoint((y as u128) << 64 | y as u128);
        // mid must lie inside (x, y] to split the arc
        prop_assume!(px != py && pm != px && pm.in_arc(px, py));
        let whole = jump_hit_count(cf.alpha(), b, px, py, n).unwrap();
        let left = jump_hit_count(cf.alpha(), b, px, pm, n).unwrap();
        let right = jump_hit_count(cf.alpha(), b, pm, py, n).unwrap();
        prop_assert_eq!(whole.count, left.count + right.count);
    }
}
