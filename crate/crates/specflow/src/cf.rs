//! Exact continued-fraction arithmetic for quadratic irrationals and the
//! finite-orbit geometry of the rotation: convergents, the approximation
//! sandwich, three-gap partitions and empirical gap constants.
//!
//! A quadratic irrational (a + sqrt(b))/c is expanded with the classical
//! integer-only recurrence on (P + sqrt(D))/Q pairs, so partial quotients
//! and convergents are exact and eventual periodicity is detected by a
//! repeated (P, Q) state.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::{quadratic_to_circle, CirclePoint};
use crate::error::{Error, Result};

/// Gap lengths closer than this are considered equal when counting
/// distinct gaps (10^-24, far below any genuine gap for k <= 10^6).
pub const GAP_DISTINCT_TOL: f64 = 1e-24;

/// An irrational (a + sqrt(b)) / c reduced into (0,1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticIrrational {
    pub a: i64,
    pub b: u64,
    pub c: i64,
}

fn is_perfect_square(b: u64) -> bool {
    let r = b.isqrt();
    r * r == b
}

impl QuadraticIrrational {
    /// Canonicalize and validate: b positive non-square, c positive,
    /// common factor g with g^2 | b divided out, value reduced mod 1
    /// into (0,1).
    pub fn new(a: i64, b: u64, c: i64) -> Result<QuadraticIrrational> {
        if c == 0 {
            return Err(Error::Parse("zero denominator c".into()));
        }
        if c < 0 {
            return Err(Error::Parse(
                "non-canonical form: c must be positive (multiply through by -1 \
                 gives (a - sqrt(b))/|c|, which is outside this representation)"
                    .into(),
            ));
        }
        if b == 0 || is_perfect_square(b) {
            return Err(Error::Parse(format!(
                "b = {b} is a perfect square; (a+sqrt(b))/c is rational"
            )));
        }
        let mut a = a;
        let mut b = b;
        let mut c = c;
        // normalize gcd: g | a, g | c, g^2 | b
        loop {
            let g = a.unsigned_abs().gcd(&(c as u64));
            let mut found = 1u64;
            for d in (2..=g).rev() {
                if g.is_multiple_of(d) && b.is_multiple_of(d * d) {
                    found = d;
                    break;
                }
            }
            if found == 1 {
                break;
            }
            a /= found as i64;
            b /= found * found;
            c /= found as i64;
        }
        // reduce mod 1: alpha - k = (a - k c + sqrt(b)) / c
        let val = (a as f64 + (b as f64).sqrt()) / c as f64;
        let k = val.floor() as i64;
        let a = a - k * c;
        // guard against off-by-one from the float floor
        let v = (a as f64 + (b as f64).sqrt()) / c as f64;
        let a = if v >= 1.0 {
            a - c
        } else if v < 0.0 {
            a + c
        } else {
            a
        };
        Ok(QuadraticIrrational { a, b, c })
    }

    /// Parse the textual form "(a+sqrt(b))/c", e.g. "(-1+sqrt(5))/2".
    pub fn parse(s: &str) -> Result<QuadraticIrrational> {
        let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
        let err = || Error::Parse(format!("expected \"(a+sqrt(b))/c\", got {s:?}"));
        let rest = t.strip_prefix('(').ok_or_else(err)?;
        let (body, denom) = rest.split_once(")/").ok_or_else(err)?;
        let c: i64 = denom.parse().map_err(|_| err())?;
        // body is a+sqrt(b) or a-sqrt(b)... only + supported, a may be signed
        let (a_str, b_str) = body.split_once("+sqrt(").ok_or_else(err)?;
        let a: i64 = if a_str.is_empty() {
            0
        } else {
            a_str.parse().map_err(|_| err())?
        };
        let b: u64 = b_str.strip_suffix(')').ok_or_else(err)?.parse().map_err(|_| err())?;
        QuadraticIrrational::new(a, b, c)
    }

    pub fn to_f64(self) -> f64 {
        (self.a as f64 + (self.b as f64).sqrt()) / self.c as f64
    }

    /// The 128-bit fixed-point value.
    pub fn to_circle_point(self) -> Result<CirclePoint> {
        quadratic_to_circle(self.a, self.b, self.c)
    }

    /// Expand to `depth` partial quotients with exact convergents.
    pub fn expand(self, depth: usize) -> Result<ContinuedFraction> {
        if depth == 0 {
            return Err(Error::Scenario("depth must be >= 1".into()));
        }
        // alpha = (P0 + sqrt(D)) / Q0 with Q0 | D - P0^2 after multiplying
        // numerator and denominator by c. Since alpha is in (0,1), the
        // expansion [0; a1, a2, ...] iterates on x_1 = 1/alpha.
        let c = BigInt::from(self.c);
        let p0 = BigInt::from(self.a) * &c;
        let d: BigInt = BigInt::from(self.b) * &c * &c;
        let q0 = &c * &c;
        let sqrt_d = d.sqrt();

        // x_1 = 1/alpha = (-P0 + sqrt(D)) / ((D - P0^2)/Q0)
        let mut q = (&d - &p0 * &p0) / &q0;
        let mut p = -p0;

        // floor((P + sqrt(D)) / Q) from floor(sqrt(D)); sqrt(D) is
        // irrational, so for Q < 0 the floor shifts by exactly one.
        let surd_floor = |p: &BigInt, q: &BigInt, sqrt_d: &BigInt| -> BigInt {
            let m = p + sqrt_d;
            if q.is_positive() {
                m.div_floor(q)
            } else {
                let qa = -q;
                -(m.div_floor(&qa)) - 1
            }
        };

        let mut quotients: Vec<u64> = Vec::with_capacity(depth);
        let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
        let mut period: Option<(usize, usize)> = None;
        let mut cycle: Vec<u64> = Vec::new();

        while quotients.len() < depth {
            if let Some((pre, len)) = period {
                // replay the detected cycle, no further state iteration
                let idx = (quotients.len() - pre) % len;
                quotients.push(cycle[idx]);
                continue;
            }
            if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
                let len = quotients.len() - start;
                cycle = quotients[start..].to_vec();
                period = Some((start, len));
                continue;
            }
            seen.insert((p.clone(), q.clone()), quotients.len());
            let a = surd_floor(&p, &q, &sqrt_d);
            let a_u64 = a
                .to_u64()
                .ok_or_else(|| Error::Precision("partial quotient exceeds u64".into()))?;
            if a_u64 == 0 {
                return Err(Error::Parse(
                    "zero partial quotient; value not reduced into (0,1)".into(),
                ));
            }
            quotients.push(a_u64);
            let new_p = &a * &q - &p;
            debug_assert!(((&d - &new_p * &new_p) % &q).is_zero());
            let new_q = (&d - &new_p * &new_p) / &q;
            p = new_p;
            q = new_q;
        }

        ContinuedFraction::from_quotients(self.to_circle_point()?, quotients, period, false)
    }
}

impl std::fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}+sqrt({}))/{}", self.a, self.b, self.c)
    }
}

/// A continued fraction [0; a1, a2, ...] with exact integer convergents.
///
/// `convergents[n] = (p_n, q_n)` for n = 0..depth with q0 = 1, q1 = a1 and
/// `q_{n+1} = a_{n+1} q_n + q_{n-1}` (same recurrence for p with p0 = 0,
/// p1 = 1). One extra denominator is kept internally so the approximation
/// sandwich can be checked at the last materialized index.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    alpha: CirclePoint,
    quotients: Vec<u64>,
    convergents: Vec<(BigInt, BigInt)>,
    /// q_depth, one step past the exposed convergents.
    next_q: BigInt,
    /// C = sup a_n + 1 over the materialized window.
    c_bound: u64,
    /// (preperiod, period length) when eventual periodicity was detected.
    period: Option<(usize, usize)>,
    /// True for expansions seeded from a 64-bit float.
    low_precision: bool,
}

impl ContinuedFraction {
    fn from_quotients(
        alpha: CirclePoint,
        quotients: Vec<u64>,
        period: Option<(usize, usize)>,
        low_precision: bool,
    ) -> Result<ContinuedFraction> {
        if quotients.is_empty() {
            return Err(Error::Scenario("empty quotient list".into()));
        }
        let depth = quotients.len();
        let mut convergents: Vec<(BigInt, BigInt)> = Vec::with_capacity(depth);
        convergents.push((BigInt::ZERO, BigInt::from(1))); // (p0, q0)
        if depth >= 1 {
            convergents.push((BigInt::from(1), BigInt::from(quotients[0]))); // (p1, q1)
        }
        for n in 2..=depth {
            let a = BigInt::from(quotients[n - 1]);
            let p = &a * &convergents[n - 1].0 + &convergents[n - 2].0;
            let q = &a * &convergents[n - 1].1 + &convergents[n - 2].1;
            convergents.push((p, q));
        }
        let next_q = convergents.pop().expect("depth+1 entries").1;
        let c_bound = quotients.iter().copied().max().unwrap_or(0) + 1;
        Ok(ContinuedFraction {
            alpha,
            quotients,
            convergents,
            next_q,
            c_bound,
            period,
            low_precision,
        })
    }

    /// Low-precision expansion of an arbitrary irrational given as f64.
    pub fn from_f64(alpha: f64, depth: usize) -> Result<ContinuedFraction> {
        if depth == 0 {
            return Err(Error::Scenario("depth must be >= 1".into()));
        }
        let frac = alpha.rem_euclid(1.0);
        if frac == 0.0 {
            return Err(Error::Parse("alpha is an integer, not irrational".into()));
        }
        let point = CirclePoint::from_f64(frac);
        let mut quotients = Vec::with_capacity(depth);
        let mut x = frac;
        for _ in 0..depth {
            let inv = 1.0 / x;
            let a = inv.floor();
            if !(1.0..=1e15).contains(&a) {
                break; // precision exhausted
            }
            quotients.push(a as u64);
            x = inv - a;
        }
        if quotients.is_empty() {
            return Err(Error::Precision(
                "cannot extract any partial quotient from this f64".into(),
            ));
        }
        ContinuedFraction::from_quotients(point, quotients, None, true)
    }

    pub fn alpha(&self) -> CirclePoint {
        self.alpha
    }

    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    pub fn convergents(&self) -> &[(BigInt, BigInt)] {
        &self.convergents
    }

    /// C = sup a_n + 1 over the materialized window (exact for detected
    /// periodic expansions).
    pub fn c_bound(&self) -> u64 {
        self.c_bound
    }

    pub fn period(&self) -> Option<(usize, usize)> {
        self.period
    }

    pub fn low_precision(&self) -> bool {
        self.low_precision
    }

    /// q_n as u64; errors if the denominator overflows or n is out of range.
    pub fn denominator(&self, n: usize) -> Result<u64> {
        let q = if n < self.convergents.len() {
            &self.convergents[n].1
        } else if n == self.convergents.len() {
            &self.next_q
        } else {
            return Err(Error::Precision(format!(
                "denominator index {n} beyond materialized depth {}",
                self.convergents.len() - 1
            )));
        };
        q.to_u64()
            .ok_or_else(|| Error::Precision(format!("q_{n} exceeds u64")))
    }

    /// ||q_n * alpha|| computed exactly from the fixed-point alpha.
    pub fn qn_alpha_dist(&self, n: usize) -> Result<f64> {
        let q = self.denominator(n)?;
        Ok(self.alpha.mul_int(q).dist_to_zero())
    }

    /// The orbit points {0, -alpha, ..., -(k-1) alpha} sorted ascending.
    fn orbit_points(&self, k: u64) -> Vec<u128> {
        let mut pts: Vec<u128> = Vec::with_capacity(k as usize);
        let mut cur = CirclePoint::ZERO;
        for _ in 0..k {
            pts.push(cur.0);
            cur = cur.sub(self.alpha);
        }
        pts.sort_unstable();
        pts
    }

    /// Gap lengths of the partition of the circle by
    /// {0, -alpha, ..., -(k-1) alpha}, sorted ascending.
    pub fn three_gap_partition(&self, k: u64) -> Result<ThreeGapPartition> {
        if k == 0 {
            return Err(Error::Scenario("k must be >= 1".into()));
        }
        if k == 1 {
            return Ok(ThreeGapPartition {
                k,
                gaps_ulps: vec![0], // whole circle; see `gap_f64`
                whole_circle: true,
            });
        }
        let pts = self.orbit_points(k);
        let mut gaps: Vec<u128> = Vec::with_capacity(k as usize);
        for i in 0..pts.len() {
            let next = pts[(i + 1) % pts.len()];
            gaps.push(next.wrapping_sub(pts[i]));
        }
        gaps.sort_unstable();
        Ok(ThreeGapPartition {
            k,
            gaps_ulps: gaps,
            whole_circle: false,
        })
    }

    /// Empirical three-gap constants over all k <= k_max:
    /// C1 = max k*(max gap) bumped to a strict upper bound,
    /// C2 = min k*(min gap).
    pub fn estimate_gap_constants(&self, k_max: u64) -> Result<GapConstants> {
        if k_max < 2 {
            return Err(Error::Scenario("k_max must be >= 2".into()));
        }
        let mut c1 = f64::MIN;
        let mut c2 = f64::MAX;
        for k in 1..=k_max {
            let part = self.three_gap_partition(k)?;
            c1 = c1.max(k as f64 * part.max_gap());
            c2 = c2.min(k as f64 * part.min_gap());
        }
        Ok(GapConstants {
            c1: c1 * (1.0 + 1e-12),
            c2,
        })
    }

    /// Serialize quotients and exact convergents (decimal strings).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "alpha": self.alpha.to_decimal_string(),
            "quotients": self.quotients,
            "convergents": self.convergents.iter()
                .map(|(p, q)| serde_json::json!({"p": p.to_string(), "q": q.to_string()}))
                .collect::<Vec<_>>(),
            "c_bound": self.c_bound,
            "period": self.period.map(|(pre, len)| serde_json::json!({"preperiod": pre, "length": len})),
            "low_precision": self.low_precision,
        })
    }

    /// Check the section-4 sandwich 1/(2 q_n q_{n+1}) < |alpha - p_n/q_n|
    /// < 1/(q_n q_{n+1}) at 128-bit precision, exactly in integers.
    /// Returns the failing index if any.
    pub fn sandwich_violation(&self) -> Option<usize> {
        let two_128: BigUint = BigUint::from(1u8) << 128u32;
        for n in 0..self.convergents.len() {
            let (p, q) = &self.convergents[n];
            let q_next = if n + 1 < self.convergents.len() {
                self.convergents[n + 1].1.clone()
            } else {
                self.next_q.clone()
            };
            // e = |q * alpha_fixed - p * 2^128| with alpha uncertainty +- q ulps
            let qa = BigInt::from(BigUint::from(self.alpha.0)) * q;
            let p_scaled = p * BigInt::from(two_128.clone());
            let e = (qa - p_scaled).abs().to_biguint().expect("abs");
            let q_u = q.to_biguint().expect("q > 0");
            let qn_u = q_next.to_biguint().expect("q > 0");
            // lower: (e - q) * 2 * q * q_{n+1} > 2^128 * q  (i.e. e/2^128 > q/(2 q q'))
            // upper: (e + q) * q * q_{n+1} < 2^128 * q
            // both sides multiplied by q to stay integral: |alpha q - p| vs 1/(2 q')
            let lo_ok = (&e - (&q_u).min(&e)) * 2u8 * &qn_u > two_128;
            let hi_ok = (&e + &q_u) * &qn_u < two_128;
            if !(lo_ok && hi_ok) {
                return Some(n);
            }
        }
        None
    }
}

/// Sorted gap lengths of an orbit partition.
#[derive(Clone, Debug)]
pub struct ThreeGapPartition {
    pub k: u64,
    /// Ascending gap lengths in 2^-128 ulps; for k = 1 the single gap is
    /// the whole circle (flagged, since 2^128 overflows the ulp count).
    pub gaps_ulps: Vec<u128>,
    pub whole_circle: bool,
}

impl ThreeGapPartition {
    pub fn gap_f64(&self, i: usize) -> f64 {
        if self.whole_circle {
            1.0
        } else {
            crate::circle::ulps_to_f64(self.gaps_ulps[i])
        }
    }

    pub fn gaps(&self) -> Vec<f64> {
        (0..self.gaps_ulps.len()).map(|i| self.gap_f64(i)).collect()
    }

    pub fn min_gap(&self) -> f64 {
        self.gap_f64(0)
    }

    pub fn max_gap(&self) -> f64 {
        self.gap_f64(self.gaps_ulps.len() - 1)
    }

    /// Number of distinct gap lengths at tolerance 10^-24 (exact ulp
    /// comparison; the tolerance is converted to ulps).
    pub fn distinct_count(&self) -> usize {
        if self.whole_circle {
            return 1;
        }
        let tol_ulps = (GAP_DISTINCT_TOL * crate::circle::TWO_POW_128) as u128;
        let mut count = 1;
        for w in self.gaps_ulps.windows(2) {
            if w[1] - w[0] > tol_ulps {
                count += 1;
            }
        }
        count
    }

    pub fn sum(&self) -> f64 {
        if self.whole_circle {
            return 1.0;
        }
        // exact: ulps sum to 2^128
        self.gaps_ulps
            .iter()
            .fold(0.0f64, |acc, &g| acc + crate::circle::ulps_to_f64(g))
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GapConstants {
    pub c1: f64,
    pub c2: f64,
}
