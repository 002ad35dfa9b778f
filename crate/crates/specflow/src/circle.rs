//! Fixed-point arithmetic on the circle R/Z.
//!
//! A [`CirclePoint`] stores a position in [0,1) as an unsigned 128-bit
//! integer `u` meaning the real number `u / 2^128`. Addition and
//! subtraction mod 1 are exact (wrapping arithmetic), so orbits
//! `{x + k*alpha}` keep full precision for k well beyond 10^6 steps:
//! after k exact additions of a representation accurate to 2^-128, the
//! accumulated error is at most k * 2^-128.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Scale factor exponent: positions live on a 2^128 grid.
pub const FRACTION_BITS: u32 = 128;

/// 2^128 and friends, exactly representable as f64.
pub(crate) const TWO_POW_128: f64 = 340282366920938463463374607431768211456.0;
pub(crate) const TWO_POW_64: f64 = 18446744073709551616.0;
pub(crate) const TWO_POW_NEG_128: f64 = 1.0 / TWO_POW_128;

/// Convert an ulp count (2^-128 units) to f64.
#[inline]
pub fn ulps_to_f64(u: u128) -> f64 {
    u as f64 * TWO_POW_NEG_128
}

/// A point of the circle T = R/Z held in 128-bit fixed point.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CirclePoint(pub u128);

impl CirclePoint {
    pub const ZERO: CirclePoint = CirclePoint(0);
    pub const HALF: CirclePoint = CirclePoint(1u128 << 127);

    /// Exact rational p/q reduced mod 1. `q` must be nonzero.
    pub fn from_fraction(p: u64, q: u64) -> Result<CirclePoint> {
        if q == 0 {
            return Err(Error::Parse("fraction with zero denominator".into()));
        }
        let p = p % q;
        // floor(p * 2^128 / q), exact in 256-bit intermediate
        let num = BigUint::from(p) << FRACTION_BITS;
        let u = (num / BigUint::from(q)).to_u128().expect("p/q < 1 fits");
        Ok(CirclePoint(u))
    }

    /// Nearest representable point to an f64, reduced mod 1.
    pub fn from_f64(x: f64) -> CirclePoint {
        let frac = x.rem_euclid(1.0);
        if frac >= 1.0 {
            // rem_euclid can return 1.0 for tiny negative x
            return CirclePoint(0);
        }
        let hi = (frac * TWO_POW_64) as u64; // floor
        let rem = frac * TWO_POW_64 - hi as f64;
        let lo = (rem * TWO_POW_64) as u64;
        CirclePoint(((hi as u128) << 64) | lo as u128)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 * TWO_POW_NEG_128
    }

    /// Exact addition mod 1.
    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: CirclePoint) -> CirclePoint {
        CirclePoint(self.0.wrapping_add(other.0))
    }

    /// Exact subtraction mod 1.
    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: CirclePoint) -> CirclePoint {
        CirclePoint(self.0.wrapping_sub(other.0))
    }

    /// Exact k-fold multiple mod 1 (equals k iterated additions).
    #[inline]
    pub fn mul_int(self, k: u64) -> CirclePoint {
        CirclePoint(self.0.wrapping_mul(k as u128))
    }

    /// Positive-orientation arc length from `from` to `self`, in ulps.
    /// Zero means the points coincide.
    #[inline]
    pub fn arc_from(self, from: CirclePoint) -> u128 {
        self.0.wrapping_sub(from.0)
    }

    /// x + n*alpha for signed n, exact.
    #[inline]
    pub fn add_signed(self, alpha: CirclePoint, n: i64) -> CirclePoint {
        if n >= 0 {
            self.add(alpha.mul_int(n as u64))
        } else {
            self.sub(alpha.mul_int((-n) as u64))
        }
    }

    /// Distance to the nearest integer, ||x||, as an exact ulp count.
    #[inline]
    pub fn dist_to_zero_ulps(self) -> u128 {
        self.0.min(self.0.wrapping_neg())
    }

    /// Distance to the nearest integer, ||x||, as f64 in [0, 1/2].
    pub fn dist_to_zero(self) -> f64 {
        self.dist_to_zero_ulps() as f64 * TWO_POW_NEG_128
    }

    /// ||self - other|| as f64.
    pub fn dist(self, other: CirclePoint) -> f64 {
        self.sub(other).dist_to_zero()
    }

    /// Membership in the half-open positive-orientation arc (x, y].
    /// The arc is taken from x counterclockwise; x excluded, y included.
    #[inline]
    pub fn in_arc(self, x: CirclePoint, y: CirclePoint) -> bool {
        let len = y.arc_from(x);
        let off = self.arc_from(x);
        off > 0 && off <= len
    }

    /// True when this point lies within `tol_ulps` of either arc endpoint.
    #[inline]
    pub fn near_arc_boundary(self, x: CirclePoint, y: CirclePoint, tol_ulps: u128) -> bool {
        let dx = self.sub(x).dist_to_zero_ulps();
        let dy = self.sub(y).dist_to_zero_ulps();
        dx < tol_ulps || dy < tol_ulps
    }

    /// Fractional part {self - beta} as f64, with the {0} = 0 convention.
    #[inline]
    pub fn frac_minus(self, beta: CirclePoint) -> f64 {
        self.sub(beta).to_f64()
    }

    /// Exact decimal string (u / 2^128 has a terminating decimal
    /// expansion of at most 128 digits). Round-trips through
    /// [`CirclePoint::from_decimal_str`].
    pub fn to_decimal_string(self) -> String {
        if self.0 == 0 {
            return "0".to_string();
        }
        // u / 2^128 = u * 5^128 / 10^128
        let five = BigUint::from(5u32).pow(FRACTION_BITS);
        let digits = (BigUint::from(self.0) * five).to_string();
        let pad = FRACTION_BITS as usize - digits.len().min(FRACTION_BITS as usize);
        let mut s = String::from("0.");
        for _ in 0..pad {
            s.push('0');
        }
        s.push_str(&digits);
        while s.ends_with('0') {
            s.pop();
        }
        s
    }

    /// Parse "p/q", a decimal string, or the exact output of
    /// [`CirclePoint::to_decimal_string`].
    pub fn from_decimal_str(s: &str) -> Result<CirclePoint> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q: u64 = q
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            return CirclePoint::from_fraction(p, q);
        }
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        let _: u64 = if int_part.is_empty() {
            0
        } else {
            int_part
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?
        };
        if frac_part.is_empty() {
            return Ok(CirclePoint(0));
        }
        if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        // frac / 10^k scaled to 2^128 with rounding to nearest
        let k = frac_part.len() as u32;
        let frac = BigUint::parse_bytes(frac_part.as_bytes(), 10)
            .ok_or_else(|| Error::Parse(format!("bad decimal {s:?}")))?;
        let ten_k = BigUint::from(10u32).pow(k);
        let num = (frac << FRACTION_BITS) + (&ten_k >> 1u32);
        let u = (num / ten_k) % (BigUint::one() << FRACTION_BITS);
        Ok(CirclePoint(u.to_u128().expect("reduced mod 2^128")))
    }
}

impl serde::Serialize for CirclePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_string())
    }
}

impl<'de> serde::Deserialize<'de> for CirclePoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CirclePoint::from_decimal_str(&s).map_err(serde::de::Error::custom)
    }
}

impl std::fmt::Debug for CirclePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CirclePoint({:.12})", self.to_f64())
    }
}

impl std::fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.17}", self.to_f64())
    }
}

/// ||t|| for a plain real input: distance to the nearest integer.
pub fn nearest_int_distance(t: f64) -> f64 {
    let frac = t.rem_euclid(1.0);
    frac.min(1.0 - frac)
}

/// Exact fixed-point value of (a + sqrt(b)) / c reduced mod 1, rounded to
/// the 2^-128 grid. `b` must be positive and non-square, `c` positive.
pub(crate) fn quadratic_to_circle(a: i64, b: u64, c: i64) -> Result<CirclePoint> {
    if c <= 0 {
        return Err(Error::Parse("denominator must be positive".into()));
    }
    let c = c as u64;
    // sqrt(b) * 2^(128+G) with G guard bits, floor via integer sqrt
    const GUARD: u32 = 16;
    let shifted = BigUint::from(b) << (2 * (FRACTION_BITS + GUARD));
    let root = shifted.sqrt(); // floor(sqrt(b) * 2^(128+G))
    let a_term = BigUint::from(a.unsigned_abs()) << (FRACTION_BITS + GUARD);
    let num = if a >= 0 {
        root + a_term
    } else {
        if a_term > root {
            return Err(Error::Parse("value (a+sqrt(b))/c is negative".into()));
        }
        root - a_term
    };
    let den = BigUint::from(c) << (FRACTION_BITS + GUARD);
    // reduce mod 1: subtract floor
    let whole = &num / &den;
    let rem = num - whole * &den;
    // round rem / (c * 2^G) to nearest on the 2^128 grid
    let c_shift = BigUint::from(c) << GUARD;
    let u = ((rem << 1u32) + &c_shift) / (c_shift << 1u32);
    let u = u % (BigUint::one() << FRACTION_BITS);
    Ok(CirclePoint(u.to_u128().expect("reduced mod 2^128")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_int_distance_basics() {
        assert!((nearest_int_distance(0.7) - 0.3).abs() < 1e-15);
        assert!((nearest_int_distance(-1.25) - 0.25).abs() < 1e-15);
        assert_eq!(nearest_int_distance(3.0), 0.0);
    }

    #[test]
    fn fraction_round_trip() {
        let p = CirclePoint::from_fraction(1, 3).unwrap();
        assert!((p.to_f64() - 1.0 / 3.0).abs() < 1e-30);
        let s = p.to_decimal_string();
        let q = CirclePoint::from_decimal_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn decimal_string_round_trip_random() {
        let mut u = 0x9e3779b97f4a7c15u128;
        for _ in 0..50 {
            u = u.wrapping_mul(0x2545F4914F6CDD1D).wrapping_add(0x123456789);
            let p = CirclePoint(u);
            let q = CirclePoint::from_decimal_str(&p.to_decimal_string()).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn arc_membership() {
        let x = CirclePoint::from_f64(0.9);
        let y = CirclePoint::from_f64(0.1); // arc wraps through 0
        assert!(CirclePoint::from_f64(0.95).in_arc(x, y));
        assert!(CirclePoint::from_f64(0.05).in_arc(x, y));
        assert!(!CirclePoint::from_f64(0.5).in_arc(x, y));
        assert!(!x.in_arc(x, y)); // left endpoint excluded
        assert!(y.in_arc(x, y)); // right endpoint included
    }

    #[test]
    fn golden_ratio_fixed_point() {
        // (-1 + sqrt(5)) / 2 = 0.61803398874989484820...
        let g = quadratic_to_circle(-1, 5, 2).unwrap();
        assert!((g.to_f64() - 0.6180339887498949).abs() < 1e-15);
        // 8*alpha distance to nearest integer, oracle from extended precision
        let d = g.mul_int(8).dist_to_zero();
        assert!((d - 0.05572809000084121).abs() < 1e-12);
        assert!(d > 1.0 / 32.0 && d < 1.0 / 8.0);
    }

    #[test]
    fn mul_int_matches_iterated_addition() {
        let g = quadratic_to_circle(-1, 5, 2).unwrap();
        let mut acc = CirclePoint::ZERO;
        for k in 0..100u64 {
            assert_eq!(acc, g.mul_int(k));
            acc = acc.add(g);
        }
    }
}
