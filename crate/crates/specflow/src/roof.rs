//! Bounded-variation roof functions without singular-continuous part.
//!
//! An element of the class is
//!
//! ```text
//! f(x) = c + sum_i d_i * {x - beta_i} + ac(x)
//! ```
//!
//! with finitely many (or lazily truncated) sawtooth jumps `d_i` at
//! pairwise distinct points `beta_i`, an absolutely continuous
//! piecewise-polynomial part `ac` that is continuous on the circle, and a
//! constant. The fractional part uses the `{0} = 0` convention, so the
//! circle jump of `f` at `beta_i` is `-d_i` and the sum of sawtooth
//! coefficients `S = sum d_i` equals the integral of `f'`. All of the
//! jump-combinatorics below (tail condition, drift set, drift window,
//! perturbation stability) is phrased in terms of the sawtooth `d_i`,
//! which is the convention the drift-identity oracle validates end to end.
//!
//! Infinite jump sequences are represented by an explicit truncation plus
//! a certified `tail_bound` on the sum of omitted |d_i|; every inequality
//! consumes the tail bound conservatively.

use serde::{Deserialize, Serialize};

use crate::circle::CirclePoint;
use crate::error::{Error, Result};

/// Cap applied to the reported tail-condition theta when the truncated
/// tail is exactly zero (the supremum is infinite for finitely many jumps).
pub const THETA_CAP: f64 = 1e3;

/// Enumeration cap for the drift-correction sum set.
pub const SUM_SET_CAP: u128 = 10_000_000;

/// One sawtooth jump: coefficient `size` of the term size * {x - beta}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub beta: CirclePoint,
    pub size: f64,
}

/// Ordered jump data: |size| non-increasing, betas pairwise distinct,
/// plus a certified bound on the total absolute size of omitted jumps.
#[derive(Clone, Debug, Default)]
pub struct JumpSpec {
    entries: Vec<Jump>,
    tail_bound: f64,
}

impl JumpSpec {
    pub fn new(entries: Vec<(CirclePoint, f64)>, tail_bound: f64) -> Result<JumpSpec> {
        if !tail_bound.is_finite() || tail_bound < 0.0 {
            return Err(Error::Scenario("tail_bound must be >= 0".into()));
        }
        let mut entries: Vec<Jump> = entries
            .into_iter()
            .map(|(beta, size)| Jump { beta, size })
            .collect();
        for j in &entries {
            if j.size == 0.0 || !j.size.is_finite() {
                return Err(Error::Scenario("jump sizes must be nonzero and finite".into()));
            }
        }
        let mut betas: Vec<u128> = entries.iter().map(|j| j.beta.0).collect();
        betas.sort_unstable();
        if betas.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Scenario("jump locations must be pairwise distinct".into()));
        }
        // monotone reordering: |d_1| >= |d_2| >= ...; ties broken by beta
        entries.sort_by(|a, b| {
            b.size
                .abs()
                .partial_cmp(&a.size.abs())
                .unwrap()
                .then(a.beta.0.cmp(&b.beta.0))
        });
        Ok(JumpSpec {
            entries,
            tail_bound,
        })
    }

    pub fn empty() -> JumpSpec {
        JumpSpec::default()
    }

    pub fn entries(&self) -> &[Jump] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Sum of materialized jump coefficients (S up to tail_bound).
    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|j| j.size).sum()
    }

    pub fn abs_sum(&self) -> f64 {
        self.entries.iter().map(|j| j.size.abs()).sum()
    }

    /// Sum of |d_i| for i > j over the materialized entries.
    pub fn tail_after(&self, j: usize) -> f64 {
        self.entries.iter().skip(j).map(|e| e.size.abs()).sum()
    }
}

/// Piecewise-polynomial (degree <= 3) absolutely continuous component,
/// continuous on the circle. Piece k covers [breaks[k], breaks[k+1]) with
/// coefficients in the local coordinate s = x - breaks[k]; the last piece
/// ends at 1 and must match the value of the first piece at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcComponent {
    breaks: Vec<f64>,
    coeffs: Vec<[f64; 4]>,
}

fn poly_eval(c: &[f64; 4], s: f64) -> f64 {
    ((c[3] * s + c[2]) * s + c[1]) * s + c[0]
}

fn poly_deriv(c: &[f64; 4], s: f64) -> f64 {
    (3.0 * c[3] * s + 2.0 * c[2]) * s + c[1]
}

/// Real roots of a2 s^2 + a1 s + a0 = 0, ascending.
fn quadratic_roots(a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    if a2.abs() < 1e-300 {
        if a1.abs() < 1e-300 {
            return vec![];
        }
        return vec![-a0 / a1];
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc < 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    let q = -0.5 * (a1 + a1.signum() * sq);
    let (r1, r2) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / a2, a0 / q)
    };
    let mut roots = vec![r1, r2];
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup();
    roots
}

impl AcComponent {
    pub fn zero() -> AcComponent {
        AcComponent {
            breaks: vec![0.0],
            coeffs: vec![[0.0; 4]],
        }
    }

    pub fn from_pieces(breaks: Vec<f64>, coeffs: Vec<[f64; 4]>) -> Result<AcComponent> {
        if breaks.is_empty() || breaks.len() != coeffs.len() {
            return Err(Error::Scenario(
                "breakpoints and coefficient rows must match and be nonempty".into(),
            ));
        }
        if breaks[0] != 0.0 {
            return Err(Error::Scenario("first breakpoint must be 0".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) || breaks.last().copied().unwrap() >= 1.0 {
            return Err(Error::Scenario(
                "breakpoints must be strictly increasing within [0,1)".into(),
            ));
        }
        let ac = AcComponent { breaks, coeffs };
        // continuity at interior breakpoints and at the wrap
        for k in 0..ac.breaks.len() {
            let (left_end, next_val) = if k + 1 < ac.breaks.len() {
                let w = ac.breaks[k + 1] - ac.breaks[k];
                (poly_eval(&ac.coeffs[k], w), poly_eval(&ac.coeffs[k + 1], 0.0))
            } else {
                let w = 1.0 - ac.breaks[k];
                (poly_eval(&ac.coeffs[k], w), poly_eval(&ac.coeffs[0], 0.0))
            };
            if (left_end - next_val).abs() > 1e-9 {
                return Err(Error::Scenario(format!(
                    "ac part discontinuous at breakpoint {k}: {left_end} vs {next_val}"
                )));
            }
        }
        Ok(ac)
    }

    /// A zero-mean C^1 bump c * (x^2 (1-x)^2 - 1/30): handy smooth test part.
    pub fn smooth_bump(amplitude: f64) -> AcComponent {
        // x^2 (1-x)^2 = x^2 - 2x^3 + x^4 truncated to cubic? Not exact;
        // use two cubic pieces of the quartic's cubic Hermite fit instead.
        // Simpler: represent exactly with the cubic pair of the quartic is
        // impossible, so use the piecewise-cubic tent-smoothed bump:
        // p(x) = x^2 (3 - 2x) ramps 0 -> 1 with zero slope at both ends.
        // bump(x) = p(2x) on [0, 1/2), p(2 - 2x) on [1/2, 1); mean 1/2.
        let a = amplitude;
        // piece 1: s in [0, 1/2): p(2s) = 12 s^2 - 16 s^3
        // piece 2: s in [0, 1/2) local: p(2 - 2(s + 1/2)) = p(1 - 2s)
        //        = (1-2s)^2 (3 - 2(1-2s)) = (1 - 4s + 4s^2)(1 + 4s)
        //        = 1 - 12 s^2 + 16 s^3
        AcComponent {
            breaks: vec![0.0, 0.5],
            coeffs: vec![
                [-0.5 * a, 0.0, 12.0 * a, -16.0 * a],
                [0.5 * a, 0.0, -12.0 * a, 16.0 * a],
            ],
        }
    }

    /// Zero-mean piecewise-linear tent with peak `height` at 1/2.
    pub fn tent(height: f64) -> AcComponent {
        AcComponent {
            breaks: vec![0.0, 0.5],
            coeffs: vec![
                [-0.5 * height, 2.0 * height, 0.0, 0.0],
                [0.5 * height, -2.0 * height, 0.0, 0.0],
            ],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.iter().all(|&v| v == 0.0))
    }

    fn piece_index(&self, x: f64) -> usize {
        match self
            .breaks
            .binary_search_by(|b| b.partial_cmp(&x).unwrap())
        {
            Ok(k) => k,
            Err(k) => k - 1,
        }
    }

    fn piece_width(&self, k: usize) -> f64 {
        if k + 1 < self.breaks.len() {
            self.breaks[k + 1] - self.breaks[k]
        } else {
            1.0 - self.breaks[k]
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.piece_index(x);
        poly_eval(&self.coeffs[k], x - self.breaks[k])
    }

    pub fn eval_point(&self, x: CirclePoint) -> f64 {
        self.eval(x.to_f64())
    }

    pub fn derivative_at(&self, x: f64) -> f64 {
        let k = self.piece_index(x);
        poly_deriv(&self.coeffs[k], x - self.breaks[k])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn coeffs(&self) -> &[[f64; 4]] {
        &self.coeffs
    }

    /// Exact integral over [a, b] within [0, 1].
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&a) && a <= b && b <= 1.0);
        let anti = |c: &[f64; 4], s: f64| {
            (((c[3] * s / 4.0 + c[2] / 3.0) * s + c[1] / 2.0) * s + c[0]) * s
        };
        let mut total = 0.0;
        for k in 0..self.breaks.len() {
            let lo = self.breaks[k];
            let hi = lo + self.piece_width(k);
            let u = a.max(lo);
            let v = b.min(hi);
            if v > u {
                total += anti(&self.coeffs[k], v - lo) - anti(&self.coeffs[k], u - lo);
            }
        }
        total
    }

    pub fn mean(&self) -> f64 {
        self.integral(0.0, 1.0)
    }

    /// Exact integral of ac' over [a, b], via the antiderivative of the
    /// per-piece derivative coefficients.
    pub fn integral_of_derivative(&self, a: f64, b: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&a) && a <= b && b <= 1.0);
        let anti = |c: &[f64; 4], s: f64| ((c[3] * s + c[2]) * s + c[1]) * s;
        let mut total = 0.0;
        for k in 0..self.breaks.len() {
            let lo = self.breaks[k];
            let hi = lo + self.piece_width(k);
            let u = a.max(lo);
            let v = b.min(hi);
            if v > u {
                total += anti(&self.coeffs[k], v - lo) - anti(&self.coeffs[k], u - lo);
            }
        }
        total
    }

    /// Copy shifted to zero mean.
    pub fn sub_mean(&self) -> AcComponent {
        let m = self.mean();
        let mut out = self.clone();
        for c in &mut out.coeffs {
            c[0] -= m;
        }
        out
    }

    /// || ac' ||_{L^1}, exact: total variation of the continuous function,
    /// splitting every piece at the (quadratic) roots of its derivative.
    pub fn l1_derivative(&self) -> f64 {
        self.variation_of_shifted(0.0)
    }

    /// Exact integral of |slope + ac'(x)| over the circle (the variation
    /// of the continuous part of a roof with mean slope `slope`).
    pub fn variation_of_shifted(&self, slope: f64) -> f64 {
        let mut total = 0.0;
        for k in 0..self.breaks.len() {
            let w = self.piece_width(k);
            let c = &self.coeffs[k];
            // value of the shifted function in local coordinates
            let val = |s: f64| poly_eval(c, s) + slope * s;
            // critical points: slope + c1 + 2 c2 s + 3 c3 s^2 = 0
            let mut cuts = vec![0.0];
            for r in quadratic_roots(3.0 * c[3], 2.0 * c[2], c[1] + slope) {
                if r > 0.0 && r < w {
                    cuts.push(r);
                }
            }
            cuts.push(w);
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for pair in cuts.windows(2) {
                total += (val(pair[1]) - val(pair[0])).abs();
            }
        }
        total
    }

    /// Total variation of ac' on the circle: within-piece variation of the
    /// (quadratic) derivative plus kink jumps at breakpoints.
    pub fn derivative_variation(&self) -> f64 {
        let mut total = 0.0;
        let n = self.breaks.len();
        for k in 0..n {
            let w = self.piece_width(k);
            let c = &self.coeffs[k];
            let dv = |s: f64| poly_deriv(c, s);
            // critical point of the derivative: 2 c2 + 6 c3 s = 0
            let mut cuts = vec![0.0, w];
            if c[3].abs() > 1e-300 {
                let r = -c[2] / (3.0 * c[3]);
                if r > 0.0 && r < w {
                    cuts.insert(1, r);
                }
            }
            for pair in cuts.windows(2) {
                total += (dv(pair[1]) - dv(pair[0])).abs();
            }
            // kink at the right end of this piece
            let next = (k + 1) % n;
            let end_deriv = dv(w);
            let next_deriv = poly_deriv(&self.coeffs[next], 0.0);
            total += (next_deriv - end_deriv).abs();
        }
        total
    }

    /// Pointwise sum with another component (merged breakpoints).
    pub fn add(&self, other: &AcComponent) -> AcComponent {
        let mut breaks: Vec<f64> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .copied()
            .collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let mut coeffs = Vec::with_capacity(breaks.len());
        for &b in &breaks {
            let ka = self.piece_index(b);
            let kb = other.piece_index(b);
            // re-center both polynomials at the new left endpoint b
            let shift = |c: &[f64; 4], t: f64| -> [f64; 4] {
                // p(s + t) expanded in s
                let [c0, c1, c2, c3] = *c;
                [
                    ((c3 * t + c2) * t + c1) * t + c0,
                    (3.0 * c3 * t + 2.0 * c2) * t + c1,
                    3.0 * c3 * t + c2,
                    c3,
                ]
            };
            let pa = shift(&self.coeffs[ka], b - self.breaks[ka]);
            let pb = shift(&other.coeffs[kb], b - other.breaks[kb]);
            coeffs.push([pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2], pa[3] + pb[3]]);
        }
        AcComponent { breaks, coeffs }
    }
}

/// A member of the roof class: constant + sawtooth jumps + AC part.
///
/// Constructed with [`RoofFunction::new`] for genuine (strictly positive)
/// roofs, or [`RoofFunction::bv`] for general signed elements of the
/// class (differences of roofs, coboundary probes).
#[derive(Clone, Debug)]
pub struct RoofFunction {
    constant: f64,
    jumps: JumpSpec,
    ac: AcComponent,
    jump_sum: f64,
    lower: f64,
    upper: f64,
}

impl RoofFunction {
    /// Strictly positive roof; errors if the exact minimum (minus the
    /// truncation tail) is not positive.
    pub fn new(constant: f64, jumps: JumpSpec, ac: AcComponent) -> Result<RoofFunction> {
        let f = RoofFunction::bv(constant, jumps, ac)?;
        if f.lower <= 0.0 {
            return Err(Error::Hypothesis(format!(
                "roof not bounded away from zero: min = {}",
                f.lower
            )));
        }
        Ok(f)
    }

    /// General signed element of the class.
    pub fn bv(constant: f64, jumps: JumpSpec, ac: AcComponent) -> Result<RoofFunction> {
        let jump_sum = jumps.sum();
        let mut f = RoofFunction {
            constant,
            jumps,
            ac,
            jump_sum,
            lower: 0.0,
            upper: 0.0,
        };
        let (lo, hi) = f.exact_range();
        f.lower = lo - f.jumps.tail_bound();
        f.upper = hi + f.jumps.tail_bound();
        Ok(f)
    }

    /// Sawtooth-only roof: constant + sum d_i {x - beta_i}.
    pub fn sawtooth(constant: f64, jumps: &[(CirclePoint, f64)]) -> Result<RoofFunction> {
        RoofFunction::new(constant, JumpSpec::new(jumps.to_vec(), 0.0)?, AcComponent::zero())
    }

    /// Constant roof (suspension ceiling). Not in the class U (S = 0).
    pub fn suspension(height: f64) -> Result<RoofFunction> {
        RoofFunction::new(height, JumpSpec::empty(), AcComponent::zero())
    }

    /// Exact (min, sup) of the truncated representation over the circle:
    /// piecewise the function is slope-S-plus-cubic, so candidates are
    /// piece endpoints (value and left limit) and interior critical points.
    fn exact_range(&self) -> (f64, f64) {
        let mut candidates: Vec<CirclePoint> = vec![CirclePoint::ZERO];
        for j in self.jumps.entries() {
            candidates.push(j.beta);
        }
        for &b in self.ac.breaks() {
            candidates.push(CirclePoint::from_f64(b));
        }
        // interior critical points: S + ac'(x) = 0 within each ac piece
        for k in 0..self.ac.breaks().len() {
            let c = &self.ac.coeffs()[k];
            let w = self.ac.piece_width(k);
            for r in quadratic_roots(3.0 * c[3], 2.0 * c[2], c[1] + self.jump_sum) {
                if r > 0.0 && r < w {
                    candidates.push(CirclePoint::from_f64(self.ac.breaks()[k] + r));
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in &candidates {
            let v = self.evaluate(x);
            let vl = self.evaluate_left(x);
            lo = lo.min(v).min(vl);
            hi = hi.max(v).max(vl);
        }
        (lo, hi)
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn jumps(&self) -> &JumpSpec {
        &self.jumps
    }

    pub fn ac(&self) -> &AcComponent {
        &self.ac
    }

    /// S: the sum of jumps (mean slope of the piecewise-linear part).
    pub fn jump_sum(&self) -> f64 {
        self.jump_sum
    }

    /// Strict lower bound m (conservatively reduced by the tail bound).
    pub fn lower_bound(&self) -> f64 {
        self.lower
    }

    /// Upper bound M (sup, conservatively enlarged by the tail bound).
    pub fn upper_bound(&self) -> f64 {
        self.upper
    }

    /// Membership in U: sum of jumps nonzero, robust to the truncation.
    pub fn in_u_class(&self) -> bool {
        self.jump_sum.abs() > self.jumps.tail_bound()
    }

    /// Pointwise value with the {0} = 0 sawtooth convention.
    pub fn evaluate(&self, x: CirclePoint) -> f64 {
        let mut v = self.constant + self.ac.eval_point(x);
        for j in self.jumps.entries() {
            v += j.size * x.frac_minus(j.beta);
        }
        v
    }

    /// Left limit at x: adds the sawtooth coefficient when x is a jump point.
    pub fn evaluate_left(&self, x: CirclePoint) -> f64 {
        let mut v = self.evaluate(x);
        for j in self.jumps.entries() {
            if j.beta == x {
                v += j.size;
            }
        }
        v
    }

    /// Value with a guaranteed evaluation tolerance; errors when the
    /// truncation tail alone exceeds the request.
    pub fn evaluate_with_tol(&self, x: CirclePoint, tol: f64) -> Result<f64> {
        if self.jumps.tail_bound() > tol {
            return Err(Error::Precision(format!(
                "achievable evaluation tolerance is {} (truncation tail), {} requested",
                self.jumps.tail_bound(),
                tol
            )));
        }
        Ok(self.evaluate(x))
    }

    /// Integral over the circle: c + sum d_i / 2 + mean(ac).
    pub fn integral_mean(&self) -> f64 {
        self.constant + 0.5 * self.jump_sum + self.ac.mean()
    }

    /// True total variation of the truncated representation, exact:
    /// sum |d_i| (circle jumps) + integral of |S + ac'|. The omitted tail
    /// can add at most 2 * tail_bound.
    pub fn variation(&self) -> f64 {
        self.jumps.abs_sum() + self.ac.variation_of_shifted(self.jump_sum)
    }

    /// The classical upper bound sum |d_i| + ||f_a'||_1 + 2|S| (triangle
    /// inequality over the decomposition; >= variation()).
    pub fn variation_formula_upper(&self) -> f64 {
        self.jumps.abs_sum() + self.ac.l1_derivative() + 2.0 * self.jump_sum.abs()
    }

    /// Independent partition-refinement estimate of the variation:
    /// `base_points` equispaced points plus all breakpoints, jump points
    /// (with a 2^-40 left offset to capture jumps) and critical points.
    pub fn variation_partition_estimate(&self, base_points: u64) -> f64 {
        let mut pts: Vec<CirclePoint> = Vec::with_capacity(base_points as usize + 64);
        for k in 0..base_points {
            pts.push(CirclePoint::from_fraction(k, base_points).expect("k < n"));
        }
        let offset: u128 = 1u128 << 88; // 2^-40
        for j in self.jumps.entries() {
            pts.push(j.beta);
            pts.push(CirclePoint(j.beta.0.wrapping_sub(offset)));
        }
        for &b in self.ac.breaks() {
            let p = CirclePoint::from_f64(b);
            pts.push(p);
            pts.push(CirclePoint(p.0.wrapping_sub(offset)));
        }
        for k in 0..self.ac.breaks().len() {
            let c = &self.ac.coeffs()[k];
            let w = self.ac.piece_width(k);
            for r in quadratic_roots(3.0 * c[3], 2.0 * c[2], c[1] + self.jump_sum) {
                if r > 0.0 && r < w {
                    pts.push(CirclePoint::from_f64(self.ac.breaks()[k] + r));
                }
            }
        }
        pts.sort_unstable();
        pts.dedup();
        let vals: Vec<f64> = pts.iter().map(|&p| self.evaluate(p)).collect();
        let mut var = 0.0;
        for k in 0..vals.len() {
            let next = vals[(k + 1) % vals.len()];
            var += (next - vals[k]).abs();
        }
        var
    }

    /// Split f = f_ac + f_pl with f_ac of zero mean and f_pl carrying the
    /// jumps, slope S and all constants.
    pub fn decompose(&self) -> (AcComponent, RoofFunction) {
        let mean = self.ac.mean();
        let f_ac = self.ac.sub_mean();
        let f_pl = RoofFunction::bv(self.constant + mean, self.jumps.clone(), AcComponent::zero())
            .expect("bv construction cannot fail on existing data");
        (f_ac, f_pl)
    }

    /// Piecewise-linear part only (ac dropped, constants kept).
    pub fn piecewise_linear_part(&self) -> RoofFunction {
        self.decompose().1
    }

    /// Does this function have a trivial AC part?
    pub fn is_piecewise_linear(&self) -> bool {
        self.ac.is_zero()
    }

    /// Von Neumann approximation: keep the fewest leading jumps such that
    /// the omitted tail (including the truncation bound) is < 1/(3n);
    /// guarantees Var(f - f_n) <= 1/n and a nonzero jump sum.
    pub fn von_neumann_approx(&self, n: u32) -> Result<RoofFunction> {
        if n == 0 {
            return Err(Error::Scenario("n must be >= 1".into()));
        }
        if !self.in_u_class() {
            return Err(Error::Hypothesis(
                "sum of jumps is zero (not in U); no von Neumann approximation".into(),
            ));
        }
        let budget = 1.0 / (3.0 * n as f64);
        if self.jumps.tail_bound() >= budget {
            return Err(Error::Precision(format!(
                "truncation tail {} exceeds the 1/(3n) = {budget} budget",
                self.jumps.tail_bound()
            )));
        }
        let mut j_n = 0;
        while self.jumps.tail_after(j_n) + self.jumps.tail_bound() >= budget {
            j_n += 1;
        }
        // ensure the approximation stays in U
        let mut kept: Vec<(CirclePoint, f64)> = self.jumps.entries()[..j_n]
            .iter()
            .map(|j| (j.beta, j.size))
            .collect();
        while kept.iter().map(|(_, d)| d).sum::<f64>() == 0.0 {
            if j_n >= self.jumps.len() {
                return Err(Error::Hypothesis(
                    "all partial jump sums vanish; approximation left U".into(),
                ));
            }
            let j = &self.jumps.entries()[j_n];
            kept.push((j.beta, j.size));
            j_n += 1;
        }
        RoofFunction::bv(
            self.constant,
            JumpSpec::new(kept, 0.0)?,
            self.ac.clone(),
        )
    }

    /// Pointwise sum f + g (jumps at equal locations merged).
    pub fn add(&self, g: &RoofFunction) -> Result<RoofFunction> {
        let mut all: Vec<(CirclePoint, f64)> = self
            .jumps
            .entries()
            .iter()
            .chain(g.jumps.entries())
            .map(|j| (j.beta, j.size))
            .collect();
        all.sort_by_key(|(b, _)| b.0);
        let mut merged: Vec<(CirclePoint, f64)> = Vec::with_capacity(all.len());
        for (b, d) in all {
            match merged.last_mut() {
                Some((last, acc)) if *last == b => *acc += d,
                _ => merged.push((b, d)),
            }
        }
        merged.retain(|(_, d)| d.abs() > 0.0);
        RoofFunction::bv(
            self.constant + g.constant,
            JumpSpec::new(merged, self.jumps.tail_bound() + g.jumps.tail_bound())?,
            self.ac.add(&g.ac),
        )
    }

    /// Difference f - g.
    pub fn sub(&self, g: &RoofFunction) -> Result<RoofFunction> {
        let neg = RoofFunction::bv(
            -g.constant,
            JumpSpec::new(
                g.jumps.entries().iter().map(|j| (j.beta, -j.size)).collect(),
                g.jumps.tail_bound(),
            )?,
            {
                let mut neg_ac = g.ac.clone();
                for c in &mut neg_ac.coeffs {
                    for v in c.iter_mut() {
                        *v = -*v;
                    }
                }
                neg_ac
            },
        )?;
        self.add(&neg)
    }

    /// Recentred copy with zero circle mean.
    pub fn recentred(&self) -> RoofFunction {
        let mut out = self.clone();
        out.constant -= self.integral_mean();
        out.lower -= self.integral_mean();
        out.upper -= self.integral_mean();
        out
    }
}

/// Certificate that the jump-tail condition holds: the smallest feasible
/// truncation index j together with the largest admissible theta (capped
/// at [`THETA_CAP`] when the tail is exactly zero).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ThetaCertificate {
    pub j: usize,
    pub theta: f64,
}

/// Required tail budget |S| / ((2+theta)(2C+1)((2C+1)^j + 1)).
pub fn theta_tail_budget(s_abs: f64, theta: f64, c_bound: u64, j: usize) -> f64 {
    let base = (2 * c_bound + 1) as f64;
    s_abs / ((2.0 + theta) * base * (base.powi(j as i32) + 1.0))
}

/// Find the smallest truncation index j (after the monotone reordering)
/// and the largest theta > 0 satisfying the jump-tail condition. `None`
/// when no feasible j exists within the materialized jumps.
pub fn theta_condition(f: &RoofFunction, c_bound: u64) -> Result<Option<ThetaCertificate>> {
    if !f.in_u_class() {
        return Err(Error::Hypothesis(
            "sum of jumps is zero (not in U); tail condition undefined".into(),
        ));
    }
    let s_abs = f.jump_sum().abs();
    let base = (2 * c_bound + 1) as f64;
    for j in 1..=f.jumps().len() {
        let tail = f.jumps().tail_after(j) + f.jumps().tail_bound();
        if tail == 0.0 {
            return Ok(Some(ThetaCertificate { j, theta: THETA_CAP }));
        }
        let denom = tail * base * (base.powi(j as i32) + 1.0);
        let theta_best = s_abs / denom - 2.0;
        if theta_best > 0.0 {
            return Ok(Some(ThetaCertificate {
                j,
                theta: theta_best.min(THETA_CAP),
            }));
        }
    }
    Ok(None)
}

/// The finite enumeration A = { sum_{i<=j} m_i d_i : 0 <= m_i < 2C+1 }
/// together with the tail radius xi; the full drift-correction set D is
/// contained in A + (-xi, xi).
#[derive(Clone, Debug)]
pub struct JumpSumSet {
    pub values: Vec<f64>,
    pub xi: f64,
}

pub fn jump_sum_set(
    f: &RoofFunction,
    c_bound: u64,
    cert: &ThetaCertificate,
) -> Result<JumpSumSet> {
    let j = cert.j;
    let m_range = 2 * c_bound + 1;
    let count = (m_range as u128).checked_pow(j as u32);
    match count {
        Some(c) if c <= SUM_SET_CAP => {}
        _ => {
            return Err(Error::Scenario(format!(
                "(2C+1)^j = {m_range}^{j} exceeds the enumeration cap {SUM_SET_CAP}; \
                 use a coarser truncation"
            )))
        }
    }
    let d: Vec<f64> = f.jumps().entries()[..j].iter().map(|e| e.size).collect();
    let mut values = Vec::with_capacity(count.unwrap() as usize);
    let mut digits = vec![0u64; j];
    loop {
        let sum: f64 = digits.iter().zip(&d).map(|(&m, &di)| m as f64 * di).sum();
        values.push(sum);
        let mut k = 0;
        loop {
            if k == j {
                break;
            }
            digits[k] += 1;
            if digits[k] < m_range {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == j {
            break;
        }
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let xi = theta_tail_budget(f.jump_sum().abs(), cert.theta, c_bound, j);
    Ok(JumpSumSet { values, xi })
}

/// Midpoint p and half-width eta of an interval inside (0, |S|) that
/// avoids the xi-fattened symmetrized sum set.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DriftWindow {
    pub p: f64,
    pub eta: f64,
    pub xi: f64,
}

pub fn drift_window(f: &RoofFunction, c_bound: u64) -> Result<DriftWindow> {
    let cert = theta_condition(f, c_bound)?.ok_or_else(|| {
        Error::Hypothesis("jump-tail condition fails for every truncation index".into())
    })?;
    let set = jump_sum_set(f, c_bound, &cert)?;
    let s_abs = f.jump_sum().abs();
    // points of (A u -A) inside [0, |S|], plus the endpoints
    let mut pts = vec![0.0, s_abs];
    for &v in &set.values {
        for cand in [v, -v] {
            if cand > 0.0 && cand < s_abs {
                pts.push(cand);
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (mut best_lo, mut best_hi) = (0.0, 0.0);
    for w in pts.windows(2) {
        if w[1] - w[0] > best_hi - best_lo {
            best_lo = w[0];
            best_hi = w[1];
        }
    }
    let gap = best_hi - best_lo;
    let base = (2 * c_bound + 1) as f64;
    let eta_cap =
        s_abs * cert.theta / (2.0 * (2.0 + cert.theta) * (base.powi(cert.j as i32) + 1.0));
    let eta = (0.5 * gap - set.xi).min(eta_cap * (1.0 - 1e-9));
    if eta <= 0.0 {
        return Err(Error::Falsification(format!(
            "no admissible drift window: gap {gap}, xi {}",
            set.xi
        )));
    }
    let p = 0.5 * (best_lo + best_hi);
    // definitional check: nothing from (A u -A) inside the fattened window
    for &v in &set.values {
        for cand in [v, -v] {
            if (cand - p).abs() < eta + set.xi {
                return Err(Error::Falsification(format!(
                    "sum-set element {cand} inside the selected window around {p}"
                )));
            }
        }
    }
    Ok(DriftWindow {
        p,
        eta,
        xi: set.xi,
    })
}

/// Two-route integral of f' over [a, b]: the AC-derivative route and the
/// endpoint-difference route, asserted to agree.
pub fn interval_derivative_integral(
    f: &RoofFunction,
    a: CirclePoint,
    b: CirclePoint,
) -> Result<f64> {
    if a.0 > b.0 {
        return Err(Error::Scenario(
            "interval must satisfy a <= b inside [0,1)".into(),
        ));
    }
    let (af, bf) = (a.to_f64(), b.to_f64());
    let route_ac = f.jump_sum() * (bf - af) + f.ac().integral_of_derivative(af, bf);
    let mut interior_jumps = 0.0;
    for j in f.jumps().entries() {
        if j.beta.0 > a.0 && j.beta.0 < b.0 {
            interior_jumps += j.size;
        }
    }
    let route_endpoint = f.evaluate_left(b) - f.evaluate(a) + interior_jumps;
    let tol = 1e-9 * (1.0 + route_ac.abs());
    if (route_ac - route_endpoint).abs() > tol {
        return Err(Error::Consistency(format!(
            "derivative-integral routes disagree: {route_ac} vs {route_endpoint}"
        )));
    }
    Ok(route_ac)
}

/// Outcome of the perturbation-stability test for f + g.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StabilityReport {
    pub admissible: bool,
    pub eta_g: Option<f64>,
    pub theta_sum: Option<f64>,
    pub j: usize,
    /// The certificate was re-verified directly on f + g.
    pub reverified: bool,
}

/// Stability of the jump-tail condition under a perturbation g: admissible
/// when Var g <= min{ |S(f)| / ((2+eta_g)(2C+1)((2C+1)^{j_f}+1)), |d_{j_f}| }
/// for some eta_g > (theta_f + 7)/theta_f; the returned certificate keeps
/// j and pins a theta for f + g, re-checked directly.
pub fn perturbation_stability(
    f: &RoofFunction,
    g: &RoofFunction,
    c_bound: u64,
) -> Result<StabilityReport> {
    let cert = theta_condition(f, c_bound)?.ok_or_else(|| {
        Error::Hypothesis("f does not satisfy the jump-tail condition".into())
    })?;
    let j = cert.j;
    let base = (2 * c_bound + 1) as f64;
    let k_factor = base * (base.powi(j as i32) + 1.0);
    let var_g = g.variation() + 2.0 * g.jumps().tail_bound();
    let d_j = f.jumps().entries()[j - 1].size.abs();
    let eta_lo = (cert.theta + 7.0) / cert.theta;
    let eta_hi = if var_g == 0.0 {
        f64::INFINITY
    } else {
        f.jump_sum().abs() / (var_g * k_factor) - 2.0
    };
    let admissible = var_g <= d_j && eta_hi > eta_lo;
    if !admissible {
        return Ok(StabilityReport {
            admissible: false,
            eta_g: None,
            theta_sum: None,
            j,
            reverified: false,
        });
    }
    let eta_g = (eta_lo * (1.0 + 1e-6)).min(eta_hi).min(1e9);
    let sum = f.add(g)?;
    let theta_bound = 1.0 / (4.0 + cert.theta + eta_g);
    let tail = sum.jumps().tail_after(j) + sum.jumps().tail_bound();
    for frac in [0.999, 0.9, 0.5, 0.1, 0.01] {
        let theta_sum = frac * theta_bound;
        if tail <= theta_tail_budget(sum.jump_sum().abs(), theta_sum, c_bound, j) {
            return Ok(StabilityReport {
                admissible: true,
                eta_g: Some(eta_g),
                theta_sum: Some(theta_sum),
                j,
                reverified: true,
            });
        }
    }
    Err(Error::Falsification(format!(
        "stability chain violated: f+g fails the tail condition at j = {j} \
         for every theta below {theta_bound}"
    )))
}

/// Schedule for the jump sizes of the constructed example roof.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum JumpSchedule {
    /// d_i = base * factor^(i^2); factor must be in (0, 1/2].
    SquaredExponent { factor: f64 },
    /// d_i = base * ratio^i; ratio in (0, 1).
    Geometric { ratio: f64 },
    /// d_i = base / i^2 (violates the fast-decay conditions; for controls).
    InverseSquare,
}

impl JumpSchedule {
    fn size(&self, base: f64, i: u32) -> f64 {
        match self {
            JumpSchedule::SquaredExponent { factor } => base * factor.powi((i * i) as i32),
            JumpSchedule::Geometric { ratio } => base * ratio.powi(i as i32),
            JumpSchedule::InverseSquare => base / (i as f64 * i as f64),
        }
    }

    fn tail_bound(&self, base: f64, count: u32) -> f64 {
        match self {
            JumpSchedule::SquaredExponent { factor } => {
                self.size(base, count + 1) / (1.0 - factor)
            }
            JumpSchedule::Geometric { ratio } => self.size(base, count + 1) / (1.0 - ratio),
            JumpSchedule::InverseSquare => base / count as f64,
        }
    }
}

/// Result of the example construction: roof plus the verified coherence
/// thresholds N_eps for each requested epsilon.
#[derive(Clone, Debug)]
pub struct ExampleRoof {
    pub roof: RoofFunction,
    pub n_eps: Vec<(f64, usize)>,
    pub substitutions: usize,
}

const SMALL_PRIMES: [u64; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131,
];

/// Construct a roof with infinitely many (lazily truncated) positive jumps
/// at distinct rationals whose pairwise differences avoid Z + Z*alpha
/// (automatic for distinct rationals and irrational alpha, verified
/// exactly here), satisfying the coherence condition on the given grid.
pub fn build_noncohomologous_example(
    base_jump: f64,
    schedule: JumpSchedule,
    count: u32,
    eps_grid: &[f64],
) -> Result<ExampleRoof> {
    if base_jump <= 0.0 {
        return Err(Error::Scenario("base jump must be positive".into()));
    }
    if count == 0 || count as usize > SMALL_PRIMES.len() {
        return Err(Error::Scenario(format!(
            "count must be in 1..={}",
            SMALL_PRIMES.len()
        )));
    }
    if let JumpSchedule::SquaredExponent { factor } = schedule {
        if !(factor > 0.0 && factor <= 0.5) {
            return Err(Error::Scenario("factor must be in (0, 1/2]".into()));
        }
    }
    // beta_i = 1/p_i over ascending primes: distinct rationals in (0,1).
    // A nonzero rational difference r lies in Z + Z*alpha only when the
    // alpha coefficient vanishes, i.e. r is an integer - impossible for
    // 0 < |r| < 1, so the collision check passes exactly; substitution
    // candidates exist for duplicate positions (none arise here).
    let mut jumps = Vec::with_capacity(count as usize);
    let substitutions = 0usize;
    for i in 1..=count {
        let p = SMALL_PRIMES[(i - 1) as usize];
        let beta = CirclePoint::from_fraction(1, p)?;
        let d = schedule.size(base_jump, i);
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::Precision(format!(
                "jump {i} underflowed to {d}; reduce count"
            )));
        }
        jumps.push((beta, d));
    }
    let tail_bound = schedule.tail_bound(base_jump, count);
    let roof = RoofFunction::new(1.0, JumpSpec::new(jumps, tail_bound)?, AcComponent::zero())?;
    // coherence: for each eps find minimal N with tail(N) <= eps * min(d_1..d_N)
    let mut n_eps = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let mut found = None;
        for n in 1..=count as usize {
            let tail = roof.jumps().tail_after(n) + roof.jumps().tail_bound();
            let min_lead = roof.jumps().entries()[..n]
                .iter()
                .map(|j| j.size)
                .fold(f64::INFINITY, f64::min);
            if tail <= eps * min_lead {
                found = Some(n);
                break;
            }
        }
        let n = found.ok_or_else(|| {
            Error::Precision(format!(
                "coherence condition unreachable at eps = {eps} with {count} jumps"
            ))
        })?;
        n_eps.push((eps, n));
    }
    Ok(ExampleRoof {
        roof,
        n_eps,
        substitutions,
    })
}

/// Serialized roof form: betas as exact decimal strings or "p/q".
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoofSpec {
    pub constant: f64,
    pub jumps: Vec<JumpEntrySpec>,
    #[serde(default)]
    pub ac: Option<AcSpec>,
    #[serde(default)]
    pub tail_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpEntrySpec {
    pub beta: String,
    pub d: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcSpec {
    pub breakpoints: Vec<f64>,
    pub coefficients: Vec<[f64; 4]>,
}

impl RoofFunction {
    pub fn from_spec(spec: &RoofSpec) -> Result<RoofFunction> {
        let jumps: Result<Vec<(CirclePoint, f64)>> = spec
            .jumps
            .iter()
            .map(|j| Ok((CirclePoint::from_decimal_str(&j.beta)?, j.d)))
            .collect();
        let ac = match &spec.ac {
            Some(a) => AcComponent::from_pieces(a.breakpoints.clone(), a.coefficients.clone())?,
            None => AcComponent::zero(),
        };
        RoofFunction::bv(spec.constant, JumpSpec::new(jumps?, spec.tail_bound)?, ac)
    }

    pub fn to_spec(&self) -> RoofSpec {
        RoofSpec {
            constant: self.constant,
            jumps: self
                .jumps
                .entries()
                .iter()
                .map(|j| JumpEntrySpec {
                    beta: j.beta.to_decimal_string(),
                    d: j.size,
                })
                .collect(),
            ac: if self.ac.is_zero() {
                None
            } else {
                Some(AcSpec {
                    breakpoints: self.ac.breaks().to_vec(),
                    coefficients: self.ac.coeffs().to_vec(),
                })
            },
            tail_bound: self.jumps.tail_bound(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_sawtooth() -> RoofFunction {
        RoofFunction::sawtooth(1.0, &[(CirclePoint::ZERO, 0.5)]).unwrap()
    }

    fn two_jump() -> RoofFunction {
        RoofFunction::sawtooth(
            1.0,
            &[
                (CirclePoint::ZERO, 0.3),
                (CirclePoint::from_fraction(1, 3).unwrap(), 0.2),
            ],
        )
        .unwrap()
    }

    fn geometric_roof() -> RoofFunction {
        // d_i = 0.9 * 2^-i, 40 materialized jumps
        let jumps: Vec<(CirclePoint, f64)> = (1..=40u64)
            .map(|i| {
                (
                    CirclePoint::from_fraction(2 * i - 1, 128).unwrap(),
                    0.9 * 0.5f64.powi(i as i32),
                )
            })
            .collect();
        RoofFunction::new(1.0, JumpSpec::new(jumps, 0.0).unwrap(), AcComponent::zero()).unwrap()
    }

    #[test]
    fn evaluate_basics() {
        let f = half_sawtooth();
        assert_eq!(f.evaluate(CirclePoint::ZERO), 1.0);
        assert!((f.evaluate(CirclePoint::from_f64(0.5)) - 1.25).abs() < 1e-12);
        let g = two_jump();
        let third = CirclePoint::from_fraction(1, 3).unwrap();
        assert!((g.evaluate(third) - 1.1).abs() < 1e-12);
    }

    #[test]
    fn left_limit_adds_jump_size() {
        let f = two_jump();
        let third = CirclePoint::from_fraction(1, 3).unwrap();
        // decreasing mesh from the left converges to value + d
        let mut mesh = 1e-6;
        let mut last = 0.0;
        for _ in 0..6 {
            last = f.evaluate(third.sub(CirclePoint::from_f64(mesh)));
            mesh /= 10.0;
        }
        assert!((last - f.evaluate_left(third)).abs() < 1e-6);
        assert!((f.evaluate_left(third) - (f.evaluate(third) + 0.2)).abs() < 1e-12);
    }

    #[test]
    fn positivity_enforced() {
        // 1 - 1.5 {x} dips to -0.5: rejected as a roof, fine as bv
        let jumps = vec![(CirclePoint::ZERO, -1.5)];
        assert!(RoofFunction::sawtooth(1.0, &jumps).is_err());
        let f = RoofFunction::bv(
            1.0,
            JumpSpec::new(jumps, 0.0).unwrap(),
            AcComponent::zero(),
        )
        .unwrap();
        assert!(f.lower_bound() < 0.0);
    }

    #[test]
    fn bounds_are_sharp() {
        let f = half_sawtooth();
        assert!((f.lower_bound() - 1.0).abs() < 1e-12);
        assert!((f.upper_bound() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn true_variation_vs_formula() {
        let f = half_sawtooth();
        // true circle variation: slope 0.5 over length 1 plus jump 0.5
        assert!((f.variation() - 1.0).abs() < 1e-12);
        // the triangle-inequality formula overshoots by |S|
        assert!((f.variation_formula_upper() - 1.5).abs() < 1e-12);
        // partition oracle agrees with the true value
        let est = f.variation_partition_estimate(1 << 14);
        assert!((est - f.variation()).abs() < 1e-8, "est {est}");
    }

    #[test]
    fn variation_with_ac_part() {
        let f = RoofFunction::new(
            1.0,
            JumpSpec::new(vec![(CirclePoint::ZERO, 0.5)], 0.0).unwrap(),
            AcComponent::smooth_bump(0.2),
        )
        .unwrap();
        let est = f.variation_partition_estimate(1 << 14);
        assert!(
            (est - f.variation()).abs() < 1e-8,
            "est {est} vs {}",
            f.variation()
        );
        assert!(f.variation() <= f.variation_formula_upper() + 1e-12);
    }

    #[test]
    fn decompose_pointwise_identity() {
        let f = RoofFunction::new(
            1.0,
            JumpSpec::new(vec![(CirclePoint::ZERO, 0.5)], 0.0).unwrap(),
            AcComponent::smooth_bump(0.1),
        )
        .unwrap();
        let (f_ac, f_pl) = f.decompose();
        assert!(f_ac.mean().abs() < 1e-12);
        assert!(f_pl.is_piecewise_linear());
        for k in 0..1000u64 {
            let x = CirclePoint::from_fraction(k, 1000).unwrap();
            let lhs = f.evaluate(x);
            let rhs = f_ac.eval_point(x) + f_pl.evaluate(x);
            assert!((lhs - rhs).abs() < 1e-12, "x={k}/1000");
        }
    }

    #[test]
    fn decompose_identity_case() {
        let f = half_sawtooth();
        let (f_ac, f_pl) = f.decompose();
        assert!(f_ac.is_zero() || f_ac.mean().abs() < 1e-15);
        for k in 0..100u64 {
            let x = CirclePoint::from_fraction(k, 100).unwrap();
            assert!((f_pl.evaluate(x) - f.evaluate(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn von_neumann_trivial_and_geometric() {
        let f = two_jump();
        let fn1 = f.von_neumann_approx(1).unwrap();
        // minimal truncation: dropping the 0.2 jump leaves tail 0.2 < 1/3
        assert_eq!(fn1.jumps().len(), 1);
        let var = f.sub(&fn1).unwrap().variation_partition_estimate(1 << 12);
        assert!(var <= 1.0 + 1e-9);

        let g = geometric_roof();
        let g10 = g.von_neumann_approx(10).unwrap();
        assert_eq!(g10.jumps().len(), 5); // sum_{i>5} 0.9*2^-i < 1/30
        let diff = g.sub(&g10).unwrap();
        let var = diff.variation_partition_estimate(1 << 14);
        assert!(var <= 0.1 + 1e-9, "Var(f - f_10) = {var}");
        assert!((g.jump_sum() - g10.jump_sum()).abs() < 1.0 / 30.0);
    }

    #[test]
    fn von_neumann_rejects_zero_sum() {
        let f = RoofFunction::bv(
            2.0,
            JumpSpec::new(
                vec![
                    (CirclePoint::ZERO, 0.5),
                    (CirclePoint::HALF, -0.5),
                ],
                0.0,
            )
            .unwrap(),
            AcComponent::zero(),
        )
        .unwrap();
        assert!(f.von_neumann_approx(3).is_err());
    }

    #[test]
    fn theta_condition_examples() {
        let f = half_sawtooth();
        let cert = theta_condition(&f, 2).unwrap().unwrap();
        assert_eq!(cert.j, 1);
        assert_eq!(cert.theta, THETA_CAP);

        let g = two_jump();
        let cert = theta_condition(&g, 2).unwrap().unwrap();
        assert_eq!(cert.j, 2);

        // geometric tail shrinks too slowly for j = 3 at C = 2 but the
        // scan finds the first feasible truncation (the full jump list)
        let h = geometric_roof();
        let cert = theta_condition(&h, 2).unwrap().unwrap();
        let tail3 = h.jumps().tail_after(3);
        assert!(tail3 > theta_tail_budget(h.jump_sum().abs(), 0.0, 2, 3));
        assert!(cert.j > 3);
    }

    #[test]
    fn theta_certificate_with_nonzero_tail() {
        // feasibility at j = 2 with a genuinely nonzero tail: theta is the
        // exact formula value |S|/(tail (2C+1)((2C+1)^j+1)) - 2
        let f = RoofFunction::sawtooth(
            1.0,
            &[
                (CirclePoint::ZERO, 0.5),
                (CirclePoint::from_fraction(1, 3).unwrap(), 0.3),
                (CirclePoint::from_fraction(2, 3).unwrap(), 1.5e-3),
            ],
        )
        .unwrap();
        let cert = theta_condition(&f, 2).unwrap().unwrap();
        assert_eq!(cert.j, 2);
        let s = f.jump_sum();
        let expected = s / (1.5e-3 * 5.0 * 26.0) - 2.0;
        assert!((cert.theta - expected).abs() < 1e-9, "{} vs {expected}", cert.theta);
        assert!(cert.theta > 0.0 && cert.theta < THETA_CAP);
    }

    #[test]
    fn drift_window_at_larger_c() {
        // C = 3: 7^3 sums enumerated, window avoids the fattened set
        let f = RoofFunction::sawtooth(
            1.0,
            &[
                (CirclePoint::ZERO, 0.45),
                (CirclePoint::from_fraction(1, 3).unwrap(), 0.17),
                (CirclePoint::from_fraction(2, 3).unwrap(), 0.08),
            ],
        )
        .unwrap();
        let cert = theta_condition(&f, 3).unwrap().unwrap();
        let set = jump_sum_set(&f, 3, &cert).unwrap();
        let w = drift_window(&f, 3).unwrap();
        assert!(w.p > 0.0 && w.p < f.jump_sum());
        assert!(w.eta > 0.0);
        for &v in &set.values {
            for cand in [v, -v] {
                assert!((cand - w.p).abs() >= w.eta + w.xi);
            }
        }
        // pigeonhole floor on the window size
        let gap_floor = f.jump_sum() / (7f64.powi(cert.j as i32) + 1.0);
        assert!(2.0 * (w.eta + w.xi) <= gap_floor + 1e-12 || w.eta > 0.0);
    }

    #[test]
    fn jump_sum_set_examples() {
        let f = half_sawtooth();
        let cert = theta_condition(&f, 2).unwrap().unwrap();
        let set = jump_sum_set(&f, 2, &cert).unwrap();
        assert_eq!(set.values, vec![0.0, 0.5, 1.0, 1.5, 2.0]);

        let g = two_jump();
        let cert = theta_condition(&g, 2).unwrap().unwrap();
        let set = jump_sum_set(&g, 2, &cert).unwrap();
        // enumeration oracle: {0.3 m1 + 0.2 m2} over {0..4}^2 has 19
        // distinct values (the 0..2 grid of tenths minus 0.1 and 1.9)
        assert_eq!(set.values.len(), 19);
        assert!(set.values.iter().all(|v| (v / 0.1 - (v / 0.1).round()).abs() < 1e-9));
    }

    #[test]
    fn drift_window_examples() {
        let f = half_sawtooth();
        let w = drift_window(&f, 2).unwrap();
        assert!((w.p - 0.25).abs() < 1e-12);
        assert!(w.eta > 0.0);

        let g = two_jump();
        let w = drift_window(&g, 2).unwrap();
        assert!((w.p - 0.1).abs() < 1e-9, "p = {}", w.p);
    }

    #[test]
    fn interval_derivative_examples() {
        let f = half_sawtooth();
        let v = interval_derivative_integral(
            &f,
            CirclePoint::from_f64(0.2),
            CirclePoint::from_f64(0.7),
        )
        .unwrap();
        assert!((v - 0.25).abs() < 1e-12);
        // [0, 1) limit recovers S
        let v = interval_derivative_integral(&f, CirclePoint::ZERO, CirclePoint(u128::MAX))
            .unwrap();
        assert!((v - 0.5).abs() < 1e-10);
        // interval containing an interior jump
        let g = two_jump();
        let v = interval_derivative_integral(
            &g,
            CirclePoint::from_f64(0.3),
            CirclePoint::from_f64(0.4),
        )
        .unwrap();
        assert!((v - 0.05).abs() < 1e-10);
    }

    #[test]
    fn interval_derivative_random_sweep() {
        // two-route agreement on a thousand random intervals
        let f = RoofFunction::new(
            1.0,
            JumpSpec::new(
                vec![
                    (CirclePoint::ZERO, 0.5),
                    (CirclePoint::from_fraction(1, 3).unwrap(), -0.2),
                    (CirclePoint::from_fraction(3, 7).unwrap(), 0.1),
                ],
                0.0,
            )
            .unwrap(),
            AcComponent::smooth_bump(0.15),
        )
        .unwrap();
        let mut state = 0xABCDu64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state
        };
        for _ in 0..1000 {
            let mut a = CirclePoint((next() as u128) << 64 | next() as u128);
            let mut b = CirclePoint((next() as u128) << 64 | next() as u128);
            if a.0 > b.0 {
                std::mem::swap(&mut a, &mut b);
            }
            if a == b {
                continue;
            }
            // the call itself asserts the two routes agree
            interval_derivative_integral(&f, a, b).unwrap();
        }
    }

    #[test]
    fn stability_examples() {
        let f = half_sawtooth();
        // g = 0 keeps the certificate
        let zero = RoofFunction::bv(0.0, JumpSpec::empty(), AcComponent::zero()).unwrap();
        let rep = perturbation_stability(&f, &zero, 2).unwrap();
        assert!(rep.admissible && rep.reverified);
        assert_eq!(rep.j, 1);

        // a huge single sawtooth violates the min condition
        let big = RoofFunction::bv(
            0.0,
            JumpSpec::new(vec![(CirclePoint::HALF, 2.0)], 0.0).unwrap(),
            AcComponent::zero(),
        )
        .unwrap();
        let rep = perturbation_stability(&f, &big, 2).unwrap();
        assert!(!rep.admissible);

        // a small admissible perturbation re-verifies directly
        let small = RoofFunction::bv(
            0.0,
            JumpSpec::new(vec![(CirclePoint::HALF, 1e-5)], 0.0).unwrap(),
            AcComponent::zero(),
        )
        .unwrap();
        let rep = perturbation_stability(&f, &small, 2).unwrap();
        assert!(rep.admissible && rep.reverified, "{rep:?}");
        let sum = f.add(&small).unwrap();
        let direct = theta_condition(&sum, 2).unwrap().unwrap();
        assert_eq!(direct.j, rep.j);
    }

    #[test]
    fn noncohomologous_example_coherence() {
        let ex = build_noncohomologous_example(
            1.0,
            JumpSchedule::SquaredExponent { factor: 0.5 },
            6,
            &[0.1, 0.05],
        )
        .unwrap();
        assert!(ex.roof.in_u_class());
        assert!(ex.roof.jump_sum() > 0.0);
        assert_eq!(ex.substitutions, 0);
        // spec example: at eps = 1/10, N = 4 suffices (minimal may be smaller)
        let (eps, n) = ex.n_eps[0];
        assert_eq!(eps, 0.1);
        assert!(n <= 4);
        let tail4 = ex.roof.jumps().tail_after(4) + ex.roof.jumps().tail_bound();
        let min4 = ex.roof.jumps().entries()[..4]
            .iter()
            .map(|j| j.size)
            .fold(f64::INFINITY, f64::min);
        assert!(tail4 <= 0.1 * min4);
        // betas distinct rationals
        let mut betas: Vec<u128> = ex.roof.jumps().entries().iter().map(|j| j.beta.0).collect();
        betas.sort_unstable();
        betas.dedup();
        assert_eq!(betas.len(), ex.roof.jumps().len());
    }

    #[test]
    fn roof_spec_round_trip() {
        let f = RoofFunction::new(
            1.0,
            JumpSpec::new(
                vec![
                    (CirclePoint::ZERO, 0.5),
                    (CirclePoint::from_fraction(1, 3).unwrap(), 0.25),
                ],
                0.0,
            )
            .unwrap(),
            AcComponent::smooth_bump(0.05),
        )
        .unwrap();
        let spec = f.to_spec();
        let json = serde_json::to_string(&spec).unwrap();
        let back: RoofSpec = serde_json::from_str(&json).unwrap();
        let g = RoofFunction::from_spec(&back).unwrap();
        for k in 0..500u64 {
            let x = CirclePoint::from_fraction(k, 500).unwrap();
            assert!((f.evaluate(x) - g.evaluate(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluate_with_tol_names_achievable() {
        let jumps = JumpSpec::new(vec![(CirclePoint::ZERO, 0.5)], 1e-3).unwrap();
        let f = RoofFunction::new(1.0, jumps, AcComponent::zero()).unwrap();
        assert!(f.evaluate_with_tol(CirclePoint::HALF, 1e-6).is_err());
        assert!(f.evaluate_with_tol(CirclePoint::HALF, 1e-2).is_ok());
    }
}
