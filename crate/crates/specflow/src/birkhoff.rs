//! Birkhoff cocycle sums over the rotation, the special flow they drive,
//! Denjoy–Koksma residuals, orbit hit counting, and the drift identity
//! that ties jump counts to cocycle differences.
//!
//! Sums use compensated (Kahan) accumulation over exact 128-bit orbit
//! positions, with a running error bound carried by the ledger; the
//! default cap on |n| is 10^6.

use serde::{Deserialize, Serialize};

use crate::cf::ContinuedFraction;
use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::roof::{AcComponent, RoofFunction};

/// Default cap on cocycle indices.
pub const BIRKHOFF_CAP: u64 = 1_000_000;

/// Orbit hits within 2^-80 of an arc endpoint are flagged, not resolved.
pub const BOUNDARY_ULPS: u128 = 1u128 << 48; // 2^-80 in 2^-128 ulps

/// A point (x, s) of the space under the roof: 0 <= s < f(x).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialFlowPoint {
    pub x: CirclePoint,
    pub s: f64,
}

/// Incremental cache of f^(n)(x) for one base point, both directions.
pub struct BirkhoffLedger<'a> {
    f: &'a RoofFunction,
    alpha: CirclePoint,
    x: CirclePoint,
    /// forward[n] = f^(n)(x), n >= 0
    forward: Vec<f64>,
    fwd_comp: f64,
    /// backward[m] = f^(-m)(x), m >= 0
    backward: Vec<f64>,
    bwd_comp: f64,
    err_bound: f64,
    cap: u64,
}

impl<'a> BirkhoffLedger<'a> {
    pub fn new(f: &'a RoofFunction, alpha: CirclePoint, x: CirclePoint) -> BirkhoffLedger<'a> {
        BirkhoffLedger {
            f,
            alpha,
            x,
            forward: vec![0.0],
            fwd_comp: 0.0,
            backward: vec![0.0],
            bwd_comp: 0.0,
            err_bound: 0.0,
            cap: BIRKHOFF_CAP,
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn base_point(&self) -> CirclePoint {
        self.x
    }

    /// Accumulated floating-point error bound for the cached sums.
    pub fn err_bound(&self) -> f64 {
        self.err_bound
    }

    /// f^(n)(x) by the three-branch cocycle definition.
    pub fn value(&mut self, n: i64) -> Result<f64> {
        if n.unsigned_abs() > self.cap {
            return Err(Error::Precision(format!(
                "cocycle index {n} beyond the achievable cap {}",
                self.cap
            )));
        }
        if n >= 0 {
            let n = n as usize;
            while self.forward.len() <= n {
                let k = (self.forward.len() - 1) as u64;
                let pos = self.x.add(self.alpha.mul_int(k));
                let term = self.f.evaluate(pos);
                let sum = *self.forward.last().unwrap();
                // Kahan step
                let y = term - self.fwd_comp;
                let t = sum + y;
                self.fwd_comp = (t - sum) - y;
                self.forward.push(t);
                self.err_bound += (term.abs() + t.abs()) * f64::EPSILON;
            }
            Ok(self.forward[n])
        } else {
            let m = (-n) as usize;
            while self.backward.len() <= m {
                let k = self.backward.len() as u64;
                // f^(-k)(x) = -( f(x - k a) + ... + f(x - a) )
                let pos = self.x.sub(self.alpha.mul_int(k));
                let term = self.f.evaluate(pos);
                let sum = *self.backward.last().unwrap();
                let y = -term - self.bwd_comp;
                let t = sum + y;
                self.bwd_comp = (t - sum) - y;
                self.backward.push(t);
                self.err_bound += (term.abs() + t.abs()) * f64::EPSILON;
            }
            Ok(self.backward[m])
        }
    }
}

/// One-shot cocycle value f^(n)(x).
pub fn birkhoff_sum(
    f: &RoofFunction,
    cf: &ContinuedFraction,
    x: CirclePoint,
    n: i64,
) -> Result<f64> {
    BirkhoffLedger::new(f, cf.alpha(), x).value(n)
}

/// Move (x, s) by time t through the special flow: unit vertical speed
/// with (x, f(x)) glued to (Tx, 0).
pub fn flow_map(
    f: &RoofFunction,
    cf: &ContinuedFraction,
    pt: SpecialFlowPoint,
    t: f64,
) -> Result<SpecialFlowPoint> {
    if f.lower_bound() <= 0.0 {
        return Err(Error::Hypothesis("flow needs a strictly positive roof".into()));
    }
    if !(pt.s >= 0.0 && pt.s < f.evaluate(pt.x) + 1e-12) {
        return Err(Error::Scenario(format!(
            "point height {} outside [0, f(x) = {})",
            pt.s,
            f.evaluate(pt.x)
        )));
    }
    if t.abs() > BIRKHOFF_CAP as f64 * f.lower_bound() {
        return Err(Error::Precision(format!(
            "time {t} beyond the cap {} * m",
            BIRKHOFF_CAP
        )));
    }
    let target = pt.s + t;
    let mut ledger = BirkhoffLedger::new(f, cf.alpha(), pt.x);
    // unique n with f^(n)(x) <= target < f^(n+1)(x)
    let mut n: i64 = (target / f.upper_bound()).floor() as i64 - 1;
    while ledger.value(n)? > target {
        n -= 1;
    }
    while ledger.value(n + 1)? <= target {
        n += 1;
    }
    let base = ledger.value(n)?;
    Ok(SpecialFlowPoint {
        x: pt.x.add_signed(cf.alpha(), n),
        s: target - base,
    })
}

/// |f^(q_n)(x) - q_n * mean(f)|; bounded by Var f by Denjoy-Koksma.
pub fn denjoy_koksma_residual(
    f: &RoofFunction,
    cf: &ContinuedFraction,
    x: CirclePoint,
    n_index: usize,
) -> Result<f64> {
    let q = cf.denominator(n_index)?;
    let sum = birkhoff_sum(f, cf, x, q as i64)?;
    Ok((sum - q as f64 * f.integral_mean()).abs())
}

/// Result of counting orbit hits in a half-open arc.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HitCount {
    pub count: u64,
    /// Some hit landed within 2^-80 of an arc endpoint.
    pub boundary_critical: bool,
}

/// #{ 0 <= j < n : {beta - j alpha} in (x, y] }, arc taken in positive
/// orientation from x (x excluded, y included).
pub fn jump_hit_count(
    alpha: CirclePoint,
    beta: CirclePoint,
    x: CirclePoint,
    y: CirclePoint,
    n: u64,
) -> Result<HitCount> {
    if x == y {
        return Err(Error::Scenario("arc endpoints must differ".into()));
    }
    if n > BIRKHOFF_CAP {
        return Err(Error::Precision(format!("n beyond cap {BIRKHOFF_CAP}")));
    }
    let mut count = 0u64;
    let mut boundary = false;
    let mut pos = beta;
    for _ in 0..n {
        if pos.in_arc(x, y) {
            count += 1;
        }
        if pos.near_arc_boundary(x, y, BOUNDARY_ULPS) {
            boundary = true;
        }
        pos = pos.sub(alpha);
    }
    Ok(HitCount {
        count,
        boundary_critical: boundary,
    })
}

/// Two routes through the drift identity
/// f_pl^(n)(y) - f_pl^(n)(x) = n S (y - x) - dbar_n.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DriftIdentity {
    pub lhs: f64,
    pub linear_term: f64,
    pub dbar: f64,
    pub boundary_critical: bool,
}

/// Evaluate both sides of the drift identity for a piecewise-linear roof;
/// errors if they disagree beyond the float/tail tolerance. The arc (x, y]
/// and the difference y - x are taken in positive orientation from x.
pub fn drift_identity(
    f_pl: &RoofFunction,
    cf: &ContinuedFraction,
    x: CirclePoint,
    y: CirclePoint,
    n: u64,
) -> Result<DriftIdentity> {
    if !f_pl.is_piecewise_linear() {
        return Err(Error::Scenario(
            "drift identity applies to the piecewise-linear part; decompose first".into(),
        ));
    }
    if x == y {
        return Err(Error::Scenario("x and y must differ".into()));
    }
    let alpha = cf.alpha();
    let mut ly = BirkhoffLedger::new(f_pl, alpha, y);
    let mut lx = BirkhoffLedger::new(f_pl, alpha, x);
    let lhs = ly.value(n as i64)? - lx.value(n as i64)?;
    let delta = crate::circle::ulps_to_f64(y.arc_from(x));
    let linear_term = n as f64 * f_pl.jump_sum() * delta;
    let mut dbar = 0.0;
    let mut boundary = false;
    for j in f_pl.jumps().entries() {
        let hits = jump_hit_count(alpha, j.beta, x, y, n)?;
        dbar += hits.count as f64 * j.size;
        boundary |= hits.boundary_critical;
    }
    let float_tol = 1e-9 * (1.0 + lhs.abs().max(linear_term.abs()))
        + ly.err_bound()
        + lx.err_bound();
    let tail_tol = f_pl.jumps().tail_bound() * (n as f64 * delta + 2.0);
    if (lhs - (linear_term - dbar)).abs() > float_tol + tail_tol {
        return Err(Error::Consistency(format!(
            "drift identity violated: lhs {lhs}, nS(y-x) - dbar {}",
            linear_term - dbar
        )));
    }
    Ok(DriftIdentity {
        lhs,
        linear_term,
        dbar,
        boundary_critical: boundary,
    })
}

/// Sampled estimate of
/// sup_{0 <= n < q_{s+1}} sup_{||y-x|| < 1/q_s} |ac^(n)(y) - ac^(n)(x)|.
/// A sampled lower estimate of a continuum supremum: used for trends.
pub fn ac_equicontinuity_scan(
    ac: &AcComponent,
    cf: &ContinuedFraction,
    s: usize,
    samples: u64,
) -> Result<f64> {
    let q_s = cf.denominator(s)?;
    let q_s1 = cf.denominator(s + 1)?;
    if q_s1 > BIRKHOFF_CAP {
        return Err(Error::Precision(format!("q_{} beyond cap", s + 1)));
    }
    let alpha = cf.alpha();
    let mut worst = 0.0f64;
    let samples = samples.max(1);
    for i in 0..samples {
        let x = CirclePoint::from_fraction(i, samples)?;
        for frac in [0.999, 0.5, 0.125] {
            let y = x.add(CirclePoint::from_f64(frac / q_s as f64));
            // walk n, tracking the running difference of the two sums
            let mut diff = 0.0;
            let mut comp = 0.0;
            let (mut px, mut py) = (x, y);
            for _ in 0..q_s1 {
                let term = ac.eval_point(py) - ac.eval_point(px);
                let yk = term - comp;
                let t = diff + yk;
                comp = (t - diff) - yk;
                diff = t;
                worst = worst.max(diff.abs());
                px = px.add(alpha);
                py = py.add(alpha);
            }
        }
    }
    Ok(worst)
}
