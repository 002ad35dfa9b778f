//! Weak-mixing and rigidity diagnostics: oscillatory integrals of the
//! cocycle with discontinuity-aligned adaptive quadrature, the explicit
//! integration-by-parts bound chain, return-time rigidity statistics, the
//! tail-decay condition for absence of partial rigidity, and the Birkhoff
//! distribution diagnostic along denominators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cf::ContinuedFraction;
use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::roof::RoofFunction;

/// Phase span (radians) above which a quadrature cell is subdivided.
const PHASE_PER_PART: f64 = 30.0;

/// A complex value with a conservative quadrature error bound.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OscillatoryIntegral {
    pub re: f64,
    pub im: f64,
    pub err_bound: f64,
}

impl OscillatoryIntegral {
    pub fn magnitude(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

fn birkhoff_at(f: &RoofFunction, alpha: CirclePoint, x: CirclePoint, q: u64) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut pos = x;
    for _ in 0..q {
        let term = f.evaluate(pos);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        pos = pos.add(alpha);
    }
    sum
}

/// Integral over the circle of exp(2 pi i r f^(q)(x)), by Gauss-Legendre
/// on a mesh refined at every discontinuity and kink of f^(q), with the
/// per-cell order adapted to the cell phase 2 pi |r| |S| q w. Errors when
/// the internal error estimate exceeds `tol`.
pub fn oscillatory_integral(
    f: &RoofFunction,
    cf: &ContinuedFraction,
    r: f64,
    q: u64,
    tol: f64,
) -> Result<OscillatoryIntegral> {
    if q == 0 {
        return Err(Error::Scenario("q must be >= 1".into()));
    }
    if q > crate::birkhoff::BIRKHOFF_CAP {
        return Err(Error::Precision(format!("q = {q} beyond the cocycle cap")));
    }
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Scenario("r must be nonzero and finite".into()));
    }
    let alpha = cf.alpha();
    // breakpoints of f^(q): discontinuities {beta_i - k alpha} plus the
    // shifted kinks of the AC part
    let mut pts: Vec<u128> = Vec::new();
    for j in f.jumps().entries() {
        let mut p = j.beta;
        for _ in 0..q {
            pts.push(p.0);
            p = p.sub(alpha);
        }
    }
    for &b in f.ac().breaks() {
        if f.ac().is_zero() {
            break;
        }
        let mut p = CirclePoint::from_f64(b);
        for _ in 0..q {
            pts.push(p.0);
            p = p.sub(alpha);
        }
    }
    pts.sort_unstable();
    pts.dedup();
    if pts.is_empty() {
        pts.push(0);
    }

    let two_pi_r = 2.0 * std::f64::consts::PI * r;
    let slope = (q as f64 * f.jump_sum()).abs();
    let (mut re, mut im, mut err) = (0.0f64, 0.0f64, 0.0f64);
    let m = pts.len();
    for i in 0..m {
        let start = CirclePoint(pts[i]);
        let width_ulps = pts[(i + 1) % m].wrapping_sub(pts[i]);
        let w = if m == 1 {
            1.0
        } else {
            crate::circle::ulps_to_f64(width_ulps)
        };
        if w <= 0.0 {
            continue;
        }
        let phase = two_pi_r.abs() * slope * w;
        let parts = (phase / PHASE_PER_PART).ceil().max(1.0) as u64;
        let pw = w / parts as f64;
        let order = ((phase / parts as f64).ceil() as usize + 6).clamp(6, 48);
        for part in 0..parts {
            let a_off = part as f64 * pw;
            let eval_rule = |n: usize| -> (f64, f64) {
                let (nodes, weights) = gauss_legendre(n);
                let (mut sr, mut si) = (0.0, 0.0);
                for (&t, &wt) in nodes.iter().zip(&weights) {
                    let off = a_off + (t + 1.0) * 0.5 * pw;
                    let x = start.add(CirclePoint::from_f64(off));
                    let phase = two_pi_r * birkhoff_at(f, alpha, x, q);
                    sr += wt * phase.cos();
                    si += wt * phase.sin();
                }
                (sr * 0.5 * pw, si * 0.5 * pw)
            };
            let (r1, i1) = eval_rule(order);
            let (r2, i2) = eval_rule(order + 6);
            re += r2;
            im += i2;
            err += (r2 - r1).hypot(i2 - i1);
        }
    }
    if err > tol {
        return Err(Error::Precision(format!(
            "quadrature error estimate {err} exceeds tolerance {tol}; \
             a finer mesh (more parts per cell) is required"
        )));
    }
    Ok(OscillatoryIntegral {
        re,
        im,
        err_bound: err,
    })
}

/// Grid of |I_{r,q}| magnitudes with the explicit bound chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixingReport {
    pub grid: Vec<(f64, u64)>,
    pub magnitudes: Vec<f64>,
    pub bounds: Vec<f64>,
    pub quad_errors: Vec<f64>,
    pub violations: usize,
    pub k_discontinuities: usize,
    pub var_h_over_s: f64,
    /// Constant strictly between Var(h)/S and 1 used as the limsup probe.
    pub bound_c: f64,
    /// Smallest grid r from which max_q |I| stays below bound_c.
    pub empirical_r0: Option<f64>,
}

/// Evaluate |I_{r,q}| over the (r, q_n) grid for the piecewise-linear
/// reduction of f, and check each magnitude against
/// K/(pi r S) + Var(h)/S + Var(g')/(2 pi r S^2 q) + quadrature error,
/// where g is the supplied von Neumann approximation and h = f - g.
pub fn weak_mixing_bound_check(
    f: &RoofFunction,
    g_vn: &RoofFunction,
    cf: &ContinuedFraction,
    r_list: &[f64],
    q_indices: &[usize],
) -> Result<MixingReport> {
    if g_vn.jumps().tail_bound() != 0.0 {
        return Err(Error::Hypothesis(
            "g must be a von Neumann function (finitely many jumps, no tail)".into(),
        ));
    }
    if !g_vn.in_u_class() {
        return Err(Error::Hypothesis("g must have nonzero jump sum".into()));
    }
    let s_abs = g_vn.jump_sum().abs();
    let f_pl = f.piecewise_linear_part();
    let g_pl = g_vn.piecewise_linear_part();
    let h = f_pl.sub(&g_pl)?;
    let var_h = h.variation() + 2.0 * h.jumps().tail_bound();
    if var_h >= s_abs {
        return Err(Error::Hypothesis(format!(
            "Var(f - g) = {var_h} must be < |S(g)| = {s_abs}"
        )));
    }
    let k_disc = g_pl.jumps().len();
    let var_g_prime = g_pl.ac().derivative_variation();
    let var_h_over_s = var_h / s_abs;
    let bound_c = 0.5 * (var_h_over_s + 1.0);

    let mut grid = Vec::new();
    let mut magnitudes = Vec::new();
    let mut bounds = Vec::new();
    let mut quad_errors = Vec::new();
    let mut violations = 0usize;
    let pi = std::f64::consts::PI;
    for &r in r_list {
        for &qi in q_indices {
            let q = cf.denominator(qi)?;
            let integral = oscillatory_integral(&f_pl, cf, r, q, 1e-6)?;
            let mag = integral.magnitude();
            let bound = k_disc as f64 / (pi * r.abs() * s_abs)
                + var_h_over_s
                + var_g_prime / (2.0 * pi * r.abs() * s_abs * s_abs * q as f64)
                + integral.err_bound
                + 1e-9;
            if mag > bound {
                violations += 1;
            }
            grid.push((r, q));
            magnitudes.push(mag);
            bounds.push(bound);
            quad_errors.push(integral.err_bound);
        }
    }

    // empirical r0: smallest r such that every larger grid r keeps
    // max_q |I| below bound_c
    let mut rs: Vec<f64> = r_list.to_vec();
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rs.dedup();
    let max_at = |r: f64| -> f64 {
        grid.iter()
            .zip(&magnitudes)
            .filter(|((rr, _), _)| *rr == r)
            .map(|(_, &m)| m)
            .fold(0.0, f64::max)
    };
    let mut empirical_r0 = None;
    for (i, &r) in rs.iter().enumerate() {
        if rs[i..].iter().all(|&rr| max_at(rr) < bound_c) {
            empirical_r0 = Some(r);
            break;
        }
    }

    Ok(MixingReport {
        grid,
        magnitudes,
        bounds,
        quad_errors,
        violations,
        k_discontinuities: k_disc,
        var_h_over_s,
        bound_c,
        empirical_r0,
    })
}

fn rigidity_j_range(f: &RoofFunction, t: f64, epsilon: f64) -> (u64, u64) {
    let j_min = ((t - epsilon) / f.upper_bound()).ceil().max(1.0) as u64;
    let j_max = ((t + epsilon) / f.lower_bound()).floor().max(0.0) as u64;
    (j_min, j_max)
}

/// Sample points for measure estimates: `grid_n` equispaced plus
/// refinement near every orbit preimage of a jump within the j-window.
fn rigidity_samples(
    f: &RoofFunction,
    cf: &ContinuedFraction,
    grid_n: u64,
    j_max: u64,
) -> Vec<CirclePoint> {
    let mut pts: Vec<CirclePoint> = Vec::with_capacity(grid_n as usize + 256);
    for i in 0..grid_n {
        pts.push(CirclePoint::from_fraction(i, grid_n).expect("i < grid_n"));
    }
    let refine_budget = 100_000u64;
    if f.jumps().len() as u64 * j_max * 2 <= refine_budget {
        let offset = CirclePoint(1u128 << 88); // 2^-40
        for j in f.jumps().entries() {
            let mut p = j.beta;
            for _ in 0..j_max {
                pts.push(p.add(offset));
                pts.push(p.sub(offset));
                p = p.sub(cf.alpha());
            }
        }
    }
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// Measure of the in-set samples, cell-weighted: each sample represents
/// the arc between the midpoints to its neighbours.
fn weighted_mass(pts: &[CirclePoint], in_set: &[bool]) -> f64 {
    let n = pts.len();
    if in_set.iter().all(|&b| b) {
        return 1.0;
    }
    if !in_set.iter().any(|&b| b) {
        return 0.0;
    }
    let mut mass_ulps: u128 = 0;
    for i in 0..n {
        if !in_set[i] {
            continue;
        }
        let prev_arc = pts[i].arc_from(pts[(i + n - 1) % n]);
        let next_arc = pts[(i + 1) % n].arc_from(pts[i]);
        mass_ulps += prev_arc / 2 + next_arc / 2;
    }
    crate::circle::ulps_to_f64(mass_ulps)
}

/// Estimate of lambda{ x : exists j with |f^(j)(x) - t| < epsilon } by an
/// incremental cocycle walk over a jump-refined grid.
pub fn rigidity_statistic(
    f: &RoofFunction,
    cf: &ContinuedFraction,
    t: f64,
    epsilon: f64,
    grid_n: u64,
) -> Result<f64> {
    if f.lower_bound() <= 0.0 {
        return Err(Error::Hypothesis("rigidity statistic needs a positive roof".into()));
    }
    if !(epsilon > 0.0 && epsilon < f.lower_bound()) {
        return Err(Error::Scenario(format!(
            "epsilon must lie in (0, m) = (0, {})",
            f.lower_bound()
        )));
    }
    if t <= 2.0 * epsilon {
        return Err(Error::Scenario("t must exceed 2 epsilon".into()));
    }
    let (_, j_max) = rigidity_j_range(f, t, epsilon);
    if j_max > crate::birkhoff::BIRKHOFF_CAP {
        return Err(Error::Precision(format!("j window extends beyond cap: {j_max}")));
    }
    let pts = rigidity_samples(f, cf, grid_n.max(2), j_max);
    let alpha = cf.alpha();
    let in_set: Vec<bool> = pts
        .iter()
        .map(|&x| {
            let mut sum = 0.0;
            let mut comp = 0.0;
            let mut pos = x;
            for _ in 0..j_max {
                let term = f.evaluate(pos);
                let y = term - comp;
                let tt = sum + y;
                comp = (tt - sum) - y;
                sum = tt;
                pos = pos.add(alpha);
                if (sum - t).abs() < epsilon {
                    return true;
                }
            }
            false
        })
        .collect();
    Ok(weighted_mass(&pts, &in_set))
}

/// Rigidity-mass profile over a scanned time range.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RigidityProfile {
    pub epsilon: f64,
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub j_windows: Vec<(u64, u64)>,
    pub sup: f64,
    pub argmax: f64,
    /// Times injected from Birkhoff values at denominators.
    pub injected: Vec<f64>,
}

/// Scan the rigidity statistic over [t_min, t_max] (linear grid plus
/// injected Birkhoff candidates f^(q_n)(x0), which is where rigid
/// behavior would concentrate).
#[allow(clippy::too_many_arguments)]
pub fn partial_rigidity_scan(
    f: &RoofFunction,
    cf: &ContinuedFraction,
    epsilon: f64,
    t_min: f64,
    t_max: f64,
    steps: u64,
    grid_n: u64,
    x0: CirclePoint,
) -> Result<RigidityProfile> {
    if f.lower_bound() <= 0.0 {
        return Err(Error::Hypothesis("rigidity scan needs a positive roof".into()));
    }
    if !(epsilon > 0.0 && epsilon < f.lower_bound()) {
        return Err(Error::Scenario("epsilon must lie in (0, m)".into()));
    }
    if !(t_min > 2.0 * epsilon && t_max > t_min && steps >= 2) {
        return Err(Error::Scenario(
            "need t_min > 2 epsilon, t_max > t_min, steps >= 2".into(),
        ));
    }
    let mut times: Vec<f64> = (0..steps)
        .map(|k| t_min + (t_max - t_min) * k as f64 / (steps - 1) as f64)
        .collect();
    // inject candidate rigidity times f^(q_n)(x0)
    let mut injected = Vec::new();
    for n in 0..=cf.depth() {
        let Ok(q) = cf.denominator(n) else { break };
        let v = birkhoff_at(f, cf.alpha(), x0, q);
        if v >= t_min && v <= t_max {
            injected.push(v);
        }
    }
    times.extend(injected.iter().copied());
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();

    // shared precompute: sorted cocycle values per sample up to the
    // largest j-window, then a binary search per (sample, t)
    let (_, j_max_global) = rigidity_j_range(f, t_max, epsilon);
    if j_max_global > crate::birkhoff::BIRKHOFF_CAP {
        return Err(Error::Precision("scan j window beyond cap".into()));
    }
    let pts = rigidity_samples(f, cf, grid_n.max(2), j_max_global);
    let alpha = cf.alpha();
    let sorted_values: Vec<Vec<f64>> = pts
        .iter()
        .map(|&x| {
            let mut vals = Vec::with_capacity(j_max_global as usize);
            let mut sum = 0.0;
            let mut comp = 0.0;
            let mut pos = x;
            for _ in 0..j_max_global {
                let term = f.evaluate(pos);
                let y = term - comp;
                let tt = sum + y;
                comp = (tt - sum) - y;
                sum = tt;
                pos = pos.add(alpha);
                vals.push(sum);
            }
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals
        })
        .collect();

    let mut mass = Vec::with_capacity(times.len());
    let mut j_windows = Vec::with_capacity(times.len());
    let mut sup = 0.0f64;
    let mut argmax = times[0];
    for &t in &times {
        let in_set: Vec<bool> = sorted_values
            .iter()
            .map(|vals| {
                let idx = vals.partition_point(|v| *v <= t - epsilon);
                idx < vals.len() && vals[idx] < t + epsilon
            })
            .collect();
        let m = weighted_mass(&pts, &in_set);
        if m > sup {
            sup = m;
            argmax = t;
        }
        mass.push(m);
        j_windows.push(rigidity_j_range(f, t, epsilon));
    }
    Ok(RigidityProfile {
        epsilon,
        times,
        mass,
        j_windows,
        sup,
        argmax,
        injected,
    })
}

/// One row of the tail-decay table.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EtaRow {
    pub epsilon: f64,
    /// Minimal truncation index meeting the tail bound; None when the
    /// certified truncation cannot resolve this epsilon.
    pub eta: Option<u64>,
    pub eta_times_eps: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EtaTable {
    pub rows: Vec<EtaRow>,
    /// Heuristic: min(eta*eps) < 0.25 * max(eta*eps) across resolved rows.
    pub trend_to_zero: bool,
    pub fully_resolved: bool,
}

/// For each epsilon, the minimal eta with
/// sum_{i > eta} |d_i| < eps / (C2/C1 + 1), tail-bound aware.
pub fn eta_condition_check(
    f: &RoofFunction,
    c1: f64,
    c2: f64,
    eps_grid: &[f64],
) -> Result<EtaTable> {
    if !(c1 > 0.0 && c2 > 0.0 && c2 <= c1) {
        return Err(Error::Scenario("need 0 < C2 <= C1".into()));
    }
    if !f.in_u_class() {
        return Err(Error::Hypothesis("tail-decay condition is probed inside U".into()));
    }
    let ratio = c2 / c1 + 1.0;
    let mut rows = Vec::with_capacity(eps_grid.len());
    let mut fully_resolved = true;
    for &eps in eps_grid {
        if eps <= 0.0 {
            return Err(Error::Scenario("epsilons must be positive".into()));
        }
        let threshold = eps / ratio;
        let mut eta = None;
        for j in 0..=f.jumps().len() {
            if f.jumps().tail_after(j) + f.jumps().tail_bound() < threshold {
                eta = Some(j as u64);
                break;
            }
        }
        if eta.is_none() {
            fully_resolved = false;
        }
        rows.push(EtaRow {
            epsilon: eps,
            eta,
            eta_times_eps: eta.map(|e| e as f64 * eps),
        });
    }
    let resolved: Vec<f64> = rows.iter().filter_map(|r| r.eta_times_eps).collect();
    let trend_to_zero = if resolved.len() >= 2 {
        let max = resolved.iter().copied().fold(f64::MIN, f64::max);
        let min = resolved.iter().copied().fold(f64::MAX, f64::min);
        min < 0.25 * max || max == 0.0
    } else {
        false
    };
    Ok(EtaTable {
        rows,
        trend_to_zero,
        fully_resolved,
    })
}

/// Empirical distribution of h^(q_n) over equispaced samples.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BirkhoffDistribution {
    pub n_index: usize,
    pub q: u64,
    pub tau: f64,
    pub samples: u64,
    pub bin_width: f64,
    /// (bin left edge, mass) rows; masses sum to 1.
    pub histogram: Vec<(f64, f64)>,
    pub mass_within_tau: f64,
    pub mean: f64,
}

/// Histogram of h^(q_n)(x) over `samples` equispaced x, with the mass
/// inside (-tau, tau) reported.
pub fn birkhoff_distribution_along_qn(
    h: &RoofFunction,
    cf: &ContinuedFraction,
    n_index: usize,
    samples: u64,
    tau: f64,
) -> Result<BirkhoffDistribution> {
    if samples == 0 {
        return Err(Error::Scenario("samples must be >= 1".into()));
    }
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::Scenario("tau must be positive".into()));
    }
    let q = cf.denominator(n_index)?;
    if q > crate::birkhoff::BIRKHOFF_CAP {
        return Err(Error::Precision(format!("q = {q} beyond the cocycle cap")));
    }
    let alpha = cf.alpha();
    let mut values = Vec::with_capacity(samples as usize);
    for i in 0..samples {
        let x = CirclePoint::from_fraction(i, samples)?;
        values.push(birkhoff_at(h, alpha, x, q));
    }
    let bin_width = (tau / 4.0).min(0.01);
    let mut bins: BTreeMap<i64, u64> = BTreeMap::new();
    let mut within = 0u64;
    let mut mean = 0.0;
    for &v in &values {
        *bins.entry((v / bin_width).floor() as i64).or_insert(0) += 1;
        if v.abs() < tau {
            within += 1;
        }
        mean += v;
    }
    mean /= samples as f64;
    let histogram: Vec<(f64, f64)> = bins
        .into_iter()
        .map(|(k, c)| (k as f64 * bin_width, c as f64 / samples as f64))
        .collect();
    Ok(BirkhoffDistribution {
        n_index,
        q,
        tau,
        samples,
        bin_width,
        histogram,
        mass_within_tau: within as f64 / samples as f64,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::QuadraticIrrational;
    use crate::circle::CirclePoint;
    use crate::roof::{AcComponent, JumpSpec};

    fn golden_cf() -> ContinuedFraction {
        QuadraticIrrational::new(-1, 5, 2).unwrap().expand(16).unwrap()
    }

    fn half_sawtooth() -> RoofFunction {
        RoofFunction::sawtooth(1.0, &[(CirclePoint::ZERO, 0.5)]).unwrap()
    }

    /// Independent dense-mesh midpoint Riemann oracle on a jump-aligned mesh.
    fn riemann_oracle(f: &RoofFunction, cf: &ContinuedFraction, r: f64, q: u64, cells: u64) -> (f64, f64) {
        let alpha = cf.alpha();
        let mut pts: Vec<u128> = Vec::new();
        for j in f.jumps().entries() {
            let mut p = j.beta;
            for _ in 0..q {
                pts.push(p.0);
                p = p.sub(alpha);
            }
        }
        pts.sort_unstable();
        pts.dedup();
        if pts.is_empty() {
            pts.push(0);
        }
        let (mut re, mut im) = (0.0, 0.0);
        let m = pts.len();
        for i in 0..m {
            let start = CirclePoint(pts[i]);
            let w = if m == 1 {
                1.0
            } else {
                crate::circle::ulps_to_f64(pts[(i + 1) % m].wrapping_sub(pts[i]))
            };
            let sub = ((cells as f64 * w).ceil() as u64).max(1);
            let sw = w / sub as f64;
            for k in 0..sub {
                let x = start.add(CirclePoint::from_f64((k as f64 + 0.5) * sw));
                let phase = 2.0 * std::f64::consts::PI * r * birkhoff_at(f, alpha, x, q);
                re += phase.cos() * sw;
                im += phase.sin() * sw;
            }
        }
        (re, im)
    }

    #[test]
    fn constant_roof_has_unit_magnitude() {
        let f = RoofFunction::suspension(0.7).unwrap();
        let cf = golden_cf();
        let i = oscillatory_integral(&f, &cf, 3.0, 5, 1e-8).unwrap();
        assert!((i.magnitude() - 1.0).abs() < 1e-9);
        // phase is exactly e^{2 pi i r q c}
        let expected = 2.0 * std::f64::consts::PI * 3.0 * 5.0 * 0.7;
        assert!((i.re - expected.cos()).abs() < 1e-9);
        assert!((i.im - expected.sin()).abs() < 1e-9);
    }

    #[test]
    fn full_oscillation_vanishes() {
        // f = {x}, q = 1, r = 3: integral of e^{2 pi i 3 x} = 0
        let f = RoofFunction::bv(
            0.0,
            JumpSpec::new(vec![(CirclePoint::ZERO, 1.0)], 0.0).unwrap(),
            AcComponent::zero(),
        )
        .unwrap();
        let cf = golden_cf();
        let i = oscillatory_integral(&f, &cf, 3.0, 1, 1e-8).unwrap();
        assert!(i.magnitude() < 1e-9, "magnitude {}", i.magnitude());
    }

    #[test]
    fn quadrature_matches_riemann_oracle() {
        let f = half_sawtooth();
        let cf = golden_cf();
        let q = cf.denominator(8).unwrap(); // 34
        let i = oscillatory_integral(&f, &cf, 40.0, q, 1e-7).unwrap();
        let (ore, oim) = riemann_oracle(&f, &cf, 40.0, q, 1_000_000);
        assert!(
            (i.re - ore).hypot(i.im - oim) < 1e-6,
            "quad ({}, {}) vs oracle ({ore}, {oim})",
            i.re,
            i.im
        );
    }

    #[test]
    fn unreachable_tolerance_names_the_problem() {
        let f = half_sawtooth();
        let cf = golden_cf();
        let q = cf.denominator(7).unwrap();
        match oscillatory_integral(&f, &cf, 40.0, q, 1e-30) {
            Err(crate::error::Error::Precision(msg)) => assert!(msg.contains("mesh")),
            other => panic!("expected a precision error, got {other:?}"),
        }
    }

    #[test]
    fn magnitude_never_exceeds_one() {
        let f = half_sawtooth();
        let cf = golden_cf();
        for (r, qi) in [(7.0, 4), (23.0, 6), (80.0, 9)] {
            let q = cf.denominator(qi).unwrap();
            let i = oscillatory_integral(&f, &cf, r, q, 1e-6).unwrap();
            assert!(i.magnitude() <= 1.0 + i.err_bound + 1e-9);
        }
    }

    #[test]
    fn weak_mixing_bound_holds_for_self() {
        let f = half_sawtooth();
        let cf = golden_cf();
        let rep =
            weak_mixing_bound_check(&f, &f, &cf, &[10.0, 20.0, 40.0], &[5, 6, 7]).unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.k_discontinuities, 1);
        assert_eq!(rep.var_h_over_s, 0.0);
        // magnitudes decay like 1/r: the bound at r=40 is four times
        // smaller than at r=10 and both hold
        assert!(rep.bound_c > 0.0 && rep.bound_c < 1.0);
    }

    #[test]
    fn weak_mixing_rejects_bad_approximation() {
        let f = half_sawtooth();
        // g with tiny jump sum: Var(f - g) >= |S(g)|
        let g = RoofFunction::sawtooth(1.0, &[(CirclePoint::HALF, 0.01)]).unwrap();
        let cf = golden_cf();
        assert!(weak_mixing_bound_check(&f, &g, &cf, &[10.0], &[5]).is_err());
    }

    #[test]
    fn rigidity_suspension_controls() {
        let f = RoofFunction::suspension(1.0).unwrap();
        let cf = golden_cf();
        let hit = rigidity_statistic(&f, &cf, 5.0, 0.1, 500).unwrap();
        assert_eq!(hit, 1.0);
        let miss = rigidity_statistic(&f, &cf, 5.5, 0.1, 500).unwrap();
        assert_eq!(miss, 0.0);
    }

    #[test]
    fn rigidity_statistic_monotone_in_epsilon() {
        let f = half_sawtooth();
        let cf = golden_cf();
        let t = 12.34;
        let small = rigidity_statistic(&f, &cf, t, 0.02, 800).unwrap();
        let large = rigidity_statistic(&f, &cf, t, 0.08, 800).unwrap();
        assert!(small <= large + 1e-12, "{small} vs {large}");
    }

    #[test]
    fn rigidity_grid_refinement_stable() {
        let f = half_sawtooth();
        let cf = golden_cf();
        let t = 15.71;
        let coarse = rigidity_statistic(&f, &cf, t, 0.05, 1_000).unwrap();
        let fine = rigidity_statistic(&f, &cf, t, 0.05, 10_000).unwrap();
        assert!((coarse - fine).abs() < 0.02, "{coarse} vs {fine}");
    }

    #[test]
    fn scan_suspension_hits_integer_times() {
        let f = RoofFunction::suspension(1.0).unwrap();
        let cf = golden_cf();
        let profile = partial_rigidity_scan(
            &f,
            &cf,
            0.1,
            4.55,
            7.45,
            30,
            400,
            CirclePoint::HALF,
        )
        .unwrap();
        assert_eq!(profile.sup, 1.0);
        // mass 1 exactly at integer times within epsilon, 0 in the gaps
        // (grid offsets keep every t at distance 0.05 or >= 0.15 from Z)
        for (t, m) in profile.times.iter().zip(&profile.mass) {
            if (t - t.round()).abs() < 0.1 {
                assert_eq!(*m, 1.0, "t = {t}");
            } else {
                assert_eq!(*m, 0.0, "t = {t}");
            }
        }
    }

    #[test]
    fn eta_condition_finite_and_geometric_and_slow() {
        let cf = golden_cf();
        let consts = cf.estimate_gap_constants(50).unwrap();
        let grid = [0.1, 0.05, 0.02, 0.01, 0.005, 0.002];

        // finitely many jumps: eta eventually constant, eta*eps -> 0
        let f = half_sawtooth();
        let table = eta_condition_check(&f, consts.c1, consts.c2, &grid).unwrap();
        assert!(table.fully_resolved && table.trend_to_zero);

        // geometric: eta ~ log2(1/eps), eta*eps -> 0
        let jumps: Vec<(CirclePoint, f64)> = (1..=40u64)
            .map(|i| {
                (
                    CirclePoint::from_fraction(2 * i - 1, 128).unwrap(),
                    0.9 * 0.5f64.powi(i as i32),
                )
            })
            .collect();
        let g = RoofFunction::new(1.0, JumpSpec::new(jumps, 0.0).unwrap(), AcComponent::zero())
            .unwrap();
        let table = eta_condition_check(&g, consts.c1, consts.c2, &grid).unwrap();
        assert!(table.fully_resolved && table.trend_to_zero);
        // eta(eps) non-increasing in eps along the grid (larger eps first)
        let etas: Vec<u64> = table.rows.iter().map(|r| r.eta.unwrap()).collect();
        assert!(etas.windows(2).all(|w| w[0] <= w[1]));

        // d_i ~ c / i^2: eta ~ c'/eps so eta*eps stalls; flagged
        let jumps: Vec<(CirclePoint, f64)> = (1..=3000u64)
            .map(|i| {
                (
                    CirclePoint::from_fraction(2 * i - 1, 8192).unwrap(),
                    0.3 / (i * i) as f64,
                )
            })
            .collect();
        let tail = 0.3 / 3000.0;
        let h = RoofFunction::new(1.0, JumpSpec::new(jumps, tail).unwrap(), AcComponent::zero())
            .unwrap();
        let table = eta_condition_check(&h, consts.c1, consts.c2, &grid).unwrap();
        assert!(!table.trend_to_zero);
    }

    #[test]
    fn distribution_of_zero_function_is_delta() {
        let cf = golden_cf();
        let zero = RoofFunction::bv(0.0, JumpSpec::empty(), AcComponent::zero()).unwrap();
        let d = birkhoff_distribution_along_qn(&zero, &cf, 6, 512, 0.05).unwrap();
        assert_eq!(d.mass_within_tau, 1.0);
        assert_eq!(d.histogram.len(), 1);
        let total: f64 = d.histogram.iter().map(|(_, m)| m).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distribution_ac_part_concentrates() {
        let cf = golden_cf();
        let ac = AcComponent::smooth_bump(0.3);
        let h = RoofFunction::bv(0.0, JumpSpec::empty(), ac).unwrap().recentred();
        let mut masses = Vec::new();
        for n in [5, 7, 9] {
            let d = birkhoff_distribution_along_qn(&h, &cf, n, 2048, 0.05).unwrap();
            masses.push(d.mass_within_tau);
        }
        assert!(
            masses.last().unwrap() >= masses.first().unwrap(),
            "{masses:?}"
        );
        assert!(*masses.last().unwrap() > 0.9, "{masses:?}");
    }

    #[test]
    fn histogram_masses_sum_to_one() {
        let cf = golden_cf();
        let f = half_sawtooth().recentred();
        let d = birkhoff_distribution_along_qn(&f, &cf, 7, 1000, 0.1).unwrap();
        let total: f64 = d.histogram.iter().map(|(_, m)| m).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
