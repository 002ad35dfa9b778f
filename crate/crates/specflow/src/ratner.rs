//! Drift-interval machinery: the quantitative constants of the controlled
//! orbit-divergence theorem, scale selection from the pair distance, the
//! search for the drift interval inside [q_s, q_{s+1}], and seeded
//! population experiments over random pairs.

use serde::{Deserialize, Serialize};

use crate::birkhoff::{jump_hit_count, BIRKHOFF_CAP};
use crate::cf::ContinuedFraction;
use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::rng::CounterRng;
use crate::roof::{drift_window, theta_condition, DriftWindow, RoofFunction, ThetaCertificate};

/// All constants needed by the drift search for a fixed (f, alpha, eps, N).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatnerParams {
    pub epsilon: f64,
    pub n_floor: u64,
    pub m_eps: usize,
    pub kappa: f64,
    pub delta: f64,
    pub p: f64,
    pub eta: f64,
    pub xi: f64,
    pub c_bound: u64,
    pub s0: usize,
    pub s_min: usize,
    pub theta: ThetaCertificate,
    /// The finite drift-correction enumeration A (D lies within xi of it).
    pub drift_set: Vec<f64>,
}

/// Smallest m with sum_{i>m} |d_i| (tail-bound aware) < eps / (4(2C+1)).
pub fn compute_m_eps(f: &RoofFunction, epsilon: f64, c_bound: u64) -> Result<usize> {
    if epsilon <= 0.0 {
        return Err(Error::Scenario("epsilon must be positive".into()));
    }
    if !f.in_u_class() {
        return Err(Error::Hypothesis("roof has zero jump sum (not in U)".into()));
    }
    let budget = epsilon / (4.0 * (2 * c_bound + 1) as f64);
    if f.jumps().tail_bound() >= budget {
        return Err(Error::Precision(format!(
            "truncation tail {} cannot meet the eps/(4(2C+1)) = {budget} budget",
            f.jumps().tail_bound()
        )));
    }
    let mut m = 1;
    while f.jumps().tail_after(m) + f.jumps().tail_bound() >= budget {
        m += 1;
    }
    Ok(m)
}

/// kappa(eps) = (1 / (m(eps) (2C+1))) * min{ eps/(2pC), 1/C^2 }.
pub fn compute_kappa(epsilon: f64, m_eps: usize, c_bound: u64, p: f64) -> f64 {
    let c = c_bound as f64;
    (epsilon / (2.0 * p * c)).min(1.0 / (c * c)) / (m_eps as f64 * (2.0 * c + 1.0))
}

/// Smallest admissible s0 >= s_min with min{kappa,1} q_{s0} > N, and
/// delta = p / (|S| q_{s0+1}).
pub fn compute_delta(
    p: f64,
    jump_sum: f64,
    cf: &ContinuedFraction,
    kappa: f64,
    n_floor: u64,
    s_min: usize,
) -> Result<(f64, usize)> {
    let scale = kappa.min(1.0);
    for s0 in s_min..cf.depth() {
        let q = cf.denominator(s0)? as f64;
        if scale * q > n_floor as f64 {
            let q_next = cf.denominator(s0 + 1)? as f64;
            return Ok((p / (jump_sum.abs() * q_next), s0));
        }
    }
    Err(Error::Precision(format!(
        "convergent depth {} insufficient: need q_s with min(kappa,1) q_s > {n_floor}",
        cf.depth()
    )))
}

/// The unique s with p/(|S| q_{s+1}) < ||x-y|| <= p/(|S| q_s).
pub fn scale_select(
    x: CirclePoint,
    y: CirclePoint,
    p: f64,
    jump_sum: f64,
    cf: &ContinuedFraction,
) -> Result<usize> {
    let dist = x.dist(y);
    if dist == 0.0 {
        return Err(Error::Scenario("x and y must be distinct".into()));
    }
    let ratio = p / jump_sum.abs();
    if dist > ratio {
        return Err(Error::Scenario(format!(
            "pair distance {dist} not below p/|S| = {ratio}"
        )));
    }
    for s in 0..cf.depth() {
        let q_s = cf.denominator(s)? as f64;
        let q_s1 = cf.denominator(s + 1)? as f64;
        if ratio / q_s1 < dist && dist <= ratio / q_s {
            return Ok(s);
        }
    }
    Err(Error::Precision(
        "pair distance below the materialized convergent range".into(),
    ))
}

/// Prepared context: runs the jump-tail certificate, drift window,
/// m(eps), kappa, the AC equicontinuity fold-in and delta.
pub fn prepare(
    f: &RoofFunction,
    cf: &ContinuedFraction,
    epsilon: f64,
    n_floor: u64,
) -> Result<RatnerParams> {
    if f.lower_bound() <= 0.0 {
        return Err(Error::Hypothesis("drift search needs a positive roof".into()));
    }
    let c_bound = cf.c_bound();
    let cert = theta_condition(f, c_bound)?.ok_or_else(|| {
        Error::Hypothesis("jump-tail condition fails; drift machinery unavailable".into())
    })?;
    let window: DriftWindow = drift_window(f, c_bound)?;
    let set = crate::roof::jump_sum_set(f, c_bound, &cert)?;
    let m_eps = compute_m_eps(f, epsilon, c_bound)?;
    let kappa = compute_kappa(epsilon, m_eps, c_bound, window.p);
    // the AC part contributes eps/4 via equicontinuity; measured fold-in
    let (f_ac, _) = f.decompose();
    let s_min = if f_ac.is_zero() {
        1
    } else {
        let mut found = None;
        for s in 1..cf.depth().saturating_sub(1) {
            let est = crate::birkhoff::ac_equicontinuity_scan(&f_ac, cf, s, 32)?;
            if est < epsilon / 4.0 {
                found = Some(s);
                break;
            }
        }
        found.ok_or_else(|| {
            Error::Precision("equicontinuity scan never fell below eps/4".into())
        })?
    };
    let (delta, s0) = compute_delta(window.p, f.jump_sum(), cf, kappa, n_floor, s_min)?;
    Ok(RatnerParams {
        epsilon,
        n_floor,
        m_eps,
        kappa,
        delta,
        p: window.p,
        eta: window.eta,
        xi: window.xi,
        c_bound,
        s0,
        s_min,
        theta: cert,
        drift_set: set.values,
    })
}

/// Result of one drift-interval search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriftReport {
    pub s: usize,
    /// Start of the drift interval J = [m_start, m_start + l_len].
    pub m_start: u64,
    pub l_len: u64,
    pub rho: f64,
    pub hit_fraction: f64,
    pub kappa_achieved: f64,
    pub dbar_at_m: f64,
    pub boundary_critical: bool,
    /// All quantitative contracts hold for this pair.
    pub success: bool,
    /// Contract violations on a found interval (falsification signals).
    pub violations: Vec<String>,
    /// Downsampled (n, f^(n)(y) - f^(n)(x)) trace across the search range.
    pub trace: Vec<(u64, f64)>,
}

/// Scan n in [q_s, q_{s+1}] for the longest integer interval on which the
/// cocycle difference stays within eps of a single drift value
/// rho = sgn(S) p - dbar_M; absence of an interval is reported, never
/// silently retried.
pub fn find_drift_interval(
    f: &RoofFunction,
    cf: &ContinuedFraction,
    x: CirclePoint,
    y: CirclePoint,
    params: &RatnerParams,
) -> Result<DriftReport> {
    if x == y {
        return Err(Error::Scenario("x and y must be distinct".into()));
    }
    // positive-orientation arc of length ||x - y||: swap if needed
    let (x, y) = if y.arc_from(x) <= CirclePoint::HALF.0 {
        (x, y)
    } else {
        (y, x)
    };
    let dist = x.dist(y);
    if !(dist > 0.0 && dist < params.delta) {
        return Err(Error::Scenario(format!(
            "pair distance {dist} outside the admissible (0, delta = {})",
            params.delta
        )));
    }
    let s = scale_select(x, y, params.p, f.jump_sum(), cf)?;
    let q_s = cf.denominator(s)?;
    let q_s1 = cf.denominator(s + 1)?;
    if q_s1 > BIRKHOFF_CAP {
        return Err(Error::Precision(format!(
            "q_{{s+1}} = {q_s1} beyond the Birkhoff cap"
        )));
    }
    let alpha = cf.alpha();
    let delta_arc = crate::circle::ulps_to_f64(y.arc_from(x));
    let s_sum = f.jump_sum();
    let sgn = s_sum.signum();
    let target = sgn * params.p;

    // candidate interval from the exact identity: |n S delta - sgn(S) p| < eps/2
    let rate = s_sum * delta_arc; // same sign as S
    let (lo_f, hi_f) = (
        (target - 0.5 * params.epsilon) / rate,
        (target + 0.5 * params.epsilon) / rate,
    );
    let (lo_f, hi_f) = if rate > 0.0 { (lo_f, hi_f) } else { (hi_f, lo_f) };
    let n_lo = lo_f.ceil().max(q_s as f64) as u64;
    let n_hi = hi_f.floor().min(q_s1 as f64) as u64;

    let mut report = DriftReport {
        s,
        m_start: 0,
        l_len: 0,
        rho: 0.0,
        hit_fraction: 0.0,
        kappa_achieved: 0.0,
        dbar_at_m: 0.0,
        boundary_critical: false,
        success: false,
        violations: vec![format!(
            "no candidate interval inside [q_s, q_s+1] = [{q_s}, {q_s1}]"
        )],
        trace: Vec::new(),
    };
    if n_lo > n_hi {
        return Ok(report);
    }

    // walk the full cocycle difference g(n) and the leading-jump hits
    let span = (n_hi - n_lo + 1) as usize;
    let mut g_vals = vec![0.0f64; span];
    let mut split_hit = vec![false; span]; // hit of a leading jump at step n
    let mut boundary = false;
    {
        let mut g = 0.0f64;
        let mut comp = 0.0f64;
        let (mut px, mut py) = (x, y);
        let leading = &f.jumps().entries()[..params.m_eps.min(f.jumps().len())];
        let mut jump_pos: Vec<CirclePoint> = leading.iter().map(|j| j.beta).collect();
        for n in 0..=n_hi {
            if n >= n_lo {
                g_vals[(n - n_lo) as usize] = g;
                for pos in &jump_pos {
                    if pos.in_arc(x, y) {
                        split_hit[(n - n_lo) as usize] = true;
                    }
                    if pos.near_arc_boundary(x, y, 1u128 << 48) {
                        boundary = true;
                    }
                }
            }
            let term = f.evaluate(py) - f.evaluate(px);
            let yk = term - comp;
            let t = g + yk;
            comp = (t - g) - yk;
            g = t;
            px = px.add(alpha);
            py = py.add(alpha);
            for pos in jump_pos.iter_mut() {
                *pos = pos.sub(alpha);
            }
        }
    }

    // longest run [M, M_end] free of leading-jump hits at interior steps:
    // a hit at step n separates n from n+1
    let (mut best_start, mut best_end) = (n_lo, n_lo);
    let (mut cur_start, mut cur_end) = (n_lo, n_lo);
    for n in n_lo..=n_hi {
        if n > n_lo {
            if split_hit[(n - 1 - n_lo) as usize] {
                cur_start = n;
            }
            cur_end = n;
        }
        if cur_end - cur_start > best_end - best_start {
            best_start = cur_start;
            best_end = cur_end;
        }
    }
    let m_start = best_start;
    let l_len = best_end - best_start;

    // dbar at M recomputed from scratch via the hit counter
    let mut dbar_at_m = 0.0;
    for j in f.jumps().entries() {
        let hits = jump_hit_count(alpha, j.beta, x, y, m_start)?;
        dbar_at_m += hits.count as f64 * j.size;
        boundary |= hits.boundary_critical;
    }
    let rho = target - dbar_at_m;

    // validate the whole interval against the single rho
    let mut hits = 0u64;
    for n in m_start..=best_end {
        if (g_vals[(n - n_lo) as usize] - rho).abs() < params.epsilon {
            hits += 1;
        }
    }
    let hit_fraction = hits as f64 / (l_len + 1) as f64;
    let kappa_achieved = l_len as f64 / m_start as f64;

    // trace for plot emission (downsampled)
    let stride = (span / 2048).max(1);
    let trace: Vec<(u64, f64)> = (0..span)
        .step_by(stride)
        .map(|i| (n_lo + i as u64, g_vals[i]))
        .collect();

    // contracts
    let mut violations = Vec::new();
    if kappa_achieved < params.kappa {
        violations.push(format!(
            "L/M = {kappa_achieved} below kappa = {}",
            params.kappa
        ));
    }
    if m_start < params.n_floor {
        violations.push(format!("M = {m_start} below N = {}", params.n_floor));
    }
    if l_len < params.n_floor {
        violations.push(format!("L = {l_len} below N = {}", params.n_floor));
    }
    if hit_fraction <= 1.0 - params.epsilon {
        violations.push(format!(
            "hit fraction {hit_fraction} not above 1 - eps = {}",
            1.0 - params.epsilon
        ));
    }
    // rho within xi + 1e-8 of sgn(S) p - A
    let dist_to_set = params
        .drift_set
        .iter()
        .map(|a| (dbar_at_m - a).abs())
        .fold(f64::INFINITY, f64::min);
    if dist_to_set > params.xi + 1e-8 {
        violations.push(format!(
            "dbar_M = {dbar_at_m} lies {dist_to_set} from the drift set (> xi + 1e-8)"
        ));
    }

    report = DriftReport {
        s,
        m_start,
        l_len,
        rho,
        hit_fraction,
        kappa_achieved,
        dbar_at_m,
        boundary_critical: boundary,
        success: violations.is_empty(),
        violations,
        trace,
    };
    Ok(report)
}

/// Aggregate of a seeded population run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PopulationSummary {
    pub trials: u64,
    pub seed: u64,
    pub rng_algorithm: String,
    pub epsilon: f64,
    pub n_floor: u64,
    /// None when trials = 0.
    pub success_fraction: Option<f64>,
    pub falsification_events: u64,
    /// Trials rejected before the search (distance or cap issues).
    pub rejected: u64,
    pub kappa_margins: Vec<f64>,
    pub rho_values: Vec<f64>,
    pub reports: Vec<DriftReport>,
}

/// Run `trials` seeded pairs at distances in (0, delta) and summarize.
/// An interval found with violated contracts counts as a falsification
/// event; absence of any interval is an honest failure, never retried.
pub fn ratner_population_experiment(
    f: &RoofFunction,
    cf: &ContinuedFraction,
    epsilon: f64,
    n_floor: u64,
    trials: u64,
    seed: u64,
) -> Result<PopulationSummary> {
    let params = prepare(f, cf, epsilon, n_floor)?;
    let mut summary = PopulationSummary {
        trials,
        seed,
        rng_algorithm: crate::rng::ALGORITHM.to_string(),
        epsilon,
        n_floor,
        success_fraction: None,
        falsification_events: 0,
        rejected: 0,
        kappa_margins: Vec::new(),
        rho_values: Vec::new(),
        reports: Vec::new(),
    };
    if trials == 0 {
        return Ok(summary);
    }
    let mut successes = 0u64;
    for trial in 0..trials {
        let mut rng = CounterRng::new(seed, trial);
        let x = CirclePoint(rng.next_circle_u128());
        let dist = rng.next_f64() * params.delta;
        let y = x.add(CirclePoint::from_f64(dist));
        if x == y {
            summary.rejected += 1;
            continue;
        }
        match find_drift_interval(f, cf, x, y, &params) {
            Ok(rep) => {
                if rep.success {
                    successes += 1;
                    summary.kappa_margins.push(rep.kappa_achieved / params.kappa);
                    summary.rho_values.push(rep.rho);
                } else if rep.l_len > 0 {
                    summary.falsification_events += 1;
                }
                summary.reports.push(rep);
            }
            Err(Error::Precision(_)) | Err(Error::Scenario(_)) => {
                summary.rejected += 1;
            }
            Err(e) => return Err(e),
        }
    }
    summary.success_fraction = Some(successes as f64 / trials as f64);
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::QuadraticIrrational;

    fn golden_cf() -> ContinuedFraction {
        QuadraticIrrational::new(-1, 5, 2).unwrap().expand(30).unwrap()
    }

    fn half_sawtooth() -> RoofFunction {
        RoofFunction::sawtooth(1.0, &[(CirclePoint::ZERO, 0.5)]).unwrap()
    }

    #[test]
    fn m_eps_examples() {
        let cf = golden_cf();
        let f = half_sawtooth();
        assert_eq!(compute_m_eps(&f, 0.1, cf.c_bound()).unwrap(), 1);

        let g = RoofFunction::sawtooth(
            1.0,
            &[
                (CirclePoint::ZERO, 0.3),
                (CirclePoint::from_fraction(1, 3).unwrap(), 0.2),
            ],
        )
        .unwrap();
        assert_eq!(compute_m_eps(&g, 0.1, 2).unwrap(), 2);

        // geometric 0.9 * 2^-i: smallest m with 0.9 * 2^-m < 0.005 is 8
        let jumps: Vec<(CirclePoint, f64)> = (1..=40u64)
            .map(|i| {
                (
                    CirclePoint::from_fraction(2 * i - 1, 128).unwrap(),
                    0.9 * 0.5f64.powi(i as i32),
                )
            })
            .collect();
        let h = RoofFunction::new(
            1.0,
            crate::roof::JumpSpec::new(jumps, 0.0).unwrap(),
            crate::roof::AcComponent::zero(),
        )
        .unwrap();
        assert_eq!(compute_m_eps(&h, 0.1, 2).unwrap(), 8);
    }

    #[test]
    fn kappa_formula() {
        let k = compute_kappa(0.1, 1, 2, 0.25);
        assert!((k - 0.02).abs() < 1e-15);
        // doubling m halves kappa; always positive
        assert!((compute_kappa(0.1, 2, 2, 0.25) - 0.01).abs() < 1e-15);
        assert!(compute_kappa(1e-6, 3, 5, 0.9) > 0.0);
    }

    #[test]
    fn delta_fibonacci_example() {
        let cf = golden_cf();
        let (delta, s0) = compute_delta(0.25, 0.5, &cf, 0.02, 10, 1).unwrap();
        assert_eq!(s0, 14); // q_14 = 610 is the first with 0.02 q > 10
        assert_eq!(cf.denominator(14).unwrap(), 610);
        assert_eq!(cf.denominator(15).unwrap(), 987);
        assert!((delta - 0.25 / (0.5 * 987.0)).abs() < 1e-15);
        // N = 0 floor case
        let (_, s0) = compute_delta(0.25, 0.5, &cf, 0.02, 0, 3).unwrap();
        assert_eq!(s0, 3);
        // delta decreases as N grows
        let (d1, _) = compute_delta(0.25, 0.5, &cf, 0.02, 10, 1).unwrap();
        let (d2, _) = compute_delta(0.25, 0.5, &cf, 0.02, 100, 1).unwrap();
        assert!(d2 < d1);
    }

    #[test]
    fn scale_select_example() {
        let cf = golden_cf();
        let x = CirclePoint::ZERO;
        let y = CirclePoint::from_f64(0.001);
        let s = scale_select(x, y, 0.25, 0.5, &cf).unwrap();
        assert_eq!(s, 13); // q_13 = 377 <= 500 < q_14 = 610
        assert!(scale_select(x, x, 0.25, 0.5, &cf).is_err());
    }

    #[test]
    fn scale_intervals_partition() {
        // the intervals (p/|S|q_{s+1}, p/|S|q_s] tile (0, p/|S| q_s0]
        let cf = golden_cf();
        let ratio: f64 = 0.5;
        for k in 1..200 {
            let dist = ratio * k as f64 / 201.0;
            let y = CirclePoint::from_f64(dist);
            let s = scale_select(CirclePoint::ZERO, y, 0.25, 0.5, &cf).unwrap();
            let q_s = cf.denominator(s).unwrap() as f64;
            let q_s1 = cf.denominator(s + 1).unwrap() as f64;
            let d = y.dist(CirclePoint::ZERO);
            assert!(ratio / q_s1 < d && d <= ratio / q_s);
        }
    }

    #[test]
    fn drift_interval_on_golden_pair() {
        let f = half_sawtooth();
        let cf = golden_cf();
        let params = prepare(&f, &cf, 0.1, 10).unwrap();
        assert!((params.p - 0.25).abs() < 1e-12);
        assert!((params.kappa - 0.02).abs() < 1e-12);
        let x = CirclePoint::from_f64(0.3123);
        let y = x.add(CirclePoint::from_f64(params.delta * 0.5));
        let rep = find_drift_interval(&f, &cf, x, y, &params).unwrap();
        assert!(rep.success, "{:?}", rep.violations);
        assert!(rep.kappa_achieved >= params.kappa);
        assert!(rep.m_start >= 10 && rep.l_len >= 10);
        assert!(rep.hit_fraction > 0.9);
        // rho lands within xi + 1e-8 of sgn(S) p - A
        let min_dist = params
            .drift_set
            .iter()
            .map(|a| (rep.dbar_at_m - a).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(min_dist <= params.xi + 1e-8);
    }

    #[test]
    fn drift_interval_recheck_by_direct_recompute() {
        // every n in [M, M+L] satisfies |g(n) - rho| < eps, recomputed
        // from fresh Birkhoff sums
        let f = half_sawtooth();
        let cf = golden_cf();
        let params = prepare(&f, &cf, 0.1, 10).unwrap();
        let x = CirclePoint::from_f64(0.777);
        let y = x.add(CirclePoint::from_f64(params.delta * 0.31));
        let rep = find_drift_interval(&f, &cf, x, y, &params).unwrap();
        assert!(rep.success);
        let mut lx = crate::birkhoff::BirkhoffLedger::new(&f, cf.alpha(), x);
        let mut ly = crate::birkhoff::BirkhoffLedger::new(&f, cf.alpha(), y);
        for n in rep.m_start..=rep.m_start + rep.l_len {
            let g = ly.value(n as i64).unwrap() - lx.value(n as i64).unwrap();
            assert!(
                (g - rep.rho).abs() < params.epsilon,
                "n = {n}: g = {g}, rho = {}",
                rep.rho
            );
        }
    }

    #[test]
    fn population_two_jump_roof_other_rotation() {
        // two-jump roof over sqrt(2)-1 (C = 3): the drift set is a
        // nontrivial grid and rho varies across pairs
        let cf = QuadraticIrrational::new(-1, 2, 1).unwrap().expand(25).unwrap();
        assert_eq!(cf.c_bound(), 3);
        let f = RoofFunction::sawtooth(
            1.0,
            &[
                (CirclePoint::ZERO, 0.3),
                (CirclePoint::from_fraction(1, 3).unwrap(), 0.2),
            ],
        )
        .unwrap();
        let summary = ratner_population_experiment(&f, &cf, 0.1, 10, 60, 42).unwrap();
        assert_eq!(summary.falsification_events, 0);
        assert!(
            summary.success_fraction.unwrap() >= 0.9,
            "{:?}",
            summary.success_fraction
        );
        let mut rhos = summary.rho_values.clone();
        rhos.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rhos.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        assert!(rhos.len() >= 2, "expected several drift values, got {rhos:?}");
    }

    #[test]
    fn ac_roof_pipeline_folds_in_equicontinuity() {
        // nonzero AC part routes through the measured s_min fold-in
        let cf = QuadraticIrrational::new(-1, 5, 2).unwrap().expand(32).unwrap();
        let f = RoofFunction::new(
            1.0,
            crate::roof::JumpSpec::new(vec![(CirclePoint::ZERO, 0.5)], 0.0).unwrap(),
            crate::roof::AcComponent::smooth_bump(0.1),
        )
        .unwrap();
        let params = prepare(&f, &cf, 0.1, 10).unwrap();
        assert!(params.s_min >= 1);
        let summary = ratner_population_experiment(&f, &cf, 0.1, 10, 40, 3).unwrap();
        assert_eq!(summary.falsification_events, 0);
        assert!(summary.success_fraction.unwrap() >= 0.9);
    }

    #[test]
    fn constant_roof_rejected_at_theta_stage() {
        let f = RoofFunction::suspension(1.0).unwrap();
        let cf = golden_cf();
        assert!(matches!(
            prepare(&f, &cf, 0.1, 10),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn population_deterministic_and_successful() {
        let f = half_sawtooth();
        let cf = golden_cf();
        let a = ratner_population_experiment(&f, &cf, 0.1, 10, 40, 7).unwrap();
        let b = ratner_population_experiment(&f, &cf, 0.1, 10, 40, 7).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(a.success_fraction.unwrap() >= 0.9, "{:?}", a.success_fraction);
        assert_eq!(a.falsification_events, 0);
        // empty run flags the undefined fraction
        let empty = ratner_population_experiment(&f, &cf, 0.1, 10, 0, 7).unwrap();
        assert_eq!(empty.success_fraction, None);
    }

    #[test]
    fn shrinking_epsilon_never_raises_hit_fraction() {
        let f = half_sawtooth();
        let cf = golden_cf();
        let params_big = prepare(&f, &cf, 0.1, 10).unwrap();
        let x = CirclePoint::from_f64(0.1618);
        let y = x.add(CirclePoint::from_f64(params_big.delta * 0.4));
        let rep_big = find_drift_interval(&f, &cf, x, y, &params_big).unwrap();
        // same pair, same interval, smaller eps: recount hits directly
        let mut lx = crate::birkhoff::BirkhoffLedger::new(&f, cf.alpha(), x);
        let mut ly = crate::birkhoff::BirkhoffLedger::new(&f, cf.alpha(), y);
        for eps_small in [0.05, 0.02] {
            let mut hits = 0u64;
            for n in rep_big.m_start..=rep_big.m_start + rep_big.l_len {
                let g = ly.value(n as i64).unwrap() - lx.value(n as i64).unwrap();
                if (g - rep_big.rho).abs() < eps_small {
                    hits += 1;
                }
            }
            let frac = hits as f64 / (rep_big.l_len + 1) as f64;
            assert!(frac <= rep_big.hit_fraction + 1e-12);
        }
    }
}
