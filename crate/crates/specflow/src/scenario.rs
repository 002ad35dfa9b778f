//! Scenario ingestion, experiment dispatch, deterministic report and
//! plot-data emission.
//!
//! A scenario is a single JSON document naming the rotation, the roof,
//! one experiment with its parameter table, a seed and an output sink.
//! Unknown keys are rejected. Reports and data files are written
//! atomically (temp file + rename) and contain no timing information, so
//! a rerun of the same scenario bytes is byte-identical.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::birkhoff::{denjoy_koksma_residual, flow_map, BirkhoffLedger, SpecialFlowPoint};
use crate::cf::{ContinuedFraction, QuadraticIrrational};
use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::mixing::{
    birkhoff_distribution_along_qn, partial_rigidity_scan, weak_mixing_bound_check,
};
use crate::ratner::ratner_population_experiment;
use crate::rng::CounterRng;
use crate::roof::{perturbation_stability, RoofFunction, RoofSpec};

/// Supported fixed-point precision of this build.
pub const PRECISION_BITS: u32 = 128;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    /// Textual quadratic irrational "(a+sqrt(b))/c", exact.
    Quadratic(String),
    /// Arbitrary irrational accepted at 64-bit float precision only.
    LowPrecision { low_precision: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Cf,
    Gaps,
    Birkhoff,
    Dk,
    Ratner,
    Mixing,
    Rigidity,
    Distribution,
    Stability,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub format: OutputFormat,
}

fn default_depth() -> usize {
    40
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub alpha: AlphaSpec,
    #[serde(default = "default_depth")]
    pub depth: usize,
    pub roof: RoofSpec,
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub seed: u64,
    pub output: OutputSpec,
}

/// Echoed configuration plus the experiment payload; wall time is
/// reported on stdout, never serialized (byte-identical reruns).
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub library_version: String,
    pub rng_algorithm: String,
    pub precision_bits: u32,
    pub experiment: ExperimentKind,
    pub scenario: Scenario,
    pub max_accumulated_err_bound: f64,
    pub results: serde_json::Value,
}

fn parse_params<T: serde::de::DeserializeOwned>(v: &serde_json::Value) -> Result<T> {
    serde_json::from_value(v.clone())
        .map_err(|e| Error::Scenario(format!("parameter table invalid: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CfParams {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GapsParams {
    k_max: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BirkhoffParams {
    x: String,
    n_max: u64,
    #[serde(default)]
    trajectory: Option<TrajectoryParams>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryParams {
    t_max: f64,
    steps: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DkParams {
    n_index_max: usize,
    samples: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RatnerParamsIn {
    epsilon: f64,
    n_floor: u64,
    trials: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MixingParams {
    r_list: Vec<f64>,
    q_indices: Vec<usize>,
    /// Take g as the von Neumann approximation of this order (the roof
    /// itself when its jump list is already finite and exhausted).
    von_neumann_n: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RigidityParams {
    epsilon: f64,
    t_min: f64,
    t_max: f64,
    steps: u64,
    grid_n: u64,
    #[serde(default)]
    x0: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionParams {
    n_indices: Vec<usize>,
    samples: u64,
    tau: f64,
    /// Subtract the von Neumann approximation of this order first.
    #[serde(default)]
    subtract_vn: Option<u32>,
    #[serde(default = "default_true")]
    recentre: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StabilityParams {
    perturbation: RoofSpec,
}

/// Atomic file write: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()
    ));
    {
        let mut fh = fs::File::create(&tmp)?;
        fh.write_all(bytes)?;
        fh.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn check_precision_env() -> Result<u32> {
    match std::env::var("SPECFLOW_PRECISION_BITS") {
        Err(_) => Ok(PRECISION_BITS),
        Ok(v) => {
            let bits: u32 = v
                .parse()
                .map_err(|_| Error::Scenario(format!("SPECFLOW_PRECISION_BITS={v} not a number")))?;
            if bits > PRECISION_BITS {
                return Err(Error::Precision(format!(
                    "requested {bits} fraction bits; this build provides {PRECISION_BITS}"
                )));
            }
            Ok(PRECISION_BITS)
        }
    }
}

fn expand_alpha(spec: &AlphaSpec, depth: usize) -> Result<ContinuedFraction> {
    match spec {
        AlphaSpec::Quadratic(s) => QuadraticIrrational::parse(s)?.expand(depth),
        AlphaSpec::LowPrecision { low_precision } => {
            ContinuedFraction::from_f64(*low_precision, depth)
        }
    }
}

struct Sink {
    dir: PathBuf,
    format: OutputFormat,
}

impl Sink {
    fn csv(&self, name: &str, header: &str, rows: &[String]) -> Result<()> {
        if self.format == OutputFormat::Json {
            return Ok(());
        }
        let mut out = String::with_capacity(rows.len() * 32 + header.len() + 1);
        out.push_str(header);
        out.push('\n');
        for r in rows {
            out.push_str(r);
            out.push('\n');
        }
        write_atomic(&self.dir.join(name), out.as_bytes())
    }

    fn json(&self, name: &str, value: &serde_json::Value) -> Result<()> {
        if self.format == OutputFormat::Csv {
            return Ok(());
        }
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        write_atomic(&self.dir.join(name), &bytes)
    }
}

/// Run one scenario file: parse, validate, dispatch, write outputs.
/// Falsification events surface as `Error::Falsification` after the
/// outputs are flushed.
pub fn run_scenario(path: &Path) -> Result<RunReport> {
    let bytes = fs::read(path)?;
    let scenario: Scenario = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
    run_parsed(scenario)
}

pub fn run_parsed(scenario: Scenario) -> Result<RunReport> {
    let precision_bits = check_precision_env()?;
    let cf = expand_alpha(&scenario.alpha, scenario.depth)?;
    let roof = RoofFunction::from_spec(&scenario.roof)?;
    let sink = Sink {
        dir: scenario.output.dir.clone(),
        format: scenario.output.format,
    };
    let mut max_err_bound = 0.0f64;
    let mut falsification: Option<String> = None;

    let results = match scenario.experiment {
        ExperimentKind::Cf => {
            let _: CfParams = parse_params(&scenario.params)?;
            let mut rows = Vec::new();
            for (n, (p, q)) in cf.convergents().iter().enumerate() {
                let q1 = cf.denominator(n + 1)?;
                let qf = cf.denominator(n)? as f64;
                rows.push(format!(
                    "{n},{p},{q},{:?},{:?},{:?}",
                    1.0 / (2.0 * qf * q1 as f64),
                    (cf.alpha().to_f64() - p_over_q(p, q)).abs(),
                    1.0 / (qf * q1 as f64),
                ));
            }
            sink.csv("cf.csv", "n,p,q,sandwich_low,abs_error,sandwich_high", &rows)?;
            let value = cf.to_json();
            sink.json("cf.json", &value)?;
            // the exact sandwich check only makes sense for exact alphas;
            // a 64-bit seed cannot support it at deep convergents
            if !cf.low_precision() {
                if let Some(n) = cf.sandwich_violation() {
                    falsification = Some(format!("approximation sandwich fails at n = {n}"));
                }
            }
            value
        }
        ExperimentKind::Gaps => {
            let p: GapsParams = parse_params(&scenario.params)?;
            let consts = cf.estimate_gap_constants(p.k_max)?;
            let mut rows = Vec::new();
            let mut worst_distinct = 0usize;
            for k in 1..=p.k_max {
                let part = cf.three_gap_partition(k)?;
                let d = part.distinct_count();
                worst_distinct = worst_distinct.max(d);
                rows.push(format!(
                    "{k},{:?},{:?},{d},{:?},{:?}",
                    part.min_gap(),
                    part.max_gap(),
                    k as f64 * part.min_gap(),
                    k as f64 * part.max_gap(),
                ));
            }
            sink.csv("gaps.csv", "k,min_gap,max_gap,distinct,k_min_gap,k_max_gap", &rows)?;
            if worst_distinct > 3 {
                falsification = Some(format!(
                    "three-gap theorem violated: {worst_distinct} distinct lengths"
                ));
            }
            let value = json!({
                "c1": consts.c1,
                "c2": consts.c2,
                "k_max": p.k_max,
                "max_distinct": worst_distinct,
            });
            sink.json("gaps.json", &value)?;
            value
        }
        ExperimentKind::Birkhoff => {
            let p: BirkhoffParams = parse_params(&scenario.params)?;
            let x = CirclePoint::from_decimal_str(&p.x)?;
            let mut ledger = BirkhoffLedger::new(&roof, cf.alpha(), x);
            let mut rows = Vec::new();
            for n in 0..=p.n_max {
                rows.push(format!("{n},{:?}", ledger.value(n as i64)?));
            }
            max_err_bound = max_err_bound.max(ledger.err_bound());
            sink.csv("birkhoff.csv", "n,value", &rows)?;
            let mut flow_rows = Vec::new();
            if let Some(tr) = &p.trajectory {
                let mut pt = SpecialFlowPoint { x, s: 0.0 };
                flow_rows.push(format!("0,{},{:?}", pt.x.to_decimal_string(), pt.s));
                let dt = tr.t_max / tr.steps as f64;
                for k in 1..=tr.steps {
                    pt = flow_map(&roof, &cf, pt, dt)?;
                    flow_rows.push(format!(
                        "{:?},{},{:?}",
                        k as f64 * dt,
                        pt.x.to_decimal_string(),
                        pt.s
                    ));
                }
                sink.csv("flow.csv", "t,x,s", &flow_rows)?;
            }
            let value = json!({
                "x": x.to_decimal_string(),
                "n_max": p.n_max,
                "final": ledger.value(p.n_max as i64)?,
                "err_bound": ledger.err_bound(),
                "trajectory_points": flow_rows.len(),
            });
            sink.json("birkhoff.json", &value)?;
            value
        }
        ExperimentKind::Dk => {
            let p: DkParams = parse_params(&scenario.params)?;
            let var = roof.variation() + 2.0 * roof.jumps().tail_bound();
            let mut rows = Vec::new();
            let mut violations = 0u64;
            let mut max_residual = 0.0f64;
            let mut rng = CounterRng::new(scenario.seed, 0);
            for i in 0..p.samples {
                let x = CirclePoint(rng.next_circle_u128());
                for n in 0..=p.n_index_max {
                    let r = denjoy_koksma_residual(&roof, &cf, x, n)?;
                    max_residual = max_residual.max(r);
                    if r > var + 1e-9 {
                        violations += 1;
                    }
                    rows.push(format!(
                        "{i},{},{n},{},{:?},{:?}",
                        x.to_decimal_string(),
                        cf.denominator(n)?,
                        r,
                        var
                    ));
                }
            }
            sink.csv("dk.csv", "sample,x,n_index,q_n,residual,variation", &rows)?;
            if violations > 0 {
                falsification = Some(format!(
                    "Denjoy-Koksma bound violated {violations} times (max residual {max_residual})"
                ));
            }
            let value = json!({
                "samples": p.samples,
                "n_index_max": p.n_index_max,
                "variation": var,
                "max_residual": max_residual,
                "violations": violations,
            });
            sink.json("dk.json", &value)?;
            value
        }
        ExperimentKind::Ratner => {
            let p: RatnerParamsIn = parse_params(&scenario.params)?;
            let summary =
                ratner_population_experiment(&roof, &cf, p.epsilon, p.n_floor, p.trials, scenario.seed)?;
            let rows: Vec<String> = summary
                .kappa_margins
                .iter()
                .map(|m| format!("{m:?}"))
                .collect();
            sink.csv("kappa_margins.csv", "kappa_margin", &rows)?;
            let rows: Vec<String> = summary.rho_values.iter().map(|r| format!("{r:?}")).collect();
            sink.csv("rho_values.csv", "rho", &rows)?;
            if summary.falsification_events > 0 {
                falsification = Some(format!(
                    "{} drift intervals violated the theorem contracts",
                    summary.falsification_events
                ));
            }
            let value = serde_json::to_value(&summary)?;
            sink.json("ratner.json", &value)?;
            value
        }
        ExperimentKind::Mixing => {
            let p: MixingParams = parse_params(&scenario.params)?;
            let g = roof.von_neumann_approx(p.von_neumann_n)?;
            let report = weak_mixing_bound_check(&roof, &g, &cf, &p.r_list, &p.q_indices)?;
            let rows: Vec<String> = report
                .grid
                .iter()
                .zip(&report.magnitudes)
                .zip(&report.bounds)
                .zip(&report.quad_errors)
                .map(|((((r, q), m), b), e)| format!("{r:?},{q},{m:?},{b:?},{e:?}"))
                .collect();
            sink.csv("mixing.csv", "r,q,magnitude,bound,quad_error", &rows)?;
            if report.violations > 0 {
                falsification = Some(format!(
                    "{} grid points violated the integration-by-parts bound",
                    report.violations
                ));
            }
            let value = serde_json::to_value(&report)?;
            sink.json("mixing.json", &value)?;
            value
        }
        ExperimentKind::Rigidity => {
            let p: RigidityParams = parse_params(&scenario.params)?;
            let x0 = match &p.x0 {
                Some(s) => CirclePoint::from_decimal_str(s)?,
                None => CirclePoint::HALF,
            };
            let profile =
                partial_rigidity_scan(&roof, &cf, p.epsilon, p.t_min, p.t_max, p.steps, p.grid_n, x0)?;
            let rows: Vec<String> = profile
                .times
                .iter()
                .zip(&profile.mass)
                .zip(&profile.j_windows)
                .map(|((t, m), (jl, jh))| format!("{t:?},{m:?},{jl},{jh}"))
                .collect();
            sink.csv("rigidity.csv", "t,mass,j_min,j_max", &rows)?;
            let value = serde_json::to_value(&profile)?;
            sink.json("rigidity.json", &value)?;
            value
        }
        ExperimentKind::Distribution => {
            let p: DistributionParams = parse_params(&scenario.params)?;
            let mut h = match p.subtract_vn {
                Some(n) => roof.sub(&roof.von_neumann_approx(n)?)?,
                None => roof.clone(),
            };
            if p.recentre {
                h = h.recentred();
            }
            let mut masses = Vec::new();
            for &ni in &p.n_indices {
                let d = birkhoff_distribution_along_qn(&h, &cf, ni, p.samples, p.tau)?;
                let rows: Vec<String> = d
                    .histogram
                    .iter()
                    .map(|(left, mass)| format!("{left:?},{mass:?}"))
                    .collect();
                sink.csv(&format!("distribution_q{}.csv", d.q), "bin_left,mass", &rows)?;
                masses.push(json!({
                    "n_index": ni,
                    "q": d.q,
                    "mass_within_tau": d.mass_within_tau,
                    "mean": d.mean,
                }));
            }
            let value = json!({
                "tau": p.tau,
                "samples": p.samples,
                "subtract_vn": p.subtract_vn,
                "recentre": p.recentre,
                "per_denominator": masses,
            });
            sink.json("distribution.json", &value)?;
            value
        }
        ExperimentKind::Stability => {
            let p: StabilityParams = parse_params(&scenario.params)?;
            let g = RoofFunction::from_spec(&p.perturbation)?;
            let verdict = perturbation_stability(&roof, &g, cf.c_bound())?;
            let value = serde_json::to_value(verdict)?;
            sink.json("stability.json", &value)?;
            value
        }
    };

    let report = RunReport {
        library_version: crate::VERSION.to_string(),
        rng_algorithm: crate::rng::ALGORITHM.to_string(),
        precision_bits,
        experiment: scenario.experiment,
        scenario,
        max_accumulated_err_bound: max_err_bound,
        results,
    };
    let mut bytes = serde_json::to_vec_pretty(&serde_json::to_value(&report)?)?;
    bytes.push(b'\n');
    write_atomic(&report.scenario.output.dir.join("report.json"), &bytes)?;
    match falsification {
        Some(msg) => Err(Error::Falsification(msg)),
        None => Ok(report),
    }
}

fn p_over_q(p: &num_bigint::BigInt, q: &num_bigint::BigInt) -> f64 {
    use num_traits::ToPrimitive;
    p.to_f64().unwrap_or(f64::NAN) / q.to_f64().unwrap_or(f64::NAN)
}

/// Outcome of one scenario inside a suite.
#[derive(Debug)]
pub struct SuiteEntry {
    pub path: PathBuf,
    pub exit_code: i32,
    pub message: String,
}

/// Run many scenarios with bounded parallelism; the aggregate exit status
/// is the maximum severity. Outputs are deterministic regardless of
/// scheduling because every scenario owns its output directory.
pub fn suite(paths: &[PathBuf], jobs: usize) -> Result<(i32, Vec<SuiteEntry>)> {
    for p in paths {
        if !p.exists() {
            return Err(Error::Scenario(format!("missing scenario {}", p.display())));
        }
    }
    let jobs = jobs.max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let entries: std::sync::Mutex<Vec<SuiteEntry>> = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(paths.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= paths.len() {
                    break;
                }
                let path = &paths[i];
                let entry = match run_scenario(path) {
                    Ok(_) => SuiteEntry {
                        path: path.clone(),
                        exit_code: 0,
                        message: "ok".into(),
                    },
                    Err(e) => SuiteEntry {
                        path: path.clone(),
                        exit_code: e.exit_code(),
                        message: e.to_string(),
                    },
                };
                entries.lock().unwrap().push(entry);
            });
        }
    });
    let mut entries = entries.into_inner().unwrap();
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    let code = entries.iter().map(|e| e.exit_code).max().unwrap_or(0);
    Ok((code, entries))
}

/// Emit gnuplot-ready data files from a written report.
pub fn emit_plot_data(report_path: &Path, kind: &str, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let bytes = fs::read(report_path)?;
    let report: serde_json::Value = serde_json::from_slice(&bytes)?;
    let results = report
        .get("results")
        .ok_or_else(|| Error::Scenario("report has no results payload".into()))?;
    let mut written = Vec::new();
    match kind {
        "drift" => {
            let reports = results
                .get("reports")
                .and_then(|r| r.as_array())
                .ok_or_else(|| Error::Scenario("report kind mismatch: no drift reports".into()))?;
            for (i, rep) in reports.iter().enumerate() {
                if rep.get("success").and_then(|s| s.as_bool()) != Some(true) {
                    continue;
                }
                let rho = rep["rho"].as_f64().unwrap_or(f64::NAN);
                let eps = results["epsilon"].as_f64().unwrap_or(f64::NAN);
                let mut out = format!(
                    "# drift trace {i}\n# rho = {rho:?}\n# eps_band = [{:?}, {:?}]\n# columns: n g_n\n",
                    rho - eps,
                    rho + eps
                );
                for pt in rep["trace"].as_array().into_iter().flatten() {
                    out.push_str(&format!(
                        "{} {:?}\n",
                        pt[0].as_u64().unwrap_or(0),
                        pt[1].as_f64().unwrap_or(f64::NAN)
                    ));
                }
                let path = out_dir.join(format!("drift_trace_{i}.dat"));
                write_atomic(&path, out.as_bytes())?;
                written.push(path);
            }
            if written.is_empty() {
                let path = out_dir.join("drift_trace_empty.dat");
                write_atomic(&path, b"# no successful drift reports\n# columns: n g_n\n")?;
                written.push(path);
            }
        }
        "mixing" => {
            let grid = results
                .get("grid")
                .and_then(|g| g.as_array())
                .ok_or_else(|| Error::Scenario("report kind mismatch: no mixing grid".into()))?;
            let mags = results["magnitudes"].as_array().cloned().unwrap_or_default();
            let mut per_q: std::collections::BTreeMap<u64, Vec<(f64, f64)>> =
                std::collections::BTreeMap::new();
            for (cell, mag) in grid.iter().zip(mags.iter()) {
                let r = cell[0].as_f64().unwrap_or(f64::NAN);
                let q = cell[1].as_u64().unwrap_or(0);
                per_q
                    .entry(q)
                    .or_default()
                    .push((r, mag.as_f64().unwrap_or(f64::NAN)));
            }
            for (q, mut rows) in per_q {
                rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                let mut out = format!("# |I_(r,q)| for q = {q}\n# columns: r magnitude\n");
                for (r, m) in rows {
                    out.push_str(&format!("{r:?} {m:?}\n"));
                }
                let path = out_dir.join(format!("mixing_q{q}.dat"));
                write_atomic(&path, out.as_bytes())?;
                written.push(path);
            }
        }
        "rigidity" => {
            let times = results
                .get("times")
                .and_then(|t| t.as_array())
                .ok_or_else(|| Error::Scenario("report kind mismatch: no rigidity times".into()))?;
            let mass = results["mass"].as_array().cloned().unwrap_or_default();
            let mut out = String::from("# rigidity mass profile\n# columns: t mass\n");
            for (t, m) in times.iter().zip(mass.iter()) {
                out.push_str(&format!(
                    "{:?} {:?}\n",
                    t.as_f64().unwrap_or(f64::NAN),
                    m.as_f64().unwrap_or(f64::NAN)
                ));
            }
            let path = out_dir.join("rigidity.dat");
            write_atomic(&path, out.as_bytes())?;
            written.push(path);
        }
        other => {
            return Err(Error::Scenario(format!(
                "unknown plot kind {other:?} (drift | mixing | rigidity)"
            )))
        }
    }
    Ok(written)
}
