//! Drive an experiment programmatically through the scenario layer (the
//! same path the `specflow` CLI uses) and inspect the written artifacts.
//!
//! ```bash
//! cargo run --example scenario_run
//! ```

use specflow::roof::RoofSpec;
use specflow::scenario::{run_parsed, AlphaSpec, ExperimentKind, OutputFormat, OutputSpec, Scenario};

fn main() -> specflow::Result<()> {
    let out = std::env::temp_dir().join("specflow_example_run");
    let scenario = Scenario {
        alpha: AlphaSpec::Quadratic("(-1+sqrt(5))/2".into()),
        depth: 25,
        roof: RoofSpec {
            constant: 1.0,
            jumps: vec![specflow::roof::JumpEntrySpec {
                beta: "0".into(),
                d: 0.5,
            }],
            ac: None,
            tail_bound: 0.0,
        },
        experiment: ExperimentKind::Dk,
        params: serde_json::json!({"n_index_max": 12, "samples": 200}),
        seed: 7,
        output: OutputSpec {
            dir: out.clone(),
            format: OutputFormat::Both,
        },
    };
    let report = run_parsed(scenario)?;
    println!("experiment {:?} done, results:", report.experiment);
    println!("{}", serde_json::to_string_pretty(&report.results)?);
    println!("artifacts under {}", out.display());
    for entry in std::fs::read_dir(&out)? {
        println!("  {}", entry?.path().display());
    }
    Ok(())
}
