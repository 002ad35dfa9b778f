//! Experiment runner CLI: `specflow run <scenario.json>`,
//! `specflow suite <dir> --jobs K`, `specflow plot <report.json> --kind <k>`.
//!
//! Exit codes: 0 success, 2 validation, 3 precision/io, 4 hypothesis
//! failure, 5 falsification event.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use specflow::scenario;

#[derive(Parser)]
#[command(name = "specflow", version, about = "special-flow experiment runner")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a single scenario file.
    Run { scenario: PathBuf },
    /// Run every *.json scenario in a directory.
    Suite {
        dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Emit gnuplot data files from a written report.json.
    Plot {
        report: PathBuf,
        #[arg(long)]
        kind: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run { scenario: path } => {
            let started = Instant::now();
            match scenario::run_scenario(&path) {
                Ok(report) => {
                    println!(
                        "ok: {} experiment {:?} -> {} ({} ms)",
                        path.display(),
                        report.experiment,
                        report.scenario.output.dir.display(),
                        started.elapsed().as_millis()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Cmd::Suite { dir, jobs } => {
            let mut paths: Vec<PathBuf> = match std::fs::read_dir(&dir) {
                Ok(rd) => rd
                    .filter_map(|e| e.ok())
                    .map(|e| e.path())
                    .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
                    .collect(),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(3);
                }
            };
            paths.sort();
            if paths.is_empty() {
                eprintln!("error: no *.json scenarios in {}", dir.display());
                return ExitCode::from(2);
            }
            let started = Instant::now();
            match scenario::suite(&paths, jobs) {
                Ok((code, entries)) => {
                    for e in &entries {
                        println!("[{}] {} - {}", e.exit_code, e.path.display(), e.message);
                    }
                    println!(
                        "suite: {} scenarios, aggregate exit {code} ({} ms)",
                        entries.len(),
                        started.elapsed().as_millis()
                    );
                    ExitCode::from(code as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Cmd::Plot { report, kind, out } => match scenario::emit_plot_data(&report, &kind, &out) {
            Ok(files) => {
                for f in files {
                    println!("wrote {}", f.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
