//! `manakov` — command-line front end for the dual-engine soliton-train
//! simulator.
//!
//! Subcommands: `simulate` runs a scenario file through its selected
//! engines and writes a result directory; `preset` emits one of the named
//! benchmark scenarios as a config document; `classify` reports the
//! initial-data regime; `compare` computes deviation metrics between two
//! trajectory CSV files; `kernels` prints interaction-kernel values.
//!
//! Failures print a machine-readable JSON envelope
//! `{"error":{"kind":…,"message":…}}` to stderr and exit nonzero.

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use manakov::config::ScenarioDoc;
use manakov::harness::{
    compare_trajectories, classify_scenario, preset_doc, result_root, run_scenario,
    DEFAULT_COMPARISON_THRESHOLD,
};
use manakov::io::{error_json, read_trajectories_csv, regime_json_string};
use manakov::potential::kernels;
use manakov::{Error, Result};

#[derive(Parser)]
#[command(
    name = "manakov",
    version,
    about = "Dual-engine simulator for two-component NLS soliton trains over sech^2 potentials"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file; writes trajectories, regime report, conserved
    /// quantities, metrics, and the resolved scenario to a result directory
    Simulate {
        /// Scenario config file (TOML)
        scenario: PathBuf,
        /// Result directory (default: <result root>/<scenario file stem>;
        /// the root honors $MANAKOV_RESULT_ROOT)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a named benchmark scenario as a config document
    Preset {
        /// One of: afr_free, afr_well, bsr_free, bsr_hump, mar_free, mar_well
        name: String,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a scenario's initial train into AFR/BSR/MAR (JSON to stdout)
    Classify {
        /// Scenario config file (TOML)
        scenario: PathBuf,
    },
    /// Compare two trajectory CSV files (JSON metrics to stdout)
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Deviation threshold for the exceed-time metric
        #[arg(long, default_value_t = DEFAULT_COMPARISON_THRESHOLD)]
        threshold: f64,
    },
    /// Print the interaction-kernel values at a given separation (JSON)
    Kernels {
        /// Scaled separation argument
        #[arg(long)]
        delta: f64,
    },
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("{}", error_json(&e));
            std::process::exit(1);
        }
    }
}

fn load_scenario(path: &PathBuf) -> Result<manakov::config::Scenario> {
    let text = fs::read_to_string(path)?;
    ScenarioDoc::from_toml(&text)?.resolve()
}

/// Write `text` to stdout. A closed pipe (e.g. `manakov … | head`) ends the
/// program quietly with success; any other write failure is reported on
/// stderr and exits nonzero.
fn emit(text: &str) {
    use std::io::{ErrorKind, Write};
    let mut out = std::io::stdout().lock();
    let res = out.write_all(text.as_bytes()).and_then(|()| out.flush());
    if let Err(e) = res {
        if e.kind() == ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("{}", error_json(&Error::Io(e)));
        std::process::exit(1);
    }
}

fn emitln(text: &str) {
    emit(&format!("{text}\n"));
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Simulate { scenario, out } => {
            let sc = load_scenario(&scenario)?;
            let out_dir = out.unwrap_or_else(|| {
                let stem = scenario
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "scenario".to_string());
                result_root().join(stem)
            });
            let bundle = run_scenario(&sc, &out_dir)?;
            emitln(&format!("results: {}", out_dir.display()));
            emitln(&format!("regime at t=0: {}", bundle.regime.label.as_str()));
            if let Some(ts) = &bundle.pde {
                emitln(&format!("pde: {} tracks x {} samples", ts.n_tracks(), ts.n_samples()));
            }
            if let Some(ts) = &bundle.pctc {
                emitln(&format!("pctc: {} tracks x {} samples", ts.n_tracks(), ts.n_samples()));
            }
            if let Some(note) = &bundle.pctc_note {
                emitln(&format!("note: {note}"));
            }
            if let Some(m) = &bundle.metrics {
                if let Some(worst) = m.worst_max() {
                    emitln(&format!("max pde/pctc deviation: {worst}"));
                }
            }
            if !bundle.engines_ok() {
                let mut parts = Vec::new();
                if let Some(e) = &bundle.pde_error {
                    parts.push(format!("pde: {e}"));
                }
                if let Some(e) = &bundle.pctc_error {
                    parts.push(format!("pctc: {e}"));
                }
                eprintln!(
                    "{}",
                    serde_json::json!({
                        "error": {
                            "kind": "engine",
                            "message": format!(
                                "engine failure ({}); partial results kept in {}",
                                parts.join("; "),
                                out_dir.display()
                            ),
                        }
                    })
                );
                return Ok(3);
            }
            Ok(0)
        }
        Cmd::Preset { name, out } => {
            let doc = preset_doc(&name)?;
            let text = doc.to_toml();
            match out {
                Some(path) => fs::write(path, text)?,
                None => emit(&text),
            }
            Ok(0)
        }
        Cmd::Classify { scenario } => {
            let sc = load_scenario(&scenario)?;
            let report = classify_scenario(&sc)?;
            emitln(&regime_json_string(&report));
            Ok(0)
        }
        Cmd::Compare { a, b, threshold } => {
            let ts_a = read_trajectories_csv(BufReader::new(fs::File::open(&a)?))?;
            let ts_b = read_trajectories_csv(BufReader::new(fs::File::open(&b)?))?;
            let metrics = compare_trajectories(&ts_a, &ts_b, threshold)?;
            emitln(
                &serde_json::to_string_pretty(&metrics)
                    .map_err(|e| Error::Comparison(format!("metrics serialization: {e}")))?,
            );
            Ok(0)
        }
        Cmd::Kernels { delta } => {
            if !delta.is_finite() {
                return Err(Error::InvalidPotential(format!(
                    "kernel argument must be finite, got {delta}"
                )));
            }
            let k = kernels(delta);
            emitln(
                &serde_json::json!({
                    "delta": delta, "p": k.p, "r": k.r, "n": k.n, "q": k.q,
                })
                .to_string(),
            );
            Ok(0)
        }
    }
}
