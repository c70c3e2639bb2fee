//! Front end for `resource-engine`: TOML configs in, `report.json` plus
//! tables and plots out.

pub mod config;
pub mod error;
pub mod matrix;
pub mod run;
pub mod svg;

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use config::{load_config, Mode, Overrides, RunConfig};
use error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    /// The configuration after command-line overrides.
    pub config: RunConfig,
    pub results: serde_json::Value,
    /// Empty when every validation check passed.
    pub failures: Vec<String>,
}

/// Wall-clock times live in their own file so that `report.json` stays
/// byte-identical across runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timings {
    pub load_seconds: f64,
    pub run_seconds: f64,
    pub write_seconds: f64,
}

fn write(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
}

/// Loads the config, runs `mode` and writes every output into `out`.
/// Validation failures are written to the report first and then returned as
/// [`CliError::Numeric`].
pub fn execute(mode: Mode, config: Option<&Path>, ov: &Overrides, out: &Path) -> CliResult<Report> {
    let t0 = Instant::now();
    let loaded = load_config(config, mode, ov)?;
    let t1 = Instant::now();
    let outcome = run::run(mode, &loaded)?;
    let t2 = Instant::now();

    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let report = Report {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: loaded.config.seed,
        config: loaded.config,
        results: outcome.results,
        failures: outcome.failures,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    write(out, "report.json", &text)?;
    for (name, contents) in &outcome.files {
        write(out, name, contents)?;
    }
    let timings = Timings {
        load_seconds: (t1 - t0).as_secs_f64(),
        run_seconds: (t2 - t1).as_secs_f64(),
        write_seconds: t2.elapsed().as_secs_f64(),
    };
    let mut text = serde_json::to_string_pretty(&timings).expect("timings serialize");
    text.push('\n');
    write(out, "timings.json", &text)?;

    if let Some(first) = report.failures.first() {
        return Err(CliError::Numeric(format!(
            "{} check(s) failed, first: {first}",
            report.failures.len()
        )));
    }
    Ok(report)
}
