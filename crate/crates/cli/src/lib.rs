//! The `swm` command-line front end. Each command returns an [`Outcome`]
//! holding a deterministic JSON report, a short human summary and the
//! verdict that decides the exit code.

pub mod args;
mod commands;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

pub use args::Cli;
pub use commands::execute;

/// `0` success, `1` a check failed, `2` bad input or a refused size.
pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Instance(#[from] swm_core::InstanceFileError),
    #[error(transparent)]
    Gain(#[from] swm_core::GainError),
    #[error(transparent)]
    Lp(#[from] swm_core::lp::LpError),
    #[error(transparent)]
    Valuation(#[from] swm_core::ValuationError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot build thread pool: {0}")]
    Threads(String),
}

/// Everything a command produced. Timing and thread count stay out of
/// `report` so that reruns compare byte for byte.
#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub summary: String,
    pub csv: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
struct Report<'a, P: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    parameters: P,
    results: R,
}

pub(crate) fn render<P: Serialize, R: Serialize>(
    command: &str,
    parameters: P,
    results: R,
) -> String {
    let report = Report {
        tool: "swm",
        version: env!("CARGO_PKG_VERSION"),
        command,
        parameters,
        results,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    text
}

/// Writes the report to `out` and the CSV, if any, next to it.
pub fn write_outputs(outcome: &Outcome, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let write = |path: &Path, text: &str| {
        fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })
    };
    write(out, &outcome.report)?;
    let mut written = vec![out.to_path_buf()];
    if let Some(csv) = &outcome.csv {
        let path = out.with_extension("csv");
        write(&path, csv)?;
        written.push(path);
    }
    Ok(written)
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let result = match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Threads(e.to_string()))
            .and_then(|pool| pool.install(|| execute(&cli))),
        None => execute(&cli),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    print!("{}", outcome.summary);
    if let Some(out) = &cli.out {
        match write_outputs(&outcome, out) {
            Ok(paths) => {
                for p in paths {
                    println!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        }
    }
    if outcome.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_wraps_parameters_and_results() {
        let text = render("lp", serde_json::json!({"n": 8}), serde_json::json!([1, 2]));
        assert!(text.ends_with("}\n"));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["tool"], "swm");
        assert_eq!(v["command"], "lp");
        assert_eq!(v["parameters"]["n"], 8);
        assert_eq!(v["results"][1], 2);
    }

    #[test]
    fn csv_lands_next_to_the_report() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.json");
        let outcome = Outcome {
            report: "{}\n".into(),
            summary: String::new(),
            csv: Some("i,w,a,b\n".into()),
            passed: true,
        };
        let written = write_outputs(&outcome, &out).unwrap();
        assert_eq!(written, vec![out.clone(), dir.path().join("run.csv")]);
        assert_eq!(fs::read_to_string(&written[1]).unwrap(), "i,w,a,b\n");
    }
}
