//! Command-line front end for `ttgeo`: argument parsing, dispatch and
//! JSON/text/DOT rendering.

pub mod cache;
pub mod commands;
pub mod config;
pub mod poset;

use std::fs;

use clap::Parser;
use ttgeo::Error;

pub use commands::{dispatch, load_family, Report};
pub use config::{Command, Format, RunConfig, Sweep};
pub use poset::export_poset;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Rendered result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ClassificationViolation(_) | Error::NaturalityViolation(_) => EXIT_REFUTED,
        _ => EXIT_INVALID,
    }
}

/// Runs a validated configuration.
pub fn run(cfg: &RunConfig) -> Outcome {
    match dispatch(cfg) {
        Ok(report) => {
            let format = if report.dot.is_some() { Format::Dot } else { cfg.format };
            let stdout = match format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report.json).expect("serializable");
                    s.push('\n');
                    s
                }
                Format::Text => report.text,
                Format::Dot => match report.dot {
                    Some(d) => d,
                    None => {
                        return Outcome {
                            code: EXIT_INVALID,
                            stdout: String::new(),
                            stderr: "error: DOT output is only available for `spectrum`\n".into(),
                        }
                    }
                },
            };
            Outcome {
                code: if report.refuted { EXIT_REFUTED } else { EXIT_OK },
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Parses command-line arguments (including the program name) and runs them.
/// `--config <file>` as the only option loads a JSON [`RunConfig`] instead.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    if args.len() == 3 && args[1] == "--config" {
        let loaded = fs::read_to_string(&args[2])
            .map_err(|e| format!("cannot read {}: {e}", args[2].to_string_lossy()))
            .and_then(|s| config_from_json(&s).map_err(|e| e.to_string()));
        return match loaded {
            Ok(cfg) => run(&cfg),
            Err(e) => Outcome {
                code: EXIT_INVALID,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            },
        };
    }
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let rendered = e.render().to_string();
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let (stdout, stderr) = if code == EXIT_OK {
                (rendered, String::new())
            } else {
                (String::new(), rendered)
            };
            Outcome { code, stdout, stderr }
        }
    }
}

/// Reads a JSON configuration, rejecting unknown fields and zero caps.
pub fn config_from_json(s: &str) -> ttgeo::Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(s).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if cfg.stage_cap == 0 || cfg.order_cap == 0 {
        return Err(Error::InvalidSpec("caps must be at least 1".into()));
    }
    Ok(cfg)
}
