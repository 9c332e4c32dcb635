use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::evolution::run_evolution;
use crate::verification::{convergence_study, detect_stabilization, run_suite, standing_wave};

use super::config::ScenarioConfig;
use super::output::write_outputs;
use super::presets::{preset, PRESET_NAMES};

/// Energy oscillation band (relative to E_0) for the stabilization report.
pub const DEFAULT_OSC_TOL: f64 = 0.02;

#[derive(Debug, Parser)]
#[command(
    name = "fracwave",
    version,
    about = "Obstacle wave equation solver for the (fractional) Laplacian"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write energy/snapshot/contact outputs.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (default: `output.dir` from the config, else `./output`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario and check the discrete energy and variational properties.
    Verify {
        #[command(flatten)]
        source: Source,
    },
    /// Refine (h, τ) repeatedly and print an error table.
    Convergence {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = Reference::SelfConvergence)]
        reference: Reference,
    },
    /// List built-in presets, or print one as TOML.
    Presets {
        #[arg(long)]
        show: Option<String>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Reference {
    /// Finest level is the reference.
    #[value(name = "self")]
    SelfConvergence,
    /// Exact standing wave sin(x) cos(t).
    StandingWave,
}

impl Source {
    fn load(&self) -> Result<ScenarioConfig, Error> {
        match (&self.config, &self.preset) {
            (Some(path), _) => ScenarioConfig::from_path(path),
            (None, Some(name)) => preset(name),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

const EXIT_OK: i32 = 0;
const EXIT_FAILED: i32 = 1;
const EXIT_USAGE: i32 = 2;

/// Entry point of the `fracwave` binary; returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

enum Failure {
    /// Bad arguments or configuration.
    Usage(Error),
    /// The run or its outputs failed.
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn load(source: &Source) -> Result<(ScenarioConfig, crate::evolution::Scenario), Failure> {
    let config = source.load().map_err(Failure::Usage)?;
    let scenario = config.resolve().map_err(Failure::Usage)?;
    Ok((config, scenario))
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Run { source, out } => {
            let (config, scenario) = load(&source)?;
            if config.is_experimental() {
                eprintln!("warning: double-obstacle mode is experimental");
            }
            let record = run_evolution(&scenario)?;
            let report = detect_stabilization(&record, DEFAULT_OSC_TOL);
            let dir = out
                .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("output"));
            for path in write_outputs(&record, &report, &config, &dir)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(EXIT_OK)
        }
        Command::Verify { source } => {
            let (_, scenario) = load(&source)?;
            let record = run_evolution(&scenario)?;
            let outcomes = run_suite(&record)?;
            println!("{:<24} {:<6} detail", "check", "status");
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                println!("{:<24} {:<6} {}", o.name, status, o.detail);
            }
            Ok(if outcomes.iter().all(|o| o.passed) {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
        Command::Convergence {
            source,
            levels,
            reference,
        } => {
            let (config, _) = load(&source)?;
            if levels < 1 {
                return Err(Failure::Usage(Error::config(
                    "--levels",
                    "must be at least 1",
                )));
            }
            let table = match reference {
                Reference::StandingWave => {
                    convergence_study(&config, Some(&standing_wave), levels)?
                }
                Reference::SelfConvergence => convergence_study(&config, None, levels)?,
            };
            if table.self_referenced {
                eprintln!("errors measured against the finest level");
            }
            print!("{}", table.to_csv());
            Ok(EXIT_OK)
        }
        Command::Presets { show } => {
            match show {
                Some(name) => print!(
                    "{}",
                    preset(&name).map_err(Failure::Usage)?.to_toml_string()
                ),
                None => {
                    for name in PRESET_NAMES {
                        println!("{name}");
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}
