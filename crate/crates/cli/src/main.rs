//! `sqz`: run library scenarios as reproducible command-line experiments.

mod config;
mod output;
mod scenarios;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{check_params, Format, ParamValue, Params, ScenarioConfig};
use output::{write_run, WriteError};
use scenarios::{Scenario, CATALOG};

const DEFAULT_OUT: &str = "sqz-out";
const OUT_ENV: &str = "SQZ_OUT";

#[derive(Parser)]
#[command(name = "sqz", version, about = "Squeezed-light simulation scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config file or by name.
    Run {
        /// Path to a config `.json` file, or a scenario name.
        target: String,
        /// Scenario parameter, repeatable; overrides the config file.
        #[arg(long = "param", value_name = "K=V", value_parser = parse_kv)]
        params: Vec<(String, ParamValue)>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory [precedence: this flag, config, $SQZ_OUT, ./sqz-out].
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Check a config file against its scenario schema without running it.
    Validate { config: PathBuf },
    /// Print the scenario catalog with parameter schemas.
    List,
}

fn parse_kv(raw: &str) -> Result<(String, ParamValue), String> {
    let (k, v) = raw.split_once('=').ok_or_else(|| format!("expected K=V, got `{raw}`"))?;
    if k.trim().is_empty() {
        return Err(format!("empty parameter name in `{raw}`"));
    }
    Ok((k.trim().to_string(), ParamValue::parse(v)))
}

/// Failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    const OTHER: u8 = 1;
    const UNKNOWN_SCENARIO: u8 = 2;
    const SCHEMA: u8 = 3;
    const IO: u8 = 4;

    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<WriteError> for Failure {
    fn from(e: WriteError) -> Self {
        let code = match e {
            WriteError::Io { .. } => Self::IO,
            WriteError::Encode(_) => Self::OTHER,
        };
        Self::new(code, e.to_string())
    }
}

impl From<squeezed::Error> for Failure {
    fn from(e: squeezed::Error) -> Self {
        use squeezed::Error as E;
        let code = match e {
            E::InvalidParameter(_) | E::InsufficientPhases(_) | E::TraceTooShort(_) => Self::SCHEMA,
            E::Io(_) => Self::IO,
            _ => Self::OTHER,
        };
        Self::new(code, e.to_string())
    }
}

fn read_config(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::new(Failure::IO, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::new(Failure::SCHEMA, format!("{}: malformed config: {e}", path.display())))
}

fn lookup(name: &str) -> Result<&'static Scenario, Failure> {
    scenarios::find(name).ok_or_else(|| {
        let known: Vec<&str> = CATALOG.iter().map(|s| s.name).collect();
        Failure::new(Failure::UNKNOWN_SCENARIO, format!("unknown scenario `{name}`; known: {}", known.join(", ")))
    })
}

/// Prints the schema report; fails with the schema exit code on missing or
/// invalid parameters. Unknown keys only warn.
fn check(scenario: &Scenario, params: &BTreeMap<String, ParamValue>) -> Result<(), Failure> {
    let report = check_params(scenario.schema, params);
    for line in report.lines() {
        eprintln!("{line}");
    }
    if report.is_ok() {
        Ok(())
    } else {
        Err(Failure::new(Failure::SCHEMA, format!("invalid parameters for `{}`", scenario.name)))
    }
}

fn looks_like_file(target: &str) -> bool {
    target.ends_with(".json") || Path::new(target).is_file()
}

fn run(
    target: &str,
    overrides: Vec<(String, ParamValue)>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
) -> Result<(), Failure> {
    let mut cfg = if looks_like_file(target) {
        read_config(Path::new(target))?
    } else {
        ScenarioConfig {
            scenario: target.to_string(),
            params: BTreeMap::new(),
            seed: 0,
            output_dir: None,
            format: Format::default(),
        }
    };
    cfg.params.extend(overrides);
    cfg.seed = seed.unwrap_or(cfg.seed);
    cfg.format = format.unwrap_or(cfg.format);

    let scenario = lookup(&cfg.scenario)?;
    check(scenario, &cfg.params)?;
    let params = Params::resolve(scenario.schema, &cfg.params);

    let dir = out
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let artifacts = (scenario.run)(&params, cfg.seed)?;

    let recorded = ScenarioConfig { params: params.as_map().clone(), output_dir: Some(dir.clone()), ..cfg };
    for name in write_run(&dir, &recorded, &artifacts)? {
        println!("{}", dir.join(name).display());
    }
    Ok(())
}

fn validate(path: &Path) -> Result<(), Failure> {
    let cfg = read_config(path)?;
    let scenario = lookup(&cfg.scenario)?;
    check(scenario, &cfg.params)?;
    println!("OK");
    Ok(())
}

fn list() {
    for s in CATALOG {
        println!("{}\n    {}", s.name, s.summary);
        for p in s.schema {
            println!("    --param {}", p.describe());
        }
        println!();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // exit code 2 is reserved for unknown scenarios
            return ExitCode::from(if e.use_stderr() { Failure::OTHER } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run { target, params, seed, out, format } => run(&target, params, seed, out, format),
        Command::Validate { config } => validate(&config),
        Command::List => {
            list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
