mod args;
mod commands;
mod error;
mod fnspec;
mod svg;

use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use args::{Cli, Command, Merge};
use error::{CliError, EXIT_OK, EXIT_USAGE};

const THREADS_VAR: &str = "LPCRIT_THREADS";

fn load_config(path: &Path) -> Result<(Option<String>, Map<String, Value>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::Usage(format!("{}: expected a JSON object", path.display())));
    };
    let command = match map.remove("command") {
        None => None,
        Some(Value::String(s)) => Some(s),
        Some(_) => return Err(CliError::Usage("config key `command` must be a string".into())),
    };
    Ok((command, map))
}

fn from_map<T: DeserializeOwned>(map: Map<String, Value>) -> Result<T, CliError> {
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Usage(format!("config: {e}")))
}

fn command_from_config(name: &str, map: Map<String, Value>) -> Result<Command, CliError> {
    Ok(match name {
        "verify-criterion" => Command::VerifyCriterion(from_map(map)?),
        "counterexample" => Command::Counterexample(from_map(map)?),
        "lattice-count" => Command::LatticeCount(from_map(map)?),
        "trig-decomp" => Command::TrigDecomp(from_map(map)?),
        "simplex" => Command::Simplex(from_map(map)?),
        other => return Err(CliError::Usage(format!("config: unknown command `{other}`"))),
    })
}

/// Command-line flags over config-file values.
fn merge(cli: Command, file: Command) -> Command {
    match (cli, file) {
        (Command::VerifyCriterion(a), Command::VerifyCriterion(b)) => Command::VerifyCriterion(a.merge(b)),
        (Command::Counterexample(a), Command::Counterexample(b)) => Command::Counterexample(a.merge(b)),
        (Command::LatticeCount(a), Command::LatticeCount(b)) => Command::LatticeCount(a.merge(b)),
        (Command::TrigDecomp(a), Command::TrigDecomp(b)) => Command::TrigDecomp(a.merge(b)),
        (Command::Simplex(a), Command::Simplex(b)) => Command::Simplex(a.merge(b)),
        (a, _) => a,
    }
}

fn resolve(cli: Cli) -> Result<Command, CliError> {
    let file = cli.config.as_deref().map(load_config).transpose()?;
    match (cli.command, file) {
        (Some(cmd), None) => Ok(cmd),
        (Some(cmd), Some((name, map))) => {
            let name = name.unwrap_or_else(|| cmd.name().to_string());
            if name != cmd.name() {
                return Err(CliError::Usage(format!(
                    "config is for `{name}` but the command is `{}`",
                    cmd.name()
                )));
            }
            Ok(merge(cmd, command_from_config(&name, map)?))
        }
        (None, Some((Some(name), map))) => command_from_config(&name, map),
        (None, Some((None, _))) => Err(CliError::Usage("config has no `command` key".into())),
        (None, None) => Err(CliError::Usage("no command given; see --help".into())),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Output(e.to_string()))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    configure_threads()?;
    let outcome = match resolve(cli)? {
        Command::VerifyCriterion(a) => commands::criterion(a)?,
        Command::Counterexample(a) => commands::counterexample(a)?,
        Command::LatticeCount(a) => commands::lattice_count(a)?,
        Command::TrigDecomp(a) => commands::trig_decomp(a)?,
        Command::Simplex(a) => commands::simplex(a)?,
    };
    Ok(outcome.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
