mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Core(swaysim::Error),
    Usage(String),
    /// A check the user asked for did not hold.
    Check(String),
}

impl From<swaysim::Error> for CliError {
    fn from(e: swaysim::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let mut error = match self {
            CliError::Core(e) => json!({ "category": e.category(), "message": e.to_string() }),
            CliError::Usage(m) => json!({ "category": "usage", "message": m }),
            CliError::Check(m) => json!({ "category": "check_failed", "message": m }),
        };
        if let CliError::Core(e) = self {
            let fields = &mut error;
            match e {
                swaysim::Error::Io { path, .. } => fields["path"] = json!(path.display().to_string()),
                swaysim::Error::Gml { path, line, column, .. } => {
                    fields["path"] = json!(path);
                    fields["line"] = json!(line);
                    fields["column"] = json!(column);
                }
                swaysim::Error::EdgeList { path, line, .. } => {
                    fields["path"] = json!(path);
                    fields["line"] = json!(line);
                }
                swaysim::Error::DanglingEndpoint { path, .. } => fields["path"] = json!(path),
                _ => {}
            }
        }
        json!({
            "format_version": swaysim::io::FORMAT_VERSION,
            "kind": "error",
            "error": error,
        })
    }
}

fn report(e: &CliError) -> ExitCode {
    eprintln!("{}", serde_json::to_string_pretty(&e.to_json()).unwrap_or_default());
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => return report(&CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    let result = match &cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Predict(a) => commands::predict(a),
        Command::Rank(a) => commands::rank(a),
        Command::Simulate(a) => commands::simulate(a, cli.seed),
        Command::Sweep(a) => commands::sweep(a, cli.seed, cli.jobs),
        Command::Validate(a) => commands::validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
