mod commands;
mod config;
mod encode;
mod render;

use std::fs;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use commands::{CommandError, Outcome};
use config::{Cli, Command, Common, Format};

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Construct(c) | Command::Frames(c) | Command::Gauge(c) => c,
        Command::Verify { common, .. } | Command::Gram { common, .. } => common,
    }
}

fn emit(common: &Common, report: &Value) -> Result<(), String> {
    let body = match common.format {
        Format::Json => serde_json::to_string_pretty(report).expect("values serialize") + "\n",
        Format::Text => render::text(report),
    };
    match &common.output {
        Some(path) => fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = common(&cli.command).clone();
    let result = match &cli.command {
        Command::Construct(c) => commands::construct(c),
        Command::Verify { common, input } => commands::verify(common, input.as_deref()),
        Command::Frames(c) => commands::frames_cmd(c),
        Command::Gram { common, from, to } => commands::gram_cmd(common, *from, *to),
        Command::Gauge(c) => commands::gauge_cmd(c),
    };
    let (report, code) = match result {
        Ok(Outcome { report, ok }) => (report, if ok { 0 } else { 1 }),
        Err(CommandError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CommandError::Failed { meta, kind, message }) => {
            eprintln!("error: {kind}: {message}");
            (json!({"meta": meta, "error": {"kind": kind, "message": message}}), 1)
        }
    };
    if let Err(msg) = emit(&common, &report) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
