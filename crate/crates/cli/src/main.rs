mod args;
mod commands;

use std::fs;
use std::io::Write;
use std::panic;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{Cli, OutputMode};
use commands::{InputError, Outcome, SCHEMA_VERSION};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    let command = commands::name(&cli.command);
    let result = panic::catch_unwind(|| commands::run(&cli.command));
    let (code, body) = match result {
        Ok(Ok(outcome)) => finish(&cli, command, outcome),
        Ok(Err(InputError(errors))) => {
            for e in &errors {
                eprintln!("error: {e}");
            }
            (EXIT_INPUT, structured_only(&cli, command, "error", json!({ "errors": errors })))
        }
        Err(_) => {
            eprintln!("error: internal failure");
            (EXIT_INTERNAL, structured_only(&cli, command, "internal", json!({})))
        }
    };
    if let Some(body) = body {
        if let Err(e) = emit(&cli, &body) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    ExitCode::from(code)
}

fn document(command: &str, status: &str, payload: serde_json::Value) -> String {
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "status": status,
    });
    if let (Some(d), serde_json::Value::Object(p)) = (doc.as_object_mut(), payload) {
        d.extend(p);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    s.push('\n');
    s
}

fn finish(cli: &Cli, command: &str, o: Outcome) -> (u8, Option<String>) {
    let (code, status) = if o.positive {
        (EXIT_OK, "ok")
    } else {
        (EXIT_NEGATIVE, "negative")
    };
    let body = match cli.output {
        OutputMode::Human => o.human,
        OutputMode::Structured => document(command, status, o.doc),
    };
    (code, Some(body))
}

fn structured_only(cli: &Cli, command: &str, status: &str, payload: serde_json::Value) -> Option<String> {
    (cli.output == OutputMode::Structured).then(|| document(command, status, payload))
}

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}
