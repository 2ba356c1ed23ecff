// `!(a < b)` comparisons reject NaN coming in through numeric flags.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod write;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};


fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match inject_config(argv) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version printing; real parse failures
            // are validation errors.
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(2),
            };
        }
    };

    let result = match &cli.command {
        Command::Model(a) => commands::run_model(a),
        Command::Characterize(a) => commands::run_characterize(a),
        Command::Transient(a) => commands::run_transient(a),
        Command::Hilbert(a) => commands::run_hilbert(a),
        Command::Demo(a) => commands::run_demo(a),
        Command::Touchstone(a) => commands::run_touchstone(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Merge `--config <file>` key = value pairs into the argument list as
/// default flags; flags given explicitly on the command line win.
fn inject_config(mut argv: Vec<String>) -> Result<Vec<String>, String> {
    let path = {
        let mut found = None;
        for (i, a) in argv.iter().enumerate() {
            if a == "--config" {
                found = Some(
                    argv.get(i + 1)
                        .ok_or_else(|| "--config requires a path".to_string())?
                        .clone(),
                );
            } else if let Some(p) = a.strip_prefix("--config=") {
                found = Some(p.to_string());
            }
        }
        found
    };
    let Some(path) = path else {
        return Ok(argv);
    };
    let text =
        std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path:?}: {e}"))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("config {path:?} line {}: expected key = value", lineno + 1));
        };
        let flag = format!("--{}", key.trim().replace('_', "-"));
        let value = value.trim();
        if value.is_empty() {
            return Err(format!("config {path:?} line {}: empty value for {flag}", lineno + 1));
        }
        let explicitly_set = argv
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if !explicitly_set {
            argv.push(flag);
            argv.push(value.to_string());
        }
    }
    Ok(argv)
}
