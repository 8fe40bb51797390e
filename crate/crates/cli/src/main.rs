mod args;
mod commands;
mod output;
mod resolve;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{expand_config, Cli, Command};

fn thread_pool() -> Result<(), String> {
    let Ok(raw) = std::env::var("AIM_MAX_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("AIM_MAX_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run() -> Result<i32, String> {
    let argv = expand_config(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return Ok(match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            });
        }
    };
    thread_pool()?;
    let outcome = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Scan(a) => commands::scan_cmd(a),
        Command::Verify(a) => commands::verify(a),
        Command::Table1(a) => commands::table1(a),
        Command::Table2(a) => commands::table2(a),
        Command::Table3(a) => commands::table3(a),
        Command::Reconstruct(a) => commands::reconstruct(a),
    };
    outcome.map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
