//! `bww` — check, query, export, and closure over BWW-ML model files.
//!
//! Exit status:
//! - 0: success; the model is conformant (warnings and infos permitted)
//! - 1: validation errors present
//! - 2: the file did not lex, parse, resolve, or build
//! - 3: bad invocation, unknown identifier in a query, or an I/O failure
//!
//! Diagnostics go to stderr; data output (query values, export JSON,
//! closure pairs, `--format json` reports) goes to stdout. Setting
//! `BWW_NO_COLOR` disables ANSI coloring.

mod query;

use bww_core::export::{diagnostics_json, export_model, to_json};
use bww_core::{compile, validate_model, Diagnostic, Model, Severity};
use clap::{Parser, Subcommand, ValueEnum};
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "bww", version, about = "BWW-ML model checker and query tool")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, build, and validate a model file.
    Check {
        path: PathBuf,
        /// Report findings as text lines or as a JSON array.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate one query expression, e.g. "possesses?(book1, Title)".
    Query { path: PathBuf, expr: String },
    /// Write the model as a JSON document.
    Export {
        path: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Print the reflexive-transitive precedence closure, one pair per line.
    Closure { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// The documented exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExitStatus {
    Ok,
    ValidationErrors,
    FrontendFailure,
    BadInvocation,
}

impl ExitStatus {
    fn code(self) -> u8 {
        match self {
            ExitStatus::Ok => 0,
            ExitStatus::ValidationErrors => 1,
            ExitStatus::FrontendFailure => 2,
            ExitStatus::BadInvocation => 3,
        }
    }
}

fn color_enabled() -> bool {
    std::env::var_os("BWW_NO_COLOR").is_none() && std::io::stderr().is_terminal()
}

fn print_diagnostics(diags: &[Diagnostic]) {
    let color = color_enabled();
    for d in diags {
        eprintln!("{}", d.render(color));
    }
}

/// Read and build the model, reporting frontend problems on stderr.
fn load_model(path: &Path) -> Result<Model, ExitStatus> {
    let source = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("bww: cannot read {}: {}", path.display(), e);
            return Err(ExitStatus::BadInvocation);
        }
    };
    let file = path.to_string_lossy();
    compile(&source, &file).map_err(|diags| {
        print_diagnostics(&diags);
        ExitStatus::FrontendFailure
    })
}

fn run_check(path: &Path, format: Format) -> ExitStatus {
    let source = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("bww: cannot read {}: {}", path.display(), e);
            return ExitStatus::BadInvocation;
        }
    };
    let file = path.to_string_lossy();
    match compile(&source, &file) {
        Err(diags) => {
            match format {
                Format::Text => print_diagnostics(&diags),
                Format::Json => print!("{}", diagnostics_json(&diags)),
            }
            ExitStatus::FrontendFailure
        }
        Ok(model) => {
            let diags = validate_model(&model);
            match format {
                Format::Text => print_diagnostics(&diags),
                Format::Json => print!("{}", diagnostics_json(&diags)),
            }
            if diags.iter().any(|d| d.severity == Severity::Error) {
                ExitStatus::ValidationErrors
            } else {
                ExitStatus::Ok
            }
        }
    }
}

fn run_query(path: &Path, expr: &str) -> ExitStatus {
    let model = match load_model(path) {
        Ok(m) => m,
        Err(status) => return status,
    };
    match query::evaluate(&model, expr) {
        Ok(result) => {
            println!("{}", query::render(&model, &result));
            ExitStatus::Ok
        }
        Err(failure) => {
            eprintln!("bww: {}", failure);
            ExitStatus::BadInvocation
        }
    }
}

fn run_export(path: &Path, out: Option<&Path>) -> ExitStatus {
    let model = match load_model(path) {
        Ok(m) => m,
        Err(status) => return status,
    };
    let json = to_json(&export_model(&model));
    match out {
        Some(out_path) => {
            if let Err(e) = std::fs::write(out_path, &json) {
                eprintln!("bww: cannot write {}: {}", out_path.display(), e);
                return ExitStatus::BadInvocation;
            }
        }
        None => print!("{}", json),
    }
    ExitStatus::Ok
}

fn run_closure(path: &Path) -> ExitStatus {
    let model = match load_model(path) {
        Ok(m) => m,
        Err(status) => return status,
    };
    let mut lines: Vec<String> = model
        .precedes_closure()
        .iter()
        .map(|(a, b)| format!("{} -> {}", model.property_name(*a), model.property_name(*b)))
        .collect();
    lines.sort();
    for line in lines {
        println!("{}", line);
    }
    ExitStatus::Ok
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match &cli.command {
        Command::Check { path, format } => run_check(path, *format),
        Command::Query { path, expr } => run_query(path, expr),
        Command::Export { path, out } => run_export(path, out.as_deref()),
        Command::Closure { path } => run_closure(path),
    };
    ExitCode::from(status.code())
}
