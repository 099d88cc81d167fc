//! The `motif-shap` command line. [`run`] executes one invocation and
//! returns its exit code; `pipeline` stages call it in-process.

use clap::error::ErrorKind;
use clap::Parser;
use motif_shap::{Error, Explanation, FORMAT_VERSION};
use serde::{Deserialize, Serialize};

pub mod args;
mod commands;
pub mod context;
mod eval;
pub mod model;

use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FORMAT: i32 = 3;
pub const EXIT_TRANSPORT: i32 = 4;

/// Contents of an explanation output file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExplanationFile {
    pub format_version: String,
    pub explanations: Vec<Explanation>,
}

impl ExplanationFile {
    pub fn new(explanations: Vec<Explanation>) -> Self {
        ExplanationFile {
            format_version: FORMAT_VERSION.to_string(),
            explanations,
        }
    }
}

/// Error label and exit code for a library error.
pub fn classify(err: &Error) -> (&'static str, i32) {
    match err {
        Error::Parameter(_) => ("parameter", EXIT_USAGE),
        Error::Config(_) => ("config", EXIT_USAGE),
        Error::LatticeTooLarge { .. } => ("lattice-too-large", EXIT_USAGE),
        Error::Format(_) => ("input-format", EXIT_FORMAT),
        Error::InvalidEdge { .. } | Error::SelfLoop(_) | Error::InvalidMotif { .. } => ("input-format", EXIT_FORMAT),
        Error::UniverseMismatch { .. } => ("universe-mismatch", EXIT_FORMAT),
        Error::EmptyDataset => ("empty-dataset", EXIT_FORMAT),
        Error::Transport(_) => ("transport", EXIT_TRANSPORT),
        Error::DegenerateTraining(_) => ("degenerate-training", EXIT_OTHER),
        Error::UndefinedCorrelation(_) => ("undefined-correlation", EXIT_OTHER),
        Error::Io(_) => ("io", EXIT_OTHER),
    }
}

fn report(error: &str, detail: &str) {
    eprintln!("{}", serde_json::json!({ "error": error, "detail": detail }));
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("MOTIF_SHAP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("MOTIF_SHAP_THREADS must be a positive integer, got {value:?}"))?;
    // Fails only if the pool already exists, e.g. for pipeline stages.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("motif-shap".to_string()).chain(argv.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayVersion => {
                println!("motif-shap {} (format {FORMAT_VERSION})", env!("CARGO_PKG_VERSION"));
                return EXIT_OK;
            }
            ErrorKind::DisplayHelp | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                print!("{}", e.render());
                return if e.kind() == ErrorKind::DisplayHelp { EXIT_OK } else { EXIT_USAGE };
            }
            _ => {
                let detail = e.render().to_string();
                let first = detail.lines().next().unwrap_or("").trim_start_matches("error: ");
                report("usage", first);
                return EXIT_USAGE;
            }
        },
    };
    if let Err(detail) = configure_threads() {
        report("usage", &detail);
        return EXIT_USAGE;
    }
    let result = match &cli.command {
        Command::Pipeline(a) => return commands::pipeline(a),
        command => commands::execute(argv, command),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let (kind, code) = classify(&e);
            report(kind, &e.to_string());
            code
        }
    }
}
