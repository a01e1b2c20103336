use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use codegram::experiment::{self, ExperimentConfig, RunManifest, Settings};
use codegram::Error;

/// Gram-matrix spectra of code-based random matrices.
#[derive(Parser, Debug)]
#[command(name = "codegram", version)]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand, Debug)]
enum Group {
    /// Code construction and weight data.
    Code {
        #[command(subcommand)]
        action: CodeAction,
    },
    /// Spectra against the Marchenko-Pastur law.
    Spectra {
        #[command(subcommand)]
        action: RunAction,
    },
    /// Monte Carlo moments against the main term and error bound.
    Moments {
        #[command(subcommand)]
        action: RunAction,
    },
    /// Closed-path combinatorics.
    Paths {
        #[command(subcommand)]
        action: PathsAction,
    },
}

#[derive(Subcommand, Debug)]
enum CodeAction {
    /// Print n, k, d, dual distance and weight distributions as JSON.
    Info(Flags),
}

#[derive(Subcommand, Debug)]
enum RunAction {
    Run(Flags),
}

#[derive(Subcommand, Debug)]
enum PathsAction {
    /// Check every path class up to --lmax against the brute-force count.
    Verify(Flags),
    /// Tabulate Gamma classes by length and vertex count.
    Count(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin code: gold, simplex, hamming, repetition, double-trace.
    #[arg(long)]
    code: Option<String>,
    /// Code parameter (field degree, or length for repetition).
    #[arg(long)]
    m: Option<u32>,
    /// Generator matrix file, instead of --code.
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    /// Number of sampled rows.
    #[arg(long)]
    p: Option<usize>,
    /// Aspect ratio p/n, instead of --p.
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    lmax: Option<u32>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv,json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// Also compute the exact expectation (moments run).
    #[arg(long)]
    exact: bool,
}

impl Flags {
    fn config(&self) -> codegram::Result<ExperimentConfig> {
        let mut settings = match &self.config {
            Some(path) => Settings::read(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        let pairs: [(&str, Option<String>); 11] = [
            ("code", self.code.clone()),
            ("m", self.m.map(|v| v.to_string())),
            (
                "matrix-file",
                self.matrix_file.as_ref().map(|p| p.display().to_string()),
            ),
            ("p", self.p.map(|v| v.to_string())),
            ("y", self.y.map(|v| v.to_string())),
            ("trials", self.trials.map(|v| v.to_string())),
            ("lmax", self.lmax.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("format", self.format.clone()),
            ("workers", self.workers.map(|v| v.to_string())),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v)?;
            }
        }
        if self.exact {
            flags.set("exact", "true")?;
        }
        settings.overlay(&flags);
        settings.resolve()
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 2,
        Error::Resource(_) => 3,
        Error::Numerical(_) => 4,
        _ => 1,
    }
}

fn report(m: &RunManifest) {
    for w in &m.warnings {
        eprintln!("warning: {w}");
    }
    for f in &m.files {
        let _ = writeln!(
            std::io::stdout(),
            "{}  {}",
            f.sha256,
            m.config.out.join(&f.name).display()
        );
    }
}

fn run(cli: Cli) -> codegram::Result<bool> {
    match cli.group {
        Group::Code {
            action: CodeAction::Info(flags),
        } => {
            let code = flags.config()?.build_code()?;
            let text =
                serde_json::to_string_pretty(&experiment::code_info(&code)).map_err(|e| Error::Parse(e.to_string()))?;
            let _ = writeln!(std::io::stdout(), "{text}");
            Ok(true)
        }
        Group::Spectra {
            action: RunAction::Run(flags),
        } => {
            report(&experiment::run_spectra(&flags.config()?)?);
            Ok(true)
        }
        Group::Moments {
            action: RunAction::Run(flags),
        } => {
            report(&experiment::run_moments(&flags.config()?)?);
            Ok(true)
        }
        Group::Paths {
            action: PathsAction::Verify(flags),
        } => {
            let (m, ok) = experiment::run_paths_verify(&flags.config()?)?;
            report(&m);
            if !ok {
                eprintln!("some path classes violate the dichotomy; see paths.json");
            }
            Ok(ok)
        }
        Group::Paths {
            action: PathsAction::Count(flags),
        } => {
            let (m, ok) = experiment::run_paths_count(&flags.config()?)?;
            report(&m);
            if !ok {
                eprintln!("enumerated counts disagree with the Narayana numbers");
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
