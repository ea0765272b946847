use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use densbound_cli::{run, Command, ConfigError, RunOptions};

#[derive(Parser)]
#[command(
    name = "densbound",
    version,
    about = "Lower bounds for Neumann eigenvalues with density on conformal images of the disk"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the requested bound methods for every scenario.
    Bound(Common),
    /// Compare every bound with the FEM eigenvalue; exit 1 on a violation.
    Verify(Common),
    /// Quasidisc bounds along Gaussian densities with the fitted slope.
    Sweep(Common),
    /// Standalone norms and K functionals.
    Norms(Common),
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    fem_level: Option<u32>,
    #[arg(long, default_value_t = 2e-2)]
    tol: f64,
    #[arg(long, hide = true)]
    corrupt_factor: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let (command, c) = match cli.command {
        Cmd::Bound(c) => (Command::Bound, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Norms(c) => (Command::Norms, c),
    };
    let path = c.config.display().to_string();
    let text = std::fs::read_to_string(&c.config).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let opts = RunOptions { jobs: c.jobs, fem_level: c.fem_level, tol: c.tol, corrupt_factor: c.corrupt_factor };
    let out = run(command, &text, &opts).map_err(|source| CliError::Config { path, source })?;
    match &c.out {
        Some(p) => {
            std::fs::write(p, &out.csv).map_err(|source| CliError::Io { path: p.display().to_string(), source })?
        }
        None => print!("{}", out.csv),
    }
    Ok(out.soundness_violation)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("soundness violation: some bound exceeds the FEM eigenvalue");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
