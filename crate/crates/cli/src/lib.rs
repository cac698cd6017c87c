//! Command-line front end: `pie-solve profile|classify|solve|eigen|verify`.

pub mod commands;
pub mod config;
pub mod output;

use clap::{Args, Parser, Subcommand};
use commands::{exit, CliError, Sink};
use config::{JobConfig, Overrides};
use num_complex::Complex64;
use pie_core::verify::VerifySettings;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "pie-solve",
    version,
    about = "Partial integral equations f - kappa*T1 f = g"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct JobArgs {
    /// JSON job configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Spectral parameter, e.g. `0.5` or `0.3+0.4i`.
    #[arg(long, value_parser = parse_kappa, allow_hyphen_values = true)]
    pub kappa: Option<Complex64>,
    /// Gauss–Legendre nodes in x.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Gauss–Legendre nodes in y.
    #[arg(long)]
    pub ny: Option<usize>,
}

impl JobArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            kappa: self.kappa,
            nx: self.nx,
            ny: self.ny,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample D1(y; kappa) along y.
    Profile(JobArgs),
    /// Decide whether kappa is regular, essential or characteristic.
    Classify(JobArgs),
    /// Solve the equation on the tensor grid.
    Solve(JobArgs),
    /// Track slice eigenvalues and detect eigenvalues of T1.
    Eigen(JobArgs),
    /// Run the built-in acceptance checks.
    Verify {
        /// Optional config supplying tolerances.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        zero_tol: Option<f64>,
        #[arg(long)]
        measure_tol: Option<f64>,
    },
}

pub fn parse_kappa(text: &str) -> Result<Complex64, String> {
    let t = text.trim();
    if let Ok(re) = t.parse::<f64>() {
        return Ok(Complex64::new(re, 0.0));
    }
    t.parse::<Complex64>()
        .map_err(|_| format!("`{text}` is not a number or complex literal like 0.3+0.4i"))
}

fn dispatch(command: &Command, sink: &mut Sink) -> Result<(), CliError> {
    match command {
        Command::Profile(a) => {
            commands::cmd_profile(&commands::load(&a.config, &a.overrides())?, sink)
        }
        Command::Classify(a) => {
            commands::cmd_classify(&commands::load(&a.config, &a.overrides())?, sink)
        }
        Command::Solve(a) => commands::cmd_solve(&commands::load(&a.config, &a.overrides())?, sink),
        Command::Eigen(a) => commands::cmd_eigen(&commands::load(&a.config, &a.overrides())?, sink),
        Command::Verify {
            config,
            zero_tol,
            measure_tol,
        } => {
            let mut settings = VerifySettings::default();
            if let Some(path) = config {
                let job = JobConfig::load(path)?;
                settings.zero_tol = job.tolerances.zero_tol;
                settings.measure_tol = job.tolerances.measure_tol;
            }
            if let Some(z) = zero_tol {
                settings.zero_tol = *z;
            }
            if let Some(m) = measure_tol {
                settings.measure_tol = *m;
            }
            commands::cmd_verify(&settings, sink)
        }
    }
}

/// Runs the program with `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                exit::CONFIG
            } else {
                let _ = stdout.write_all(text.as_bytes());
                exit::OK
            };
        }
    };
    let mut sink = Sink { stdout };
    match dispatch(&cli.command, &mut sink) {
        Ok(()) => exit::OK,
        Err(e) => {
            if let Some(report) = e.report() {
                let mut text = serde_json::to_string_pretty(report).unwrap_or_default();
                text.push('\n');
                let _ = sink.stdout.write_all(text.as_bytes());
            }
            let _ = writeln!(stderr, "pie-solve: {e}");
            e.exit_code()
        }
    }
}
