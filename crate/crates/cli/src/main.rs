use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use euler_attractor::szego::Approximation;
use euler_attractor_cli::commands;
use euler_attractor_cli::{CliError, RunConfig};

#[derive(Parser)]
#[command(
    name = "euler-zeros",
    version,
    about = "Zeros of scaled Euler polynomials and their attractor"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `key=value` file applied before the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Bits, or `auto` for max(256, 8n + 64).
    #[arg(long, global = true)]
    precision_bits: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    mu: Option<u32>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    tol_real: Option<f64>,
    #[arg(long, global = true)]
    tol_attr: Option<f64>,
    /// Samples per attractor arc used for classification.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// `json` or `csv`.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact coefficients of E_n.
    Coeffs {
        #[arg(long)]
        n: usize,
    },
    /// Certified roots of E_n(nx).
    Roots {
        #[arg(long)]
        n: usize,
    },
    /// Sampled attractor and its constants.
    Attractor {
        /// Samples per arc.
        #[arg(long, default_value_t = 256)]
        m: usize,
    },
    /// Classify a roots file against the attractor.
    Classify {
        #[arg(long)]
        roots: PathBuf,
    },
    /// Density reports for several degrees.
    Density {
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
    },
    /// Szegő-type approximation errors.
    Szego {
        /// prop1, prop2 or prop3.
        #[arg(long)]
        which: String,
        /// `re,im` or `re`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
    },
    /// M/K decomposition at one point.
    Decomp {
        #[arg(long)]
        n: usize,
        /// `re,im` or `re`.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// SVG of a roots file over an attractor file.
    Plot {
        #[arg(long)]
        roots: PathBuf,
        #[arg(long)]
        attractor: PathBuf,
    },
}

fn parse_point(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("expected re,im or re, got {s:?}"));
    let mut parts = s.split(',').map(|p| p.trim().parse::<f64>());
    let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let im = match parts.next() {
        Some(v) => v.map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((re, im))
}

fn build_config(c: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &c.config {
        cfg.apply_file(path)?;
    }
    let flags: [(&str, Option<String>); 9] = [
        ("precision_bits", c.precision_bits.clone()),
        ("seed", c.seed.map(|v| v.to_string())),
        ("mu", c.mu.map(|v| v.to_string())),
        ("alpha", c.alpha.map(|v| v.to_string())),
        ("tol_real", c.tol_real.map(|v| v.to_string())),
        ("tol_attr", c.tol_attr.map(|v| v.to_string())),
        ("samples", c.samples.map(|v| v.to_string())),
        ("format", c.format.clone()),
        (
            "cache_dir",
            c.cache_dir.as_ref().map(|p| p.display().to_string()),
        ),
    ];
    for (k, v) in flags.iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))) {
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = build_config(&cli.common)?;
    let out = cli.common.out.as_deref();
    let text = match &cli.command {
        Command::Coeffs { n } => commands::cmd_coeffs(*n, &cfg)?,
        Command::Roots { n } => commands::cmd_roots(*n, &cfg)?,
        Command::Attractor { m } => commands::cmd_attractor(*m, &cfg)?,
        Command::Classify { roots } => commands::cmd_classify(roots, &cfg)?,
        Command::Density { n_list } => {
            let (text, failure) = commands::cmd_density(n_list, &cfg)?;
            emit(out, &text)?;
            return failure.map_or(Ok(()), Err);
        }
        Command::Szego {
            which,
            point,
            n_list,
        } => {
            let which: Approximation = which.parse()?;
            commands::cmd_szego(which, parse_point(point)?, n_list, &cfg)?
        }
        Command::Decomp { n, x } => commands::cmd_decomp(*n, parse_point(x)?, &cfg)?,
        Command::Plot { roots, attractor } => commands::cmd_plot(roots, attractor)?,
    };
    emit(out, &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
