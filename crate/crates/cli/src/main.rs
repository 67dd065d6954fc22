mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;

/// Neumann–Poincaré spectra of thin distorted annuli.
#[derive(Parser, Debug)]
#[command(name = "npannulus", version)]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Suppress progress and diagnostics on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct MapArgs {
    /// Map file: {"a0": [re, im], "coeffs": [[k, re, im], ...], "ri": .., "re": ..}.
    #[arg(long, value_name = "FILE")]
    pub map: Option<PathBuf>,
    /// Inner radius override.
    #[arg(long)]
    pub ri: Option<f64>,
    /// Outer radius override.
    #[arg(long)]
    pub re: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// The NP block matrix.
    Np,
    /// The reduced matrix acting on squared eigenvalues.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reference {
    /// Circular annulus at the same truncation, with mode multiplicity.
    Truncated,
    /// `{±r^m/2 : m = 0..=2N}`, each value once.
    SingleMode,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grunsky coefficient table as CSV.
    Grunsky {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        order: Option<usize>,
        /// Also check the strong Grunsky inequality at this radius.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Dump an assembled matrix as plain text.
    Matrix {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_enum, default_value_t = Which::Np)]
        which: Which,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Eigenvalues with the circular-annulus reference.
    Spectrum {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_enum, default_value_t = Reference::Truncated)]
        reference: Reference,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Scatter plot of index against eigenvalue.
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },
    /// Hausdorff distance to [-1/2, 1/2] across thickness ratios.
    Sweep {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        order: Option<usize>,
        /// Comma-separated ratios r_i/r_e; the inner radius stays fixed.
        #[arg(long)]
        ratios: Option<String>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Analytic and entrywise Gershgorin report as JSON.
    Gershgorin {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        order: Option<usize>,
        /// Decay rate override (fitted from the coefficients otherwise).
        #[arg(long)]
        rho: Option<f64>,
        /// Number of analytic disks before the tail interval [default: 4N].
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Boundary-integral (Nyström) eigenvalues.
    Oracle {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        nq: Option<usize>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Side-by-side Grunsky-matrix and Nyström eigenvalues.
    Crosscheck {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        nq: Option<usize>,
        /// Number of largest-|λ| eigenvalues compared.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Regenerate every figure's data, the disk report and the cross-check.
    Reproduce {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        nq: Option<usize>,
        /// Output directory.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Core(npannulus::Error),
    Input(String),
    /// A computed check failed after outputs were written.
    Check(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use npannulus::Error as E;
        match self {
            CliError::Input(_) => 3,
            CliError::Check(_) => 2,
            CliError::Core(e) => match e {
                E::DecayViolation { .. } | E::SpectralRealization { .. } | E::Invariant(_) => 2,
                E::Solver(_) => 4,
                _ => 3,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "invariant",
            4 => "solver",
            _ => "input",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(m) | CliError::Check(m) => f.write_str(m),
        }
    }
}

impl From<npannulus::Error> for CliError {
    fn from(e: npannulus::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Shared state for one invocation.
pub struct Ctx {
    pub cfg: RunConfig,
    pub quiet: bool,
}

impl Ctx {
    pub fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn base_config(path: Option<&PathBuf>) -> Result<RunConfig, CliError> {
    path.map_or_else(|| Ok(RunConfig::default()), |p| RunConfig::load(p))
}

fn apply_map(cfg: &mut RunConfig, map: &MapArgs) {
    if map.map.is_some() {
        cfg.map = map.map.clone();
    }
    cfg.ri = map.ri.or(cfg.ri);
    cfg.re = map.re.or(cfg.re);
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = base_config(cli.config.as_ref())?;
    let set = |cfg: &mut RunConfig, map: &MapArgs, order: Option<usize>, nq: Option<usize>| {
        apply_map(cfg, map);
        cfg.order = order.unwrap_or(cfg.order);
        cfg.nq = nq.unwrap_or(cfg.nq);
    };
    match &cli.command {
        Command::Grunsky { map, order, .. }
        | Command::Matrix { map, order, .. }
        | Command::Spectrum { map, order, .. }
        | Command::Gershgorin { map, order, .. } => set(&mut cfg, map, *order, None),
        Command::Sweep {
            map, order, ratios, ..
        } => {
            set(&mut cfg, map, *order, None);
            if let Some(r) = ratios {
                cfg.ratios = config::parse_ratios(r)?;
            }
        }
        Command::Oracle { map, nq, .. } => set(&mut cfg, map, None, *nq),
        Command::Crosscheck { map, order, nq, .. } => set(&mut cfg, map, *order, *nq),
        Command::Reproduce {
            map,
            order,
            nq,
            out,
        } => {
            set(&mut cfg, map, *order, *nq);
            if let Some(dir) = out {
                cfg.out = dir.clone();
            }
        }
    }
    if let Command::Gershgorin { rho: Some(rho), .. } = &cli.command {
        cfg.rho = Some(*rho);
    }
    cfg.validate()?;
    let ctx = Ctx {
        cfg,
        quiet: cli.quiet,
    };

    match cli.command {
        Command::Grunsky { radius, out, .. } => commands::grunsky(&ctx, radius, out.as_deref()),
        Command::Matrix { which, out, .. } => commands::matrix(&ctx, which, out.as_deref()),
        Command::Spectrum {
            reference,
            out,
            svg,
            ..
        } => commands::spectrum(&ctx, reference, out.as_deref(), svg.as_deref()),
        Command::Sweep { out, .. } => commands::sweep(&ctx, out.as_deref()),
        Command::Gershgorin { m_max, out, .. } => commands::gershgorin(&ctx, m_max, out.as_deref()),
        Command::Oracle { out, .. } => commands::oracle(&ctx, out.as_deref()),
        Command::Crosscheck { count, out, .. } => commands::crosscheck(&ctx, count, out.as_deref()),
        Command::Reproduce { .. } => commands::reproduce(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::json!({
                "error": {
                    "kind": e.kind(),
                    "exit_code": e.exit_code(),
                    "message": e.to_string(),
                }
            });
            eprintln!("{record}");
            ExitCode::from(e.exit_code())
        }
    }
}
