use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toricpo_cli::{
    cmd_analyze, cmd_betti, cmd_catalog_list, cmd_critical_points, cmd_lte, cmd_potential, cmd_residue_check,
    CliError, Format, InputSpec, Report, RunConfig,
};

#[derive(Parser)]
#[command(name = "toricpo", version, about = "Potential functions and critical points of toric manifolds")]
struct Cli {
    /// TOML run configuration (defaults to $TORICPO_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format; overrides the config file.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Input {
    /// Catalog entry, e.g. `simplex:2` or `blowup2:1/2,1/4`.
    #[arg(long)]
    catalog: Option<String>,
    /// Polytope JSON file.
    #[arg(long)]
    polytope: Option<PathBuf>,
    /// Extra correction terms as a JSON list.
    #[arg(long)]
    corrections: Option<PathBuf>,
    /// Truncation order `E`.
    #[arg(long)]
    truncation: Option<String>,
    /// Suppress the warning for non-Fano input without corrections.
    #[arg(long)]
    assume_fano: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: potential, critical points, Morse count, residues.
    Analyze(Input),
    /// Print the potential, optionally in the frame at `--u`.
    Potential {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        u: Option<String>,
    },
    /// Critical points with their valuations and leading coefficients.
    CriticalPoints(Input),
    /// Leading term equation at `--u`, or a balanced-point scan over a grid.
    Lte {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        u: Option<String>,
        /// Grid resolution per axis; 0 uses the configured default.
        #[arg(long, num_args = 0..=1, default_missing_value = "0")]
        grid: Option<usize>,
    },
    /// Hessians, residue pairing and the trace identity.
    ResidueCheck(Input),
    /// Total Betti number, i.e. the vertex count.
    Betti(Input),
    /// List catalog entries.
    CatalogList,
}

fn config_for(base: &RunConfig, input: &Input, format: Option<Format>) -> Result<RunConfig, CliError> {
    let mut cfg = base.clone();
    if let Some(t) = &input.truncation {
        cfg.truncation = t.clone();
    }
    cfg.assume_fano |= input.assume_fano;
    if let Some(f) = format {
        cfg.format = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn spec(input: &Input) -> InputSpec {
    InputSpec { catalog: input.catalog.clone(), polytope: input.polytope.clone(), corrections: input.corrections.clone() }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let base = RunConfig::load(cli.config.as_deref())?;
    toricpo::novikov::set_coefficient_tolerance(base.coefficient_eps);
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Validation(format!("--jobs: {e}")))?;
    }
    let out = match &cli.command {
        Command::Analyze(i) => {
            let cfg = config_for(&base, i, cli.format)?;
            cmd_analyze(&spec(i), &cfg)?.render(cfg.format)
        }
        Command::Potential { input, u } => {
            let cfg = config_for(&base, input, cli.format)?;
            cmd_potential(&spec(input), &cfg, u.as_deref())?.render(cfg.format)
        }
        Command::CriticalPoints(i) => {
            let cfg = config_for(&base, i, cli.format)?;
            cmd_critical_points(&spec(i), &cfg)?.render(cfg.format)
        }
        Command::Lte { input, u, grid } => {
            let cfg = config_for(&base, input, cli.format)?;
            cmd_lte(&spec(input), &cfg, u.as_deref(), *grid)?.render(cfg.format)
        }
        Command::ResidueCheck(i) => {
            let cfg = config_for(&base, i, cli.format)?;
            cmd_residue_check(&spec(i), &cfg)?.render(cfg.format)
        }
        Command::Betti(i) => {
            let cfg = config_for(&base, i, cli.format)?;
            cmd_betti(&spec(i))?.render(cfg.format)
        }
        Command::CatalogList => cmd_catalog_list().render(cli.format.unwrap_or(base.format)),
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            if !out.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
