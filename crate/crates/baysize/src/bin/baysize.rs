//! Command-line interface.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 when the search
//! is infeasible at the configured upper bound, 1 for internal errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use baysize::config::{parse_config, OutputFormat, RunConfig};
use baysize::report::{Records, Report};
use baysize::runner;
use baysize::search::SearchOutcome;

const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_INTERNAL: u8 = 1;

#[derive(Parser)]
#[command(
    name = "baysize",
    version,
    about = "Sample size and power for Bayesian phase I dose-finding trials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for the smallest sample size meeting the error targets
    Size(CommonArgs),
    /// Estimate power at each configured candidate sample size
    Power(CommonArgs),
    /// Generate the power look-up table over the configured grid
    Table(CommonArgs),
    /// Emit raw simulated trials for inspection
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of trials to simulate
        #[arg(long, default_value_t = 10)]
        trials: u32,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML configuration file
    #[arg(long)]
    config: PathBuf,
    /// Override the configured root seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (default: the config's output.path, else stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (default: the config's output.format)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads for the Monte Carlo loops (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, String> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut cfg = parse_config(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        cfg = cfg.with_root_seed(seed);
    }
    Ok(cfg)
}

fn init_threads(threads: Option<usize>) {
    if let Some(k) = threads {
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
}

fn write_report(report: &Report, cfg: &RunConfig, args: &CommonArgs) -> Result<(), String> {
    let format = args.format.map(Into::into).unwrap_or(cfg.output_format);
    let rendered = report.render(format);
    let path = args
        .out
        .clone()
        .or_else(|| cfg.output_path.clone().map(PathBuf::from));
    match path {
        Some(p) => fs::write(&p, rendered).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn run() -> Result<u8, (u8, String)> {
    let cli = Cli::parse();
    let (common, trials) = match &cli.command {
        Command::Size(c) | Command::Power(c) | Command::Table(c) => (c, None),
        Command::Simulate { common, trials } => (common, Some(*trials)),
    };

    let cfg = load_config(common).map_err(|e| (EXIT_CONFIG, e))?;
    init_threads(common.threads);

    let report = match &cli.command {
        Command::Size(_) => runner::run_size(&cfg),
        Command::Power(_) => runner::run_power(&cfg),
        Command::Table(_) => runner::run_table(&cfg).map_err(|e| (EXIT_INTERNAL, e))?,
        Command::Simulate { .. } => {
            runner::run_simulate(&cfg, trials.unwrap()).map_err(|e| (EXIT_INTERNAL, e))?
        }
    };

    write_report(&report, &cfg, common).map_err(|e| (EXIT_INTERNAL, e))?;

    if let Records::Size(record) = &report.records {
        if let SearchOutcome::Infeasible { power_at_n_upper } = &record.outcome {
            eprintln!(
                "infeasible: power at n_upper is {power_at_n_upper:.4}, below the target"
            );
            return Ok(EXIT_INFEASIBLE);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
