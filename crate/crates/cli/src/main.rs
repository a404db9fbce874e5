mod commands;
mod config;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use advgraph::attacks::AttackKind;
use clap::{Parser, Subcommand};

use config::RunConfig;
use run::Stages;

/// Structure attacks on graphs, attribute extraction, and forest-based
/// detection of adversarial samples.
#[derive(Parser)]
#[command(name = "advgraph", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Only log errors.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Attack, build detection data, train and evaluate detectors, sweep k,
    /// and recognize attacks, writing every artifact under the output directory.
    Run,
    /// Like `run`, without the sweep, histograms and recognition.
    Train,
    /// Print the 17 attributes of the given nodes (all nodes by default) as CSV.
    Attributes {
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Node ids as they appear in the input files.
        nodes: Vec<u64>,
    },
    /// Print the flips one attack chooses against one target.
    Attack {
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        attack: String,
        #[arg(long)]
        target: u64,
        /// Defaults to the attack's own budget rule.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Summarize a finished run's output directory.
    Report,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or input data; exit code 2.
    Input(String),
    /// Nothing to evaluate; exit code 3.
    Empty(String),
}

impl CliError {
    fn context(self, what: &str) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{what}: {m}")),
            CliError::Empty(m) => CliError::Empty(format!("{what}: {m}")),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Empty(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Empty(m) => f.write_str(m),
        }
    }
}

impl From<advgraph::Error> for CliError {
    fn from(e: advgraph::Error) -> Self {
        use advgraph::Error as E;
        match e {
            E::NoSuccessfulAttacks { .. } | E::InsufficientSamples(_) => CliError::Empty(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn load_config(cli: &Cli, required: bool) -> Result<Option<RunConfig>, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None if required => return Err(CliError::Input("--config is required".into())),
        None => return Ok(None),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    Ok(Some(cfg))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run => run::run(&load_config(cli, true)?.expect("required"), Stages::Full),
        Command::Train => run::run(&load_config(cli, true)?.expect("required"), Stages::TrainOnly),
        Command::Attributes { edges, labels, nodes } => {
            let cfg = load_config(cli, false)?;
            let loaded = commands::load_graph(edges.as_deref(), labels.as_deref(), cfg.as_ref())?;
            commands::attributes(&loaded, nodes)
        }
        Command::Attack {
            edges,
            labels,
            attack,
            target,
            budget,
        } => {
            let kind: AttackKind = config::parse_attack(attack)?;
            if *budget == Some(0) {
                return Err(CliError::Input("--budget must be at least 1".into()));
            }
            let cfg = load_config(cli, false)?;
            let loaded = commands::load_graph(edges.as_deref(), labels.as_deref(), cfg.as_ref())?;
            commands::attack(&loaded, kind, *target, *budget)
        }
        Command::Report => {
            let out = match (&cli.out, load_config(cli, false)?) {
                (Some(out), _) => out.clone(),
                (None, Some(cfg)) => cfg.output,
                (None, None) => return Err(CliError::Input("give --out or --config".into())),
            };
            commands::report(Path::new(&out))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
