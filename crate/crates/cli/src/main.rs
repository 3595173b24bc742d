use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmsa_core::QmsaError;

mod commands;
mod config;
mod output;

use config::RunConfig;

/// Compile sequence alignment instances to QUBO/Ising form and solve them
/// with a simulated QAOA loop.
#[derive(Debug, Parser)]
#[command(name = "qmsa", version)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON run config; any output file of a previous run also works.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated sequences, e.g. AG,G
    #[arg(long, global = true, value_delimiter = ',')]
    seqs: Option<Vec<String>>,
    #[arg(long, global = true)]
    fasta: Option<PathBuf>,
    #[arg(long, global = true)]
    p1: Option<f64>,
    #[arg(long, global = true)]
    p2: Option<f64>,
    #[arg(long, global = true)]
    p3: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random optimizer starts per layer count.
    #[arg(long, global = true)]
    starts: Option<usize>,
    /// Objective evaluations per optimizer start.
    #[arg(long, global = true)]
    max_evals: Option<usize>,
    /// Directory for JSON/CSV outputs; without it results go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Qubo,
    Ising,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Show the qubit layout; optionally encode an alignment or decode a bitstring.
    Encode {
        /// Comma-separated alignment rows, '_' or '-' for gaps.
        #[arg(long, value_delimiter = ',')]
        alignment: Option<Vec<String>>,
        #[arg(long)]
        bits: Option<String>,
    },
    /// Optimize and sample one layer count.
    Solve {
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        scoring: Option<PathBuf>,
    },
    /// Solve a list of layer counts with warm starts.
    Sweep {
        #[arg(long, value_delimiter = ',')]
        p_list: Option<Vec<usize>>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        scoring: Option<PathBuf>,
    },
    /// Count feasible alignments and compare with the fraction bound.
    Count {
        /// String lengths of a synthetic instance, e.g. 50,43,43
        #[arg(long, value_delimiter = ',')]
        lengths: Option<Vec<usize>>,
    },
    /// Exhaustive minimum, feasible optimum and low-energy spectrum.
    Oracle {
        #[arg(long)]
        top_k: Option<usize>,
    },
    /// Write the cost model as QUBO or Ising JSON.
    Export {
        #[arg(long, value_enum, default_value_t = ModelKind::Qubo)]
        model: ModelKind,
        #[arg(long)]
        scoring: Option<PathBuf>,
    },
}

/// Bad user input that is not a library error.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Invalid>().is_some() {
        return 2;
    }
    match err.downcast_ref::<QmsaError>() {
        Some(QmsaError::CapExceeded { .. }) => 3,
        Some(QmsaError::NonFiniteObjective(_)) => 4,
        Some(QmsaError::Io(_)) | None => 1,
        Some(_) => 2,
    }
}

fn build_config(common: &CommonArgs, command: &Command) -> anyhow::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seqs) = &common.seqs {
        cfg.seqs = Some(seqs.clone());
        cfg.fasta = None;
    }
    if let Some(fasta) = &common.fasta {
        cfg.fasta = Some(fasta.clone());
        if common.seqs.is_none() {
            cfg.seqs = None;
        }
    }
    let pen = &mut cfg.penalties;
    pen.p1 = common.p1.unwrap_or(pen.p1);
    pen.p2 = common.p2.unwrap_or(pen.p2);
    pen.p3 = common.p3.unwrap_or(pen.p3);
    let opt = &mut cfg.optimizer;
    opt.seed = common.seed.unwrap_or(opt.seed);
    opt.starts = common.starts.unwrap_or(opt.starts);
    opt.max_evaluations = common.max_evals.unwrap_or(opt.max_evaluations);
    match command {
        Command::Solve { p, shots, scoring } => {
            cfg.p = p.unwrap_or(cfg.p);
            cfg.shots = shots.unwrap_or(cfg.shots);
            cfg.scoring = scoring.clone().or(cfg.scoring);
        }
        Command::Sweep { p_list, shots, scoring } => {
            if let Some(list) = p_list {
                cfg.p_list = list.clone();
            }
            cfg.shots = shots.unwrap_or(cfg.shots);
            cfg.scoring = scoring.clone().or(cfg.scoring);
        }
        Command::Count { lengths } => {
            if lengths.is_some() {
                cfg.lengths = lengths.clone();
            }
        }
        Command::Oracle { top_k } => cfg.top_k = top_k.unwrap_or(cfg.top_k),
        Command::Export { scoring, .. } => cfg.scoring = scoring.clone().or(cfg.scoring),
        Command::Encode { .. } => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = build_config(&cli.common, &cli.command)?;
    let sink = commands::Sink::new(cli.common.out.as_deref(), cli.common.format)?;
    match cli.command {
        Command::Encode { alignment, bits } => {
            commands::encode(&cfg, &sink, alignment.as_deref(), bits.as_deref())
        }
        Command::Solve { .. } => commands::solve(&cfg, &sink),
        Command::Sweep { .. } => commands::sweep(&cfg, &sink),
        Command::Count { .. } => commands::count(&cfg, &sink),
        Command::Oracle { .. } => commands::oracle(&cfg, &sink),
        Command::Export { model, .. } => commands::export(&cfg, &sink, model),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_override_the_config_file() {
        let cli = Cli::try_parse_from([
            "qmsa", "solve", "--seqs", "AG,G", "--p", "3", "--p1", "7", "--seed", "9",
        ])
        .unwrap();
        let cfg = build_config(&cli.common, &cli.command).unwrap();
        assert_eq!(cfg.seqs, Some(vec!["AG".to_string(), "G".to_string()]));
        assert_eq!(cfg.p, 3);
        assert_eq!(cfg.penalties.p1, 7.0);
        assert_eq!(cfg.penalties.p2, 1.0);
        assert_eq!(cfg.optimizer.seed, 9);
        assert_eq!(cfg.shots, 5000);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Invalid("x".into()).into()), 2);
        assert_eq!(exit_code(&QmsaError::InvalidSymbol('N').into()), 2);
        let cap = QmsaError::CapExceeded {
            what: "qubit count",
            requested: "30".into(),
            cap: "24".into(),
        };
        assert_eq!(exit_code(&cap.into()), 3);
        assert_eq!(exit_code(&QmsaError::NonFiniteObjective(vec![]).into()), 4);
        assert_eq!(exit_code(&anyhow::anyhow!("disk full")), 1);
    }
}
