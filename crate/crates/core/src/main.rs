use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tpfc::baselines::{induce_with_restarts, DEFAULT_RESTARTS};
use tpfc::datagen::Domain;
use tpfc::harness::sweep::{run_sweep_file, Family};
use tpfc::harness::{self, csvio, Algorithm};
use tpfc::{AlgoConfig, Error, KnowledgeKind, Result};

#[derive(Parser)]
#[command(name = "tpfc", version, about = "Transfer prototype-based fuzzy clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic benchmark dataset as CSV.
    Gen {
        /// d1, d2 or d3.
        dataset: String,
        #[arg(long)]
        domain: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Cluster source-domain data and save its prototypes as knowledge JSON.
    Induce {
        data: PathBuf,
        /// centers, planes or subspace.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run one fit and report labels, prototypes, trace and scores.
    Fit {
        data: PathBuf,
        /// fcm, fkpc, fsc, tfcm, tfkpc or tfsc.
        #[arg(long)]
        algorithm: String,
        /// Knowledge JSON, required by the transfer algorithms.
        #[arg(long)]
        knowledge: Option<PathBuf>,
        #[command(flatten)]
        fit: FitArgs,
        /// Result JSON path; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also write hardened labels as CSV.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Run a parameter sweep from a JSON config.
    Sweep { config: PathBuf },
    /// Compare predicted labels with ground truth.
    Eval { pred: PathBuf, truth: PathBuf },
}

#[derive(Args)]
struct FitArgs {
    #[arg(short = 'c', long)]
    clusters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated `name=value` pairs, e.g. `lambda1=1,lambda2=0.5,m=2`.
    #[arg(long, value_delimiter = ',')]
    params: Vec<String>,
    /// Standardize every feature before fitting.
    #[arg(long)]
    zscore: bool,
}

impl FitArgs {
    fn config(&self) -> Result<AlgoConfig> {
        let mut cfg = AlgoConfig::new(self.clusters).with_seed(self.seed);
        for pair in &self.params {
            let (name, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("expected name=value, got {pair:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("{name}: {value:?} is not a number")))?;
            cfg.set_param(name.trim(), value)?;
        }
        Ok(cfg)
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { dataset, domain, seed, out } => {
            let family: Family = dataset.parse()?;
            let domain: Domain = domain.parse()?;
            csvio::write_dataset(&out, &family.generate(domain, seed))
        }
        Command::Induce { data, kind, restarts, fit, out } => {
            let kind: KnowledgeKind = kind.parse()?;
            let x = csvio::read_dataset(&data, fit.zscore)?;
            let ind = induce_with_restarts(&x, kind, &fit.config()?, restarts)?;
            harness::save_knowledge(&out, &ind.knowledge)?;
            eprintln!(
                "restart {} of {} kept, objective {:.6e}",
                ind.best,
                ind.objectives.len(),
                ind.objectives[ind.best]
            );
            Ok(())
        }
        Command::Fit { data, algorithm, knowledge, fit, out, labels } => {
            let algorithm: Algorithm = algorithm.parse()?;
            let x = csvio::read_dataset(&data, fit.zscore)?;
            let k = knowledge.as_deref().map(harness::load_knowledge).transpose()?;
            let cfg = fit.config()?;
            let r = harness::run_algorithm(algorithm, &x, k.as_ref(), &cfg)?;
            let report = harness::fit_report(algorithm, &x, &r, &cfg)?;
            if let Some(p) = labels {
                csvio::write_labels(&p, &report.labels)?;
            }
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            write_or_print(out.as_deref(), &text)
        }
        Command::Sweep { config } => {
            let outcome = run_sweep_file(&config)?;
            eprint!("{}", outcome.summary());
            Ok(())
        }
        Command::Eval { pred, truth } => {
            let report = harness::eval_label_files(&pred, &truth)?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
