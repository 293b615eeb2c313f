//! Command-line runner for the cluster-flip verification suites.
//!
//! Exit codes: 0 every verdict passed, 2 some inconclusive, 1 some failed,
//! 64 usage or configuration error, 65 state space too large to enumerate,
//! 70 runtime failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cluster_reflect::verify::{overall_status, summary_table, Status, TestVerdict};

use config::{ConfigError, ExperimentConfig, ModelConfig};

#[derive(Parser)]
#[command(name = "cluster-reflect", version, about = "Reflection and cluster-flip verification suites")]
struct Cli {
    /// Cap on worker threads; defaults to the number of logical cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the exact law of a discrete model to CSV.
    Enumerate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the built-in suites.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Run(cluster_reflect::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<cluster_reflect::Error> for Failure {
    fn from(e: cluster_reflect::Error) -> Self {
        Failure::Run(e)
    }
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Pass => 0,
        Status::Inconclusive => 2,
        Status::Fail => 1,
    }
}

fn run_configs(
    suite: &str,
    configs: Vec<ExperimentConfig>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<u8, Failure> {
    let prefix = configs.len() > 1;
    let mut prepared = Vec::new();
    for mut c in configs {
        if let Some(s) = seed {
            c.seed = s;
        }
        prepared.push(suites::prepare(c)?);
    }
    let dir = out.unwrap_or_else(|| prepared[0].config.output.dir.clone());
    let mut verdicts: Vec<TestVerdict> = Vec::new();
    for p in &prepared {
        let mut v = p.run_checks()?;
        if prefix {
            let label = p.config.label();
            v.iter_mut().for_each(|x| x.name = format!("{label}/{}", x.name));
        }
        verdicts.extend(v);
        if p.config.output.samples {
            output::write_samples(&dir, p)?;
        }
    }
    let seed = prepared[0].config.seed;
    output::write_report(&dir, suite, seed, &verdicts)?;
    print!("{}", summary_table(&verdicts));
    Ok(status_code(overall_status(&verdicts)))
}

fn enumerate(path: &Path, out: Option<PathBuf>) -> Result<u8, Failure> {
    let c = config::load(path)?;
    let built = c.build()?;
    let explicit = matches!(
        &c.model,
        Some(ModelConfig::Potts { reflection: Some(_), .. } | ModelConfig::Markov { reflection: Some(_), .. })
    );
    let dir = out.unwrap_or_else(|| c.output.dir.clone());
    for name in output::write_enumeration(&dir, &built, explicit)? {
        println!("{}", dir.join(name).display());
    }
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Run { config, seed, out } => {
            let c = config::load(&config)?;
            let suite = c.label();
            run_configs(&suite, vec![c], seed, out)
        }
        Command::Enumerate { config, out } => enumerate(&config, out),
        Command::Verify { suite, seed, out } => match suites::builtin(&suite) {
            Some(configs) => run_configs(&suite, configs, Some(seed), out),
            None => Err(Failure::Config(format!(
                "unknown suite {suite:?}; expected one of {}",
                suites::builtin_names().join(", ")
            ))),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(64);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(64)
        }
        Err(Failure::Run(e @ cluster_reflect::Error::StateSpaceOverflow { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(65)
        }
        Err(Failure::Run(e @ cluster_reflect::Error::Unsupported(_))) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(64)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(70)
        }
    }
}
