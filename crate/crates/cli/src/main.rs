use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qunforge::attacks::{AttackId, AuaVariant};
use qunforge::oracles::ClassicalFunctionTable;
use qunforge::primitives::{construction1_keygen, KeyedFunctionFamily, PrimitiveKind};
use qunforge_cli::acceptance::Budget;
use qunforge_cli::manifest::DEFAULT_SEED;
use qunforge_cli::{reproduce, run, sweep, CliError, ExperimentManifest, Result};

#[derive(Parser, Debug)]
#[command(name = "qunforge", version = env!("QUNFORGE_GIT_DESCRIBE"), about = "Quantum unforgeability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment and write its JSON result.
    Run(ExperimentArgs),
    /// Evaluate an experiment over a μ and/or γ grid and write CSV.
    Sweep(ExperimentArgs),
    /// Run every acceptance criterion and print the summary matrix.
    ReproduceAll {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Games per Monte-Carlo criterion; other sample sizes scale with it.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a sampled MAC function table in hex, or validate one.
    Table {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Parse and summarize this hex table instead of sampling one.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// JSON manifest; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    experiment: Option<AttackId>,
    #[arg(long, value_parser = kebab::<PrimitiveKind>)]
    primitive: Option<PrimitiveKind>,
    /// μ value, or a comma-separated grid for `sweep`.
    #[arg(long, value_delimiter = ',')]
    mu: Vec<f64>,
    /// γ value, or a comma-separated grid for `sweep`.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    strong: bool,
    #[arg(long, value_parser = kebab::<AuaVariant>)]
    aua_variant: Option<AuaVariant>,
    #[arg(long)]
    dump_states: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses the kebab-case names used in manifests.
fn kebab<T: serde::de::DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::from(s)).map_err(|e| e.to_string())
}

impl ExperimentArgs {
    fn manifest(&self, sweep: bool) -> Result<ExperimentManifest> {
        let mut m = match (&self.config, self.experiment) {
            (Some(path), _) => ExperimentManifest::load(path)?,
            (None, Some(id)) => ExperimentManifest::new(id),
            (None, None) => return Err(CliError::Manifest("--experiment or --config is required".into())),
        };
        if let Some(id) = self.experiment {
            m.experiment = id;
        }
        macro_rules! set {
            ($($f:ident),*) => {$(if self.$f.is_some() { m.$f = self.$f; })*};
        }
        set!(primitive, n, m, l, q, trials);
        if let Some(s) = self.seed {
            m.seed = s;
        }
        if let Some(v) = self.aua_variant {
            m.aua_variant = v;
        }
        m.strong |= self.strong;
        m.dump_states |= self.dump_states;
        if self.out.is_some() {
            m.out = self.out.clone();
        }
        if sweep {
            if !self.mu.is_empty() {
                m.sweep.mu = self.mu.clone();
            }
            if !self.gamma.is_empty() {
                m.sweep.gamma = self.gamma.clone();
            }
        } else {
            let single = |v: &[f64], name: &str| match v {
                [] => Ok(None),
                [x] => Ok(Some(*x)),
                _ => Err(CliError::Manifest(format!("--{name} takes one value outside sweep"))),
            };
            if let Some(x) = single(&self.mu, "mu")? {
                m.mu = Some(x);
            }
            if let Some(x) = single(&self.gamma, "gamma")? {
                m.gamma = Some(x);
            }
        }
        Ok(m)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let m = args.manifest(false)?;
            let text = run::cmd_run(&m)?;
            if m.out.is_none() {
                print!("{text}");
            }
        }
        Command::Sweep(args) => {
            let m = args.manifest(true)?;
            let text = sweep::cmd_sweep(&m)?;
            if m.out.is_none() {
                print!("{text}");
            }
        }
        Command::ReproduceAll { seed, trials, out } => {
            let budget = trials.map(Budget::with_trials).unwrap_or_default();
            let summary = reproduce::cmd_reproduce_all(seed, budget, out.as_deref())?;
            print!("{}", reproduce::report(&summary));
            if !summary.passed {
                return Err(CliError::Acceptance {
                    failed: summary.failed(),
                });
            }
        }
        Command::Table { n, m, seed, input } => match input {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                let t = ClassicalFunctionTable::from_hex(&text, m)?;
                println!("n = {}, m = {}, entries = {}", t.n_in(), t.m_out(), t.entries().len());
            }
            None => {
                let family = KeyedFunctionFamily::new(n, n, m, seed)?;
                print!("{}", family.table(construction1_keygen(n, seed)).to_hex());
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
