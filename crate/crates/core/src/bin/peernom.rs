use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use peernom::harness::config::KeyValues;
use peernom::harness::experiment::run_experiment;
use peernom::harness::profiles::{
    assignment_csv, assignment_report, noise_profile, noise_profile_csv, theory_csv, AssignConfig,
    NoiseProfileConfig, TheoryCurveConfig,
};
use peernom::harness::ExperimentConfig;
use peernom::noise::SamplingScope;
use peernom::types::{validate_assignment, Params};
use peernom::{Error, Result, WeightScheme};

#[derive(Parser)]
#[command(name = "peernom", version, about = "Weighted peer nomination simulator")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Trials per cell.
    #[arg(long, global = true)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep over accurate-reviewer shares.
    Simulate {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Comma-separated shares of accurate reviewers.
        #[arg(long, value_delimiter = ',')]
        share_accurate: Option<Vec<f64>>,
        #[arg(long)]
        phi_accurate: Option<f64>,
        #[arg(long)]
        phi_inaccurate: Option<f64>,
        /// Comma-separated schemes, e.g. `unit,distance:10,step:0.4:0.8`.
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<WeightScheme>>,
        /// `population` (default) or `pool`.
        #[arg(long)]
        sampling_scope: Option<SamplingScope>,
    },
    /// Correction probability curves of the detection model.
    Theory {
        #[arg(long)]
        m: Option<usize>,
        /// Comma-separated identification thresholds.
        #[arg(long, value_delimiter = ',')]
        j: Option<Vec<usize>>,
        #[arg(long)]
        q_min: Option<f64>,
        #[arg(long)]
        q_max: Option<f64>,
        #[arg(long)]
        q_steps: Option<usize>,
    },
    /// Build one review assignment and print its edge list.
    Assign {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Histogram of per-reviewer nomination errors by dispersion.
    NoiseProfile {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Reviewees nominated by each reviewer.
        #[arg(long)]
        nominations: Option<usize>,
        /// Comma-separated extended dispersions in [0, 2].
        #[arg(long, value_delimiter = ',')]
        phi_ext: Option<Vec<f64>>,
        /// `population` (default) or `pool`.
        #[arg(long)]
        sampling_scope: Option<SamplingScope>,
    },
}

fn load(path: Option<&Path>) -> Result<KeyValues> {
    match path {
        Some(p) => KeyValues::load(p).map_err(|e| match e {
            Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", p.display()))),
            other => other,
        }),
        None => Ok(KeyValues::default()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|io| Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", p.display())))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let common = cli.common;
    let kv = load(common.config.as_deref())?;
    match cli.command {
        Command::Simulate { n, k, m, epsilon, share_accurate, phi_accurate, phi_inaccurate, schemes, sampling_scope } => {
            let mut cfg = ExperimentConfig::from_key_values(kv)?;
            let p = &mut cfg.params;
            *p = Params {
                n: n.unwrap_or(p.n),
                k: k.unwrap_or(p.k),
                m: m.unwrap_or(p.m),
                epsilon: epsilon.unwrap_or(p.epsilon),
            };
            if let Some(s) = share_accurate {
                cfg.shares = s;
            }
            cfg.phi_accurate = phi_accurate.unwrap_or(cfg.phi_accurate);
            cfg.phi_inaccurate = phi_inaccurate.unwrap_or(cfg.phi_inaccurate);
            if let Some(s) = schemes {
                cfg.schemes = s;
            }
            cfg.scope = sampling_scope.unwrap_or(cfg.scope);
            cfg.trials = common.trials.unwrap_or(cfg.trials);
            cfg.seed = common.seed.unwrap_or(cfg.seed);
            cfg.out = common.out.or(cfg.out);
            cfg.validate()?;
            let table = run_experiment(&cfg)?;
            emit(cfg.out.as_deref(), &table.to_csv())
        }
        Command::Theory { m, j, q_min, q_max, q_steps } => {
            let mut cfg = TheoryCurveConfig::from_key_values(kv)?;
            cfg.m = m.unwrap_or(cfg.m);
            cfg.js = j.unwrap_or(cfg.js);
            cfg.q_min = q_min.unwrap_or(cfg.q_min);
            cfg.q_max = q_max.unwrap_or(cfg.q_max);
            cfg.q_steps = q_steps.unwrap_or(cfg.q_steps);
            emit(common.out.as_deref(), &theory_csv(&cfg.run()?))
        }
        Command::Assign { n, m } => {
            let mut cfg = AssignConfig::from_key_values(kv)?;
            cfg.n = n.unwrap_or(cfg.n);
            cfg.m = m.unwrap_or(cfg.m);
            cfg.seed = common.seed.unwrap_or(cfg.seed);
            let a = cfg.run()?;
            // k does not enter the structural checks
            let violations = validate_assignment(&a, &Params { n: cfg.n, k: 1, m: cfg.m, epsilon: 0.0 });
            emit(common.out.as_deref(), &assignment_csv(&a))?;
            eprintln!("{}", assignment_report(&a, violations.len()));
            for v in &violations {
                eprintln!("violation: {v}");
            }
            if violations.is_empty() && peernom::assignment::check_sp_structure(&a) {
                Ok(())
            } else {
                Err(Error::InvalidParams("assignment failed its structural checks".into()))
            }
        }
        Command::NoiseProfile { n, m, nominations, phi_ext, sampling_scope } => {
            let mut cfg = NoiseProfileConfig::from_key_values(kv)?;
            cfg.n = n.unwrap_or(cfg.n);
            cfg.m = m.unwrap_or(cfg.m);
            cfg.nominations = nominations.unwrap_or(cfg.nominations);
            cfg.phis = phi_ext.unwrap_or(cfg.phis);
            cfg.scope = sampling_scope.unwrap_or(cfg.scope);
            cfg.trials = common.trials.unwrap_or(cfg.trials);
            cfg.seed = common.seed.unwrap_or(cfg.seed);
            emit(common.out.as_deref(), &noise_profile_csv(&noise_profile(&cfg)?))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("peernom: error: {e}");
            ExitCode::FAILURE
        }
    }
}
