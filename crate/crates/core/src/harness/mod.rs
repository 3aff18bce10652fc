//! Experiment configuration, trial loop, aggregation and CSV output.

pub mod config;
pub mod experiment;
pub mod output;
pub mod profiles;
pub mod trial;

pub use config::{ExperimentConfig, KeyValues, DEFAULT_EPSILON, DEFAULT_SEED, DEFAULT_TRIALS};
pub use experiment::{run_experiment, run_trials, trial_seed, ExperimentTable, Metric, SummaryRow, CSV_HEADER};
pub use output::fmt_sig6;
pub use profiles::{noise_profile, theory_curves, AssignConfig, ErrorHistogram, NoiseProfileConfig, TheoryCurveConfig};
pub use trial::{run_trial, simulate_instance, Cell, Instance, TrialResult};
