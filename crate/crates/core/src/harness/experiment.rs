//! Monte-Carlo sweeps and their aggregate table.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::output::fmt_sig6;
use super::trial::{simulate_instance, Cell, TrialResult};
use crate::error::Result;
use crate::mechanism::WeightScheme;
use crate::noise::PopulationMix;

pub const CSV_HEADER: &str = "share_accurate,phi_acc,phi_inacc,scheme,metric,mean,std,trials,seed";

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed: `mix64(master + mix64((cell << 32) | trial))`.
///
/// Both steps are bijections of `u64`, so for a fixed master seed distinct
/// `(cell, trial)` pairs with `trial < 2^32` get distinct seeds.
pub fn trial_seed(master: u64, cell: u32, trial: u32) -> u64 {
    mix64(master.wrapping_add(mix64(((cell as u64) << 32) | trial as u64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Recall,
    Size,
    WeightPhiSpearman,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Recall, Metric::Size, Metric::WeightPhiSpearman];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Recall => "recall",
            Metric::Size => "size",
            Metric::WeightPhiSpearman => "weight_phi_spearman",
        }
    }

    pub fn extract(self, r: &TrialResult) -> Option<f64> {
        match self {
            Metric::Recall => Some(r.recall),
            Metric::Size => Some(r.size as f64),
            Metric::WeightPhiSpearman => r.weight_phi_correlation,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub mix: PopulationMix,
    pub scheme: WeightScheme,
    pub metric: Metric,
    pub mean: f64,
    /// Sample standard deviation; zero for a single trial.
    pub std: f64,
    /// Trials in which the metric was defined.
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentTable {
    pub rows: Vec<SummaryRow>,
}

impl ExperimentTable {
    pub fn row(&self, share: f64, scheme_name: &str, metric: Metric) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.mix.share_accurate == share && r.scheme.name() == scheme_name && r.metric == metric)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                fmt_sig6(r.mix.share_accurate),
                fmt_sig6(r.mix.phi_accurate.value()),
                fmt_sig6(r.mix.phi_inaccurate.value()),
                r.scheme,
                r.metric.name(),
                fmt_sig6(r.mean),
                fmt_sig6(r.std),
                r.trials,
                r.seed
            );
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Raw per-trial results for every (cell, scheme), indexed
/// `[cell][scheme][trial]`. Each trial's instance is shared across schemes.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<Vec<Vec<TrialResult>>>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.shares.len());
    for (ci, &share) in cfg.shares.iter().enumerate() {
        let mix = PopulationMix::new(share, cfg.phi_accurate, cfg.phi_inaccurate)?;
        let cell = Cell { params: cfg.params, mix, scope: cfg.scope };
        let per_trial: Vec<Vec<TrialResult>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let inst = simulate_instance(&cell, trial_seed(cfg.seed, ci as u32, t as u32))?;
                cfg.schemes.iter().map(|&s| inst.evaluate(s)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut by_scheme: Vec<Vec<TrialResult>> = vec![Vec::with_capacity(cfg.trials); cfg.schemes.len()];
        for results in per_trial {
            for (si, r) in results.into_iter().enumerate() {
                by_scheme[si].push(r);
            }
        }
        out.push(by_scheme);
    }
    Ok(out)
}

/// Runs the sweep and aggregates. A metric row is omitted when the metric is
/// undefined in every trial (e.g. the correlation for constant weights).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentTable> {
    let raw = run_trials(cfg)?;
    let mut rows = Vec::new();
    for (ci, cell) in raw.iter().enumerate() {
        let mix = PopulationMix::new(cfg.shares[ci], cfg.phi_accurate, cfg.phi_inaccurate)?;
        for (si, results) in cell.iter().enumerate() {
            for metric in Metric::ALL {
                let xs: Vec<f64> = results.iter().filter_map(|r| metric.extract(r)).collect();
                if xs.is_empty() {
                    continue;
                }
                let (mean, std) = mean_std(&xs);
                rows.push(SummaryRow { mix, scheme: cfg.schemes[si], metric, mean, std, trials: xs.len(), seed: cfg.seed });
            }
        }
    }
    Ok(ExperimentTable { rows })
}
