//! Noise histograms, theory curves and assignment edge lists.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::KeyValues;
use super::experiment::trial_seed;
use super::output::fmt_sig6;
use crate::assignment::{check_sp_structure, euler_assignment, DEFAULT_MAX_ATTEMPTS};
use crate::error::{invalid, Result};
use crate::noise::{nomination_errors, sample_profile_with, Dispersion, SamplingScope};
use crate::theory::{correction_probability, TheoryParams};
use crate::types::{Assignment, GroundTruth};

/// Settings for the per-agent nomination-error histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseProfileConfig {
    pub n: usize,
    pub m: usize,
    /// Reviewees each reviewer nominates.
    pub nominations: usize,
    pub phis: Vec<f64>,
    pub scope: SamplingScope,
    pub trials: usize,
    pub seed: u64,
}

impl Default for NoiseProfileConfig {
    fn default() -> Self {
        NoiseProfileConfig {
            n: 200,
            m: 9,
            nominations: 3,
            phis: (0..=8).map(|i| i as f64 * 0.25).collect(),
            scope: SamplingScope::default(),
            trials: 10,
            seed: 1,
        }
    }
}

/// `agents[e]` counts reviewers (summed over trials) whose top
/// `nominations` share `e` entries fewer than the truth's top set, i.e. who
/// make `e` nomination errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorHistogram {
    pub phi_ext: f64,
    pub agents: Vec<usize>,
}

impl ErrorHistogram {
    pub fn total(&self) -> usize {
        self.agents.iter().sum()
    }

    pub fn fraction(&self, errors: usize) -> f64 {
        self.agents.get(errors).copied().unwrap_or(0) as f64 / self.total() as f64
    }

    pub fn fraction_at_least(&self, errors: usize) -> f64 {
        self.agents.iter().skip(errors).sum::<usize>() as f64 / self.total() as f64
    }

    /// Most frequent error count; ties go to the smaller count.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (e, &c) in self.agents.iter().enumerate() {
            if c > self.agents[best] {
                best = e;
            }
        }
        best
    }
}

impl NoiseProfileConfig {
    /// Keys: `n`, `m`, `nominations`, `phi_ext` (list), `sampling_scope`,
    /// `trials`, `seed`.
    pub fn from_key_values(mut kv: KeyValues) -> Result<Self> {
        let d = Self::default();
        let cfg = NoiseProfileConfig {
            n: kv.take("n")?.unwrap_or(d.n),
            m: kv.take("m")?.unwrap_or(d.m),
            nominations: kv.take("nominations")?.unwrap_or(d.nominations),
            phis: kv.take_list("phi_ext")?.unwrap_or(d.phis),
            scope: kv.take("sampling_scope")?.unwrap_or(d.scope),
            trials: kv.take("trials")?.unwrap_or(d.trials),
            seed: kv.take("seed")?.unwrap_or(d.seed),
        };
        kv.finish()?;
        Ok(cfg)
    }
}

pub fn noise_profile(cfg: &NoiseProfileConfig) -> Result<Vec<ErrorHistogram>> {
    if cfg.nominations == 0 || cfg.nominations > cfg.m {
        return Err(invalid(format!("nominations={} must lie in 1..={}", cfg.nominations, cfg.m)));
    }
    if cfg.trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let mut out = Vec::with_capacity(cfg.phis.len());
    for (ci, &phi) in cfg.phis.iter().enumerate() {
        let d = Dispersion::new(phi)?;
        let mut agents = vec![0; cfg.nominations + 1];
        for t in 0..cfg.trials {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, ci as u32, t as u32));
            let gt = GroundTruth::random(cfg.n, &mut rng);
            let a = euler_assignment(cfg.n, cfg.m, DEFAULT_MAX_ATTEMPTS, &mut rng)?;
            let profile = sample_profile_with(&gt, &a, &vec![d; cfg.n], cfg.scope, &mut rng)?;
            for i in 0..cfg.n {
                let truth = gt.restrict(a.reviewees(i));
                agents[nomination_errors(profile.ranking(i), &truth, cfg.nominations)] += 1;
            }
        }
        out.push(ErrorHistogram { phi_ext: phi, agents });
    }
    Ok(out)
}

pub fn noise_profile_csv(hists: &[ErrorHistogram]) -> String {
    let mut s = String::from("phi_ext,errors,agents,fraction\n");
    for h in hists {
        for (e, &c) in h.agents.iter().enumerate() {
            let _ = writeln!(s, "{},{},{},{}", fmt_sig6(h.phi_ext), e, c, fmt_sig6(h.fraction(e)));
        }
    }
    s
}

/// Sweep of the correction model.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryCurveConfig {
    pub m: usize,
    pub js: Vec<usize>,
    pub q_min: f64,
    pub q_max: f64,
    pub q_steps: usize,
}

impl Default for TheoryCurveConfig {
    fn default() -> Self {
        TheoryCurveConfig { m: 9, js: vec![4, 5, 6, 7, 8], q_min: 0.0, q_max: 0.5, q_steps: 50 }
    }
}

impl TheoryCurveConfig {
    /// Keys: `m`, `j` (list), `q_min`, `q_max`, `q_steps`.
    pub fn from_key_values(mut kv: KeyValues) -> Result<Self> {
        let d = Self::default();
        let cfg = TheoryCurveConfig {
            m: kv.take("m")?.unwrap_or(d.m),
            js: kv.take_list("j")?.unwrap_or(d.js),
            q_min: kv.take("q_min")?.unwrap_or(d.q_min),
            q_max: kv.take("q_max")?.unwrap_or(d.q_max),
            q_steps: kv.take("q_steps")?.unwrap_or(d.q_steps),
        };
        kv.finish()?;
        Ok(cfg)
    }

    pub fn run(&self) -> Result<Vec<(f64, usize, f64)>> {
        theory_curves(self.m, &self.js, &grid(self.q_min, self.q_max, self.q_steps))
    }
}

/// Correction probability over a `q` grid for each threshold `j`.
pub fn theory_curves(m: usize, js: &[usize], qs: &[f64]) -> Result<Vec<(f64, usize, f64)>> {
    let mut rows = Vec::with_capacity(js.len() * qs.len());
    for &j in js {
        for &q in qs {
            rows.push((q, j, correction_probability(&TheoryParams::new(q, m, j)?)));
        }
    }
    Ok(rows)
}

/// `steps + 1` evenly spaced points on `[lo, hi]`.
pub fn grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![lo];
    }
    (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect()
}

pub fn theory_csv(rows: &[(f64, usize, f64)]) -> String {
    let mut s = String::from("q,j,probability\n");
    for &(q, j, p) in rows {
        let _ = writeln!(s, "{},{},{}", fmt_sig6(q), j, fmt_sig6(p));
    }
    s
}

/// A single review assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssignConfig {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl Default for AssignConfig {
    fn default() -> Self {
        AssignConfig { n: 200, m: 7, seed: 1 }
    }
}

impl AssignConfig {
    /// Keys: `n`, `m`, `seed`.
    pub fn from_key_values(mut kv: KeyValues) -> Result<Self> {
        let d = Self::default();
        let cfg = AssignConfig {
            n: kv.take("n")?.unwrap_or(d.n),
            m: kv.take("m")?.unwrap_or(d.m),
            seed: kv.take("seed")?.unwrap_or(d.seed),
        };
        kv.finish()?;
        Ok(cfg)
    }

    pub fn run(&self) -> Result<Assignment> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        euler_assignment(self.n, self.m, DEFAULT_MAX_ATTEMPTS, &mut rng)
    }
}

pub fn assignment_csv(a: &Assignment) -> String {
    let mut s = String::from("reviewer,reviewee\n");
    for (i, j) in a.arcs() {
        let _ = writeln!(s, "{i},{j}");
    }
    s
}

/// One-line summary of the structural checks on an assignment.
pub fn assignment_report(a: &Assignment, violations: usize) -> String {
    let sp = check_sp_structure(a);
    format!("n={} arcs={} violations={} sp_structure={}", a.n(), a.arc_count(), violations, if sp { "ok" } else { "fail" })
}
