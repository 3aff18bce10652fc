//! A single simulated peer-selection round.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::assignment::build_assignment;
use crate::error::Result;
use crate::mechanism::{nominate, select, Nominations, WeightScheme};
use crate::metrics::{recall, spearman};
use crate::noise::{sample_profile_with, Dispersion, PopulationMix, SamplingScope};
use crate::types::{AgentId, Assignment, GroundTruth, Params, RankingProfile, WeightVector};

/// Parameters of one experiment cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub params: Params,
    pub mix: PopulationMix,
    pub scope: SamplingScope,
}

impl Cell {
    pub fn new(params: Params, mix: PopulationMix) -> Self {
        Cell { params, mix, scope: SamplingScope::default() }
    }
}

/// Everything drawn at random for one trial. Weighting schemes are applied
/// afterwards, so all schemes see identical instances for a given seed.
#[derive(Debug, Clone)]
pub struct Instance {
    pub params: Params,
    pub ground_truth: GroundTruth,
    pub dispersions: Vec<Dispersion>,
    pub assignment: Assignment,
    pub profile: RankingProfile,
    pub nominations: Nominations,
}

/// Draws ground truth, reviewer types, assignment, beliefs and nomination
/// draws, in that order, from a ChaCha8 stream seeded with `seed`.
pub fn simulate_instance(cell: &Cell, seed: u64) -> Result<Instance> {
    let p = cell.params;
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ground_truth = GroundTruth::random(p.n, &mut rng);
    let dispersions = cell.mix.dispersions(p.n, &mut rng);
    let assignment = build_assignment(&p, &mut rng)?;
    let profile = sample_profile_with(&ground_truth, &assignment, &dispersions, cell.scope, &mut rng)?;
    let nominations = nominate(&profile, &p, &mut rng);
    Ok(Instance { params: p, ground_truth, dispersions, assignment, profile, nominations })
}

/// Outcome of one scheme on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub scheme: WeightScheme,
    pub params: Params,
    pub ground_truth: GroundTruth,
    pub selected: Vec<AgentId>,
    pub weights: WeightVector,
    pub phi_ext: Vec<f64>,
    pub recall: f64,
    pub size: usize,
    /// Spearman correlation between weights and dispersions; `None` when
    /// either side is constant.
    pub weight_phi_correlation: Option<f64>,
}

impl Instance {
    pub fn evaluate(&self, scheme: WeightScheme) -> Result<TrialResult> {
        let p = &self.params;
        let weights = scheme.weights(self.nominations.approvals(), &self.assignment, p)?;
        let selection = select(&self.assignment, &self.nominations, &weights)?;
        let phi_ext: Vec<f64> = self.dispersions.iter().map(|d| d.value()).collect();
        let weight_phi_correlation = spearman(weights.as_slice(), &phi_ext).ok();
        Ok(TrialResult {
            scheme,
            params: *p,
            ground_truth: self.ground_truth.clone(),
            recall: recall(&selection.selected, &self.ground_truth, p.k)?,
            size: selection.selected.len(),
            selected: selection.selected,
            weights,
            phi_ext,
            weight_phi_correlation,
        })
    }
}

/// Simulates one instance and evaluates `scheme` on it.
pub fn run_trial(cell: &Cell, scheme: WeightScheme, seed: u64) -> Result<TrialResult> {
    simulate_instance(cell, seed)?.evaluate(scheme)
}
