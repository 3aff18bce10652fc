//! Nomination, reviewer weighting and weighted selection.
//!
//! Each reviewer approves its top `floor(quota)` reviewees with 1 and its next
//! reviewee with `alpha = quota - floor(quota)`. A partial approval becomes a
//! real nomination with probability `alpha`. Agent `j` is selected when the
//! weight of the reviewers that nominated it is at least half the total weight
//! of its reviewers.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::types::{AgentId, ApprovalProfile, Assignment, Params, PoolValues, RankingProfile, WeightVector};

pub const DEFAULT_GAMMA: f64 = 20.0;
pub const DEFAULT_DELTA: f64 = 2.0;
pub const DEFAULT_T1: f64 = 0.2;
pub const DEFAULT_T2: f64 = 0.6;

/// Denominator applied to a reviewer's error count by [`WeightScheme::Step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepScale {
    /// `err / (n/k)`.
    #[default]
    PopulationRatio,
    /// `err / nomination_quota`.
    NominationQuota,
}

impl FromStr for StepScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ratio" | "population_ratio" => Ok(StepScale::PopulationRatio),
            "quota" | "nomination_quota" => Ok(StepScale::NominationQuota),
            other => Err(invalid(format!("unknown step scale `{other}`"))),
        }
    }
}

/// Reviewer weighting scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScheme {
    Unit,
    Distance { gamma: f64 },
    MajorityErrors { delta: f64 },
    Step { t1: f64, t2: f64, scale: StepScale },
}

impl WeightScheme {
    pub fn distance() -> Self {
        WeightScheme::Distance { gamma: DEFAULT_GAMMA }
    }

    pub fn majority_errors() -> Self {
        WeightScheme::MajorityErrors { delta: DEFAULT_DELTA }
    }

    pub fn step() -> Self {
        WeightScheme::Step { t1: DEFAULT_T1, t2: DEFAULT_T2, scale: StepScale::PopulationRatio }
    }

    /// The four schemes with default parameters.
    pub fn all_default() -> Vec<Self> {
        vec![WeightScheme::Unit, Self::distance(), Self::majority_errors(), Self::step()]
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightScheme::Unit => "unit",
            WeightScheme::Distance { .. } => "distance",
            WeightScheme::MajorityErrors { .. } => "majority_errors",
            WeightScheme::Step { .. } => "step",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightScheme::Unit => Ok(()),
            WeightScheme::Distance { gamma } if gamma >= 0.0 && gamma.is_finite() => Ok(()),
            WeightScheme::MajorityErrors { delta } if delta >= 0.0 && delta.is_finite() => Ok(()),
            WeightScheme::Step { t1, t2, .. } if 0.0 <= t1 && t1 <= t2 && t2.is_finite() => Ok(()),
            s => Err(invalid(format!("scheme parameters out of range: {s:?}"))),
        }
    }

    /// Computes every reviewer's weight from the approval profile.
    pub fn weights(&self, app: &ApprovalProfile, a: &Assignment, p: &Params) -> Result<WeightVector> {
        self.validate()?;
        Ok(match *self {
            WeightScheme::Unit => weight_unit(a.n()),
            WeightScheme::Distance { gamma } => weight_distance(app, a, gamma),
            WeightScheme::MajorityErrors { delta } => {
                weight_majority_errors(&compute_errors(app, a), p.m, delta)
            }
            WeightScheme::Step { t1, t2, scale } => weight_step(&compute_errors(app, a), p, t1, t2, scale),
        })
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `unit`, `distance[:gamma]`, `majority_errors[:delta]` and
/// `step[:t1:t2]`.
impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':').map(str::trim);
        let name = parts.next().unwrap_or_default();
        let args = parts
            .map(|x| x.parse::<f64>().map_err(|_| invalid(format!("bad scheme parameter `{x}` in `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
        let max_args = match name {
            "unit" => 0,
            "distance" | "majority_errors" | "majerr" => 1,
            "step" => 2,
            other => return Err(invalid(format!("unknown weighting scheme `{other}`"))),
        };
        if args.len() > max_args {
            return Err(invalid(format!("too many parameters for scheme `{name}`")));
        }
        let scheme = match name {
            "unit" => WeightScheme::Unit,
            "distance" => WeightScheme::Distance { gamma: arg(0, DEFAULT_GAMMA) },
            "step" => WeightScheme::Step { t1: arg(0, DEFAULT_T1), t2: arg(1, DEFAULT_T2), scale: StepScale::default() },
            _ => WeightScheme::MajorityErrors { delta: arg(0, DEFAULT_DELTA) },
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

/// One uniform draw per reviewer in `[0, 1)`. A reviewer's partial approval
/// is realized as a nomination iff its draw is below `alpha`. Draws are keyed
/// by reviewer, not by reviewee, so a reviewer changing its ranking does not
/// disturb anyone else's randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct NominationDraws(Vec<f64>);

impl NominationDraws {
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        NominationDraws((0..n).map(|_| rng.gen::<f64>()).collect())
    }

    pub fn from_uniforms(draws: Vec<f64>) -> Result<Self> {
        if draws.iter().any(|u| !(0.0..1.0).contains(u)) {
            return Err(invalid("nomination draws must lie in [0, 1)"));
        }
        Ok(NominationDraws(draws))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Approval scores and the realized 0/1 nominations of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct Nominations {
    approvals: ApprovalProfile,
    realized: PoolValues<bool>,
}

impl Nominations {
    pub fn new(approvals: ApprovalProfile, realized: PoolValues<bool>) -> Self {
        Nominations { approvals, realized }
    }

    pub fn approvals(&self) -> &ApprovalProfile {
        &self.approvals
    }

    pub fn realized(&self) -> &PoolValues<bool> {
        &self.realized
    }
}

/// Converts rankings into approvals and realizes partial nominations.
pub fn nominate<R: Rng + ?Sized>(profile: &RankingProfile, p: &Params, rng: &mut R) -> Nominations {
    let draws = NominationDraws::sample(profile.n(), rng);
    nominate_with_draws(profile, p, &draws).expect("draw count matches profile")
}

pub fn nominate_with_draws(profile: &RankingProfile, p: &Params, draws: &NominationDraws) -> Result<Nominations> {
    if draws.0.len() != profile.n() {
        return Err(Error::LengthMismatch(draws.0.len(), profile.n()));
    }
    let certain = p.certain_nominations();
    let alpha = p.partial_approval();
    let mut approvals = Vec::with_capacity(profile.n());
    let mut realized = Vec::with_capacity(profile.n());
    for i in 0..profile.n() {
        let ranking = profile.ranking(i);
        let mut app = Vec::with_capacity(ranking.len());
        let mut real = Vec::with_capacity(ranking.len());
        for (pos, &j) in ranking.iter().enumerate() {
            let rank = pos + 1;
            let (value, nominated) = if rank <= certain {
                (1.0, true)
            } else if rank == certain + 1 && alpha > 0.0 {
                (alpha, draws.0[i] < alpha)
            } else {
                (0.0, false)
            };
            app.push((j, value));
            real.push((j, nominated));
        }
        approvals.push(app);
        realized.push(real);
    }
    Ok(Nominations {
        approvals: ApprovalProfile::new(PoolValues::from_entries(approvals), alpha),
        realized: PoolValues::from_entries(realized),
    })
}

/// Outcome of the weighted choice.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Selected agents, ascending.
    pub selected: Vec<AgentId>,
    /// Weight of the reviewers that nominated each agent.
    pub support: Vec<f64>,
    /// Total weight of each agent's reviewers.
    pub total_weight: Vec<f64>,
    pub realized: PoolValues<bool>,
}

impl SelectionResult {
    pub fn contains(&self, agent: AgentId) -> bool {
        self.selected.binary_search(&agent).is_ok()
    }
}

/// Weighted selection over already-realized nominations. An agent whose
/// reviewers all carry zero weight is not selected.
pub fn select(a: &Assignment, nominations: &Nominations, w: &WeightVector) -> Result<SelectionResult> {
    if w.len() != a.n() {
        return Err(Error::LengthMismatch(w.len(), a.n()));
    }
    let n = a.n();
    let mut support = vec![0.0; n];
    let mut total_weight = vec![0.0; n];
    let mut selected = Vec::new();
    for j in 0..n {
        for &i in a.reviewers(j) {
            total_weight[j] += w[i];
            if nominations.realized.get(i, j).unwrap_or(false) {
                support[j] += w[i];
            }
        }
        if total_weight[j] > 0.0 && support[j] >= total_weight[j] / 2.0 {
            selected.push(j);
        }
    }
    Ok(SelectionResult { selected, support, total_weight, realized: nominations.realized.clone() })
}

/// Nominates from `profile` and applies the weighted selection rule.
pub fn weighted_choice<R: Rng + ?Sized>(
    a: &Assignment,
    profile: &RankingProfile,
    p: &Params,
    w: &WeightVector,
    rng: &mut R,
) -> Result<SelectionResult> {
    let nominations = nominate(profile, p, rng);
    select(a, &nominations, w)
}

pub fn weight_unit(n: usize) -> WeightVector {
    WeightVector::unit(n)
}

/// `w_i = (1 - d_i)^gamma` where `d_i` is the mean absolute approval
/// difference between `i` and every reviewer of each of `i`'s reviewees,
/// normalized by `m²`.
pub fn weight_distance(app: &ApprovalProfile, a: &Assignment, gamma: f64) -> WeightVector {
    let weights = (0..a.n())
        .map(|i| {
            let m = a.reviewees(i).len();
            if m == 0 {
                return 1.0;
            }
            let mut sum = 0.0;
            for &(j, mine) in app.pool(i) {
                for &l in a.reviewers(j) {
                    let theirs = app.approval(l, j).unwrap_or(0.0);
                    sum += (mine - theirs).abs();
                }
            }
            let d = sum / (m * m) as f64;
            (1.0 - d).clamp(0.0, 1.0).powf(gamma)
        })
        .collect();
    WeightVector::new(weights).expect("distance weights lie in [0, 1]")
}

/// Majority opinion per reviewee and minority count per reviewer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorCount {
    pub errors: Vec<usize>,
    pub majority: Vec<bool>,
}

/// A partial approval counts as approval when compared against the majority
/// iff it is at least one half.
fn binarize(value: f64) -> bool {
    value >= 0.5
}

/// `maj_j` is set when the summed approvals of `j` (partial ones included)
/// reach half of `j`'s reviewers; `err_i` counts reviewees on which `i`
/// disagrees with `maj_j`.
pub fn compute_errors(app: &ApprovalProfile, a: &Assignment) -> ErrorCount {
    let majority: Vec<bool> = (0..a.n())
        .map(|j| {
            let reviewers = a.reviewers(j);
            let sum: f64 = reviewers.iter().map(|&i| app.approval(i, j).unwrap_or(0.0)).sum();
            !reviewers.is_empty() && sum >= reviewers.len() as f64 / 2.0
        })
        .collect();
    let errors = (0..a.n())
        .map(|i| app.pool(i).iter().filter(|&&(j, v)| binarize(v) != majority[j]).count())
        .collect();
    ErrorCount { errors, majority }
}

/// `w_i = max(0, 1 - delta·err_i/m)`.
pub fn weight_majority_errors(err: &ErrorCount, m: usize, delta: f64) -> WeightVector {
    let weights = err
        .errors
        .iter()
        .map(|&e| (1.0 - delta * e as f64 / m as f64).clamp(0.0, 1.0))
        .collect();
    WeightVector::new(weights).expect("clamped weights lie in [0, 1]")
}

/// Three-level weight: 1 below `t1`, 0.5 below `t2`, else 0, applied to the
/// scaled error count.
pub fn weight_step(err: &ErrorCount, p: &Params, t1: f64, t2: f64, scale: StepScale) -> WeightVector {
    let denominator = match scale {
        StepScale::PopulationRatio => p.n as f64 / p.k as f64,
        StepScale::NominationQuota => p.nomination_quota(),
    };
    let weights = err
        .errors
        .iter()
        .map(|&e| {
            let rate = e as f64 / denominator;
            if rate < t1 {
                1.0
            } else if rate < t2 {
                0.5
            } else {
                0.0
            }
        })
        .collect();
    WeightVector::new(weights).expect("step weights lie in [0, 1]")
}
