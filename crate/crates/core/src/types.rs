//! Shared domain types: parameters, review assignments, ground truth,
//! rankings, approvals and weights.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Dense agent index in `0..n`.
pub type AgentId = usize;

/// Problem size and nomination parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Number of agents.
    pub n: usize,
    /// Target number of winners.
    pub k: usize,
    /// Reviews written (and received) by each agent.
    pub m: usize,
    /// Slack added to the nomination quota.
    pub epsilon: f64,
}

impl Params {
    pub fn new(n: usize, k: usize, m: usize, epsilon: f64) -> Result<Self> {
        let p = Params { n, k, m, epsilon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n must be positive"));
        }
        if self.k == 0 || self.k >= self.n {
            return Err(invalid(format!("k must satisfy 0 < k < n (k={}, n={})", self.k, self.n)));
        }
        if self.m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(invalid(format!("epsilon must be a finite value >= 0, got {}", self.epsilon)));
        }
        let quota = self.nomination_quota();
        if !(quota > 0.0 && quota <= self.m as f64) {
            return Err(invalid(format!(
                "nomination quota {quota} must lie in (0, m] with m={}",
                self.m
            )));
        }
        Ok(())
    }

    /// `(k/n)·m + epsilon`, the expected number of approvals per reviewer.
    pub fn nomination_quota(&self) -> f64 {
        (self.k * self.m) as f64 / self.n as f64 + self.epsilon
    }

    /// Number of reviewees each reviewer nominates for certain.
    pub fn certain_nominations(&self) -> usize {
        self.nomination_quota().floor() as usize
    }

    /// Fractional approval `alpha` given to the next-ranked reviewee.
    pub fn partial_approval(&self) -> f64 {
        let q = self.nomination_quota();
        q - q.floor()
    }
}

/// Directed review graph: an arc `(i, j)` means `i` reviews `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    n: usize,
    reviewees: Vec<Vec<AgentId>>,
    reviewers: Vec<Vec<AgentId>>,
}

impl Assignment {
    /// Builds an assignment from arcs. Duplicate arcs collapse; arcs naming an
    /// agent outside `0..n` are rejected. Structural properties such as
    /// regularity are checked separately by [`validate_assignment`].
    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (AgentId, AgentId)>,
    {
        let mut set = BTreeSet::new();
        for (i, j) in arcs {
            for index in [i, j] {
                if index >= n {
                    return Err(Error::AgentOutOfRange { index, n });
                }
            }
            set.insert((i, j));
        }
        let mut reviewees = vec![Vec::new(); n];
        let mut reviewers = vec![Vec::new(); n];
        // BTreeSet iteration is ordered, so reviewee lists come out sorted.
        for &(i, j) in &set {
            reviewees[i].push(j);
            reviewers[j].push(i);
        }
        for list in &mut reviewers {
            list.sort_unstable();
        }
        Ok(Assignment { n, reviewees, reviewers })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `A(i)`: the agents reviewed by `i`, sorted.
    pub fn reviewees(&self, i: AgentId) -> &[AgentId] {
        &self.reviewees[i]
    }

    /// `A⁻¹(j)`: the agents reviewing `j`, sorted.
    pub fn reviewers(&self, j: AgentId) -> &[AgentId] {
        &self.reviewers[j]
    }

    pub fn contains_arc(&self, i: AgentId, j: AgentId) -> bool {
        i < self.n && self.reviewees[i].binary_search(&j).is_ok()
    }

    pub fn arc_count(&self) -> usize {
        self.reviewees.iter().map(Vec::len).sum()
    }

    /// Arcs in `(reviewer, reviewee)` lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.reviewees
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().map(move |&j| (i, j)))
    }
}

/// A structural defect found by [`validate_assignment`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    AgentCount { expected: usize, actual: usize },
    SelfArc(AgentId),
    OutDegree { agent: AgentId, degree: usize, expected: usize },
    InDegree { agent: AgentId, degree: usize, expected: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AgentCount { expected, actual } => {
                write!(f, "assignment covers {actual} agents, expected {expected}")
            }
            Violation::SelfArc(a) => write!(f, "self-arc at {a}"),
            Violation::OutDegree { agent, degree, expected } => {
                write!(f, "agent {agent} reviews {degree} agents, expected {expected}")
            }
            Violation::InDegree { agent, degree, expected } => {
                write!(f, "agent {agent} has {degree} reviewers, expected {expected}")
            }
        }
    }
}

/// Checks m-regularity and the absence of self-review. An empty result means
/// the assignment is valid for `p`.
pub fn validate_assignment(a: &Assignment, p: &Params) -> Vec<Violation> {
    let mut out = Vec::new();
    if a.n() != p.n {
        out.push(Violation::AgentCount { expected: p.n, actual: a.n() });
    }
    for i in 0..a.n() {
        if a.contains_arc(i, i) {
            out.push(Violation::SelfArc(i));
        }
    }
    for i in 0..a.n() {
        let degree = a.reviewees(i).len();
        if degree != p.m {
            out.push(Violation::OutDegree { agent: i, degree, expected: p.m });
        }
    }
    for j in 0..a.n() {
        let degree = a.reviewers(j).len();
        if degree != p.m {
            out.push(Violation::InDegree { agent: j, degree, expected: p.m });
        }
    }
    out
}

/// Latent objective ranking of the agents; position 0 is the best agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    order: Vec<AgentId>,
    position: Vec<usize>,
}

impl GroundTruth {
    pub fn new(order: Vec<AgentId>) -> Result<Self> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (pos, &agent) in order.iter().enumerate() {
            if agent >= n {
                return Err(Error::AgentOutOfRange { index: agent, n });
            }
            if position[agent] != usize::MAX {
                return Err(invalid(format!("agent {agent} appears twice in ground truth")));
            }
            position[agent] = pos;
        }
        Ok(GroundTruth { order, position })
    }

    pub fn identity(n: usize) -> Self {
        GroundTruth { order: (0..n).collect(), position: (0..n).collect() }
    }

    /// A uniformly random ground truth.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<AgentId> = (0..n).collect();
        order.shuffle(rng);
        let mut position = vec![0; n];
        for (pos, &agent) in order.iter().enumerate() {
            position[agent] = pos;
        }
        GroundTruth { order, position }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[AgentId] {
        &self.order
    }

    /// Zero-based position of `agent` (0 = best).
    pub fn position(&self, agent: AgentId) -> usize {
        self.position[agent]
    }

    /// The `k` best agents.
    pub fn top(&self, k: usize) -> &[AgentId] {
        &self.order[..k.min(self.order.len())]
    }

    /// `pool` sorted best-first according to the ground truth.
    pub fn restrict(&self, pool: &[AgentId]) -> Vec<AgentId> {
        let mut out = pool.to_vec();
        out.sort_by_key(|&a| self.position[a]);
        out
    }
}

/// Each reviewer's strict ranking of their review pool, best first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingProfile {
    rankings: Vec<Vec<AgentId>>,
}

impl RankingProfile {
    /// Checks that every ranking is a permutation of the reviewer's pool.
    pub fn new(a: &Assignment, rankings: Vec<Vec<AgentId>>) -> Result<Self> {
        if rankings.len() != a.n() {
            return Err(Error::LengthMismatch(rankings.len(), a.n()));
        }
        for (reviewer, ranking) in rankings.iter().enumerate() {
            let mut sorted = ranking.clone();
            sorted.sort_unstable();
            if sorted.as_slice() != a.reviewees(reviewer) {
                return Err(Error::InvalidRanking {
                    reviewer,
                    reason: "ranking is not a permutation of the review pool".into(),
                });
            }
        }
        Ok(RankingProfile { rankings })
    }

    pub fn n(&self) -> usize {
        self.rankings.len()
    }

    /// Reviewer `i`'s ranking, best first.
    pub fn ranking(&self, i: AgentId) -> &[AgentId] {
        &self.rankings[i]
    }

    /// One-based rank `σ_i(j)`, or `None` when `i` does not review `j`.
    pub fn rank(&self, i: AgentId, j: AgentId) -> Option<usize> {
        self.rankings[i].iter().position(|&x| x == j).map(|p| p + 1)
    }

    /// Replaces reviewer `i`'s ranking, checking it covers the same pool.
    pub fn with_ranking(&self, i: AgentId, ranking: Vec<AgentId>) -> Result<Self> {
        let mut a = ranking.clone();
        let mut b = self.rankings[i].clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(Error::InvalidRanking {
                reviewer: i,
                reason: "replacement does not cover the same pool".into(),
            });
        }
        let mut rankings = self.rankings.clone();
        rankings[i] = ranking;
        Ok(RankingProfile { rankings })
    }
}

/// Values attached to each `(reviewer, reviewee)` arc, stored per reviewer
/// and sorted by reviewee.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolValues<T> {
    entries: Vec<Vec<(AgentId, T)>>,
}

impl<T: Copy> PoolValues<T> {
    pub fn from_entries(mut entries: Vec<Vec<(AgentId, T)>>) -> Self {
        for list in &mut entries {
            list.sort_unstable_by_key(|e| e.0);
        }
        PoolValues { entries }
    }

    pub fn get(&self, reviewer: AgentId, reviewee: AgentId) -> Option<T> {
        let list = &self.entries[reviewer];
        list.binary_search_by_key(&reviewee, |e| e.0).ok().map(|p| list[p].1)
    }

    /// All `(reviewee, value)` pairs for a reviewer.
    pub fn pool(&self, reviewer: AgentId) -> &[(AgentId, T)] {
        &self.entries[reviewer]
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }
}

/// Approval scores in `{0, alpha, 1}` derived from a ranking profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ApprovalProfile {
    values: PoolValues<f64>,
    alpha: f64,
}

impl ApprovalProfile {
    pub fn new(values: PoolValues<f64>, alpha: f64) -> Self {
        ApprovalProfile { values, alpha }
    }

    /// `σ_i^app(j)`, or `None` when `i` does not review `j`.
    pub fn approval(&self, i: AgentId, j: AgentId) -> Option<f64> {
        self.values.get(i, j)
    }

    pub fn pool(&self, i: AgentId) -> &[(AgentId, f64)] {
        self.values.pool(i)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.values.n()
    }
}

/// Reviewer reliability weights, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(0.0..=1.0).contains(*w)) {
            return Err(invalid(format!("weight {w} of agent {i} is outside [0, 1]")));
        }
        Ok(WeightVector(weights))
    }

    pub fn unit(n: usize) -> Self {
        WeightVector(vec![1.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<AgentId> for WeightVector {
    type Output = f64;

    fn index(&self, i: AgentId) -> &f64 {
        &self.0[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, m: usize) -> Params {
        Params { n, k: 1, m, epsilon: 0.0 }
    }

    #[test]
    fn two_cycle_is_valid() {
        let a = Assignment::from_arcs(2, [(0, 1), (1, 0)]).unwrap();
        assert!(validate_assignment(&a, &p(2, 1)).is_empty());
    }

    #[test]
    fn self_arcs_are_reported() {
        let a = Assignment::from_arcs(2, [(0, 0), (1, 1)]).unwrap();
        let v = validate_assignment(&a, &p(2, 1));
        assert_eq!(v, vec![Violation::SelfArc(0), Violation::SelfArc(1)]);
    }

    #[test]
    fn directed_four_cycle_is_valid() {
        let a = Assignment::from_arcs(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(validate_assignment(&a, &p(4, 1)).is_empty());
        assert_eq!(a.reviewers(0), &[3]);
        assert_eq!(a.reviewees(2), &[3]);
    }

    #[test]
    fn degree_violations() {
        let a = Assignment::from_arcs(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let v = validate_assignment(&a, &p(3, 1));
        assert!(v.contains(&Violation::OutDegree { agent: 0, degree: 2, expected: 1 }));
        assert!(v.contains(&Violation::OutDegree { agent: 2, degree: 0, expected: 1 }));
        assert!(v.contains(&Violation::InDegree { agent: 2, degree: 2, expected: 1 }));
        assert!(v.contains(&Violation::InDegree { agent: 0, degree: 0, expected: 1 }));
    }

    #[test]
    fn out_of_range_arc_is_an_error() {
        assert!(matches!(
            Assignment::from_arcs(2, [(0, 2)]),
            Err(Error::AgentOutOfRange { index: 2, n: 2 })
        ));
    }

    #[test]
    fn quota_arithmetic() {
        let p = Params::new(200, 40, 7, 0.0).unwrap();
        assert_eq!(p.certain_nominations(), 1);
        assert!((p.partial_approval() - 0.4).abs() < 1e-12);
        let p = Params::new(12, 4, 3, 0.0).unwrap();
        assert_eq!(p.nomination_quota(), 1.0);
        assert_eq!(p.partial_approval(), 0.0);
    }

    #[test]
    fn params_reject_bad_values() {
        assert!(Params::new(10, 0, 2, 0.0).is_err());
        assert!(Params::new(10, 10, 2, 0.0).is_err());
        assert!(Params::new(10, 2, 0, 0.0).is_err());
        assert!(Params::new(10, 2, 2, -0.1).is_err());
        // quota 0.4 + 2 > m
        assert!(Params::new(10, 2, 2, 2.0).is_err());
    }

    #[test]
    fn ground_truth_rejects_duplicates() {
        assert!(GroundTruth::new(vec![0, 1, 1]).is_err());
        let gt = GroundTruth::new(vec![2, 0, 1]).unwrap();
        assert_eq!(gt.position(2), 0);
        assert_eq!(gt.restrict(&[0, 1, 2]), vec![2, 0, 1]);
        assert_eq!(gt.top(2), &[2, 0]);
    }

    #[test]
    fn ranking_profile_checks_pools() {
        let a = Assignment::from_arcs(4, [(0, 1), (0, 2), (1, 3), (2, 0), (3, 0)]).unwrap();
        assert!(RankingProfile::new(&a, vec![vec![2, 1], vec![3], vec![0], vec![0]]).is_ok());
        assert!(RankingProfile::new(&a, vec![vec![2, 3], vec![3], vec![0], vec![0]]).is_err());
        let r = RankingProfile::new(&a, vec![vec![2, 1], vec![3], vec![0], vec![0]]).unwrap();
        assert_eq!(r.rank(0, 2), Some(1));
        assert_eq!(r.rank(0, 1), Some(2));
        assert_eq!(r.rank(0, 3), None);
    }

    #[test]
    fn weight_vector_bounds() {
        assert!(WeightVector::new(vec![0.0, 0.5, 1.0]).is_ok());
        assert!(WeightVector::new(vec![1.1]).is_err());
        assert!(WeightVector::new(vec![f64::NAN]).is_err());
        assert_eq!(WeightVector::unit(3).as_slice(), &[1.0, 1.0, 1.0]);
    }
}
