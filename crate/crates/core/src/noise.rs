//! Mallows noise for reviewer beliefs.
//!
//! Dispersion runs over `[0, 2]`: values up to 1 are ordinary Mallows
//! dispersion about the truth, values above 1 sample about the reversed truth
//! with dispersion `2 - phi`, which models adversarial reviewers.

use std::collections::HashMap;
use std::hash::Hash;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::types::{AgentId, Assignment, GroundTruth, RankingProfile};

/// Number of pairs ordered differently by two rankings of the same items.
pub fn kendall_tau<T: Eq + Hash + Copy>(r1: &[T], r2: &[T]) -> Result<usize> {
    if r1.len() != r2.len() {
        return Err(Error::MismatchedItems);
    }
    let pos: HashMap<T, usize> = r2.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    if pos.len() != r2.len() {
        return Err(Error::MismatchedItems);
    }
    let mapped = r1
        .iter()
        .map(|x| pos.get(x).copied().ok_or(Error::MismatchedItems))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = vec![false; mapped.len()];
    for &p in &mapped {
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::MismatchedItems);
        }
    }
    Ok(count_inversions(&mapped))
}

fn count_inversions(v: &[usize]) -> usize {
    let mut n = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                n += 1;
            }
        }
    }
    n
}

/// Extended Mallows dispersion in `[0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Dispersion(f64);

impl Dispersion {
    pub fn new(phi_ext: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&phi_ext) {
            return Err(invalid(format!("dispersion {phi_ext} is outside [0, 2]")));
        }
        Ok(Dispersion(phi_ext))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Whether samples are drawn about the reversed reference.
    pub fn is_inverted(self) -> bool {
        self.0 > 1.0
    }

    /// The ordinary Mallows dispersion in `[0, 1]`.
    pub fn effective_phi(self) -> f64 {
        if self.is_inverted() {
            2.0 - self.0
        } else {
            self.0
        }
    }
}

/// Draws a ranking from the Mallows model about `reference` (best first).
///
/// Uses repeated insertion: the `i`-th reference item is inserted at slot `j`
/// of the partial ranking (1-based, `j <= i`) with probability proportional
/// to `phi^(i-j)`. This samples the Mallows distribution exactly, in
/// `O(len^2)` time dominated by the insertions.
pub fn mallows_sample<T: Copy, R: Rng + ?Sized>(
    reference: &[T],
    dispersion: Dispersion,
    rng: &mut R,
) -> Vec<T> {
    let phi = dispersion.effective_phi();
    let items: Vec<T> = if dispersion.is_inverted() {
        reference.iter().rev().copied().collect()
    } else {
        reference.to_vec()
    };

    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for (idx, &item) in items.iter().enumerate() {
        let d = displacement(idx + 1, phi, rng);
        out.insert(idx - d, item);
    }
    out
}

/// Number of already placed items that the `i`-th inserted item jumps over:
/// `P(d) ∝ phi^d` on `0..i`, drawn by inverting the truncated geometric CDF.
fn displacement<R: Rng + ?Sized>(i: usize, phi: f64, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    if phi <= 0.0 {
        return 0;
    }
    if phi >= 1.0 {
        return ((u * i as f64) as usize).min(i - 1);
    }
    let tail = 1.0 - phi.powi(i as i32);
    let d = ((-u * tail).ln_1p() / phi.ln()).floor();
    if d.is_finite() && d >= 0.0 {
        (d as usize).min(i - 1)
    } else {
        0
    }
}

/// Two-type reviewer population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationMix {
    pub share_accurate: f64,
    pub phi_accurate: Dispersion,
    pub phi_inaccurate: Dispersion,
}

impl PopulationMix {
    pub fn new(share_accurate: f64, phi_accurate: f64, phi_inaccurate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&share_accurate) {
            return Err(invalid(format!("share of accurate reviewers {share_accurate} is outside [0, 1]")));
        }
        Ok(PopulationMix {
            share_accurate,
            phi_accurate: Dispersion::new(phi_accurate)?,
            phi_inaccurate: Dispersion::new(phi_inaccurate)?,
        })
    }

    /// A population where every agent has the same dispersion.
    pub fn uniform(phi: f64) -> Result<Self> {
        PopulationMix::new(1.0, phi, phi)
    }

    /// Number of accurate agents among `n`.
    pub fn accurate_count(&self, n: usize) -> usize {
        ((self.share_accurate * n as f64).round() as usize).min(n)
    }

    /// Per-agent dispersions: exactly `accurate_count(n)` accurate agents at
    /// shuffled positions.
    pub fn dispersions<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Dispersion> {
        let accurate = self.accurate_count(n);
        let mut out: Vec<Dispersion> = (0..n)
            .map(|i| if i < accurate { self.phi_accurate } else { self.phi_inaccurate })
            .collect();
        out.shuffle(rng);
        out
    }
}

/// What a reviewer's Mallows draw ranks before it is cut down to the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingScope {
    /// One draw over the whole ground truth, restricted to the pool.
    #[default]
    Population,
    /// One draw over the pool's restriction of the ground truth.
    Pool,
}

impl FromStr for SamplingScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "population" => Ok(SamplingScope::Population),
            "pool" => Ok(SamplingScope::Pool),
            other => Err(invalid(format!("unknown sampling scope `{other}` (expected population or pool)"))),
        }
    }
}

/// Samples every reviewer's belief about its pool with the reviewer's own
/// dispersion, using [`SamplingScope::Population`].
pub fn sample_profile<R: Rng + ?Sized>(
    gt: &GroundTruth,
    a: &Assignment,
    dispersions: &[Dispersion],
    rng: &mut R,
) -> Result<RankingProfile> {
    sample_profile_with(gt, a, dispersions, SamplingScope::default(), rng)
}

pub fn sample_profile_with<R: Rng + ?Sized>(
    gt: &GroundTruth,
    a: &Assignment,
    dispersions: &[Dispersion],
    scope: SamplingScope,
    rng: &mut R,
) -> Result<RankingProfile> {
    if dispersions.len() != a.n() {
        return Err(Error::LengthMismatch(dispersions.len(), a.n()));
    }
    if gt.n() != a.n() {
        return Err(Error::LengthMismatch(gt.n(), a.n()));
    }
    let mut in_pool = vec![false; a.n()];
    let rankings = (0..a.n())
        .map(|i| match scope {
            SamplingScope::Pool => mallows_sample(&gt.restrict(a.reviewees(i)), dispersions[i], rng),
            SamplingScope::Population => {
                for &j in a.reviewees(i) {
                    in_pool[j] = true;
                }
                let full = mallows_sample(gt.order(), dispersions[i], rng);
                let ranking: Vec<AgentId> = full.into_iter().filter(|&j| in_pool[j]).collect();
                for &j in a.reviewees(i) {
                    in_pool[j] = false;
                }
                ranking
            }
        })
        .collect();
    RankingProfile::new(a, rankings)
}

/// How many of the top `t` entries of `ranking` are not among the top `t` of
/// `truth`.
pub fn nomination_errors(ranking: &[AgentId], truth: &[AgentId], t: usize) -> usize {
    let t = t.min(ranking.len()).min(truth.len());
    ranking[..t].iter().filter(|x| !truth[..t].contains(x)).count()
}
