//! Closed-form model of detecting inaccurate reviewers.
//!
//! Reviewers are accurate (`A`) or inaccurate (`Ā`, probability `q`). An agent
//! reviewed by an `Ā`-majority of margin `k` has its decision corrected when
//! at least `2k` of those `Ā` reviewers are identified, an `Ā` reviewer being
//! identified when it sits in the minority on at least `j` of its other
//! `m - 1` reviews.

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};

/// Model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryParams {
    /// Probability that an agent is inaccurate.
    pub q: f64,
    /// Reviews per agent.
    pub m: usize,
    /// Identification threshold.
    pub j: usize,
}

impl TheoryParams {
    pub fn new(q: f64, m: usize, j: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(invalid(format!("q={q} is outside [0, 1]")));
        }
        if m < 2 {
            return Err(invalid(format!("m={m} must be at least 2")));
        }
        if j < 1 || j > m - 1 {
            return Err(invalid(format!("j={j} must lie in 1..={}", m - 1)));
        }
        Ok(TheoryParams { q, m, j })
    }
}

/// Which per-review probability feeds the identification tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinorityReading {
    /// `1 - q_a_cond`: the probability that an inaccurate reviewer is outvoted
    /// in one of its pools.
    #[default]
    Complement,
    /// `q_a_cond` used directly.
    AsPrinted,
}

/// Binomial coefficient; exact integer arithmetic up to `n = 30`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= 30 {
        let k = k.min(n - k) as u128;
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n as u128 - i) / (i + 1);
        }
        c as f64
    } else {
        (ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
            .exp()
            .round()
    }
}

fn pmf(n: usize, i: usize, p: f64) -> f64 {
    binomial(n, i) * p.powi(i as i32) * (1.0 - p).powi((n - i) as i32)
}

/// `P[X >= from]` for `X ~ Binomial(trials, p)`.
pub fn binomial_tail(trials: usize, p: f64, from: usize) -> f64 {
    (from..=trials).map(|i| pmf(trials, i, p)).sum()
}

/// Probability of an `Ā`-majority of margin `k` among an agent's `m`
/// reviewers, i.e. exactly `floor(m/2) + k` inaccurate reviewers.
pub fn q_abar_k(tp: &TheoryParams, k: usize) -> Result<f64> {
    let max_k = tp.m.div_ceil(2);
    if k < 1 || k > max_k {
        return Err(invalid(format!("margin k={k} must lie in 1..={max_k}")));
    }
    Ok(pmf(tp.m, tp.m / 2 + k, tp.q))
}

/// Probability of an `Ā`-majority of any margin.
pub fn q_abar(tp: &TheoryParams) -> f64 {
    let by_margin: f64 = (1..=tp.m.div_ceil(2)).map(|k| pmf(tp.m, tp.m / 2 + k, tp.q)).sum();
    if tp.m % 2 == 1 {
        // Counting accurate reviewers instead; identical for odd m, while for
        // even m this form also counts the tie.
        let by_accurate: f64 =
            (0..=tp.m / 2).map(|i| binomial(tp.m, i) * (1.0 - tp.q).powi(i as i32) * tp.q.powi((tp.m - i) as i32)).sum();
        assert!((by_margin - by_accurate).abs() < 1e-12, "{by_margin} vs {by_accurate}");
    }
    by_margin
}

/// `sum_{i=0}^{floor(m/2)} C(m-1, i) (1-q)^i q^(m-1-i)`: with `i` the number
/// of accurate co-reviewers among `m - 1`, the probability that they number at
/// most `floor(m/2)`.
pub fn q_a_cond(tp: &TheoryParams) -> f64 {
    let others = tp.m - 1;
    (0..=(tp.m / 2).min(others))
        .map(|i| binomial(others, i) * (1.0 - tp.q).powi(i as i32) * tp.q.powi((others - i) as i32))
        .sum()
}

/// Per-review probability that an inaccurate reviewer is in the minority.
pub fn minority_probability(tp: &TheoryParams, reading: MinorityReading) -> f64 {
    match reading {
        MinorityReading::Complement => 1.0 - q_a_cond(tp),
        MinorityReading::AsPrinted => q_a_cond(tp),
    }
}

/// Probability that an inaccurate reviewer is identified.
pub fn q_det(tp: &TheoryParams) -> f64 {
    q_det_with(tp, minority_probability(tp, MinorityReading::default()))
}

/// Identification probability for an explicit per-review minority
/// probability `q_prime`.
pub fn q_det_with(tp: &TheoryParams, q_prime: f64) -> f64 {
    binomial_tail(tp.m - 1, q_prime, tp.j)
}

/// Probability that an `Ā`-majority decision is corrected.
pub fn correction_probability(tp: &TheoryParams) -> f64 {
    correction_probability_with(tp, q_det(tp))
}

/// Correction probability for an explicit identification probability.
pub fn correction_probability_with(tp: &TheoryParams, detect: f64) -> f64 {
    let half = tp.m / 2;
    (1..=tp.m.div_ceil(2))
        .map(|k| {
            let size = half + k;
            let enough: f64 = (2 * k..=size).map(|i| pmf(size, i, detect)).sum();
            pmf(tp.m, size, tp.q) * enough
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tp(q: f64, m: usize, j: usize) -> TheoryParams {
        TheoryParams::new(q, m, j).unwrap()
    }

    #[test]
    fn exact_binomials() {
        assert_eq!(binomial(9, 5), 126.0);
        assert_eq!(binomial(30, 15), 155_117_520.0);
        assert_eq!(binomial(40, 20), 137_846_528_820.0);
        assert_eq!(binomial(3, 4), 0.0);
    }

    #[test]
    fn margin_probabilities() {
        for k in 1..=5 {
            assert_eq!(q_abar_k(&tp(0.0, 9, 4), k).unwrap(), 0.0);
        }
        assert_eq!(q_abar_k(&tp(1.0, 9, 4), 5).unwrap(), 1.0);
        assert!(q_abar_k(&tp(0.3, 9, 4), 0).is_err());
        assert!(q_abar_k(&tp(0.3, 9, 4), 6).is_err());
    }

    #[test]
    fn margin_probability_against_simulation() {
        let expected = 126.0 * 0.3f64.powi(5) * 0.7f64.powi(4);
        assert!((q_abar_k(&tp(0.3, 9, 4), 1).unwrap() - expected).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let trials = 200_000;
        let hits = (0..trials).filter(|_| (0..9).filter(|_| rng.gen::<f64>() < 0.3).count() == 5).count();
        assert!((hits as f64 / trials as f64 - expected).abs() < 0.005);
    }

    #[test]
    fn majority_probability() {
        assert_eq!(q_abar(&tp(0.0, 9, 4)), 0.0);
        assert!((q_abar(&tp(1.0, 9, 4)) - 1.0).abs() < 1e-15);
        assert!((q_abar(&tp(0.5, 9, 4)) - 0.5).abs() < 1e-12);
        for m in [3, 5, 7, 9, 11] {
            for q in [0.05, 0.2, 0.45, 0.8] {
                let t = tp(q, m, 1);
                let sum: f64 = (1..=m.div_ceil(2)).map(|k| q_abar_k(&t, k).unwrap()).sum();
                assert!((q_abar(&t) - sum).abs() < 1e-12);
            }
        }
    }

    /// Brute force over all 2^8 co-reviewer type vectors.
    #[test]
    fn conditional_majority_by_enumeration() {
        let (q, m) = (0.3f64, 9);
        let mut total = 0.0;
        for mask in 0u32..(1 << (m - 1)) {
            let accurate = mask.count_ones() as usize;
            let prob = (1.0 - q).powi(accurate as i32) * q.powi((m - 1 - accurate) as i32);
            if accurate <= m / 2 {
                total += prob;
            }
        }
        assert!((q_a_cond(&tp(q, m, 4)) - total).abs() < 1e-12);
        assert!((q_a_cond(&tp(1.0, 9, 4)) - 1.0).abs() < 1e-15);
        assert_eq!(q_a_cond(&tp(0.0, 9, 4)), 0.0);
    }

    #[test]
    fn detection_edge_cases() {
        assert!((binomial_tail(8, 0.37, 0) - 1.0).abs() < 1e-12);
        for j in 1..=8 {
            assert!((q_det_with(&tp(0.3, 9, j), 1.0) - 1.0).abs() < 1e-15);
        }
    }

    /// One inaccurate reviewer on `m - 1` other pools, each with `m - 1`
    /// co-reviewers of independent type.
    fn detection_oracle(q: f64, m: usize, j: usize, trials: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0;
        for _ in 0..trials {
            let mut minority = 0;
            for _ in 0..m - 1 {
                let accurate = (0..m - 1).filter(|_| rng.gen::<f64>() >= q).count();
                if accurate > m / 2 {
                    minority += 1;
                }
            }
            if minority >= j {
                hits += 1;
            }
        }
        hits as f64 / trials as f64
    }

    #[test]
    fn detection_matches_simulation() {
        let t = tp(0.3, 9, 5);
        let sim = detection_oracle(0.3, 9, 5, 100_000, 3);
        assert!((q_det(&t) - sim).abs() < 0.01, "{} vs {sim}", q_det(&t));
    }

    #[test]
    fn detection_monotone_in_threshold() {
        for q in [0.1, 0.3, 0.5] {
            let values: Vec<f64> = (1..9).map(|j| q_det(&tp(q, 9, j))).collect();
            assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        }
    }

    #[test]
    fn correction_bounds_and_shape() {
        assert_eq!(correction_probability(&tp(0.0, 9, 4)), 0.0);
        for j in 4..=8 {
            let curve: Vec<f64> = (0..=50).map(|s| correction_probability(&tp(s as f64 / 100.0, 9, j))).collect();
            for (s, &c) in curve.iter().enumerate() {
                let t = tp(s as f64 / 100.0, 9, j);
                assert!((0.0..=1.0).contains(&c));
                assert!(c <= q_abar(&t) + 1e-15);
            }
            // rises from zero, peaks inside the range
            let peak = curve.iter().cloned().fold(0.0, f64::max);
            assert!(peak > curve[0]);
        }
        // lower thresholds identify more
        for s in 1..=50 {
            let q = s as f64 / 100.0;
            for j in 4..8 {
                assert!(correction_probability(&tp(q, 9, j)) >= correction_probability(&tp(q, 9, j + 1)) - 1e-15);
            }
        }
        // every curve peaks strictly inside (0, 0.5) and falls afterwards
        for j in 4..=8 {
            let c: Vec<f64> = (0..=50).map(|s| correction_probability(&tp(s as f64 / 100.0, 9, j))).collect();
            let argmax = (0..c.len()).max_by(|&a, &b| c[a].total_cmp(&c[b])).unwrap();
            assert!(argmax > 0 && argmax < 50 && c[50] < c[argmax], "j={j}");
        }
    }

    #[test]
    fn params_validation() {
        assert!(TheoryParams::new(1.1, 9, 4).is_err());
        assert!(TheoryParams::new(0.3, 9, 0).is_err());
        assert!(TheoryParams::new(0.3, 9, 9).is_err());
        assert!(TheoryParams::new(0.3, 1, 1).is_err());
    }
}
