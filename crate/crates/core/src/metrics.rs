//! Selection and weight quality metrics.

use crate::error::{invalid, Error, Result};
use crate::types::{AgentId, GroundTruth};

/// Fraction of the ground-truth top `k` that made it into `selected`.
pub fn recall(selected: &[AgentId], gt: &GroundTruth, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid("recall needs k > 0"));
    }
    if k > gt.n() {
        return Err(invalid(format!("k={k} exceeds the {} agents", gt.n())));
    }
    let hits = selected.iter().filter(|&&a| a < gt.n() && gt.position(a) < k).count();
    Ok(hits as f64 / k as f64)
}

/// One-based ranks with ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation using average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(invalid("correlation needs at least two points"));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(invalid("correlation input contains NaN"));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recall_examples() {
        let gt = GroundTruth::new(vec![3, 1, 4, 0, 2, 5]).unwrap();
        assert_eq!(recall(&[1, 3], &gt, 2).unwrap(), 1.0);
        assert_eq!(recall(&[0, 2, 5], &gt, 2).unwrap(), 0.0);
        assert_eq!(recall(&[3, 0], &gt, 2).unwrap(), 0.5);
        assert!(recall(&[1], &gt, 0).is_err());
        assert!(recall(&[1], &gt, 7).is_err());
    }

    #[test]
    fn half_recoverable_population_caps_at_half() {
        // only half of the true top set can ever be picked
        let gt = GroundTruth::identity(20);
        assert_eq!(recall(&[0, 1, 10, 11, 12], &gt, 4).unwrap(), 0.5);
    }

    #[test]
    fn spearman_examples() {
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[9.0, 5.0, 2.0, -1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn spearman_errors() {
        assert!(matches!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::ConstantInput)));
        assert!(spearman(&[1.0, 2.0], &[1.0]).is_err());
        assert!(spearman(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn ties_share_average_rank() {
        assert_eq!(average_ranks(&[0.5, 0.0, 0.5, 1.0]), vec![2.5, 1.0, 2.5, 4.0]);
    }
}
