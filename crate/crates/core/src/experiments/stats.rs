//! Midranks, the two-sided Wilcoxon rank-sum test and Spearman correlation.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest combined sample size handled by exact enumeration.
pub const EXACT_MAX_TOTAL: usize = 16;

/// Ranks starting at 1; tied values share the mean of their positions.
pub fn midranks(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Data("cannot rank NaN".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    Ok(ranks)
}

/// Number of `k`-subsets of `{1..n}` with each possible rank sum, indexed by sum.
fn rank_sum_counts(n: usize, k: usize) -> Vec<f64> {
    let max_sum = n * (n + 1) / 2;
    // counts[j][s]: subsets of size j with sum s among the ranks seen so far.
    let mut counts = vec![vec![0.0f64; max_sum + 1]; k + 1];
    counts[0][0] = 1.0;
    for rank in 1..=n {
        for j in (1..=k.min(rank)).rev() {
            for s in (rank..=max_sum).rev() {
                counts[j][s] += counts[j - 1][s - rank];
            }
        }
    }
    counts.swap_remove(k)
}

struct RankSum {
    n1: usize,
    n2: usize,
    /// Rank sum of the first sample.
    w: f64,
    /// Sum of `t^3 - t` over tie groups.
    tie_term: f64,
}

fn rank_sum(a: &[f64], b: &[f64]) -> Result<RankSum> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Data(format!(
            "rank-sum test needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled)?;
    let mut sorted = pooled;
    sorted.sort_by(f64::total_cmp);
    let tie_term = sorted
        .chunk_by(|x, y| x == y)
        .map(|g| {
            let t = g.len() as f64;
            t * t * t - t
        })
        .sum();
    Ok(RankSum {
        n1: a.len(),
        n2: b.len(),
        w: ranks[..a.len()].iter().sum(),
        tie_term,
    })
}

/// Exact two-sided p by counting rank splits; `None` with ties or more than 16 values.
pub fn wilcoxon_exact(a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    let r = rank_sum(a, b)?;
    let n = r.n1 + r.n2;
    if r.tie_term != 0.0 || n > EXACT_MAX_TOTAL {
        return Ok(None);
    }
    let counts = rank_sum_counts(n, r.n1);
    let total: f64 = counts.iter().sum();
    let observed = r.w as usize;
    let lower: f64 = counts[..=observed].iter().sum();
    let upper: f64 = counts[observed..].iter().sum();
    Ok(Some((2.0 * lower.min(upper) / total).min(1.0)))
}

/// Normal approximation with tie and continuity corrections. Zero variance gives 1.
pub fn wilcoxon_normal(a: &[f64], b: &[f64]) -> Result<f64> {
    let r = rank_sum(a, b)?;
    let (n1, n2) = (r.n1 as f64, r.n2 as f64);
    let n = n1 + n2;
    let mean = n1 * (n + 1.0) / 2.0;
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - r.tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return Ok(1.0);
    }
    let z = ((r.w - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    Ok((2.0 * Normal::standard().sf(z)).min(1.0))
}

/// Two-sided p-value of the Wilcoxon rank-sum test.
///
/// Exact when the samples are tie-free and `|a| + |b| <= 16`, otherwise the normal approximation.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<f64> {
    match wilcoxon_exact(a, b)? {
        Some(p) => Ok(p),
        None => wilcoxon_normal(a, b),
    }
}

/// Spearman rank correlation with midranks; `None` when either series is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Data(format!(
            "spearman needs two equal series of length >= 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let (rx, ry) = (midranks(x)?, midranks(y)?);
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx).powi(2);
        vy += (b - my).powi(2);
    }
    if vx == 0.0 || vy == 0.0 {
        return Ok(None);
    }
    Ok(Some(cov / (vx * vy).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Two-sided p by listing every split of the pooled ranks.
    fn brute_force_p(a: &[f64], b: &[f64]) -> f64 {
        let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
        let ranks = midranks(&pooled).unwrap();
        let (n1, n) = (a.len(), pooled.len());
        let mean = n1 as f64 * (n as f64 + 1.0) / 2.0;
        let observed = (ranks[..n1].iter().sum::<f64>() - mean).abs();
        let (mut extreme, mut total) = (0u64, 0u64);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != n1 {
                continue;
            }
            total += 1;
            let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if (w - mean).abs() >= observed - 1e-9 {
                extreme += 1;
            }
        }
        extreme as f64 / total as f64
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]).unwrap(), vec![3.5, 1.0, 3.5, 2.0]);
        assert!(midranks(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn separated_triples() {
        assert_eq!(wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap(), 0.1);
        assert_eq!(wilcoxon_rank_sum(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0]).unwrap(), 0.1);
    }

    #[test]
    fn identical_samples_give_one() {
        let a = [0.3, 1.5, 2.5, 9.0];
        assert_eq!(wilcoxon_rank_sum(&a, &a).unwrap(), 1.0);
        assert_eq!(wilcoxon_rank_sum(&[1.0; 5], &[1.0; 5]).unwrap(), 1.0);
    }

    #[test]
    fn rejects_short_samples() {
        assert!(wilcoxon_rank_sum(&[], &[1.0, 2.0]).is_err());
        assert!(wilcoxon_rank_sum(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn exact_matches_brute_force_for_all_splits() {
        // Every tie-free split is a choice of which ranks go to `a`.
        for n1 in 2..=6 {
            for n2 in 2..=6 {
                let n = n1 + n2;
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() as usize != n1 {
                        continue;
                    }
                    let a: Vec<f64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i as f64).collect();
                    let b: Vec<f64> = (0..n).filter(|i| mask >> i & 1 == 0).map(|i| i as f64).collect();
                    let exact = wilcoxon_exact(&a, &b).unwrap().unwrap();
                    assert_abs_diff_eq!(exact, brute_force_p(&a, &b), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn exact_and_normal_paths_agree_on_eight_by_eight() {
        let mut rng = crate::rng::seeded_rng(99);
        for _ in 0..50 {
            let mut values: Vec<f64> = (0..16).map(|i| i as f64).collect();
            rng.shuffle(&mut values);
            let (a, b) = values.split_at(8);
            let exact = wilcoxon_exact(a, b).unwrap().unwrap();
            let approx = wilcoxon_normal(a, b).unwrap();
            assert!((exact - approx).abs() < 0.02, "{exact} vs {approx}");
        }
    }

    #[test]
    fn spearman_basics() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 40.0]).unwrap(), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), Some(-1.0));
        assert_eq!(spearman(&[1.0, 1.0], &[3.0, 2.0]).unwrap(), None);
        assert!(spearman(&[1.0], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_in_its_arguments(
            a in proptest::collection::vec(-50i32..50, 2..12),
            b in proptest::collection::vec(-50i32..50, 2..12),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let p = wilcoxon_rank_sum(&a, &b).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert_eq!(p, wilcoxon_rank_sum(&b, &a).unwrap());
        }
    }
}
