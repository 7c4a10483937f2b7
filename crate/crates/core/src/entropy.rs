//! Discrete entropy kernel. All quantities are in bits.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const MASS_TOLERANCE: f64 = 1e-12;

/// Largest `n` for which every `C(n, k)` fits in a `u64`.
pub const EXACT_BINOMIAL_MAX: u64 = 62;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    probabilities: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        check_mass(&probabilities)?;
        Ok(Self { probabilities })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    /// Normalizes non-negative counts into a distribution.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidDistribution("all counts are zero".into()));
        }
        Self::new(counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

/// Joint table `p(x_i, y_j)`, rows indexed by `x`, columns by `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    rows: Vec<Vec<f64>>,
}

impl JointTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if width == 0 || rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidDistribution("joint table must be a non-empty rectangle".into()));
        }
        check_mass(&rows.concat())?;
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn marginal_x(&self) -> DiscreteDistribution {
        DiscreteDistribution {
            probabilities: self.rows.iter().map(|r| r.iter().sum()).collect(),
        }
    }

    pub fn marginal_y(&self) -> DiscreteDistribution {
        let width = self.rows[0].len();
        DiscreteDistribution {
            probabilities: (0..width).map(|j| self.rows.iter().map(|r| r[j]).sum()).collect(),
        }
    }
}

fn check_mass(probabilities: &[f64]) -> Result<()> {
    if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("probability {p} is not a non-negative real")));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("total mass {total} differs from 1")));
    }
    Ok(())
}

#[inline]
fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

pub fn shannon_entropy(dist: &DiscreteDistribution) -> f64 {
    -dist.probabilities.iter().map(|&p| plogp(p)).sum::<f64>()
}

/// `H(X | Y)` for a joint table with `x` along rows.
pub fn conditional_entropy(joint: &JointTable) -> f64 {
    let py = joint.marginal_y();
    let mut h = 0.0;
    for row in &joint.rows {
        for (j, &pxy) in row.iter().enumerate() {
            if pxy > 0.0 {
                h -= pxy * (pxy / py.probabilities[j]).log2();
            }
        }
    }
    h
}

/// Entropy of the event that a fresh i.i.d. draw beats the minimum of `g` earlier draws.
pub fn pi(g: u64) -> Result<f64> {
    if g == 0 {
        return Err(Error::domain("pi(g) is defined for g >= 1"));
    }
    let g = g as f64;
    let stay = g / (g + 1.0);
    let beat = 1.0 / (g + 1.0);
    Ok(-stay * stay.log2() - beat * beat.log2())
}

/// `sum_{i=1}^{n} pi(i)`.
pub fn pi_sum(n: u64) -> f64 {
    (1..=n).map(|i| pi(i).expect("i >= 1")).sum()
}

fn exact_binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    // C(n, i+1) = C(n, i) * (n - i) / (i + 1); each intermediate is an exact binomial.
    (0..k).fold(1u64, |acc, i| {
        let wide = acc as u128 * (n - i) as u128 / (i + 1) as u128;
        wide as u64
    })
}

fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// `log2 C(n, k)`; exact integer arithmetic up to `n = 62`, log-gamma beyond.
pub fn log2_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("binomial needs k <= n, got k={k}, n={n}")));
    }
    if n <= EXACT_BINOMIAL_MAX {
        Ok((exact_binomial(n, k) as f64).log2())
    } else {
        Ok(log_gamma_binomial(n, k))
    }
}

pub(crate) fn log_gamma_binomial(n: u64, k: u64) -> f64 {
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)) / std::f64::consts::LN_2
}

/// `log2 (n! / (n-k)!)`; exact while the product fits in a `u64`, log-gamma beyond.
pub fn log2_falling_factorial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("falling factorial needs k <= n, got k={k}, n={n}")));
    }
    let exact = (n - k + 1..=n).try_fold(1u64, |acc, f| acc.checked_mul(f));
    Ok(match exact {
        Some(product) => (product as f64).log2(),
        None => (ln_factorial(n) - ln_factorial(n - k)) / std::f64::consts::LN_2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn entropy_examples() {
        let coin = DiscreteDistribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(shannon_entropy(&coin), 1.0);
        assert_eq!(shannon_entropy(&DiscreteDistribution::new(vec![1.0]).unwrap()), 0.0);
        assert_abs_diff_eq!(shannon_entropy(&DiscreteDistribution::uniform(8).unwrap()), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_distributions_rejected() {
        assert!(DiscreteDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![f64::NAN]).is_err());
        assert!(JointTable::new(vec![vec![0.5], vec![0.25, 0.25]]).is_err());
        assert!(JointTable::new(vec![vec![0.5, 0.6]]).is_err());
    }

    #[test]
    fn conditional_entropy_examples() {
        // Independent marginals.
        let px = [0.3, 0.7];
        let py = [0.2, 0.5, 0.3];
        let rows = px.iter().map(|a| py.iter().map(|b| a * b).collect()).collect();
        let joint = JointTable::new(rows).unwrap();
        let hx = shannon_entropy(&DiscreteDistribution::new(px.to_vec()).unwrap());
        assert_abs_diff_eq!(conditional_entropy(&joint), hx, epsilon = 1e-12);

        // X = Y.
        let det = JointTable::new(vec![vec![0.4, 0.0], vec![0.0, 0.6]]).unwrap();
        assert_eq!(conditional_entropy(&det), 0.0);

        let joint = JointTable::new(vec![vec![0.25, 0.25], vec![0.5, 0.0]]).unwrap();
        assert_abs_diff_eq!(conditional_entropy(&joint), 0.688722, epsilon = 1e-6);
    }

    #[test]
    fn pi_values() {
        assert_eq!(pi(1).unwrap(), 1.0);
        assert_abs_diff_eq!(pi(2).unwrap(), 0.918296, epsilon = 1e-6);
        assert_abs_diff_eq!(pi(3).unwrap(), 0.811278, epsilon = 1e-6);
        assert!(pi(0).is_err());
    }

    #[test]
    fn pi_strictly_decreasing_in_unit_interval() {
        let mut prev = pi(1).unwrap();
        for g in 2..=10_000 {
            let cur = pi(g).unwrap();
            assert!(cur < prev && cur > 0.0, "g={g}");
            prev = cur;
        }
    }

    #[test]
    fn binomial_examples() {
        assert_abs_diff_eq!(log2_binomial(30, 15).unwrap(), 27.2088, epsilon = 1e-4);
        assert_abs_diff_eq!(log2_binomial(30, 15).unwrap(), (155_117_520f64).log2(), epsilon = 1e-12);
        assert_eq!(log2_binomial(17, 17).unwrap(), 0.0);
        assert_eq!(log2_binomial(17, 0).unwrap(), 0.0);
        assert!(log2_binomial(3, 4).is_err());
        assert_eq!(exact_binomial(62, 31), 465_428_353_255_261_088);
    }

    #[test]
    fn falling_factorial_examples() {
        assert_abs_diff_eq!(log2_falling_factorial(4, 2).unwrap(), 12f64.log2(), epsilon = 1e-15);
        assert_eq!(log2_falling_factorial(9, 0).unwrap(), 0.0);
        assert_abs_diff_eq!(log2_falling_factorial(9, 1).unwrap(), 9f64.log2(), epsilon = 1e-15);
        assert!(log2_falling_factorial(2, 3).is_err());
    }

    #[test]
    fn exact_and_log_gamma_paths_meet_at_switchover() {
        for n in 55..=EXACT_BINOMIAL_MAX {
            for k in 0..=n {
                let exact = log2_binomial(n, k).unwrap();
                assert_abs_diff_eq!(exact, log_gamma_binomial(n, k), epsilon = 1e-9);
            }
        }
        // Both sides of the boundary stay close to each other.
        let below = log2_binomial(62, 20).unwrap();
        let above = log2_binomial(63, 20).unwrap();
        assert_abs_diff_eq!(above - below, (63f64 / 43.0).log2(), epsilon = 1e-9);
        // Falling factorial overflow switch.
        let big = log2_falling_factorial(200, 30).unwrap();
        let direct: f64 = (171..=200).map(|f| (f as f64).log2()).sum();
        assert_abs_diff_eq!(big, direct, epsilon = 1e-9);
    }

    proptest! {
        #[test]
        fn falling_factorial_dominates_binomial(n in 0u64..200, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).floor() as u64;
            prop_assert!(log2_falling_factorial(n, k).unwrap() + 1e-9 >= log2_binomial(n, k).unwrap());
        }

        #[test]
        fn binomial_symmetry(n in 0u64..300, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).floor() as u64;
            let a = log2_binomial(n, k).unwrap();
            let b = log2_binomial(n, n - k).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn uniform_maximizes_entropy(weights in proptest::collection::vec(0.0f64..1.0, 1..=64)) {
            let total: f64 = weights.iter().sum();
            prop_assume!(total > 0.0);
            let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
            let dist = DiscreteDistribution::new(probs).unwrap();
            let uniform = DiscreteDistribution::uniform(weights.len()).unwrap();
            prop_assert!(shannon_entropy(&dist) <= shannon_entropy(&uniform) + 1e-12);
        }

        #[test]
        fn conditioning_reduces_entropy(
            rows in 1usize..6,
            cols in 1usize..6,
            seed in proptest::collection::vec(0.0f64..1.0, 36),
        ) {
            let cells: Vec<f64> = seed[..rows * cols].to_vec();
            let total: f64 = cells.iter().sum();
            prop_assume!(total > 0.0);
            let table: Vec<Vec<f64>> = cells.chunks(cols).map(|r| r.iter().map(|v| v / total).collect()).collect();
            let joint = JointTable::new(table).unwrap();
            prop_assert!(conditional_entropy(&joint) <= shannon_entropy(&joint.marginal_x()) + 1e-12);
        }
    }
}
