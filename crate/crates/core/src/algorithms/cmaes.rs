use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::config::ResolvedConfig;
use super::{argsort, uniform_point, Evaluations};
use crate::rng::SeededRng;
use crate::trace::{DecisionEvent, EventKind};

/// Smallest eigenvalue kept in the covariance factorization.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// CMA-ES with rank-one and rank-mu covariance updates and cumulative step-size adaptation.
///
/// Positive log-linear weights only. Clamped samples enter the updates as evaluated.
#[derive(Clone, Debug)]
pub struct CmaEs {
    lambda: usize,
    mu: usize,
    weights: Vec<f64>,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c_1: f64,
    c_mu: f64,
    chi_n: f64,
    max_sigma: f64,
    mean: DVector<f64>,
    sigma: f64,
    covariance: DMatrix<f64>,
    basis: DMatrix<f64>,
    scales: DVector<f64>,
    path_sigma: DVector<f64>,
    path_c: DVector<f64>,
    updates: u32,
}

impl CmaEs {
    pub(crate) fn initialize(config: &ResolvedConfig, evals: &mut Evaluations, rng: &mut SeededRng) -> Self {
        let space = evals.problem().space();
        let d = space.dimension();
        let n = d as f64;
        let mean_width = (0..d).map(|j| space.width(j)).sum::<f64>() / n;
        let (lambda, mu) = (config.lambda, config.mu);

        let raw: Vec<f64> = (1..=mu).map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln()).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        let c_1 = 2.0 / ((n + 1.3).powi(2) + mu_eff);
        let c_mu = (1.0 - c_1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0).powi(2) + mu_eff));
        let chi_n = n.sqrt() * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

        // The first generation is uniform; its ranked best mu seed the mean.
        let mut samples = Vec::with_capacity(lambda);
        let mut values = Vec::with_capacity(lambda);
        for _ in 0..lambda {
            let mut x = uniform_point(evals.problem(), rng);
            values.push(evals.evaluate(&mut x));
            samples.push(x);
        }
        let order = argsort(&values);
        let mut mean = DVector::zeros(d);
        for (w, &k) in weights.iter().zip(&order) {
            mean += DVector::from_column_slice(&samples[k]) * *w;
        }

        Self {
            lambda,
            mu,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
            max_sigma: 4.0 * mean_width,
            mean,
            sigma: config.sigma0(mean_width),
            covariance: DMatrix::identity(d, d),
            basis: DMatrix::identity(d, d),
            scales: DVector::from_element(d, 1.0),
            path_sigma: DVector::zeros(d),
            path_c: DVector::zeros(d),
            updates: 0,
        }
    }

    pub(crate) fn step(&mut self, evals: &mut Evaluations, rng: &mut SeededRng, generation: u64) -> Vec<DecisionEvent> {
        let d = self.mean.len();
        let mut steps = Vec::with_capacity(self.lambda);
        let mut values = Vec::with_capacity(self.lambda);
        for _ in 0..self.lambda {
            let z = DVector::from_fn(d, |_, _| rng.normal());
            let y = &self.basis * z.component_mul(&self.scales);
            let mut x: Vec<f64> = (&self.mean + &y * self.sigma).iter().copied().collect();
            values.push(evals.evaluate(&mut x));
            steps.push((DVector::from_vec(x) - &self.mean) / self.sigma);
        }
        let order = argsort(&values);
        self.update(&steps, &order);
        vec![DecisionEvent::new(
            EventKind::RankedTopMuOfLambda {
                lambda: self.lambda as u64,
                mu: self.mu as u64,
            },
            generation,
        )]
    }

    fn update(&mut self, steps: &[DVector<f64>], order: &[usize]) {
        let d = self.mean.len();
        let n = d as f64;
        self.updates += 1;
        let mut y_w = DVector::zeros(d);
        for (w, &k) in self.weights.iter().zip(order) {
            y_w += &steps[k] * *w;
        }
        self.mean += &y_w * self.sigma;

        let inv_sqrt = &self.basis * DMatrix::from_diagonal(&self.scales.map(|s| 1.0 / s)) * self.basis.transpose();
        let cs = self.c_sigma;
        self.path_sigma = &self.path_sigma * (1.0 - cs) + inv_sqrt * &y_w * (cs * (2.0 - cs) * self.mu_eff).sqrt();
        let ps_norm = self.path_sigma.norm();
        let decay = 1.0 - (1.0 - cs).powi(2 * (self.updates as i32 + 1));
        let stalled = ps_norm / decay.sqrt() < (1.4 + 2.0 / (n + 1.0)) * self.chi_n;
        let h_sigma = if stalled { 1.0 } else { 0.0 };
        let cc = self.c_c;
        self.path_c = &self.path_c * (1.0 - cc) + &y_w * (h_sigma * (cc * (2.0 - cc) * self.mu_eff).sqrt());

        let delta = (1.0 - h_sigma) * cc * (2.0 - cc);
        let mut rank_mu = DMatrix::zeros(d, d);
        for (w, &k) in self.weights.iter().zip(order) {
            rank_mu += &steps[k] * steps[k].transpose() * *w;
        }
        let rank_one = &self.path_c * self.path_c.transpose() + &self.covariance * delta;
        self.covariance = &self.covariance * (1.0 - self.c_1 - self.c_mu) + rank_one * self.c_1 + rank_mu * self.c_mu;

        self.sigma *= ((cs / self.d_sigma) * (ps_norm / self.chi_n - 1.0)).exp();
        self.sigma = self.sigma.clamp(1e-300, self.max_sigma);
        self.refactor();
    }

    /// Symmetrizes the covariance and recomputes `C = B diag(D^2) B^T` with floored eigenvalues.
    fn refactor(&mut self) {
        let symmetric = (&self.covariance + self.covariance.transpose()) * 0.5;
        let eigen = SymmetricEigen::new(symmetric);
        let floored = eigen.eigenvalues.map(|v| v.max(EIGENVALUE_FLOOR));
        self.covariance = &eigen.eigenvectors * DMatrix::from_diagonal(&floored) * eigen.eigenvectors.transpose();
        self.covariance = (&self.covariance + self.covariance.transpose()) * 0.5;
        self.basis = eigen.eigenvectors;
        self.scales = floored.map(f64::sqrt);
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}
