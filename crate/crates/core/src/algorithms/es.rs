use super::config::ResolvedConfig;
use super::{argsort, uniform_point, Evaluations};
use crate::rng::SeededRng;
use crate::trace::{DecisionEvent, EventKind};

/// (mu, lambda)-ES with intermediate recombination and log-normal step-size self-adaptation.
#[derive(Clone, Debug)]
pub struct SelfAdaptiveEs {
    parents: Vec<Vec<f64>>,
    sigmas: Vec<f64>,
    lambda: usize,
    mu: usize,
    delta_sigma: f64,
}

impl SelfAdaptiveEs {
    pub(crate) fn initialize(config: &ResolvedConfig, evals: &mut Evaluations, rng: &mut SeededRng) -> Self {
        let space = evals.problem().space();
        let mean_width = (0..space.dimension()).map(|j| space.width(j)).sum::<f64>() / space.dimension() as f64;
        let sigma0 = config.sigma0(mean_width);
        let mut offspring = Vec::with_capacity(config.lambda);
        let mut values = Vec::with_capacity(config.lambda);
        for _ in 0..config.lambda {
            let mut x = uniform_point(evals.problem(), rng);
            values.push(evals.evaluate(&mut x));
            offspring.push(x);
        }
        let mut es = Self {
            parents: Vec::new(),
            sigmas: Vec::new(),
            lambda: config.lambda,
            mu: config.mu,
            delta_sigma: config.delta_sigma,
        };
        es.select(offspring, vec![sigma0; config.lambda], &values);
        es
    }

    /// Comma selection: the best `mu` offspring replace all parents.
    fn select(&mut self, offspring: Vec<Vec<f64>>, sigmas: Vec<f64>, values: &[f64]) {
        let order = argsort(values);
        let mut offspring: Vec<Option<Vec<f64>>> = offspring.into_iter().map(Some).collect();
        self.parents = order[..self.mu].iter().map(|&k| offspring[k].take().unwrap()).collect();
        self.sigmas = order[..self.mu].iter().map(|&k| sigmas[k]).collect();
    }

    pub(crate) fn step(&mut self, evals: &mut Evaluations, rng: &mut SeededRng, generation: u64) -> Vec<DecisionEvent> {
        let d = self.parents[0].len();
        let mu = self.mu as f64;
        let mean: Vec<f64> = (0..d).map(|j| self.parents.iter().map(|p| p[j]).sum::<f64>() / mu).collect();
        let mean_sigma = self.sigmas.iter().sum::<f64>() / mu;
        let mut offspring = Vec::with_capacity(self.lambda);
        let mut sigmas = Vec::with_capacity(self.lambda);
        let mut values = Vec::with_capacity(self.lambda);
        for _ in 0..self.lambda {
            let sigma = mean_sigma * (self.delta_sigma * rng.normal()).exp();
            let mut x: Vec<f64> = mean.iter().map(|m| m + sigma * rng.normal()).collect();
            values.push(evals.evaluate(&mut x));
            offspring.push(x);
            sigmas.push(sigma);
        }
        self.select(offspring, sigmas, &values);
        vec![DecisionEvent::new(
            EventKind::TopMuOfLambda {
                lambda: self.lambda as u64,
                mu: self.mu as u64,
            },
            generation,
        )]
    }

    pub fn parents(&self) -> &[Vec<f64>] {
        &self.parents
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }
}
