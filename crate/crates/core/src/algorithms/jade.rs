use super::config::ResolvedConfig;
use super::de::binomial_crossover;
use super::{argsort, uniform_point, Evaluations};
use crate::iur::pbest_count;
use crate::rng::SeededRng;
use crate::trace::{DecisionEvent, EventKind};

/// JADE: current-to-pbest/1 with an external archive and adaptive F and CR.
#[derive(Clone, Debug)]
pub struct Jade {
    population: Vec<Vec<f64>>,
    values: Vec<f64>,
    archive: Vec<Vec<f64>>,
    mean_f: f64,
    mean_cr: f64,
    p: f64,
    c: f64,
}

/// Cauchy draw around `location`, redrawn while non-positive and truncated at 1.
fn sample_f(location: f64, rng: &mut SeededRng) -> f64 {
    loop {
        let f = rng.cauchy(location, 0.1);
        if f > 0.0 {
            return f.min(1.0);
        }
    }
}

/// `sum f^2 / sum f`.
pub fn lehmer_mean(values: &[f64]) -> f64 {
    let sum: f64 = values.iter().sum();
    values.iter().map(|v| v * v).sum::<f64>() / sum
}

impl Jade {
    pub(crate) fn initialize(config: &ResolvedConfig, evals: &mut Evaluations, rng: &mut SeededRng) -> Self {
        let mut population = Vec::with_capacity(config.s);
        let mut values = Vec::with_capacity(config.s);
        for _ in 0..config.s {
            let mut x = uniform_point(evals.problem(), rng);
            values.push(evals.evaluate(&mut x));
            population.push(x);
        }
        Self {
            population,
            values,
            archive: Vec::new(),
            mean_f: 0.5,
            mean_cr: 0.5,
            p: config.p,
            c: config.c,
        }
    }

    pub(crate) fn step(&mut self, evals: &mut Evaluations, rng: &mut SeededRng, generation: u64) -> Vec<DecisionEvent> {
        let s = self.population.len();
        let d = self.population[0].len();
        let order = argsort(&self.values);
        let elite = pbest_count(self.p, s as u64) as usize;

        let mut trials = Vec::with_capacity(s);
        let mut params = Vec::with_capacity(s);
        for i in 0..s {
            let f = sample_f(self.mean_f, rng);
            let cr = (self.mean_cr + 0.1 * rng.normal()).clamp(0.0, 1.0);
            let pbest = order[rng.below(elite)];
            let r1 = rng.distinct_indices(s, 1, &[i])[0];
            let pool = s + self.archive.len();
            let r2 = rng.distinct_indices(pool, 1, &[i, r1])[0];
            let x = &self.population;
            let x_r2 = if r2 < s { &x[r2] } else { &self.archive[r2 - s] };
            let mutant: Vec<f64> = (0..d)
                .map(|j| x[i][j] + f * (x[pbest][j] - x[i][j]) + f * (x[r1][j] - x_r2[j]))
                .collect();
            let forced = rng.below(d);
            trials.push(binomial_crossover(&x[i], &mutant, cr, forced, rng));
            params.push((f, cr));
        }

        let mut good_f = Vec::new();
        let mut good_cr = Vec::new();
        for (i, mut trial) in trials.into_iter().enumerate() {
            let value = evals.evaluate(&mut trial);
            if value < self.values[i] {
                let parent = std::mem::replace(&mut self.population[i], trial);
                self.archive.push(parent);
                self.values[i] = value;
                good_f.push(params[i].0);
                good_cr.push(params[i].1);
            }
        }
        while self.archive.len() > s {
            let k = rng.below(self.archive.len());
            self.archive.swap_remove(k);
        }
        if !good_f.is_empty() {
            let mean_cr = good_cr.iter().sum::<f64>() / good_cr.len() as f64;
            self.mean_cr = (1.0 - self.c) * self.mean_cr + self.c * mean_cr;
            self.mean_f = (1.0 - self.c) * self.mean_f + self.c * lehmer_mean(&good_f);
        }

        let compare = EventKind::CompareWithBest { history: generation - 1 };
        let mut events = vec![DecisionEvent::new(compare, generation); s];
        events.push(DecisionEvent::new(
            EventKind::PbestMembership { p: self.p, size: s as u64 },
            generation,
        ));
        events
    }

    pub fn population(&self) -> &[Vec<f64>] {
        &self.population
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn archive(&self) -> &[Vec<f64>] {
        &self.archive
    }

    /// Current `(mean F, mean CR)`.
    pub fn adaptive_means(&self) -> (f64, f64) {
        (self.mean_f, self.mean_cr)
    }
}
