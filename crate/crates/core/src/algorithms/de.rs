use super::config::ResolvedConfig;
use super::{uniform_point, Evaluations};
use crate::iur::DeVariant;
use crate::rng::SeededRng;
use crate::trace::{DecisionEvent, EventKind};

/// Number of random donors each variant draws, all distinct from the target.
pub fn donor_count(variant: DeVariant) -> usize {
    match variant {
        DeVariant::Rand1 => 3,
        DeVariant::Rand2 => 5,
        DeVariant::Best1 | DeVariant::CurrentToBest1 => 2,
        DeVariant::Best2 => 4,
    }
}

/// Mutant vector for `target` from `donors` (length [`donor_count`]) and the population `best`.
pub fn de_mutation(
    variant: DeVariant,
    population: &[Vec<f64>],
    target: usize,
    best: usize,
    donors: &[usize],
    f: f64,
) -> Vec<f64> {
    let x = |k: usize| &population[k];
    let diff = |a: usize, b: usize, j: usize| x(donors[a])[j] - x(donors[b])[j];
    (0..population[target].len())
        .map(|j| match variant {
            DeVariant::Rand1 => x(donors[0])[j] + f * diff(1, 2, j),
            DeVariant::Rand2 => x(donors[0])[j] + f * diff(1, 2, j) + f * diff(3, 4, j),
            DeVariant::Best1 => x(best)[j] + f * diff(0, 1, j),
            DeVariant::Best2 => x(best)[j] + f * diff(0, 1, j) + f * diff(2, 3, j),
            DeVariant::CurrentToBest1 => {
                x(target)[j] + f * (x(best)[j] - x(target)[j]) + f * diff(0, 1, j)
            }
        })
        .collect()
}

/// Binomial crossover; coordinate `forced` always comes from the mutant.
pub fn binomial_crossover(target: &[f64], mutant: &[f64], cr: f64, forced: usize, rng: &mut SeededRng) -> Vec<f64> {
    target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (t, m))| if j == forced || rng.uniform() < cr { *m } else { *t })
        .collect()
}

pub(crate) fn lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    best
}

/// Classic DE with synchronous, strictly improving one-to-one replacement.
#[derive(Clone, Debug)]
pub struct DifferentialEvolution {
    population: Vec<Vec<f64>>,
    values: Vec<f64>,
    variant: DeVariant,
    f: f64,
    cr: f64,
}

impl DifferentialEvolution {
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
            variant: config.de_variant,
            f: config.f,
            cr: config.cr,
        }
    }

    pub(crate) fn step(&mut self, evals: &mut Evaluations, rng: &mut SeededRng, generation: u64) -> Vec<DecisionEvent> {
        let s = self.population.len();
        let d = self.population[0].len();
        let best = lowest(&self.values);
        let trials: Vec<Vec<f64>> = (0..s)
            .map(|i| {
                let donors = rng.distinct_indices(s, donor_count(self.variant), &[i]);
                let mutant = de_mutation(self.variant, &self.population, i, best, &donors, self.f);
                let forced = rng.below(d);
                binomial_crossover(&self.population[i], &mutant, self.cr, forced, rng)
            })
            .collect();
        for (i, mut trial) in trials.into_iter().enumerate() {
            let value = evals.evaluate(&mut trial);
            if value < self.values[i] {
                self.population[i] = trial;
                self.values[i] = value;
            }
        }
        let compare = EventKind::CompareWithBest { history: generation - 1 };
        let mut events = vec![DecisionEvent::new(compare, generation); s];
        if self.variant.uses_best() {
            events.push(DecisionEvent::new(EventKind::GlobalBestOfSwarm { swarm: s as u64 }, generation));
        }
        events
    }

    pub fn population(&self) -> &[Vec<f64>] {
        &self.population
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn variant(&self) -> DeVariant {
        self.variant
    }
}
