//! The eight optimizers and their shared generation loop.
//!
//! Every optimizer evaluates a fixed batch per generation, clamps proposals to
//! the box before evaluation and reports the decisions it took as
//! [`DecisionEvent`]s. The first generation samples uniformly and emits no
//! events.

mod cmaes;
mod config;
mod de;
mod es;
mod jade;
mod lj;
mod mc;
mod pso;

use serde::{Deserialize, Serialize};

pub use cmaes::{CmaEs, EIGENVALUE_FLOOR};
pub use config::{AlgorithmId, OptimizerConfig, ResolvedConfig, DEFAULT_ES_LAMBDA, DEFAULT_POPULATION};
pub use de::{binomial_crossover, de_mutation, donor_count, DifferentialEvolution};
pub use es::SelfAdaptiveEs;
pub use jade::{lehmer_mean, Jade};
pub use lj::LuusJaakola;
pub use mc::MonteCarlo;
pub use pso::{constriction_coefficient, ring_best, velocity_update, ParticleSwarm, Topology};

use crate::error::{Error, Result};
use crate::problem::{ObjectiveProblem, Solution};
use crate::rng::{seeded_rng, SeededRng};
use crate::trace::{DecisionEvent, RunTrace};

/// Evaluation bookkeeping shared by all optimizers: clamping, counting and the running best.
pub struct Evaluations<'a> {
    problem: &'a ObjectiveProblem,
    count: u64,
    best: Option<Solution>,
}

impl<'a> Evaluations<'a> {
    fn new(problem: &'a ObjectiveProblem, count: u64, best: Option<Solution>) -> Self {
        Self { problem, count, best }
    }

    /// Clamps `x` into the box, evaluates it and returns the value.
    pub fn evaluate(&mut self, x: &mut [f64]) -> f64 {
        self.problem.space().clamp(x);
        let value = self.problem.evaluate(x);
        self.count += 1;
        if self.best.as_ref().is_none_or(|b| value < b.value) {
            self.best = Some(Solution::new(x.to_vec(), value));
        }
        value
    }

    pub fn problem(&self) -> &ObjectiveProblem {
        self.problem
    }
}

/// Uniform point in the problem's box.
pub(crate) fn uniform_point(problem: &ObjectiveProblem, rng: &mut SeededRng) -> Vec<f64> {
    let space = problem.space();
    (0..space.dimension())
        .map(|j| rng.uniform_in(space.lower()[j], space.upper()[j]))
        .collect()
}

/// Indices of `values` sorted ascending; ties keep index order.
pub(crate) fn argsort(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

/// Algorithm-specific state.
#[derive(Clone, Debug)]
pub enum OptimizerState {
    Mc(MonteCarlo),
    Lj(LuusJaakola),
    Es(SelfAdaptiveEs),
    Cmaes(CmaEs),
    Pso(ParticleSwarm),
    De(DifferentialEvolution),
    Jade(Jade),
}

macro_rules! dispatch {
    ($state:expr, $s:ident => $body:expr) => {
        match $state {
            OptimizerState::Mc($s) => $body,
            OptimizerState::Lj($s) => $body,
            OptimizerState::Es($s) => $body,
            OptimizerState::Cmaes($s) => $body,
            OptimizerState::Pso($s) => $body,
            OptimizerState::De($s) => $body,
            OptimizerState::Jade($s) => $body,
        }
    };
}

/// What one generation produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationOutcome {
    pub generation: u64,
    pub evals: u64,
    pub best_error: f64,
    pub events: Vec<DecisionEvent>,
}

/// A seeded optimizer run in progress.
#[derive(Clone, Debug)]
pub struct Optimizer {
    config: ResolvedConfig,
    state: OptimizerState,
    rng: SeededRng,
    generation: u64,
    evals: u64,
    budget: u64,
    best: Option<Solution>,
}

impl Optimizer {
    /// Validates the configuration and evaluates the first, uniformly sampled generation.
    pub fn initialize(
        config: &OptimizerConfig,
        problem: &ObjectiveProblem,
        budget: u64,
        seed: u64,
    ) -> Result<(Self, GenerationOutcome)> {
        let config = config.resolve(problem.dimension())?;
        let batch = config.batch_size() as u64;
        if budget < batch {
            return Err(Error::Budget { used: batch, budget });
        }
        let mut rng = seeded_rng(seed);
        let mut evals = Evaluations::new(problem, 0, None);
        let state = match config.algorithm {
            AlgorithmId::Mc => OptimizerState::Mc(MonteCarlo::initialize(&mut evals, &mut rng)),
            AlgorithmId::Lj => OptimizerState::Lj(LuusJaakola::initialize(&config, &mut evals, &mut rng)),
            AlgorithmId::Es => OptimizerState::Es(SelfAdaptiveEs::initialize(&config, &mut evals, &mut rng)),
            AlgorithmId::Cmaes => OptimizerState::Cmaes(CmaEs::initialize(&config, &mut evals, &mut rng)),
            AlgorithmId::Pso => OptimizerState::Pso(ParticleSwarm::initialize(
                &config,
                Topology::Global,
                &mut evals,
                &mut rng,
            )),
            AlgorithmId::Spso => OptimizerState::Pso(ParticleSwarm::initialize(
                &config,
                Topology::Ring,
                &mut evals,
                &mut rng,
            )),
            AlgorithmId::De => OptimizerState::De(DifferentialEvolution::initialize(&config, &mut evals, &mut rng)),
            AlgorithmId::Jade => OptimizerState::Jade(Jade::initialize(&config, &mut evals, &mut rng)),
        };
        let (count, best) = (evals.count, evals.best);
        let optimizer = Self {
            config,
            state,
            rng,
            generation: 1,
            evals: count,
            budget,
            best,
        };
        let outcome = optimizer.outcome(problem, Vec::new());
        Ok((optimizer, outcome))
    }

    /// Advances one generation.
    pub fn step(&mut self, problem: &ObjectiveProblem) -> Result<GenerationOutcome> {
        let batch = self.config.batch_size() as u64;
        if self.evals + batch > self.budget {
            return Err(Error::Budget {
                used: self.evals + batch,
                budget: self.budget,
            });
        }
        self.generation += 1;
        let generation = self.generation;
        let mut evals = Evaluations::new(problem, self.evals, self.best.take());
        let rng = &mut self.rng;
        let events = dispatch!(&mut self.state, s => s.step(&mut evals, rng, generation));
        self.evals = evals.count;
        self.best = evals.best;
        Ok(self.outcome(problem, events))
    }

    fn outcome(&self, problem: &ObjectiveProblem, events: Vec<DecisionEvent>) -> GenerationOutcome {
        GenerationOutcome {
            generation: self.generation,
            evals: self.evals,
            best_error: self.best.as_ref().map_or(f64::INFINITY, |b| problem.error(b.value)),
            events,
        }
    }

    pub fn can_step(&self) -> bool {
        self.evals + self.config.batch_size() as u64 <= self.budget
    }

    pub fn state(&self) -> &OptimizerState {
        &self.state
    }

    pub fn config(&self) -> &ResolvedConfig {
        &self.config
    }

    pub fn best(&self) -> Option<&Solution> {
        self.best.as_ref()
    }

    pub fn evals(&self) -> u64 {
        self.evals
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }
}

/// Runs until the budget cannot fit another full generation.
pub fn run(config: &OptimizerConfig, problem: &ObjectiveProblem, budget: u64, seed: u64) -> Result<RunTrace> {
    run_generations(config, problem, budget, seed, u64::MAX)
}

/// Like [`run`] but stops after at most `max_generations` generations.
pub fn run_generations(
    config: &OptimizerConfig,
    problem: &ObjectiveProblem,
    budget: u64,
    seed: u64,
    max_generations: u64,
) -> Result<RunTrace> {
    let (mut optimizer, first) = Optimizer::initialize(config, problem, budget, seed)?;
    let mut trace = RunTrace::new(optimizer.config.algorithm.as_str(), problem.name(), seed, budget);
    trace.record_generation(first.best_error, first.evals, first.events)?;
    while optimizer.can_step() && optimizer.generation < max_generations {
        let out = optimizer.step(problem)?;
        trace.record_generation(out.best_error, out.evals, out.events)?;
    }
    Ok(trace)
}

/// Events of a trace in generation order.
pub fn events_of(trace: &RunTrace) -> Vec<DecisionEvent> {
    trace.events()
}
