use super::{uniform_point, Evaluations};
use crate::rng::SeededRng;
use crate::trace::DecisionEvent;

/// Pure random search. Carries no state beyond the shared running best.
#[derive(Clone, Debug, Default)]
pub struct MonteCarlo;

impl MonteCarlo {
    pub(crate) fn initialize(evals: &mut Evaluations, rng: &mut SeededRng) -> Self {
        let mut x = uniform_point(evals.problem(), rng);
        evals.evaluate(&mut x);
        MonteCarlo
    }

    pub(crate) fn step(&mut self, evals: &mut Evaluations, rng: &mut SeededRng, _generation: u64) -> Vec<DecisionEvent> {
        let mut x = uniform_point(evals.problem(), rng);
        evals.evaluate(&mut x);
        Vec::new()
    }
}
