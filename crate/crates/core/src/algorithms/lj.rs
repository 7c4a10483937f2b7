use super::config::ResolvedConfig;
use super::{uniform_point, Evaluations};
use crate::rng::SeededRng;
use crate::trace::{DecisionEvent, EventKind};

/// Luus-Jaakola hypercube search: one candidate per generation around the incumbent.
#[derive(Clone, Debug)]
pub struct LuusJaakola {
    center: Vec<f64>,
    center_value: f64,
    radius: Vec<f64>,
    gamma: f64,
}

impl LuusJaakola {
    pub(crate) fn initialize(config: &ResolvedConfig, evals: &mut Evaluations, rng: &mut SeededRng) -> Self {
        let space = evals.problem().space();
        let radius = (0..space.dimension()).map(|j| space.width(j) / 2.0).collect();
        let mut center = uniform_point(evals.problem(), rng);
        let center_value = evals.evaluate(&mut center);
        Self {
            center,
            center_value,
            radius,
            gamma: config.gamma,
        }
    }

    pub(crate) fn step(&mut self, evals: &mut Evaluations, rng: &mut SeededRng, generation: u64) -> Vec<DecisionEvent> {
        let mut y: Vec<f64> = self
            .center
            .iter()
            .zip(&self.radius)
            .map(|(c, r)| c + rng.uniform_in(-r, *r))
            .collect();
        let value = evals.evaluate(&mut y);
        self.accept_or_contract(y, value);
        vec![DecisionEvent::new(
            EventKind::CompareWithBest { history: generation - 1 },
            generation,
        )]
    }

    /// Moves to `y` on strict improvement, otherwise shrinks the radius by `gamma`.
    pub fn accept_or_contract(&mut self, y: Vec<f64>, value: f64) {
        if value < self.center_value {
            self.center = y;
            self.center_value = value;
        } else {
            for r in &mut self.radius {
                *r *= self.gamma;
            }
        }
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn center_value(&self) -> f64 {
        self.center_value
    }

    pub fn radius(&self) -> &[f64] {
        &self.radius
    }
}
