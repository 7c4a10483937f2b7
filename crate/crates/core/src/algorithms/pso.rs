use super::config::ResolvedConfig;
use super::{uniform_point, Evaluations};
use crate::rng::SeededRng;
use crate::trace::{DecisionEvent, EventKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    /// Every particle follows the swarm's best pbest; no constriction.
    Global,
    /// Each particle follows the best pbest among itself and its two ring neighbours, with constriction.
    Ring,
}

/// Clerc's constriction coefficient for `phi > 4`.
pub fn constriction_coefficient(phi: f64) -> f64 {
    2.0 / (2.0 - phi - (phi * phi - 4.0 * phi).sqrt()).abs()
}

/// Index of the best of `values[i-1], values[i], values[i+1]` on a ring. Ties go to the lowest offset.
pub fn ring_best(values: &[f64], i: usize) -> usize {
    let s = values.len();
    let candidates = [(i + s - 1) % s, i, (i + 1) % s];
    let mut best = candidates[0];
    for &k in &candidates[1..] {
        if values[k] < values[best] {
            best = k;
        }
    }
    best
}

/// `v <- chi * (v + phi1 r1 (pbest - x) + phi2 r2 (guide - x))`, clamped to `[-max_speed, max_speed]`.
#[allow(clippy::too_many_arguments)]
pub fn velocity_update(
    velocity: &mut [f64],
    x: &[f64],
    pbest: &[f64],
    guide: &[f64],
    phi1: f64,
    phi2: f64,
    chi: f64,
    max_speed: &[f64],
    rng: &mut SeededRng,
) {
    for j in 0..velocity.len() {
        let r1 = rng.uniform();
        let r2 = rng.uniform();
        let v = chi * (velocity[j] + phi1 * r1 * (pbest[j] - x[j]) + phi2 * r2 * (guide[j] - x[j]));
        velocity[j] = v.clamp(-max_speed[j], max_speed[j]);
    }
}

/// PSO and SPSO share this state; they differ in topology and constriction.
#[derive(Clone, Debug)]
pub struct ParticleSwarm {
    topology: Topology,
    positions: Vec<Vec<f64>>,
    velocities: Vec<Vec<f64>>,
    pbest: Vec<Vec<f64>>,
    pbest_values: Vec<f64>,
    phi1: f64,
    phi2: f64,
    chi: f64,
    max_speed: Vec<f64>,
}

impl ParticleSwarm {
    pub(crate) fn initialize(
        config: &ResolvedConfig,
        topology: Topology,
        evals: &mut Evaluations,
        rng: &mut SeededRng,
    ) -> Self {
        let space = evals.problem().space();
        let d = space.dimension();
        let max_speed = (0..d).map(|j| space.width(j)).collect();
        let mut positions = Vec::with_capacity(config.s);
        let mut values = Vec::with_capacity(config.s);
        for _ in 0..config.s {
            let mut x = uniform_point(evals.problem(), rng);
            values.push(evals.evaluate(&mut x));
            positions.push(x);
        }
        let chi = match topology {
            Topology::Global => 1.0,
            Topology::Ring => constriction_coefficient(config.phi1 + config.phi2),
        };
        Self {
            topology,
            pbest: positions.clone(),
            pbest_values: values,
            velocities: vec![vec![0.0; d]; config.s],
            positions,
            phi1: config.phi1,
            phi2: config.phi2,
            chi,
            max_speed,
        }
    }

    /// Neighbourhood best used as the social guide of particle `i`.
    pub fn guide_index(&self, i: usize) -> usize {
        match self.topology {
            Topology::Global => self.gbest_index(),
            Topology::Ring => ring_best(&self.pbest_values, i),
        }
    }

    /// Lowest pbest value; ties go to the lowest index.
    pub fn gbest_index(&self) -> usize {
        let mut best = 0;
        for (k, v) in self.pbest_values.iter().enumerate() {
            if *v < self.pbest_values[best] {
                best = k;
            }
        }
        best
    }

    pub(crate) fn step(&mut self, evals: &mut Evaluations, rng: &mut SeededRng, generation: u64) -> Vec<DecisionEvent> {
        let s = self.positions.len();
        let guides: Vec<usize> = (0..s).map(|i| self.guide_index(i)).collect();
        let guide_points: Vec<Vec<f64>> = guides.iter().map(|&k| self.pbest[k].clone()).collect();
        for i in 0..s {
            velocity_update(
                &mut self.velocities[i],
                &self.positions[i],
                &self.pbest[i],
                &guide_points[i],
                self.phi1,
                self.phi2,
                self.chi,
                &self.max_speed,
                rng,
            );
            for (x, v) in self.positions[i].iter_mut().zip(&self.velocities[i]) {
                *x += v;
            }
            let value = evals.evaluate(&mut self.positions[i]);
            if value < self.pbest_values[i] {
                self.pbest[i].clone_from(&self.positions[i]);
                self.pbest_values[i] = value;
            }
        }
        let compare = EventKind::CompareWithBest { history: generation - 1 };
        let mut events = vec![DecisionEvent::new(compare, generation); s];
        match self.topology {
            Topology::Global => events.push(DecisionEvent::new(
                EventKind::GlobalBestOfSwarm { swarm: s as u64 },
                generation,
            )),
            Topology::Ring => events.extend(vec![DecisionEvent::new(EventKind::RingBestOfThree, generation); s]),
        }
        events
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vec<f64>] {
        &self.velocities
    }

    pub fn pbest(&self) -> &[Vec<f64>] {
        &self.pbest
    }

    pub fn pbest_values(&self) -> &[f64] {
        &self.pbest_values
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }
}
