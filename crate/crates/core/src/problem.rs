use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default codomain entropy in bits: a uniform discrete codomain of 2^32 values.
pub const DEFAULT_CODOMAIN_BITS: f64 = 32.0;

/// Axis-aligned box `[lower, upper]` in `dimension` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::domain("search space needs at least one dimension"));
        }
        if lower.len() != upper.len() {
            return Err(Error::domain(format!(
                "bound lengths differ: {} lower vs {} upper",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(j) = (0..lower.len()).find(|&j| !(lower[j] < upper[j])) {
            return Err(Error::domain(format!(
                "empty interval in coordinate {j}: [{}, {}]",
                lower[j], upper[j]
            )));
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[low, high]^dimension`.
    pub fn cube(dimension: usize, low: f64, high: f64) -> Result<Self> {
        Self::new(vec![low; dimension], vec![high; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    /// Clamps every coordinate onto the box boundary.
    pub fn clamp(&self, x: &mut [f64]) {
        for (j, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[j], self.upper[j]);
        }
    }
}

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A box-bounded minimization problem with known optimum value.
#[derive(Clone)]
pub struct ObjectiveProblem {
    name: String,
    space: SearchSpace,
    evaluator: Evaluator,
    optimum_value: f64,
    codomain_bits: f64,
}

impl ObjectiveProblem {
    pub fn new(
        name: impl Into<String>,
        space: SearchSpace,
        optimum_value: f64,
        evaluator: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            space,
            evaluator: Arc::new(evaluator),
            optimum_value,
            codomain_bits: DEFAULT_CODOMAIN_BITS,
        }
    }

    pub fn with_codomain_bits(mut self, bits: f64) -> Result<Self> {
        if !(bits > 0.0 && bits.is_finite()) {
            return Err(Error::domain(format!("codomain bits must be positive, got {bits}")));
        }
        self.codomain_bits = bits;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn optimum_value(&self) -> f64 {
        self.optimum_value
    }

    pub fn codomain_bits(&self) -> f64 {
        self.codomain_bits
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }

    /// Evaluated value minus the known optimum.
    pub fn error(&self, value: f64) -> f64 {
        value - self.optimum_value
    }
}

impl fmt::Debug for ObjectiveProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveProblem")
            .field("name", &self.name)
            .field("dimension", &self.dimension())
            .field("optimum_value", &self.optimum_value)
            .field("codomain_bits", &self.codomain_bits)
            .finish()
    }
}

/// An evaluated point.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub position: Vec<f64>,
    pub value: f64,
}

impl Solution {
    pub fn new(position: Vec<f64>, value: f64) -> Self {
        Self { position, value }
    }
}
