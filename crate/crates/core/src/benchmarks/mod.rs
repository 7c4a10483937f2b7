//! A 28-function CEC-2013-style suite on `[-100, 100]^d`.
//!
//! Shifts and rotations are drawn from the suite seed, so values are not the
//! official ones. Every bias is 0 and every minimum value is 0. The loader in
//! [`loader`] substitutes externally supplied shift and rotation data.

mod functions;
pub mod loader;

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use functions::{composition_weights, evaluate_basic, input_scale, lambda_scale, rotate, t_asy, t_osz, Component, SCHWEFEL_OFFSET};

use crate::error::{Error, Result};
use crate::problem::{ObjectiveProblem, SearchSpace};
use crate::rng::{seeded_rng, SeededRng};

pub const FUNCTION_COUNT: usize = 28;
pub const BOX_BOUND: f64 = 100.0;
pub const SHIFT_BOUND: f64 = 80.0;
/// Largest tolerated entry of `R^T R - I`.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    Unimodal,
    Multimodal,
    Composition,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionInfo {
    pub id: usize,
    pub name: &'static str,
    pub kind: FunctionKind,
    pub rotated: bool,
}

const fn info(id: usize, name: &'static str, kind: FunctionKind, rotated: bool) -> FunctionInfo {
    FunctionInfo { id, name, kind, rotated }
}

use FunctionKind::{Composition as C, Multimodal as M, Unimodal as U};

pub const CATALOG: [FunctionInfo; FUNCTION_COUNT] = [
    info(1, "sphere", U, false),
    info(2, "rotated high conditioned elliptic", U, true),
    info(3, "rotated bent cigar", U, true),
    info(4, "rotated discus", U, true),
    info(5, "different powers", U, false),
    info(6, "rotated rosenbrock", M, true),
    info(7, "rotated schaffers f7", M, true),
    info(8, "rotated ackley", M, true),
    info(9, "rotated weierstrass", M, true),
    info(10, "rotated griewank", M, true),
    info(11, "rastrigin", M, false),
    info(12, "rotated rastrigin", M, true),
    info(13, "non-continuous rotated rastrigin", M, true),
    info(14, "schwefel", M, false),
    info(15, "rotated schwefel", M, true),
    info(16, "rotated katsuura", M, true),
    info(17, "lunacek bi-rastrigin", M, false),
    info(18, "rotated lunacek bi-rastrigin", M, true),
    info(19, "expanded griewank plus rosenbrock", M, true),
    info(20, "expanded schaffer f6", M, true),
    info(21, "composition 1", C, true),
    info(22, "composition 2", C, false),
    info(23, "composition 3", C, true),
    info(24, "composition 4", C, true),
    info(25, "composition 5", C, true),
    info(26, "composition 6", C, true),
    info(27, "composition 7", C, true),
    info(28, "composition 8", C, true),
];

pub fn function_info(id: usize) -> Result<&'static FunctionInfo> {
    CATALOG
        .get(id.wrapping_sub(1))
        .ok_or_else(|| Error::domain(format!("function id must be in 1..=28, got {id}")))
}

/// Weighted aggregation of shifted basic functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompositionRecipe {
    /// `(basic function id, rotated)` per component.
    pub components: &'static [(usize, bool)],
    pub sigmas: &'static [f64],
    pub scales: &'static [f64],
    pub biases: &'static [f64],
}

const BIASES3: &[f64] = &[0.0, 100.0, 200.0];
const BIASES5: &[f64] = &[0.0, 100.0, 200.0, 300.0, 400.0];

/// Suite-specific component mixes for f21..f28.
pub fn composition_recipe(id: usize) -> Option<CompositionRecipe> {
    let r = |components, sigmas, scales, biases| CompositionRecipe {
        components,
        sigmas,
        scales,
        biases,
    };
    Some(match id {
        21 => r(
            &[(6, true), (5, true), (3, true), (4, true), (1, false)],
            &[10.0, 20.0, 30.0, 40.0, 50.0],
            &[1.0, 1e-6, 1e-26, 1e-6, 0.1],
            BIASES5,
        ),
        22 => r(&[(14, false); 3], &[20.0; 3], &[1.0; 3], BIASES3),
        23 => r(&[(15, true); 3], &[20.0; 3], &[1.0; 3], BIASES3),
        24 => r(&[(15, true), (12, true), (9, true)], &[20.0; 3], &[0.25, 1.0, 2.5], BIASES3),
        25 => r(&[(15, true), (12, true), (9, true)], &[10.0, 30.0, 50.0], &[0.25, 1.0, 2.5], BIASES3),
        26 => r(
            &[(15, true), (12, true), (2, true), (9, true), (10, true)],
            &[10.0; 5],
            &[0.25, 1.0, 1e-7, 2.5, 10.0],
            BIASES5,
        ),
        27 => r(
            &[(10, true), (12, true), (15, true), (9, true), (1, false)],
            &[10.0, 10.0, 10.0, 20.0, 20.0],
            &[100.0, 10.0, 2.5, 25.0, 0.1],
            BIASES5,
        ),
        28 => r(
            &[(19, true), (7, true), (15, true), (20, true), (1, false)],
            &[10.0, 20.0, 30.0, 40.0, 50.0],
            &[2.5, 2.5e-3, 2.5, 5e-4, 0.1],
            BIASES5,
        ),
        _ => return None,
    })
}

/// Basic functions whose definition uses a second rotation.
fn uses_inner(base: usize) -> bool {
    matches!(base, 3 | 7 | 8 | 9 | 12 | 13 | 16 | 18 | 20)
}

/// `(basic id, rotated)` for each component of function `id`.
pub fn components_of(id: usize) -> Vec<(usize, bool)> {
    match composition_recipe(id) {
        Some(r) => r.components.to_vec(),
        None => vec![(id, CATALOG[id - 1].rotated)],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentData {
    pub shift: Vec<f64>,
    pub rotation: DMatrix<f64>,
    pub inner: DMatrix<f64>,
}

impl ComponentData {
    fn view(&self) -> Component<'_> {
        Component {
            shift: &self.shift,
            rotation: &self.rotation,
            inner: &self.inner,
        }
    }
}

/// Shift and rotation data for one suite function; compositions carry one entry per component.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionData {
    pub id: usize,
    pub components: Vec<ComponentData>,
}

impl FunctionData {
    /// Global optimum location.
    pub fn optimum(&self) -> &[f64] {
        &self.components[0].shift
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match composition_recipe(self.id) {
            None => evaluate_basic(self.id, &self.components[0].view(), x),
            Some(recipe) => {
                let shifts: Vec<&[f64]> = self.components.iter().map(|c| c.shift.as_slice()).collect();
                let weights = composition_weights(x, &shifts, recipe.sigmas);
                let mut total = 0.0;
                for (k, w) in weights.iter().enumerate() {
                    if *w == 0.0 {
                        continue;
                    }
                    let base = recipe.components[k].0;
                    let g = evaluate_basic(base, &self.components[k].view(), x);
                    total += w * (recipe.scales[k] * g + recipe.biases[k]);
                }
                total
            }
        }
    }

    /// Weights a composition assigns at `x`; `None` for basic functions.
    pub fn weights(&self, x: &[f64]) -> Option<Vec<f64>> {
        composition_recipe(self.id).map(|r| {
            let shifts: Vec<&[f64]> = self.components.iter().map(|c| c.shift.as_slice()).collect();
            composition_weights(x, &shifts, r.sigmas)
        })
    }
}

/// Largest absolute entry of `m^T m - I`.
pub fn orthogonality_error(m: &DMatrix<f64>) -> f64 {
    let product = m.transpose() * m;
    let n = m.nrows();
    (product - DMatrix::<f64>::identity(n, n)).amax()
}

/// Haar-distributed orthogonal matrix from a Gaussian QR factorization.
pub fn random_orthogonal(d: usize, rng: &mut SeededRng) -> DMatrix<f64> {
    let gaussian = DMatrix::from_fn(d, d, |_, _| rng.normal());
    let qr = gaussian.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn function_seed(seed: u64, id: usize) -> u64 {
    seed ^ (id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Dimension, provenance seed and per-function data of a suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteSpec {
    pub dimension: usize,
    /// `None` for loaded data.
    pub seed: Option<u64>,
    pub functions: Vec<Arc<FunctionData>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: usize,
    pub name: String,
    pub shifted: bool,
    pub rotated: bool,
    pub bias: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub d: usize,
    pub seed: Option<u64>,
    pub functions: Vec<ManifestEntry>,
}

impl SuiteSpec {
    /// Seed-generated data for all 28 functions. Each function draws from its own stream.
    pub fn generate(dimension: usize, seed: u64) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::domain(format!("suite needs d >= 2, got {dimension}")));
        }
        let functions = (1..=FUNCTION_COUNT)
            .map(|id| {
                let mut rng = seeded_rng(function_seed(seed, id));
                let components = components_of(id)
                    .into_iter()
                    .map(|(base, rotated)| {
                        let shift = (0..dimension).map(|_| rng.uniform_in(-SHIFT_BOUND, SHIFT_BOUND)).collect();
                        let rotation = if rotated {
                            random_orthogonal(dimension, &mut rng)
                        } else {
                            DMatrix::identity(dimension, dimension)
                        };
                        let inner = if rotated && uses_inner(base) {
                            random_orthogonal(dimension, &mut rng)
                        } else {
                            DMatrix::identity(dimension, dimension)
                        };
                        ComponentData { shift, rotation, inner }
                    })
                    .collect();
                Arc::new(FunctionData { id, components })
            })
            .collect();
        Ok(Self {
            dimension,
            seed: Some(seed),
            functions,
        })
    }

    /// Checks dimensions, component counts and orthogonality of every matrix.
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::Validation(format!("suite needs d >= 2, got {}", self.dimension)));
        }
        let d = self.dimension;
        for f in &self.functions {
            function_info(f.id).map_err(|e| Error::Validation(e.to_string()))?;
            let expected = components_of(f.id).len();
            if f.components.len() != expected {
                return Err(Error::Validation(format!(
                    "f{} needs {expected} components, found {}",
                    f.id,
                    f.components.len()
                )));
            }
            for (k, c) in f.components.iter().enumerate() {
                if c.shift.len() != d || c.rotation.shape() != (d, d) || c.inner.shape() != (d, d) {
                    return Err(Error::Validation(format!("f{} component {k}: wrong dimension", f.id)));
                }
                for (label, m) in [("rotation", &c.rotation), ("inner", &c.inner)] {
                    let err = orthogonality_error(m);
                    if !(err <= ORTHOGONALITY_TOLERANCE) {
                        return Err(Error::Validation(format!(
                            "f{} component {k}: {label} matrix is not orthogonal (error {err:e})",
                            f.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn function(&self, id: usize) -> Result<&Arc<FunctionData>> {
        self.functions
            .iter()
            .find(|f| f.id == id)
            .ok_or_else(|| Error::domain(format!("suite has no function f{id}")))
    }

    /// The suite function as an optimization problem named `f<id>`.
    pub fn problem(&self, id: usize) -> Result<ObjectiveProblem> {
        let data = Arc::clone(self.function(id)?);
        let space = SearchSpace::cube(self.dimension, -BOX_BOUND, BOX_BOUND)?;
        Ok(ObjectiveProblem::new(format!("f{id}"), space, 0.0, move |x: &[f64]| data.evaluate(x)))
    }

    pub fn problems(&self) -> Result<Vec<ObjectiveProblem>> {
        self.functions.iter().map(|f| self.problem(f.id)).collect()
    }

    pub fn manifest(&self) -> SuiteManifest {
        SuiteManifest {
            d: self.dimension,
            seed: self.seed,
            functions: self
                .functions
                .iter()
                .map(|f| {
                    let info = &CATALOG[f.id - 1];
                    ManifestEntry {
                        id: f.id,
                        name: info.name.to_string(),
                        shifted: true,
                        rotated: info.rotated,
                        bias: 0.0,
                    }
                })
                .collect(),
        }
    }
}

/// All 28 problems for dimension `d` and `seed`.
pub fn make_suite(d: usize, seed: u64) -> Result<Vec<ObjectiveProblem>> {
    SuiteSpec::generate(d, seed)?.problems()
}

/// Parses `f3`, `3`, or ranges like `f1-f12` / `1-12`, comma separated.
pub fn parse_function_list(text: &str) -> Result<Vec<usize>> {
    let id = |t: &str| -> Result<usize> {
        let t = t.trim();
        let n: usize = t
            .strip_prefix('f')
            .unwrap_or(t)
            .parse()
            .map_err(|_| Error::domain(format!("bad function id `{t}`")))?;
        function_info(n)?;
        Ok(n)
    };
    let mut ids = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (id(a)?, id(b)?);
                if a > b {
                    return Err(Error::domain(format!("empty range `{part}`")));
                }
                ids.extend(a..=b);
            }
            None => ids.push(id(part)?),
        }
    }
    if ids.is_empty() {
        return Err(Error::domain("empty function list"));
    }
    Ok(ids)
}
