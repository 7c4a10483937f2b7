//! Exhaustive evaluation of the information utilization ratio on tiny finite problems.
//!
//! A finite ensemble is a uniform distribution over objective functions on
//! `m` points. A deterministic policy picks each next point from the feedback
//! observed so far. Running the policy against every function of the ensemble
//! gives the joint law of positions `X`, values `Y` and choices `Z`, from
//! which the conditional entropies are computed by counting.
//!
//! Choice indexing: `Z_1` is the first query and `Z_{i+1}` is the choice made
//! after the `i`-th evaluation. The reported numerator sums
//! `H(Z_{i+1} | X_1..X_i, Z_1..Z_i)` for `i = 1..g`, so the decision following
//! the last evaluation is counted, as in the closed-form ratios. The stricter
//! sum over `Z_1..Z_g` is reported alongside.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{pi, shannon_entropy, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::iur::IurReport;
use crate::rng::seeded_rng;

/// Maximum number of (function, step) pairs one enumeration may visit.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleMode {
    /// All `n^m` functions, equiprobable: values are i.i.d. uniform on `0..n`.
    AllFunctions,
    /// All `m!` injective assignments of the ranks `0..m`, equiprobable.
    InjectiveOrderings,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteEnsemble {
    pub points: usize,
    pub values: usize,
    pub mode: EnsembleMode,
}

impl FiniteEnsemble {
    pub fn all_functions(points: usize, values: usize) -> Self {
        Self {
            points,
            values,
            mode: EnsembleMode::AllFunctions,
        }
    }

    pub fn injective_orderings(points: usize) -> Self {
        Self {
            points,
            values: points,
            mode: EnsembleMode::InjectiveOrderings,
        }
    }

    /// Number of equiprobable functions, saturating at `u128::MAX`.
    pub fn function_count(&self) -> u128 {
        match self.mode {
            EnsembleMode::AllFunctions => {
                let mut total: u128 = 1;
                for _ in 0..self.points {
                    total = total.saturating_mul(self.values as u128);
                }
                total
            }
            EnsembleMode::InjectiveOrderings => {
                (1..=self.points as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::domain("ensemble needs at least one point"));
        }
        if self.mode == EnsembleMode::AllFunctions && self.values == 0 {
            return Err(Error::domain("ensemble needs at least one value"));
        }
        Ok(())
    }

    /// Every function of the ensemble as a value table indexed by point.
    pub fn functions(&self) -> Vec<Vec<u32>> {
        match self.mode {
            EnsembleMode::AllFunctions => {
                let mut out = Vec::new();
                let mut digits = vec![0u32; self.points];
                loop {
                    out.push(digits.clone());
                    let mut j = 0;
                    loop {
                        if j == self.points {
                            return out;
                        }
                        digits[j] += 1;
                        if (digits[j] as usize) < self.values {
                            break;
                        }
                        digits[j] = 0;
                        j += 1;
                    }
                }
            }
            EnsembleMode::InjectiveOrderings => permutations(self.points),
        }
    }
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<u32>> {
    let mut items: Vec<u32> = (0..n as u32).collect();
    let mut out = vec![items.clone()];
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            out.push(items.clone());
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    /// Only the order of the new value relative to earlier observations.
    Rank,
    /// The observed value itself.
    Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Feedback {
    /// Counts of earlier observations strictly below and equal to the new value.
    Rank { less: u32, equal: u32 },
    Value(u32),
}

impl Feedback {
    /// `true` when the new value is strictly below every earlier one.
    pub fn improved(&self) -> bool {
        matches!(self, Feedback::Rank { less: 0, equal: 0 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Observation {
    pub point: usize,
    pub feedback: Feedback,
}

/// A deterministic, history-driven query rule over `points` candidates.
pub trait FinitePolicy: Sync {
    fn feedback_mode(&self) -> FeedbackMode;

    /// The next point to query. Must lie in `0..points`.
    fn next_point(&self, history: &[Observation], points: usize) -> usize;
}

/// Queries `0, 1, 2, ...` (mod `m`) regardless of feedback.
#[derive(Clone, Copy, Debug, Default)]
pub struct FixedOrderPolicy;

impl FinitePolicy for FixedOrderPolicy {
    fn feedback_mode(&self) -> FeedbackMode {
        FeedbackMode::Rank
    }

    fn next_point(&self, history: &[Observation], points: usize) -> usize {
        history.len() % points
    }
}

/// Compare-with-best search over unvisited points.
///
/// After an improvement the lowest unvisited point is queried next, otherwise
/// the second lowest. With fewer than two unvisited points left the policy
/// returns to the best point found so far. Each choice is therefore a
/// bijective image of the latest record indicator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompareWithBestPolicy;

impl FinitePolicy for CompareWithBestPolicy {
    fn feedback_mode(&self) -> FeedbackMode {
        FeedbackMode::Rank
    }

    fn next_point(&self, history: &[Observation], points: usize) -> usize {
        let Some(last) = history.last() else {
            return 0;
        };
        let unvisited: Vec<usize> = (0..points)
            .filter(|p| !history.iter().any(|o| o.point == *p))
            .collect();
        let first = history.len() == 1;
        let improved = first || last.feedback.improved();
        if unvisited.len() >= 2 {
            return if improved { unvisited[0] } else { unvisited[1] };
        }
        // Best point: the last observation that improved on all its predecessors.
        history
            .iter()
            .enumerate()
            .rev()
            .find(|(i, o)| *i == 0 || o.feedback.improved())
            .map(|(_, o)| o.point)
            .unwrap_or(0)
    }
}

/// Uses raw values: queries point `(last value) mod m`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ValueIndexPolicy;

impl FinitePolicy for ValueIndexPolicy {
    fn feedback_mode(&self) -> FeedbackMode {
        FeedbackMode::Value
    }

    fn next_point(&self, history: &[Observation], points: usize) -> usize {
        match history.last() {
            Some(Observation {
                feedback: Feedback::Value(v),
                ..
            }) => *v as usize % points,
            _ => 0,
        }
    }
}

/// Wraps a policy so that it acts on points relabelled by `perm`.
pub struct RelabeledPolicy<'a, P: FinitePolicy + ?Sized> {
    inner: &'a P,
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl<'a, P: FinitePolicy + ?Sized> RelabeledPolicy<'a, P> {
    pub fn new(inner: &'a P, perm: Vec<usize>) -> Self {
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        Self { inner, perm, inverse }
    }
}

impl<P: FinitePolicy + ?Sized> FinitePolicy for RelabeledPolicy<'_, P> {
    fn feedback_mode(&self) -> FeedbackMode {
        self.inner.feedback_mode()
    }

    fn next_point(&self, history: &[Observation], points: usize) -> usize {
        let mapped: Vec<Observation> = history
            .iter()
            .map(|o| Observation {
                point: self.inverse[o.point],
                feedback: o.feedback,
            })
            .collect();
        self.perm[self.inner.next_point(&mapped, points)]
    }
}

/// Number of distinct rank feedbacks at step `k` (1-based): pairs with `less + equal <= k - 1`.
fn rank_feedback_count(k: usize) -> usize {
    k * (k + 1) / 2
}

fn rank_feedback_code(feedback: Feedback) -> usize {
    match feedback {
        Feedback::Rank { less, equal } => {
            let t = (less + equal) as usize;
            t * (t + 1) / 2 + equal as usize
        }
        Feedback::Value(_) => panic!("rank-table policies receive rank feedback only"),
    }
}

/// Decision nodes of a rank-feedback policy tree with `depth` evaluations.
fn decision_node_count(depth: usize) -> u128 {
    let mut total = 0u128;
    let mut level = 1u128;
    for k in 0..=depth {
        if k > 0 {
            level = level.saturating_mul(rank_feedback_count(k) as u128);
        }
        total = total.saturating_add(level);
    }
    total
}

fn decision_node_index(history: &[Observation]) -> usize {
    let mut offset = 0usize;
    let mut level = 1usize;
    for k in 0..history.len() {
        offset += level;
        level *= rank_feedback_count(k + 1);
    }
    let mut index = 0usize;
    let mut radix = 1usize;
    for (k, o) in history.iter().enumerate() {
        index += rank_feedback_code(o.feedback) * radix;
        radix *= rank_feedback_count(k + 1);
    }
    offset + index
}

/// A rank-feedback policy given by an explicit decision table.
#[derive(Clone, Debug)]
pub struct TablePolicy {
    choices: Vec<u8>,
}

impl TablePolicy {
    pub fn new(choices: Vec<u8>) -> Self {
        Self { choices }
    }
}

impl FinitePolicy for TablePolicy {
    fn feedback_mode(&self) -> FeedbackMode {
        FeedbackMode::Rank
    }

    fn next_point(&self, history: &[Observation], points: usize) -> usize {
        self.choices[decision_node_index(history)] as usize % points
    }
}

/// A pseudo-random but deterministic rank-feedback policy: the choice is a hash of `(seed, history)`.
#[derive(Clone, Copy, Debug)]
pub struct HashedPolicy {
    pub seed: u64,
}

impl FinitePolicy for HashedPolicy {
    fn feedback_mode(&self) -> FeedbackMode {
        FeedbackMode::Rank
    }

    fn next_point(&self, history: &[Observation], points: usize) -> usize {
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        self.seed.hash(&mut hasher);
        for o in history {
            rank_feedback_code(o.feedback).hash(&mut hasher);
        }
        (hasher.finish() % points as u64) as usize
    }
}

/// Result of an exhaustive evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactIur {
    pub report: IurReport,
    /// Numerator over `Z_1..Z_g` only, excluding the decision after the last evaluation.
    pub strict_numerator_bits: f64,
    /// `H(Y_g | X_1..X_g, Y_1..Y_{g-1})`, the information of the final evaluation.
    pub last_evaluation_bits: f64,
    pub functions: u128,
}

struct Trajectory {
    xs: Vec<u32>,
    ys: Vec<u32>,
    /// `zs[0]` is the first query, `zs[i]` the choice after evaluation `i`.
    zs: Vec<u32>,
}

fn feedback_for(mode: FeedbackMode, earlier: &[u32], y: u32) -> Feedback {
    match mode {
        FeedbackMode::Value => Feedback::Value(y),
        FeedbackMode::Rank => Feedback::Rank {
            less: earlier.iter().filter(|&&v| v < y).count() as u32,
            equal: earlier.iter().filter(|&&v| v == y).count() as u32,
        },
    }
}

fn run_policy<P: FinitePolicy + ?Sized>(policy: &P, function: &[u32], g: usize) -> Trajectory {
    let m = function.len();
    let mode = policy.feedback_mode();
    let mut history = Vec::with_capacity(g);
    let mut xs = Vec::with_capacity(g);
    let mut ys: Vec<u32> = Vec::with_capacity(g);
    let mut zs = Vec::with_capacity(g + 1);
    let mut x = policy.next_point(&history, m);
    zs.push(x as u32);
    for _ in 0..g {
        let y = function[x];
        let feedback = feedback_for(mode, &ys, y);
        xs.push(x as u32);
        ys.push(y);
        history.push(Observation { point: x, feedback });
        x = policy.next_point(&history, m);
        debug_assert!(x < m, "policy chose point {x} outside 0..{m}");
        zs.push(x as u32);
    }
    Trajectory { xs, ys, zs }
}

/// Entropy in bits of a key over equiprobable trajectories.
fn key_entropy<F>(trajectories: &[Trajectory], key: F) -> f64
where
    F: Fn(&Trajectory, &mut Vec<u32>),
{
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    let mut buf = Vec::new();
    for t in trajectories {
        buf.clear();
        key(t, &mut buf);
        *counts.entry(buf.clone()).or_insert(0) += 1;
    }
    let total = trajectories.len() as f64;
    let sum_clogc: f64 = counts.values().map(|&c| c as f64 * (c as f64).log2()).sum();
    total.log2() - sum_clogc / total
}

fn nonnegative(v: f64) -> f64 {
    if v < 0.0 && v > -TOLERANCE {
        0.0
    } else {
        v
    }
}

fn check_budget(functions: u128, g: usize) -> Result<()> {
    let states = functions.saturating_mul(g as u128);
    if states > ENUMERATION_LIMIT {
        return Err(Error::Size {
            states,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Exact ratio of `policy` on `ensemble` over `g` evaluations.
pub fn exact_iur<P: FinitePolicy + ?Sized>(policy: &P, ensemble: &FiniteEnsemble, g: usize) -> Result<ExactIur> {
    ensemble.validate()?;
    if g == 0 {
        return Err(Error::domain("g must be at least 1"));
    }
    let count = ensemble.function_count();
    check_budget(count, g)?;
    let functions = ensemble.functions();
    exact_iur_on(policy, &functions, ensemble, g)
}

fn exact_iur_on<P: FinitePolicy + ?Sized>(
    policy: &P,
    functions: &[Vec<u32>],
    ensemble: &FiniteEnsemble,
    g: usize,
) -> Result<ExactIur> {
    let trajectories: Vec<Trajectory> = functions.iter().map(|f| run_policy(policy, f, g)).collect();

    // H(X_1..X_i, Z_1..Z_j)
    let xz = |i: usize, j: usize| {
        key_entropy(&trajectories, |t, k| {
            k.extend_from_slice(&t.xs[..i]);
            k.extend_from_slice(&t.zs[..j]);
        })
    };
    // H(X_1..X_i, Y_1..Y_j)
    let xy = |i: usize, j: usize| {
        key_entropy(&trajectories, |t, k| {
            k.extend_from_slice(&t.xs[..i]);
            k.extend_from_slice(&t.ys[..j]);
        })
    };

    // choice_terms[i] = H(Z_{i+1} | X_1..X_i, Z_1..Z_i), i = 0..=g
    let choice_terms: Vec<f64> = (0..=g).map(|i| nonnegative(xz(i, i + 1) - xz(i, i))).collect();
    let value_terms: Vec<f64> = (1..=g).map(|i| nonnegative(xy(i, i) - xy(i, i - 1))).collect();

    let numerator: f64 = choice_terms[1..].iter().sum();
    let strict_numerator: f64 = choice_terms[..g].iter().sum();
    let denominator: f64 = value_terms.iter().sum();
    if denominator <= 0.0 {
        return Err(Error::domain(
            "acquired information is zero; the ratio is undefined for this configuration",
        ));
    }

    let report = IurReport {
        algorithm: "exact".into(),
        g: Some(g as u64),
        lambda: None,
        mu: None,
        s: None,
        p: None,
        h_bits: match ensemble.mode {
            EnsembleMode::AllFunctions => (ensemble.values as f64).log2(),
            EnsembleMode::InjectiveOrderings => denominator / g as f64,
        },
        numerator_bits: numerator,
        denominator_bits: denominator,
        ratio: numerator / denominator,
        ratio_upper: numerator / denominator,
        exact: true,
    };
    Ok(ExactIur {
        report,
        strict_numerator_bits: strict_numerator,
        last_evaluation_bits: value_terms[g - 1],
        functions: functions.len() as u128,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub points: usize,
    pub values: usize,
    pub mode: EnsembleMode,
    pub g: usize,
    pub policy: String,
    pub ratio: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub configurations_checked: u64,
    pub policies_checked: u64,
    pub max_iur_observed: f64,
    pub min_iur_observed: f64,
    pub violations: Vec<Violation>,
}

impl VerificationSummary {
    fn empty() -> Self {
        Self {
            configurations_checked: 0,
            policies_checked: 0,
            max_iur_observed: f64::NEG_INFINITY,
            min_iur_observed: f64::INFINITY,
            violations: Vec::new(),
        }
    }

    fn absorb(&mut self, other: VerificationSummary) {
        self.configurations_checked += other.configurations_checked;
        self.policies_checked += other.policies_checked;
        self.max_iur_observed = self.max_iur_observed.max(other.max_iur_observed);
        self.min_iur_observed = self.min_iur_observed.min(other.min_iur_observed);
        self.violations.extend(other.violations);
    }
}

/// Checks `0 <= IUR <= 1` and the wasted-information identity for one policy.
fn check_policy<P: FinitePolicy + ?Sized>(
    policy: &P,
    label: impl Fn() -> String,
    functions: &[Vec<u32>],
    ensemble: &FiniteEnsemble,
    g: usize,
) -> Result<(f64, Vec<Violation>)> {
    let result = exact_iur_on(policy, functions, ensemble, g)?;
    let ratio = result.report.ratio;
    let mut violations = Vec::new();
    let violation = |detail: String| Violation {
        points: ensemble.points,
        values: ensemble.values,
        mode: ensemble.mode,
        g,
        policy: label(),
        ratio,
        detail,
    };
    if !(-TOLERANCE..=1.0 + TOLERANCE).contains(&ratio) {
        violations.push(violation(format!("ratio {ratio} outside [0, 1]")));
    }
    let wasted_bound = result.report.denominator_bits - result.last_evaluation_bits;
    if result.strict_numerator_bits > wasted_bound + 1e-9 {
        violations.push(violation(format!(
            "strict numerator {} exceeds acquired bits minus final evaluation {}",
            result.strict_numerator_bits, wasted_bound
        )));
    }
    Ok((ratio, violations))
}

fn configurations(max_m: usize, max_n: usize) -> Vec<FiniteEnsemble> {
    let mut out = Vec::new();
    for m in 1..=max_m {
        for n in 2..=max_n {
            out.push(FiniteEnsemble::all_functions(m, n));
        }
        if m >= 2 {
            out.push(FiniteEnsemble::injective_orderings(m));
        }
    }
    out
}

/// Enumerates every deterministic rank-feedback policy for each ensemble with
/// `m <= max_m`, `2 <= n <= max_n` (plus injective orderings for `m >= 2`) and
/// each `g <= max_g`, checking that every ratio lies in `[0, 1]`.
///
/// `n = 1` gives zero acquired information and is outside the ratio's domain,
/// so it is not enumerated.
pub fn verify_theorem1(max_m: usize, max_n: usize, max_g: usize) -> Result<VerificationSummary> {
    if max_m == 0 || max_g == 0 {
        return Err(Error::domain("max_m and max_g must be at least 1"));
    }
    let mut plan = Vec::new();
    let mut states: u128 = 0;
    for ensemble in configurations(max_m, max_n) {
        for g in 1..=max_g {
            let nodes = decision_node_count(g);
            let policies = (ensemble.points as u128).saturating_pow(nodes.min(u32::MAX as u128) as u32);
            states = states.saturating_add(
                policies
                    .saturating_mul(ensemble.function_count())
                    .saturating_mul(g as u128),
            );
            plan.push((ensemble, g, nodes as usize, policies));
        }
    }
    if states > ENUMERATION_LIMIT {
        return Err(Error::Size {
            states,
            limit: ENUMERATION_LIMIT,
        });
    }

    let mut summary = VerificationSummary::empty();
    for (ensemble, g, nodes, policies) in plan {
        let functions = ensemble.functions();
        let m = ensemble.points;
        let partial = (0..policies as u64)
            .into_par_iter()
            .map(|code| {
                let mut choices = vec![0u8; nodes];
                let mut rest = code;
                for c in choices.iter_mut() {
                    *c = (rest % m as u64) as u8;
                    rest /= m as u64;
                }
                let policy = TablePolicy::new(choices);
                check_policy(&policy, || format!("table#{code}"), &functions, &ensemble, g)
            })
            .try_fold(VerificationSummary::empty, |mut acc, res| {
                let (ratio, violations) = res?;
                acc.policies_checked += 1;
                acc.max_iur_observed = acc.max_iur_observed.max(ratio);
                acc.min_iur_observed = acc.min_iur_observed.min(ratio);
                acc.violations.extend(violations);
                Ok::<_, Error>(acc)
            })
            .try_reduce(VerificationSummary::empty, |mut a, b| {
                a.absorb(b);
                Ok(a)
            })?;
        summary.absorb(partial);
        summary.configurations_checked += 1;
    }
    Ok(summary)
}

/// Same check as [`verify_theorem1`] on one configuration, over `samples`
/// pseudo-random deterministic rank-feedback policies.
pub fn verify_theorem1_sampled(
    ensemble: FiniteEnsemble,
    g: usize,
    samples: usize,
    seed: u64,
) -> Result<VerificationSummary> {
    ensemble.validate()?;
    if g == 0 {
        return Err(Error::domain("g must be at least 1"));
    }
    check_budget(
        ensemble
            .function_count()
            .saturating_mul(samples as u128),
        g,
    )?;
    let functions = ensemble.functions();
    let mut rng = seeded_rng(seed);
    let seeds: Vec<u64> = (0..samples).map(|_| rng.next_u64()).collect();
    let results: Vec<(f64, Vec<Violation>)> = seeds
        .par_iter()
        .map(|&s| {
            let policy = HashedPolicy { seed: s };
            check_policy(&policy, || format!("hashed#{s}"), &functions, &ensemble, g)
        })
        .collect::<Result<_>>()?;
    let mut summary = VerificationSummary::empty();
    summary.configurations_checked = 1;
    for (ratio, violations) in results {
        summary.policies_checked += 1;
        summary.max_iur_observed = summary.max_iur_observed.max(ratio);
        summary.min_iur_observed = summary.min_iur_observed.min(ratio);
        summary.violations.extend(violations);
    }
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiCheck {
    pub g: u64,
    pub orderings: u64,
    pub enumerated_bits: f64,
    pub formula_bits: f64,
    pub abs_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiLemmaSummary {
    pub checks: Vec<PiCheck>,
    pub violations: Vec<u64>,
}

/// Largest `g` accepted by [`verify_pi_lemma`].
pub const PI_LEMMA_MAX_G: u64 = 10;

/// Enumerates all `(g+1)!` orderings and compares the entropy of
/// `I(min of first g < last)` with `pi(g)`.
pub fn verify_pi_lemma(max_g: u64) -> Result<PiLemmaSummary> {
    if max_g == 0 || max_g > PI_LEMMA_MAX_G {
        return Err(Error::domain(format!("max_g must be in 1..={PI_LEMMA_MAX_G}")));
    }
    let mut checks = Vec::new();
    let mut violations = Vec::new();
    for g in 1..=max_g {
        let n = g as usize + 1;
        let mut counts = [0u64; 2];
        for_each_permutation(n, |perm| {
            let min_prev = perm[..n - 1].iter().min().copied().unwrap_or(u32::MAX);
            counts[(min_prev < perm[n - 1]) as usize] += 1;
        });
        let enumerated = shannon_entropy(&DiscreteDistribution::from_counts(&counts)?);
        let formula = pi(g)?;
        let diff = (enumerated - formula).abs();
        if diff > TOLERANCE {
            violations.push(g);
        }
        checks.push(PiCheck {
            g,
            orderings: counts.iter().sum(),
            enumerated_bits: enumerated,
            formula_bits: formula,
            abs_diff: diff,
        });
    }
    Ok(PiLemmaSummary { checks, violations })
}

fn for_each_permutation(n: usize, mut visit: impl FnMut(&[u32])) {
    let mut items: Vec<u32> = (0..n as u32).collect();
    let mut c = vec![0usize; n];
    visit(&items);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(&items);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::pi_sum;
    use approx::assert_abs_diff_eq;

    #[test]
    fn permutation_count() {
        let perms = permutations(4);
        assert_eq!(perms.len(), 24);
        let mut sorted = perms.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 24);
    }

    #[test]
    fn function_tables() {
        let e = FiniteEnsemble::all_functions(3, 2);
        assert_eq!(e.function_count(), 8);
        assert_eq!(e.functions().len(), 8);
        assert_eq!(FiniteEnsemble::injective_orderings(5).function_count(), 120);
    }

    #[test]
    fn fixed_order_uses_nothing() {
        let r = exact_iur(&FixedOrderPolicy, &FiniteEnsemble::all_functions(3, 3), 3).unwrap();
        assert_eq!(r.report.ratio, 0.0);
        let r = exact_iur(&FixedOrderPolicy, &FiniteEnsemble::injective_orderings(4), 3).unwrap();
        assert_eq!(r.report.numerator_bits, 0.0);
    }

    #[test]
    fn compare_with_best_on_four_orderings() {
        let r = exact_iur(&CompareWithBestPolicy, &FiniteEnsemble::injective_orderings(4), 3).unwrap();
        assert_abs_diff_eq!(r.report.numerator_bits, 1.918296, epsilon = 1e-6);
        assert_abs_diff_eq!(r.report.denominator_bits, 24f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.report.ratio, 0.418390, epsilon = 2e-6);
        assert_abs_diff_eq!(r.report.ratio, (1.0 + pi(2).unwrap()) / 24f64.log2(), epsilon = 1e-9);
    }

    #[test]
    fn compare_with_best_matches_pi_sum() {
        for m in 3..=7usize {
            for g in 1..m {
                let r = exact_iur(&CompareWithBestPolicy, &FiniteEnsemble::injective_orderings(m), g).unwrap();
                assert_abs_diff_eq!(r.report.numerator_bits, pi_sum(g as u64 - 1), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn relabeling_invariance() {
        let ensembles = [FiniteEnsemble::all_functions(4, 3), FiniteEnsemble::injective_orderings(5)];
        let perms = [vec![2, 0, 3, 1], vec![4, 3, 0, 1, 2]];
        for (ensemble, perm) in ensembles.iter().zip(perms) {
            let policies: Vec<Box<dyn FinitePolicy>> = vec![
                Box::new(CompareWithBestPolicy),
                Box::new(HashedPolicy { seed: 9 }),
                Box::new(ValueIndexPolicy),
            ];
            for p in &policies {
                let base = exact_iur(p.as_ref(), ensemble, 3).unwrap();
                let relabeled = RelabeledPolicy::new(p.as_ref(), perm.clone());
                let moved = exact_iur(&relabeled, ensemble, 3).unwrap();
                assert_abs_diff_eq!(base.report.ratio, moved.report.ratio, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn independent_evaluations_give_g_log_n() {
        // Fixed order over distinct points never repeats within g <= m.
        for (m, n, g) in [(3, 2, 3), (4, 3, 2), (3, 5, 3)] {
            let r = exact_iur(&FixedOrderPolicy, &FiniteEnsemble::all_functions(m, n), g).unwrap();
            assert_abs_diff_eq!(r.report.denominator_bits, g as f64 * (n as f64).log2(), epsilon = 1e-12);
        }
    }

    #[test]
    fn value_feedback_beats_rank_feedback_bound() {
        let e = FiniteEnsemble::all_functions(4, 4);
        let value = exact_iur(&ValueIndexPolicy, &e, 3).unwrap();
        assert!(value.report.ratio > 0.0 && value.report.ratio <= 1.0);
    }

    #[test]
    fn single_value_codomain_is_rejected() {
        let err = exact_iur(&CompareWithBestPolicy, &FiniteEnsemble::all_functions(3, 1), 2).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn enumeration_budget() {
        let err = exact_iur(&FixedOrderPolicy, &FiniteEnsemble::all_functions(20, 3), 2).unwrap_err();
        assert!(matches!(err, Error::Size { .. }));
        assert!(matches!(verify_theorem1(20, 2, 2), Err(Error::Size { .. })));
    }

    #[test]
    fn decision_nodes_are_indexed_densely() {
        assert_eq!(decision_node_count(2), 5);
        assert_eq!(decision_node_count(3), 23);
        let rank = |less, equal| Observation {
            point: 0,
            feedback: Feedback::Rank { less, equal },
        };
        assert_eq!(decision_node_index(&[]), 0);
        assert_eq!(decision_node_index(&[rank(0, 0)]), 1);
        let mut seen: Vec<usize> = Vec::new();
        for (l, e) in [(0, 0), (0, 1), (1, 0)] {
            seen.push(decision_node_index(&[rank(0, 0), rank(l, e)]));
        }
        seen.sort();
        assert_eq!(seen, vec![2, 3, 4]);
    }

    #[test]
    fn ratio_bounds_small_exhaustive() {
        let s = verify_theorem1(3, 2, 2).unwrap();
        assert!(s.policies_checked > 0);
        assert!(s.violations.is_empty(), "{:?}", s.violations);
        assert!(s.min_iur_observed >= 0.0 && s.max_iur_observed <= 1.0);
    }

    #[test]
    fn ratio_bounds_single_generation_is_zero() {
        let s = verify_theorem1(3, 3, 1).unwrap();
        assert_eq!(s.max_iur_observed, 0.0);
    }

    #[test]
    fn record_entropy_enumeration() {
        let s = verify_pi_lemma(6).unwrap();
        assert!(s.violations.is_empty());
        assert_eq!(s.checks[0].enumerated_bits, 1.0);
        assert_abs_diff_eq!(s.checks[2].enumerated_bits, 0.811278, epsilon = 1e-6);
        assert_abs_diff_eq!(s.checks[4].enumerated_bits, 0.650022, epsilon = 1e-6);
        assert!(verify_pi_lemma(11).is_err());
    }
}
