//! Seeded multi-run protocols: the mu/lambda sweep and the algorithm comparison.
//!
//! Every cell (function, configuration, run) is an independent task. Results
//! are merged by (function, configuration, run) index, so tables do not depend
//! on thread count or completion order.

mod stats;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use stats::{midranks, spearman, wilcoxon_exact, wilcoxon_normal, wilcoxon_rank_sum, EXACT_MAX_TOTAL};

use crate::algorithms::{run, AlgorithmId, Optimizer, OptimizerConfig};
use crate::benchmarks::{function_info, SuiteSpec};
use crate::entropy::log2_binomial;
use crate::error::{Error, Result};
use crate::problem::ObjectiveProblem;
use crate::trace::RunTrace;

pub const SIGNIFICANCE: f64 = 0.05;
pub const DEFAULT_SUITE_SEED: u64 = 2013;
/// Final errors below this are recorded as zero, so converged runs tie instead of ranking by round-off.
pub const ERROR_FLOOR: f64 = 1e-8;

/// `error` with sub-floor values zeroed.
pub fn floored_error(error: f64) -> f64 {
    if error < ERROR_FLOOR {
        0.0
    } else {
        error
    }
}

/// Desk-scale defaults: d = 5, 20000 evaluations, 20 runs, f1..f12.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub dimension: usize,
    /// Budget per run is `budget_multiplier * dimension` evaluations.
    pub budget_multiplier: u64,
    pub runs: usize,
    /// Run `r` uses seed `base_seed + r`.
    pub base_seed: u64,
    pub suite_seed: u64,
    pub functions: Vec<usize>,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            dimension: 5,
            budget_multiplier: 4000,
            runs: 20,
            base_seed: 42,
            suite_seed: DEFAULT_SUITE_SEED,
            functions: (1..=12).collect(),
            jobs: None,
        }
    }
}

impl ExperimentPlan {
    /// The full protocol: all 28 functions and 10000 d evaluations.
    pub fn full() -> Self {
        Self {
            budget_multiplier: 10_000,
            functions: (1..=28).collect(),
            ..Self::default()
        }
    }

    pub fn budget(&self) -> u64 {
        self.budget_multiplier * self.dimension as u64
    }

    pub fn seed(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 2 {
            return Err(Error::config(format!("need at least 2 runs, got {}", self.runs)));
        }
        if self.dimension < 2 {
            return Err(Error::config(format!("need dimension >= 2, got {}", self.dimension)));
        }
        if self.budget_multiplier == 0 {
            return Err(Error::config("budget multiplier must be positive"));
        }
        if self.functions.is_empty() {
            return Err(Error::config("no functions selected"));
        }
        for id in &self.functions {
            function_info(*id).map_err(|e| Error::config(e.to_string()))?;
        }
        if self.jobs == Some(0) {
            return Err(Error::config("jobs must be positive"));
        }
        Ok(())
    }

    pub fn problems(&self) -> Result<Vec<ObjectiveProblem>> {
        let suite = SuiteSpec::generate(self.dimension, self.suite_seed)?;
        self.functions.iter().map(|id| suite.problem(*id)).collect()
    }

    fn install<T: Send>(&self, work: impl FnOnce() -> T + Send) -> Result<T> {
        match self.jobs {
            None => Ok(work()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::config(e.to_string()))?;
                Ok(pool.install(work))
            }
        }
    }
}

/// A configuration with the column label used in tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledConfig {
    pub label: String,
    pub config: OptimizerConfig,
}

impl LabeledConfig {
    pub fn new(label: impl Into<String>, config: OptimizerConfig) -> Self {
        Self {
            label: label.into(),
            config,
        }
    }

    /// Labelled by algorithm id, with default parameters.
    pub fn algorithm(id: AlgorithmId) -> Self {
        Self::new(id.as_str(), OptimizerConfig::new(id))
    }
}

/// `plan.runs` seeded runs of one configuration, in seed order.
pub fn run_cell(config: &OptimizerConfig, problem: &ObjectiveProblem, plan: &ExperimentPlan) -> Result<Vec<RunTrace>> {
    plan.validate()?;
    plan.install(|| {
        (0..plan.runs)
            .into_par_iter()
            .map(|r| run(config, problem, plan.budget(), plan.seed(r)))
            .collect()
    })?
}

/// Final best error of one run without keeping its trace.
pub fn final_error(config: &OptimizerConfig, problem: &ObjectiveProblem, budget: u64, seed: u64) -> Result<f64> {
    let (mut optimizer, first) = Optimizer::initialize(config, problem, budget, seed)?;
    let mut best = first.best_error;
    while optimizer.can_step() {
        best = optimizer.step(problem)?.best_error;
    }
    Ok(best)
}

/// Final errors indexed `[function][config][run]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorMatrix {
    pub functions: Vec<String>,
    pub configs: Vec<String>,
    pub errors: Vec<Vec<Vec<f64>>>,
}

impl ErrorMatrix {
    pub fn mean_errors(&self) -> Vec<Vec<f64>> {
        self.errors
            .iter()
            .map(|row| row.iter().map(|runs| runs.iter().sum::<f64>() / runs.len() as f64).collect())
            .collect()
    }
}

pub fn run_matrix(configs: &[LabeledConfig], plan: &ExperimentPlan) -> Result<ErrorMatrix> {
    plan.validate()?;
    if configs.is_empty() {
        return Err(Error::config("no configurations"));
    }
    let problems = plan.problems()?;
    for c in configs {
        c.config.resolve(plan.dimension)?;
    }
    let (nf, nc, nr) = (problems.len(), configs.len(), plan.runs);
    let flat: Vec<f64> = plan.install(|| {
        (0..nf * nc * nr)
            .into_par_iter()
            .map(|task| {
                let (f, rest) = (task / (nc * nr), task % (nc * nr));
                let (c, r) = (rest / nr, rest % nr);
                final_error(&configs[c].config, &problems[f], plan.budget(), plan.seed(r)).map(floored_error)
            })
            .collect::<Result<Vec<f64>>>()
    })??;
    let errors = flat
        .chunks(nc * nr)
        .map(|row| row.chunks(nr).map(<[f64]>::to_vec).collect())
        .collect();
    Ok(ErrorMatrix {
        functions: problems.iter().map(|p| p.name().to_string()).collect(),
        configs: configs.iter().map(|c| c.label.clone()).collect(),
        errors,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub functions: Vec<String>,
    pub configs: Vec<String>,
    /// `[function][config]`.
    pub mean_errors: Vec<Vec<f64>>,
    /// Midranks, 1 = lowest mean error.
    pub ranks: Vec<Vec<f64>>,
    pub average: Vec<f64>,
}

/// Ranks configurations per function by mean error and averages over functions.
pub fn average_rankings(functions: &[String], configs: &[String], mean_errors: &[Vec<f64>]) -> Result<RankTable> {
    if configs.len() < 2 || functions.is_empty() {
        return Err(Error::Data(format!(
            "ranking needs >= 2 configs and >= 1 function, got {} and {}",
            configs.len(),
            functions.len()
        )));
    }
    if mean_errors.len() != functions.len() || mean_errors.iter().any(|r| r.len() != configs.len()) {
        return Err(Error::Data("mean error matrix shape does not match labels".into()));
    }
    let ranks = mean_errors.iter().map(|row| midranks(row)).collect::<Result<Vec<_>>>()?;
    let average = (0..configs.len())
        .map(|c| ranks.iter().map(|r| r[c]).sum::<f64>() / functions.len() as f64)
        .collect();
    Ok(RankTable {
        functions: functions.to_vec(),
        configs: configs.to_vec(),
        mean_errors: mean_errors.to_vec(),
        ranks,
        average,
    })
}

impl ErrorMatrix {
    pub fn rank_table(&self) -> Result<RankTable> {
        average_rankings(&self.functions, &self.configs, &self.mean_errors())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub mu: usize,
    pub mu_over_lambda: f64,
    pub avg_ranking: f64,
    /// `-log2 C(lambda, mu) / lambda`.
    pub neg_log_binom: f64,
    /// `neg_log_binom` shifted so both series have equal means.
    pub translated_neg_log_binom: f64,
}

/// Pairs average rankings with the translated `-log2 C(lambda, mu) / lambda` curve.
pub fn sweep_curve(lambda: usize, mus: &[usize], avg_rankings: &[f64]) -> Result<Vec<CurvePoint>> {
    if mus.len() != avg_rankings.len() || mus.is_empty() {
        return Err(Error::Data("one average ranking per mu required".into()));
    }
    let curve = mus
        .iter()
        .map(|&mu| Ok(-log2_binomial(lambda as u64, mu as u64)? / lambda as f64))
        .collect::<Result<Vec<f64>>>()?;
    let n = mus.len() as f64;
    let shift = avg_rankings.iter().sum::<f64>() / n - curve.iter().sum::<f64>() / n;
    Ok(mus
        .iter()
        .zip(avg_rankings)
        .zip(&curve)
        .map(|((&mu, &avg), &c)| CurvePoint {
            mu,
            mu_over_lambda: mu as f64 / lambda as f64,
            avg_ranking: avg,
            neg_log_binom: c,
            translated_neg_log_binom: c + shift,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub lambda: usize,
    pub table: RankTable,
    pub curve: Vec<CurvePoint>,
    /// Correlation of average ranking with `-log2 C(lambda, mu) / lambda`.
    pub spearman: Option<f64>,
}

/// (mu, lambda)-ES for each `mu`, ranked against each other.
pub fn sweep_mu_lambda(lambda: usize, mus: &[usize], plan: &ExperimentPlan) -> Result<SweepResult> {
    if mus.len() < 2 {
        return Err(Error::config("sweep needs at least 2 mu values"));
    }
    if let Some(mu) = mus.iter().find(|&&mu| mu == 0 || mu > lambda) {
        return Err(Error::config(format!("mu={mu} outside 1..={lambda}")));
    }
    let configs: Vec<LabeledConfig> = mus
        .iter()
        .map(|&mu| LabeledConfig::new(format!("es_mu{mu}"), OptimizerConfig::es(lambda, mu)))
        .collect();
    let table = run_matrix(&configs, plan)?.rank_table()?;
    sweep_from_table(lambda, mus, table)
}

pub fn sweep_from_table(lambda: usize, mus: &[usize], table: RankTable) -> Result<SweepResult> {
    let curve = sweep_curve(lambda, mus, &table.average)?;
    let raw: Vec<f64> = curve.iter().map(|p| p.neg_log_binom).collect();
    let spearman = spearman(&table.average, &raw)?;
    Ok(SweepResult {
        lambda,
        table,
        curve,
        spearman,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairTest {
    pub first: String,
    pub second: String,
    pub function: String,
    pub p: f64,
    pub significant: bool,
    /// `first` has the lower mean error.
    pub first_better: bool,
}

/// Significant wins and losses of `first` against `second`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WinLoss {
    pub first: String,
    pub second: String,
    pub wins: usize,
    pub losses: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub table: RankTable,
    pub tests: Vec<PairTest>,
    pub win_loss: Vec<WinLoss>,
}

/// All `(i, j)` with `i < j`.
pub fn all_pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect()
}

pub fn compare_from_matrix(matrix: &ErrorMatrix, pairs: &[(usize, usize)]) -> Result<Comparison> {
    let table = matrix.rank_table()?;
    let means = &table.mean_errors;
    let k = matrix.configs.len();
    let mut tests = Vec::new();
    let mut win_loss = Vec::new();
    for &(a, b) in pairs {
        if a >= k || b >= k {
            return Err(Error::config(format!("pair ({a}, {b}) out of range for {k} configs")));
        }
        let (mut wins, mut losses) = (0, 0);
        for (f, name) in matrix.functions.iter().enumerate() {
            let p = wilcoxon_rank_sum(&matrix.errors[f][a], &matrix.errors[f][b])?;
            let significant = p < SIGNIFICANCE;
            let first_better = means[f][a] < means[f][b];
            if significant && first_better {
                wins += 1;
            } else if significant && means[f][a] > means[f][b] {
                losses += 1;
            }
            tests.push(PairTest {
                first: matrix.configs[a].clone(),
                second: matrix.configs[b].clone(),
                function: name.clone(),
                p,
                significant,
                first_better,
            });
        }
        win_loss.push(WinLoss {
            first: matrix.configs[a].clone(),
            second: matrix.configs[b].clone(),
            wins,
            losses,
        });
    }
    Ok(Comparison { table, tests, win_loss })
}

/// Mean errors, average rankings and rank-sum tests for each pair in `pairs` (all pairs if empty).
pub fn compare_algorithms(configs: &[LabeledConfig], pairs: &[(usize, usize)], plan: &ExperimentPlan) -> Result<Comparison> {
    if configs.len() < 2 {
        return Err(Error::config("comparison needs at least 2 configurations"));
    }
    let matrix = run_matrix(configs, plan)?;
    let pairs = if pairs.is_empty() { all_pairs(configs.len()) } else { pairs.to_vec() };
    compare_from_matrix(&matrix, &pairs)
}

/// Six significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.5e}")
}

fn csv_string(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn header(first: &str, rest: &[String]) -> Vec<String> {
    std::iter::once(first.to_string()).chain(rest.iter().cloned()).collect()
}

/// Rows are functions, columns configurations.
pub fn mean_errors_csv(table: &RankTable) -> String {
    let rows = table.functions.iter().zip(&table.mean_errors).map(|(f, row)| {
        std::iter::once(f.clone()).chain(row.iter().map(|v| format_float(*v))).collect()
    });
    csv_string(std::iter::once(header("function", &table.configs)).chain(rows))
}

/// Per-function ranks followed by an `average` row.
pub fn rankings_csv(table: &RankTable) -> String {
    let rows = table
        .functions
        .iter()
        .zip(&table.ranks)
        .map(|(f, row)| std::iter::once(f.clone()).chain(row.iter().map(|v| format_float(*v))).collect())
        .chain(std::iter::once(
            std::iter::once("average".to_string())
                .chain(table.average.iter().map(|v| format_float(*v)))
                .collect(),
        ));
    csv_string(std::iter::once(header("function", &table.configs)).chain(rows))
}

pub fn wilcoxon_csv(tests: &[PairTest]) -> String {
    let head = ["pair", "function", "p", "significant"].map(String::from).to_vec();
    let rows = tests.iter().map(|t| {
        vec![
            format!("{} vs {}", t.first, t.second),
            t.function.clone(),
            format_float(t.p),
            t.significant.to_string(),
        ]
    });
    csv_string(std::iter::once(head).chain(rows))
}

pub fn fig2_curve_csv(curve: &[CurvePoint]) -> String {
    let head = ["mu_over_lambda", "avg_ranking", "translated_neg_log_binom"].map(String::from).to_vec();
    let rows = curve.iter().map(|p| {
        vec![
            format_float(p.mu_over_lambda),
            format_float(p.avg_ranking),
            format_float(p.translated_neg_log_binom),
        ]
    });
    csv_string(std::iter::once(head).chain(rows))
}

fn write_files(dir: &Path, files: &[(&str, String)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    files
        .iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            Ok(path)
        })
        .collect()
}

/// Writes `mean_errors.csv`, `rankings.csv` and `wilcoxon.csv`.
pub fn write_comparison(dir: &Path, comparison: &Comparison) -> Result<Vec<PathBuf>> {
    write_files(
        dir,
        &[
            ("mean_errors.csv", mean_errors_csv(&comparison.table)),
            ("rankings.csv", rankings_csv(&comparison.table)),
            ("wilcoxon.csv", wilcoxon_csv(&comparison.tests)),
        ],
    )
}

/// Writes `mean_errors.csv`, `rankings.csv` and `fig2_curve.csv`.
pub fn write_sweep(dir: &Path, sweep: &SweepResult) -> Result<Vec<PathBuf>> {
    write_files(
        dir,
        &[
            ("mean_errors.csv", mean_errors_csv(&sweep.table)),
            ("rankings.csv", rankings_csv(&sweep.table)),
            ("fig2_curve.csv", fig2_curve_csv(&sweep.curve)),
        ],
    )
}
