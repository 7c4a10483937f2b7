//! Acceptance suite. Run with
//! `cargo test -p iurlab --release --test acceptance -- --nocapture --test-threads=1`
//! to see one PASS/FAIL line per criterion.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use iurlab::algorithms::{events_of, run_generations, AlgorithmId, OptimizerConfig};
use iurlab::benchmarks::{orthogonality_error, SuiteSpec, CATALOG};
use iurlab::entropy::pi;
use iurlab::exact::{exact_iur, verify_pi_lemma, verify_theorem1, verify_theorem1_sampled, CompareWithBestPolicy, FiniteEnsemble};
use iurlab::experiments::{
    compare_algorithms, fig2_curve_csv, mean_errors_csv, rankings_csv, sweep_mu_lambda, wilcoxon_csv, wilcoxon_exact,
    wilcoxon_rank_sum, Comparison, ExperimentPlan, LabeledConfig, SweepResult,
};
use iurlab::iur::{
    comparison_upper_bound, iur_cmaes, iur_de, iur_es, iur_jade_bounds, iur_lj, iur_mc, iur_pso_bounds, iur_spso_bounds,
    ledger_total, DeVariant, IurReport,
};
use iurlab::problem::{ObjectiveProblem, SearchSpace};

const PI_TOLERANCE: f64 = 1e-12;
const PI_MAX_G: u64 = 6;
const PI_TIME: Duration = Duration::from_secs(1);
const THEOREM1_TIME: Duration = Duration::from_secs(60);
const THEOREM1_SAMPLES: usize = 2000;
const CROSS_CHECK_TOLERANCE: f64 = 1e-9;
const CROSS_CHECK_PRINTED: f64 = 0.418390;
const FORMULA_TIME: Duration = Duration::from_secs(10);
const LEDGER_TOLERANCE: f64 = 1e-12;
const LEDGER_GENERATIONS: u64 = 50;
const SHIFT_TOLERANCE: f64 = 1e-9;
const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;
const SWEEP_LAMBDA: usize = 10;
const SWEEP_TIME: Duration = Duration::from_secs(15 * 60);
const COMPARE_TIME: Duration = Duration::from_secs(30 * 60);

fn report(n: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {n:>2} {} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn desk_plan() -> ExperimentPlan {
    ExperimentPlan::default()
}

fn sweep_mus() -> Vec<usize> {
    (1..=SWEEP_LAMBDA).collect()
}

fn table2_configs() -> Vec<LabeledConfig> {
    vec![
        LabeledConfig::algorithm(AlgorithmId::Mc),
        LabeledConfig::algorithm(AlgorithmId::Lj),
        LabeledConfig::new("es", OptimizerConfig::es(30, 15)),
        LabeledConfig::algorithm(AlgorithmId::Cmaes),
    ]
}

const CMAES: usize = 3;
const ES: usize = 2;

fn run_sweep() -> SweepResult {
    sweep_mu_lambda(SWEEP_LAMBDA, &sweep_mus(), &desk_plan()).expect("sweep runs")
}

fn run_comparison() -> Comparison {
    compare_algorithms(&table2_configs(), &[(CMAES, ES), (1, 0)], &desk_plan()).expect("comparison runs")
}

fn sweep_csvs(s: &SweepResult) -> Vec<String> {
    vec![mean_errors_csv(&s.table), rankings_csv(&s.table), fig2_curve_csv(&s.curve)]
}

fn comparison_csvs(c: &Comparison) -> Vec<String> {
    vec![mean_errors_csv(&c.table), rankings_csv(&c.table), wilcoxon_csv(&c.tests)]
}

fn first_sweep() -> &'static (SweepResult, Duration) {
    static CELL: OnceLock<(SweepResult, Duration)> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let s = run_sweep();
        (s, start.elapsed())
    })
}

fn first_comparison() -> &'static (Comparison, Duration) {
    static CELL: OnceLock<(Comparison, Duration)> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let c = run_comparison();
        (c, start.elapsed())
    })
}

#[test]
fn criterion_01_record_entropy() {
    let start = Instant::now();
    let summary = verify_pi_lemma(PI_MAX_G).unwrap();
    let elapsed = start.elapsed();
    let worst = summary.checks.iter().map(|c| c.abs_diff).fold(0.0, f64::max);
    let pass = summary.checks.len() == PI_MAX_G as usize && worst <= PI_TOLERANCE && elapsed < PI_TIME;
    report(1, "record entropy", pass, format!("g=1..{PI_MAX_G}, max |diff| = {worst:e}, {elapsed:?}"));
}

#[test]
fn criterion_02_ratio_bounds() {
    let start = Instant::now();
    let exhaustive = verify_theorem1(3, 2, 2).unwrap();
    let sampled = verify_theorem1_sampled(FiniteEnsemble::all_functions(4, 3), 3, THEOREM1_SAMPLES, 7).unwrap();
    let elapsed = start.elapsed();
    let in_range = |lo: f64, hi: f64| lo >= 0.0 && hi <= 1.0;
    let pass = exhaustive.violations.is_empty()
        && sampled.violations.is_empty()
        && in_range(exhaustive.min_iur_observed, exhaustive.max_iur_observed)
        && in_range(sampled.min_iur_observed, sampled.max_iur_observed)
        && elapsed < THEOREM1_TIME;
    report(
        2,
        "ratio within [0, 1]",
        pass,
        format!(
            "exhaustive {} policies / {} configs, sampled {} policies, IUR in [{:.4}, {:.4}], {elapsed:?}",
            exhaustive.policies_checked,
            exhaustive.configurations_checked,
            sampled.policies_checked,
            exhaustive.min_iur_observed.min(sampled.min_iur_observed),
            exhaustive.max_iur_observed.max(sampled.max_iur_observed),
        ),
    );
}

#[test]
fn criterion_03_compare_with_best_cross_check() {
    let exact = exact_iur(&CompareWithBestPolicy, &FiniteEnsemble::injective_orderings(4), 3).unwrap();
    let formula = (pi(1).unwrap() + pi(2).unwrap()) / 24f64.log2();
    let diff = (exact.report.ratio - formula).abs();
    // The printed decimal is rounded to six places.
    let pass = diff <= CROSS_CHECK_TOLERANCE && (exact.report.ratio - CROSS_CHECK_PRINTED).abs() <= 5e-6;
    report(
        3,
        "compare-with-best exact IUR",
        pass,
        format!("exact {:.10}, formula {:.10}, |diff| = {diff:e}", exact.report.ratio, formula),
    );
}

#[test]
fn criterion_04_formula_identities() {
    let start = Instant::now();
    let mut failures = Vec::new();
    if iur_mc(100, 32.0).unwrap().ratio != 0.0 {
        failures.push("mc".to_string());
    }
    let mut cells = 0u64;
    for g in 1..=100u64 {
        for lambda in 1..=50u64 {
            let h = ((g * lambda) as f64).log2().max(1.0);
            if iur_es(g, lambda, lambda, h).unwrap().ratio != 0.0 {
                failures.push(format!("es mu=lambda g={g} lambda={lambda}"));
            }
            let bound = comparison_upper_bound(g * lambda, h).unwrap();
            for mu in 1..=lambda {
                cells += 1;
                let es = iur_es(g, lambda, mu, h).unwrap().ratio;
                let cma = iur_cmaes(g, lambda, mu, h).unwrap().ratio;
                if cma < es {
                    failures.push(format!("cmaes < es at g={g} lambda={lambda} mu={mu}"));
                }
                if es > bound || cma > bound + 1e-12 {
                    failures.push(format!("bound exceeded at g={g} lambda={lambda} mu={mu}"));
                }
            }
        }
        let h = 32.0;
        let de = iur_de(g, 40, h, DeVariant::Rand1).unwrap().ratio;
        // Same sum, accumulated over a population instead of one point.
        if (de - iur_lj(g, h).unwrap().ratio).abs() > 1e-12 {
            failures.push(format!("de rand/1 != lj at g={g}"));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < FORMULA_TIME;
    report(
        4,
        "formula identities",
        pass,
        format!("{cells} grid cells, {} failures {:?}, {elapsed:?}", failures.len(), failures.first()),
    );
}

#[test]
fn criterion_05_ledger_agreement() {
    let space = SearchSpace::cube(5, -100.0, 100.0).unwrap();
    let sphere = ObjectiveProblem::new("sphere", space, 0.0, |x: &[f64]| x.iter().map(|v| v * v).sum());
    let h = sphere.codomain_bits();
    let g = LEDGER_GENERATIONS;
    let ledger = |config: OptimizerConfig| {
        let trace = run_generations(&config, &sphere, u64::MAX, 5, g).unwrap();
        assert_eq!(trace.generations() as u64, g);
        ledger_total(&events_of(&trace), trace.evals(), h).unwrap()
    };
    let mut lines = Vec::new();
    let mut pass = true;
    let mut exact = |name: &str, got: IurReport, want: IurReport| {
        let diff = (got.ratio - want.ratio).abs();
        pass &= got.exact && diff <= LEDGER_TOLERANCE;
        lines.push(format!("{name} |diff|={diff:.1e}"));
    };
    exact("lj", ledger(OptimizerConfig::new(AlgorithmId::Lj)), iur_lj(g, h).unwrap());
    exact("es", ledger(OptimizerConfig::es(30, 15)), iur_es(g, 30, 15, h).unwrap());
    exact("cmaes", ledger(OptimizerConfig::new(AlgorithmId::Cmaes)), iur_cmaes(g, 8, 4, h).unwrap());
    exact("de/rand/1", ledger(OptimizerConfig::de(DeVariant::Rand1)), iur_de(g, 40, h, DeVariant::Rand1).unwrap());
    let mut within = |name: &str, got: IurReport, bounds: IurReport| {
        let ok = got.ratio >= bounds.ratio - LEDGER_TOLERANCE && got.ratio_upper <= bounds.ratio_upper + LEDGER_TOLERANCE;
        pass &= ok;
        lines.push(format!("{name} [{:.6}, {:.6}] in [{:.6}, {:.6}]", got.ratio, got.ratio_upper, bounds.ratio, bounds.ratio_upper));
    };
    within("pso", ledger(OptimizerConfig::new(AlgorithmId::Pso)), iur_pso_bounds(g, 40, h).unwrap());
    within("spso", ledger(OptimizerConfig::new(AlgorithmId::Spso)), iur_spso_bounds(g, 40, h).unwrap());
    within("jade", ledger(OptimizerConfig::new(AlgorithmId::Jade)), iur_jade_bounds(g, 40, 0.05, h).unwrap());
    report(5, "ledger vs closed forms", pass, lines.join("; "));
}

/// Two-sided p as the share of rank splits at least as far from the mean rank sum.
fn brute_force_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let rank = |v: f64| pooled.iter().filter(|w| **w < v).count() as f64 + 1.0;
    let ranks: Vec<f64> = pooled.iter().map(|v| rank(*v)).collect();
    let mean = a.len() as f64 * (n as f64 + 1.0) / 2.0;
    let observed = (ranks[..a.len()].iter().sum::<f64>() - mean).abs();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize == a.len() {
            total += 1;
            let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            hits += u64::from((w - mean).abs() >= observed - 1e-9);
        }
    }
    hits as f64 / total as f64
}

#[test]
fn criterion_06_wilcoxon() {
    let mut checked = 0u64;
    let mut worst: f64 = 0.0;
    for size in 2..=6usize {
        let n = 2 * size;
        for mask in 0u32..1 << n {
            if mask.count_ones() as usize != size {
                continue;
            }
            let a: Vec<f64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i as f64).collect();
            let b: Vec<f64> = (0..n).filter(|i| mask >> i & 1 == 0).map(|i| i as f64).collect();
            let p = wilcoxon_exact(&a, &b).unwrap().expect("tie-free small samples take the exact path");
            worst = worst.max((p - brute_force_p(&a, &b)).abs());
            checked += 1;
        }
    }
    let triple = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
    let pass = worst <= 1e-12 && triple == 0.1;
    report(6, "wilcoxon exact path", pass, format!("{checked} splits, max |diff| = {worst:e}, p([1,2,3],[4,5,6]) = {triple}"));
}

#[test]
fn criterion_07_mu_lambda_sweep() {
    let (sweep, elapsed) = first_sweep();
    let avg = &sweep.table.average;
    let (r1, r5, r9) = (avg[0], avg[4], avg[8]);
    let rho = sweep.spearman.unwrap_or(f64::NAN);
    let pass = r5 < r1 && r5 < r9 && rho > 0.0 && *elapsed < SWEEP_TIME;
    report(
        7,
        "mu/lambda sweep",
        pass,
        format!("avg rank mu=1: {r1:.3}, mu=5: {r5:.3}, mu=9: {r9:.3}; spearman {rho:.3}; all {avg:.2?}; {elapsed:?}"),
    );
}

#[test]
fn criterion_08_algorithm_comparison() {
    let (cmp, elapsed) = first_comparison();
    let avg = &cmp.table.average;
    let best = avg.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap();
    let strictly_best = avg.iter().enumerate().all(|(i, v)| i == CMAES || *v > avg[CMAES]);
    let wl = &cmp.win_loss[0];
    let pass = best == CMAES && strictly_best && wl.wins > wl.losses && *elapsed < COMPARE_TIME;
    report(
        8,
        "four-algorithm comparison",
        pass,
        format!(
            "avg rankings {:?} = {avg:.3?}; {} vs {} {}:{}; {} vs {} {}:{}; {elapsed:?}",
            cmp.table.configs,
            wl.first,
            wl.second,
            wl.wins,
            wl.losses,
            cmp.win_loss[1].first,
            cmp.win_loss[1].second,
            cmp.win_loss[1].wins,
            cmp.win_loss[1].losses,
        ),
    );
}

#[test]
fn criterion_09_benchmark_sanity() {
    let spec = SuiteSpec::generate(desk_plan().dimension, desk_plan().suite_seed).unwrap();
    let mut worst_value: f64 = 0.0;
    let mut worst_orthogonality: f64 = 0.0;
    for f in &spec.functions {
        if CATALOG[f.id - 1].kind != iurlab::benchmarks::FunctionKind::Composition {
            worst_value = worst_value.max(f.evaluate(f.optimum()).abs());
        }
        for c in &f.components {
            worst_orthogonality = worst_orthogonality.max(orthogonality_error(&c.rotation)).max(orthogonality_error(&c.inner));
        }
    }
    let pass = worst_value <= SHIFT_TOLERANCE && worst_orthogonality <= ORTHOGONALITY_TOLERANCE;
    report(
        9,
        "benchmark sanity",
        pass,
        format!("max |f(shift) - bias| = {worst_value:e}, max |R^T R - I| = {worst_orthogonality:e}"),
    );
}

#[test]
fn criterion_10_determinism() {
    let sweep_again = sweep_csvs(&run_sweep());
    let compare_again = comparison_csvs(&run_comparison());
    let same_sweep = sweep_csvs(&first_sweep().0) == sweep_again;
    let same_compare = comparison_csvs(&first_comparison().0) == compare_again;
    report(
        10,
        "determinism",
        same_sweep && same_compare,
        format!("sweep CSVs identical: {same_sweep}, comparison CSVs identical: {same_compare}"),
    );
}
