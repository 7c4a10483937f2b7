use std::path::Path;

use serde_json::json;

use iurlab::algorithms::{events_of, AlgorithmId, OptimizerConfig};
use iurlab::benchmarks::parse_function_list;
use iurlab::exact::{
    exact_iur, verify_pi_lemma, verify_theorem1, verify_theorem1_sampled, CompareWithBestPolicy, FiniteEnsemble,
    FinitePolicy, FixedOrderPolicy, ValueIndexPolicy,
};
use iurlab::experiments::{
    all_pairs, compare_algorithms, format_float, run_cell, sweep_mu_lambda, write_comparison, write_sweep,
    ExperimentPlan, LabeledConfig, RankTable,
};
use iurlab::iur::{
    comparison_upper_bound, iur_cmaes, iur_de, iur_es, iur_jade_bounds, iur_lj, iur_mc, iur_pso_bounds,
    iur_spso_bounds, ledger_total,
};
use iurlab::{Error, Result};

use crate::manifest::{Manifest, Request, ResolvedEntry};
use crate::{
    exit, BenchArgs, Command, CompareArgs, EnsembleChoice, ExactArgs, FormulaAlgo, FormulaArgs, PlanArgs, PolicyChoice,
    SweepArgs, VerifyTarget,
};

pub fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Formula(args) => formula(&args),
        Command::Exact(args) => exact(&args),
        Command::Verify { target } => verify(&target),
        Command::Bench(args) => {
            let request = match stored_request(&args.plan, "bench")? {
                Some(r) => r,
                None => bench_request(&args)?,
            };
            execute(request, &args.plan)
        }
        Command::Sweep(args) => {
            let request = match stored_request(&args.plan, "sweep")? {
                Some(r) => r,
                None => sweep_request(&args)?,
            };
            execute(request, &args.plan)
        }
        Command::Compare(args) => {
            let request = match stored_request(&args.plan, "compare")? {
                Some(r) => r,
                None => compare_request(&args)?,
            };
            execute(request, &args.plan)
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn required<T: Copy>(value: Option<T>, flag: &str, algo: &str) -> Result<T> {
    value.ok_or_else(|| usage(format!("--{flag} is required for {algo}")))
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn formula(args: &FormulaArgs) -> Result<u8> {
    let h = args.codomain_bits;
    let name = format!("{:?}", args.algo).to_lowercase();
    let g = || required(args.g, "g", &name);
    let lambda = || required(args.lambda, "lambda", &name);
    let mu = || required(args.mu, "mu", &name);
    let s = || required(args.s, "s", &name);
    let report = match args.algo {
        FormulaAlgo::Mc => iur_mc(args.g.unwrap_or(1), h)?,
        FormulaAlgo::Lj => iur_lj(g()?, h)?,
        FormulaAlgo::Es => iur_es(g()?, lambda()?, mu()?, h)?,
        FormulaAlgo::Cmaes => iur_cmaes(g()?, lambda()?, mu()?, h)?,
        FormulaAlgo::Pso => iur_pso_bounds(g()?, s()?, h)?,
        FormulaAlgo::Spso => iur_spso_bounds(g()?, s()?, h)?,
        FormulaAlgo::De => iur_de(g()?, s()?, h, args.variant.parse()?)?,
        FormulaAlgo::Jade => iur_jade_bounds(g()?, s()?, required(args.p, "p", &name)?, h)?,
        FormulaAlgo::Bound => {
            let m = required(args.m, "m", &name)?;
            print_json(&json!({
                "algorithm": "comparison_bound",
                "m": m,
                "h_bits": h,
                "upper_bound": comparison_upper_bound(m, h)?,
            }))?;
            return Ok(0);
        }
    };
    print_json(&report)?;
    Ok(0)
}

fn exact(args: &ExactArgs) -> Result<u8> {
    let ensemble = match args.ensemble {
        EnsembleChoice::Injective => FiniteEnsemble::injective_orderings(args.m),
        EnsembleChoice::All => FiniteEnsemble::all_functions(args.m, required(args.n, "n", "the all-functions ensemble")?),
    };
    let policy: &dyn FinitePolicy = match args.policy {
        PolicyChoice::CompareWithBest => &CompareWithBestPolicy,
        PolicyChoice::FixedOrder => &FixedOrderPolicy,
        PolicyChoice::ValueIndex => &ValueIndexPolicy,
    };
    print_json(&exact_iur(policy, &ensemble, args.g)?)?;
    Ok(0)
}

fn verify(target: &VerifyTarget) -> Result<u8> {
    let clean = match *target {
        VerifyTarget::Theorem1 {
            max_m,
            max_n,
            max_g,
            samples,
            sample_m,
            sample_n,
            sample_g,
            sample_seed,
        } => {
            let exhaustive = verify_theorem1(max_m, max_n, max_g)?;
            let sampled = if samples > 0 {
                let ensemble = FiniteEnsemble::all_functions(sample_m, sample_n);
                Some(verify_theorem1_sampled(ensemble, sample_g, samples, sample_seed)?)
            } else {
                None
            };
            let violations = exhaustive.violations.len() + sampled.as_ref().map_or(0, |s| s.violations.len());
            print_json(&json!({ "exhaustive": exhaustive, "sampled": sampled, "violations": violations }))?;
            violations == 0
        }
        VerifyTarget::Pi { max_g } => {
            let summary = verify_pi_lemma(max_g)?;
            print_json(&summary)?;
            summary.violations.is_empty()
        }
    };
    Ok(if clean { 0 } else { exit::VIOLATION })
}

/// The request stored in `--from-manifest`, checked against the invoked subcommand.
fn stored_request(flags: &PlanArgs, command: &str) -> Result<Option<Request>> {
    let Some(path) = &flags.from_manifest else {
        return Ok(None);
    };
    let request = Manifest::read(path)?.request;
    if request.name() != command {
        return Err(usage(format!(
            "manifest {} holds a `{}` request, not `{command}`",
            path.display(),
            request.name()
        )));
    }
    Ok(Some(request))
}

fn plan_from(flags: &PlanArgs, functions: Option<&str>) -> Result<ExperimentPlan> {
    let defaults = ExperimentPlan::default();
    Ok(ExperimentPlan {
        dimension: flags.dim.unwrap_or(defaults.dimension),
        budget_multiplier: flags.budget_multiplier.unwrap_or(defaults.budget_multiplier),
        runs: flags.runs.unwrap_or(defaults.runs),
        base_seed: flags.seed.unwrap_or(defaults.base_seed),
        suite_seed: flags.suite_seed.unwrap_or(defaults.suite_seed),
        functions: match functions.or(flags.functions.as_deref()) {
            Some(text) => parse_function_list(text).map_err(|e| usage(e.to_string()))?,
            None => defaults.functions,
        },
        jobs: None,
    })
}

fn algorithm(text: &str) -> Result<AlgorithmId> {
    text.parse().map_err(|e: Error| usage(e.to_string()))
}

fn config_file(path: &Path) -> Result<LabeledConfig> {
    let config = OptimizerConfig::from_json(&std::fs::read_to_string(path)?)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| config.algorithm.as_str().to_string());
    Ok(LabeledConfig::new(label, config))
}

fn bench_request(args: &BenchArgs) -> Result<Request> {
    let mut labeled = match (&args.algo, &args.config) {
        (_, Some(path)) => config_file(path)?,
        (Some(id), None) => LabeledConfig::algorithm(algorithm(id)?),
        (None, None) => return Err(usage("bench needs --algo or --config")),
    };
    let config = &mut labeled.config;
    config.lambda = args.lambda.or(config.lambda);
    config.mu = args.mu.or(config.mu);
    config.s = args.s.or(config.s);
    Ok(Request::Bench {
        plan: plan_from(&args.plan, args.function.as_deref())?,
        config: labeled,
        traces: args.traces,
    })
}

fn sweep_request(args: &SweepArgs) -> Result<Request> {
    let lambda = args.lambda.unwrap_or(10);
    let mus = if args.mus.is_empty() { (1..=lambda).collect() } else { args.mus.clone() };
    Ok(Request::Sweep {
        plan: plan_from(&args.plan, None)?,
        lambda,
        mus,
    })
}

fn compare_request(args: &CompareArgs) -> Result<Request> {
    let mut configs = args
        .algos
        .iter()
        .map(|id| algorithm(id).map(LabeledConfig::algorithm))
        .collect::<Result<Vec<_>>>()?;
    for path in &args.configs {
        configs.push(config_file(path)?);
    }
    let pairs = args
        .pairs
        .iter()
        .map(|p| match p.split_once(':') {
            Some((a, b)) => Ok((a.trim().to_string(), b.trim().to_string())),
            None => Err(usage(format!("pair `{p}` is not of the form first:second"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Request::Compare {
        plan: plan_from(&args.plan, None)?,
        configs,
        pairs,
    })
}

fn resolve_all(configs: &[LabeledConfig], d: usize) -> Result<Vec<ResolvedEntry>> {
    configs
        .iter()
        .map(|c| {
            let config = c.config.resolve(d)?;
            Ok(ResolvedEntry {
                label: c.label.clone(),
                config,
            })
        })
        .collect()
}

fn pair_indices(configs: &[LabeledConfig], pairs: &[(String, String)]) -> Result<Vec<(usize, usize)>> {
    if pairs.is_empty() {
        return Ok(all_pairs(configs.len()));
    }
    let index = |label: &str| {
        configs
            .iter()
            .position(|c| c.label == label)
            .ok_or_else(|| usage(format!("pair names unknown configuration `{label}`")))
    };
    pairs.iter().map(|(a, b)| Ok((index(a)?, index(b)?))).collect()
}

fn file_names(paths: &[std::path::PathBuf]) -> Vec<String> {
    paths
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect()
}

fn execute(mut request: Request, flags: &PlanArgs) -> Result<u8> {
    request.plan_mut().validate()?;
    let mut plan = request.plan().clone();
    plan.jobs = flags.jobs;
    let out = flags.out.as_path();
    let (resolved, outputs) = match &request {
        Request::Bench { config, traces, .. } => {
            let resolved = resolve_all(std::slice::from_ref(config), plan.dimension)?;
            (resolved, bench(&plan, config, *traces, out)?)
        }
        Request::Sweep { lambda, mus, .. } => {
            let configs: Vec<LabeledConfig> = mus
                .iter()
                .map(|&mu| LabeledConfig::new(format!("es_mu{mu}"), OptimizerConfig::es(*lambda, mu)))
                .collect();
            let resolved = resolve_all(&configs, plan.dimension)?;
            let sweep = sweep_mu_lambda(*lambda, mus, &plan)?;
            let paths = write_sweep(out, &sweep)?;
            print_table(&sweep.table);
            match sweep.spearman {
                Some(rho) => println!("spearman(avg ranking, -log2 C(lambda,mu)/lambda) = {rho:.4}"),
                None => println!("spearman undefined (constant series)"),
            }
            (resolved, file_names(&paths))
        }
        Request::Compare { configs, pairs, .. } => {
            let resolved = resolve_all(configs, plan.dimension)?;
            let comparison = compare_algorithms(configs, &pair_indices(configs, pairs)?, &plan)?;
            let paths = write_comparison(out, &comparison)?;
            print_table(&comparison.table);
            for wl in &comparison.win_loss {
                println!("{} vs {}: {} significant wins, {} losses", wl.first, wl.second, wl.wins, wl.losses);
            }
            (resolved, file_names(&paths))
        }
    };
    Manifest::new(request, resolved, outputs).write(out)?;
    Ok(0)
}

fn print_table(table: &RankTable) {
    let width = table.configs.iter().map(String::len).max().unwrap_or(0).max(12);
    print!("{:<8}", "function");
    for c in &table.configs {
        print!(" {c:>width$}");
    }
    println!();
    for (f, name) in table.functions.iter().enumerate() {
        print!("{name:<8}");
        for e in &table.mean_errors[f] {
            print!(" {:>width$}", format_float(*e));
        }
        println!();
    }
    print!("{:<8}", "avg rank");
    for r in &table.average {
        print!(" {r:>width$.3}");
    }
    println!();
}

/// Writes `bench_runs.csv` (one row per run), `bench_summary.csv` (one row per function)
/// and, with `traces`, `traces/<function>_run<r>.csv`.
fn bench(plan: &ExperimentPlan, labeled: &LabeledConfig, traces: bool, out: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(out)?;
    let problems = plan.problems()?;
    let mut runs = csv::Writer::from_writer(Vec::new());
    let mut summary = csv::Writer::from_writer(Vec::new());
    runs.write_record(["function", "config", "run", "seed", "evals", "final_error", "iur", "iur_upper"])
        .map_err(csv_error)?;
    summary.write_record(["function", "config", "mean_error", "best_error", "worst_error"])
        .map_err(csv_error)?;
    let mut outputs = vec!["bench_runs.csv".to_string(), "bench_summary.csv".to_string()];
    println!("{:<8} {:>14} {:>14} {:>14}", "function", "mean error", "best", "worst");
    for problem in &problems {
        let cell = run_cell(&labeled.config, problem, plan)?;
        let mut errors = Vec::with_capacity(cell.len());
        for (r, trace) in cell.iter().enumerate() {
            let error = trace.final_error().unwrap_or(f64::INFINITY);
            let ledger = ledger_total(&events_of(trace), trace.evals(), problem.codomain_bits())?;
            runs.write_record([
                problem.name().to_string(),
                labeled.label.clone(),
                r.to_string(),
                trace.seed.to_string(),
                trace.evals().to_string(),
                format_float(error),
                format_float(ledger.ratio),
                format_float(ledger.ratio_upper),
            ])
            .map_err(csv_error)?;
            if traces {
                let name = format!("traces/{}_run{r}.csv", problem.name());
                std::fs::create_dir_all(out.join("traces"))?;
                std::fs::write(out.join(&name), trace.to_csv())?;
                outputs.push(name);
            }
            errors.push(error);
        }
        let mean = errors.iter().sum::<f64>() / errors.len() as f64;
        let best = errors.iter().copied().fold(f64::INFINITY, f64::min);
        let worst = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        summary
            .write_record([
                problem.name().to_string(),
                labeled.label.clone(),
                format_float(mean),
                format_float(best),
                format_float(worst),
            ])
            .map_err(csv_error)?;
        println!(
            "{:<8} {:>14} {:>14} {:>14}",
            problem.name(),
            format_float(mean),
            format_float(best),
            format_float(worst)
        );
    }
    for (name, writer) in [("bench_runs.csv", runs), ("bench_summary.csv", summary)] {
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        std::fs::write(out.join(name), bytes)?;
    }
    Ok(outputs)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(ids: &[AlgorithmId]) -> Vec<LabeledConfig> {
        ids.iter().map(|id| LabeledConfig::algorithm(*id)).collect()
    }

    #[test]
    fn pairs_resolve_by_label() {
        let configs = labeled(&[AlgorithmId::Mc, AlgorithmId::Lj, AlgorithmId::Cmaes]);
        let pairs = vec![("cmaes".to_string(), "mc".to_string())];
        assert_eq!(pair_indices(&configs, &pairs).unwrap(), vec![(2, 0)]);
        assert_eq!(pair_indices(&configs, &[]).unwrap(), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(pair_indices(&configs, &[("es".into(), "mc".into())]).is_err());
    }

    #[test]
    fn plan_flags_override_defaults_only_where_given() {
        let flags = PlanArgs {
            dim: Some(3),
            budget_multiplier: None,
            runs: None,
            seed: Some(1),
            suite_seed: None,
            functions: Some("f2-f4".into()),
            jobs: Some(4),
            out: "unused".into(),
            from_manifest: None,
        };
        let plan = plan_from(&flags, None).unwrap();
        let defaults = ExperimentPlan::default();
        assert_eq!((plan.dimension, plan.base_seed, plan.functions.clone()), (3, 1, vec![2, 3, 4]));
        assert_eq!((plan.runs, plan.budget_multiplier, plan.jobs), (defaults.runs, defaults.budget_multiplier, None));
        assert_eq!(plan_from(&flags, Some("f7")).unwrap().functions, vec![7]);
    }
}
