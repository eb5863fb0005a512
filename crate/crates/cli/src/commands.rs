use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use pdqubo::flowsheets::il::{il_continuous_solve, ContinuousStatus, IlSelection};
use pdqubo::flowsheets::SearchOptions;
use pdqubo::ip::BinaryProgram;
use pdqubo::metrics::{
    diversity, estimate_success, format_number, pareto_front, ttt, ttt_csv, ParetoPoint, SuccessEstimate, Target,
    TttRow,
};
use pdqubo::reformulate::{reformulate, ReformulateOptions, Reformulation};
use pdqubo::solvers::anneal::{simulated_annealing, SaParams};
use pdqubo::solvers::bnb::{branch_and_bound, BbMode};
use pdqubo::solvers::exhaustive::{brute_force_program, rank_configurations};
use pdqubo::solvers::{import_samples, SampleSet, SolveStatus};

use crate::case::{self, Case};
use crate::fail::{input_error, Context, Failure, Outcome, Tag, SOLVER};
use crate::{BuildArgs, CaseArgs, CaseKind, ReportArgs, SolveArgs, SolverKind, SweepArgs, TargetKind};

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        println!("seed: {s}");
        s
    })
}

fn prepare_out(out: &Path) -> Outcome {
    fs::create_dir_all(out)
        .input()
        .context(format!("creating output directory {}", out.display()))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text)
        .input()
        .context(format!("writing {}", path.display()))
}

/// Echoes the invocation so the run can be repeated from the file alone.
fn write_config<A: Serialize>(out: &Path, command: &str, args: &A, seed: Option<u64>) -> Outcome {
    let mut config = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "args": args,
    });
    if let Some(s) = seed {
        config["seed"] = json!(s);
    }
    let text = serde_json::to_string_pretty(&config).input()? + "\n";
    write_file(&out.join(format!("config-{command}.json")), &text)
}

fn load_case(args: &CaseArgs) -> Outcome<Case> {
    case::load(args.case, args.model.as_deref(), args.params.as_deref())
}

fn reformulation(program: &BinaryProgram, rho: Option<f64>) -> Outcome<Reformulation> {
    reformulate(
        program,
        &ReformulateOptions {
            rho,
            ..Default::default()
        },
    )
    .input()
}

pub fn build(out: &Path, args: &BuildArgs) -> Outcome {
    let case = load_case(&args.case)?;
    let reform = reformulation(&case.program, args.case.rho)?;
    prepare_out(out)?;
    case.program.write(&out.join("ip.json")).input()?;
    reform.qubo().write(&out.join("qubo.json")).input()?;
    reform.write_sidecar(&out.join("reformulation.json")).input()?;
    write_config(out, "build", args, None)?;

    let p = &case.program;
    println!(
        "program: {} variables, {} constraints",
        p.num_vars(),
        p.constraints().len()
    );
    println!(
        "qubo: {} variables ({} program, {} auxiliary, {} slack)",
        reform.qubo().num_vars(),
        p.num_vars(),
        reform.aux_products().len(),
        reform.num_slack_bits()
    );
    println!(
        "rho: {}{}",
        format_number(reform.rho()),
        if reform.rho_is_default() { " (default)" } else { "" }
    );
    Ok(())
}

/// Fills objective, feasibility and configuration of QUBO-space records.
fn decode_records(set: &mut SampleSet, reform: &Reformulation) -> Outcome {
    let program = reform.source();
    for r in &mut set.records {
        let d = reform.decode(&r.assignment).input()?;
        r.objective = Some(d.objective);
        r.feasible = d.feasible;
        r.config = d.feasible.then(|| program.config_key(&d.assignment));
    }
    Ok(())
}

fn solver_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: SOLVER,
        error: e.into(),
    }
}

pub fn solve(out: &Path, args: &SolveArgs) -> Outcome {
    if let Some(t) = args.tau {
        if !(t.is_finite() && t >= 0.0) {
            return Err(input_error(format!("--tau must be finite and non-negative, got {t}")));
        }
    }
    let case = load_case(&args.case)?;
    let program = &case.program;
    let needs_seed = args.solver == SolverKind::Sa;
    let seed = needs_seed.then(|| resolve_seed(args.seed));

    let mut set = match args.solver {
        SolverKind::Oracle => brute_force_program(program).solver()?,
        SolverKind::Bb => branch_and_bound(program, BbMode::Optimal).solver()?,
        SolverKind::BbEnumerate => branch_and_bound(program, BbMode::EnumerateAll).solver()?,
        SolverKind::BbPool => {
            if args.pool_size == 0 {
                return Err(input_error("--pool-size must be at least 1"));
            }
            branch_and_bound(program, BbMode::Pool(args.pool_size)).solver()?
        }
        SolverKind::Sa => {
            let reform = reformulation(program, args.case.rho)?;
            let params = SaParams {
                num_reads: args.reads,
                num_sweeps: args.sweeps,
                beta_hot: args.beta_hot,
                beta_cold: args.beta_cold,
                seed: seed.expect("seed resolved for sa"),
            };
            let mut set = simulated_annealing(reform.qubo(), &params).input()?;
            decode_records(&mut set, &reform)?;
            set.metadata.insert("rho".into(), json!(reform.rho()));
            set
        }
        SolverKind::Import => {
            let path = args
                .input
                .as_deref()
                .ok_or_else(|| input_error("--solver import requires --input"))?;
            let reform = reformulation(program, args.case.rho)?;
            let import = import_samples(path, Some(reform.qubo()), args.recompute)
                .input()
                .context(format!("importing {}", path.display()))?;
            if !import.mismatched.is_empty() {
                eprintln!(
                    "warning: {} record(s) state energies inconsistent with the model",
                    import.mismatched.len()
                );
            }
            let mut set = import.samples;
            decode_records(&mut set, &reform)?;
            set
        }
    };
    if set.seed.is_none() {
        set.seed = seed;
    }
    if let Some(t) = args.tau {
        set.tau_seconds = t;
    }

    prepare_out(out)?;
    set.write(&out.join("samples.json")).input()?;
    write_config(out, "solve", args, seed)?;

    let configs = set.feasible_configs();
    match set.best_feasible() {
        Some(best) => println!(
            "best objective: {}",
            format_number(best.objective.unwrap_or(best.energy))
        ),
        None => println!("best objective: none"),
    }
    println!(
        "feasible configurations: {} ({} records, {} reads)",
        configs.len(),
        set.records.len(),
        set.total_reads()
    );
    if let Some(total) = set.metadata.get("assignments_total") {
        println!("assignments enumerated: {total}");
    }
    println!("tau: {} s", format_number(set.tau_seconds));
    if set.status == SolveStatus::Infeasible {
        return Err(solver_failure(anyhow::anyhow!("no feasible assignment exists")));
    }
    Ok(())
}

fn read_samples(path: &Path) -> Outcome<SampleSet> {
    let text = fs::read_to_string(path)
        .input()
        .context(format!("reading {}", path.display()))?;
    SampleSet::from_json(&text)
        .input()
        .context(format!("sample file {}", path.display()))
}

#[derive(Serialize)]
struct ReportEntry {
    file: String,
    solver: String,
    tau: f64,
    optimal: Option<SuccessEstimate>,
    feasible: Option<SuccessEstimate>,
    diversity: Option<pdqubo::metrics::DiversityReport>,
}

pub fn report(out: &Path, args: &ReportArgs) -> Outcome {
    if !(args.s > 0.0 && args.s < 1.0) {
        return Err(input_error(format!("--s must lie in (0, 1), got {}", args.s)));
    }
    if args.bins == 0 {
        return Err(input_error("--bins must be at least 1"));
    }
    let sets = args
        .samples
        .iter()
        .map(|p| read_samples(p))
        .collect::<Outcome<Vec<_>>>()?;

    let oracle = match (&args.reference, args.case) {
        (Some(_), Some(_)) => return Err(input_error("give either --reference or --case, not both")),
        (Some(path), None) => Some(read_samples(path)?),
        (None, Some(kind)) => {
            let case = case::load(kind, args.model.as_deref(), args.params.as_deref())?;
            Some(brute_force_program(&case.program).solver()?)
        }
        (None, None) => None,
    };
    let ranking: Option<Vec<String>> = oracle
        .as_ref()
        .map(|o| rank_configurations(o).into_iter().map(|(k, _, _)| k).collect());
    let wants_feas = matches!(args.target, TargetKind::Feas | TargetKind::Both);
    if wants_feas && ranking.is_none() {
        return Err(input_error("the feasibility target needs --reference or --case"));
    }
    let e_star = match &oracle {
        Some(o) => o.best_feasible().map(|r| r.objective.unwrap_or(r.energy)),
        None => sets
            .iter()
            .filter_map(|s| s.best_feasible())
            .map(|r| r.objective.unwrap_or(r.energy))
            .min_by(f64::total_cmp),
    };
    let e_star = e_star.ok_or_else(|| input_error("no feasible reference solution to define the optimum"))?;
    let seed = resolve_seed(args.seed);

    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for (path, set) in args.samples.iter().zip(&sets) {
        let opt = estimate_success(set, &Target::Optimal(e_star), seed).input()?;
        let ttt_opt = ttt(set.tau_seconds, opt.p, args.s).input()?;
        let (feas, div) = match &ranking {
            Some(rank) => {
                let reference: BTreeSet<String> = rank.iter().cloned().collect();
                let div = diversity(set, rank, args.bins).input()?;
                let feas = if wants_feas {
                    Some(estimate_success(set, &Target::AllFeasible(reference), seed).input()?)
                } else {
                    None
                };
                (feas, Some(div))
            }
            None => (None, None),
        };
        let ttt_feas = match &feas {
            Some(f) if f.p > 0.0 => Some(ttt(set.tau_seconds, f.p, args.s).input()?),
            _ => None,
        };
        let (found, total) = div
            .as_ref()
            .map_or((set.feasible_configs().len(), 0), |d| (d.found, d.total));
        rows.push(TttRow {
            solver: set.solver.clone(),
            tau: set.tau_seconds,
            p_opt: opt.p,
            ttt_opt,
            ttt_feas,
            p_feas: feas.clone(),
            found,
            total,
        });
        entries.push(ReportEntry {
            file: path.display().to_string(),
            solver: set.solver.clone(),
            tau: set.tau_seconds,
            optimal: matches!(args.target, TargetKind::Opt | TargetKind::Both).then_some(opt),
            feasible: feas,
            diversity: div,
        });
    }

    let csv = ttt_csv(&rows, args.s);
    prepare_out(out)?;
    write_file(&out.join("ttt.csv"), &csv)?;
    let report = json!({
        "optimum": e_star,
        "s": args.s,
        "reference_configurations": ranking.as_ref().map(|r| r.len()),
        "runs": entries,
    });
    write_file(
        &out.join("diversity.json"),
        &(serde_json::to_string_pretty(&report).input()? + "\n"),
    )?;
    write_config(out, "report", args, Some(seed))?;
    print!("{csv}");
    Ok(())
}

/// Per-configuration seed, independent of scheduling order.
fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn read_scores(path: &Path) -> Outcome<BTreeMap<String, f64>> {
    let text = fs::read_to_string(path)
        .input()
        .context(format!("reading {}", path.display()))?;
    let mut scores = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (n == 0 && line.starts_with("config_id")) {
            continue;
        }
        let bad = || input_error(format!("{}:{}: expected `config_id,score`", path.display(), n + 1));
        let (id, score) = line.split_once(',').ok_or_else(bad)?;
        let score: f64 = score.trim().parse().map_err(|_| bad())?;
        if !score.is_finite() {
            return Err(bad());
        }
        if scores.insert(id.trim().to_string(), score).is_some() {
            return Err(input_error(format!(
                "{}: duplicate score for {}",
                path.display(),
                id.trim()
            )));
        }
    }
    Ok(scores)
}

struct SweepRow {
    config: String,
    discrete: f64,
    continuous: Option<f64>,
    status: &'static str,
}

pub fn sweep(out: &Path, args: &SweepArgs) -> Outcome {
    if args.budget == 0 || args.starts == 0 {
        return Err(input_error("--budget and --starts must be at least 1"));
    }
    let case = load_case(&args.case)?;
    let scores = args.scores.as_deref().map(read_scores).transpose()?;
    if scores.is_none() && case.kind != CaseKind::Il {
        return Err(input_error(
            "this case has no built-in continuous evaluator; supply --scores",
        ));
    }
    let seed = scores.is_none().then(|| resolve_seed(args.seed));

    let oracle = brute_force_program(&case.program).solver()?;
    let mut configs = rank_configurations(&oracle);
    configs.sort_by(|a, b| a.0.cmp(&b.0));

    let rows: Vec<SweepRow> = match (&scores, &case.il) {
        (Some(scores), _) => {
            let known: BTreeSet<&str> = configs.iter().map(|c| c.0.as_str()).collect();
            if let Some(extra) = scores.keys().find(|k| !known.contains(k.as_str())) {
                return Err(input_error(format!("score given for unknown configuration {extra}")));
            }
            configs
                .iter()
                .map(|(key, obj, _)| {
                    let s = scores
                        .get(key)
                        .ok_or_else(|| input_error(format!("no score for configuration {key}")))?;
                    Ok(SweepRow {
                        config: key.clone(),
                        discrete: *obj,
                        continuous: Some(*s),
                        status: "ok",
                    })
                })
                .collect::<Outcome<_>>()?
        }
        (None, Some(space)) => {
            let seed = seed.expect("seed resolved for the built-in evaluator");
            configs
                .par_iter()
                .enumerate()
                .map(|(k, (key, obj, _))| {
                    let sel = IlSelection::from_config_key(space, key).solver()?;
                    let opts = SearchOptions {
                        starts: args.starts,
                        budget: args.budget,
                        seed: derive_seed(seed, k as u64),
                        ..SearchOptions::default()
                    };
                    let sol = il_continuous_solve(space, &sel, &opts).solver()?;
                    Ok(SweepRow {
                        config: key.clone(),
                        discrete: *obj,
                        continuous: sol.objective.filter(|_| sol.status == ContinuousStatus::Ok),
                        status: sol.status.as_str(),
                    })
                })
                .collect::<Outcome<_>>()?
        }
        (None, None) => unreachable!("checked above"),
    };

    let points: Vec<ParetoPoint> = rows
        .iter()
        .filter_map(|r| r.continuous.map(|c| ParetoPoint::new(r.config.clone(), r.discrete, c)))
        .collect();
    let front: BTreeSet<String> = pareto_front(&points).into_iter().map(|p| p.config_id).collect();

    let mut csv = String::from("config_id,discrete_objective,continuous_objective,status,front\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.config,
            format_number(r.discrete),
            r.continuous.map_or(String::new(), format_number),
            r.status,
            front.contains(&r.config)
        ));
    }
    prepare_out(out)?;
    write_file(&out.join("sweep.csv"), &csv)?;
    write_config(out, "sweep", args, seed)?;

    let infeasible = rows.iter().filter(|r| r.continuous.is_none()).count();
    println!("configurations: {}", rows.len());
    println!("continuous-infeasible: {infeasible}");
    println!("pareto front: {}", front.len());
    for r in rows.iter().filter(|r| front.contains(&r.config)) {
        println!(
            "  {} discrete {} continuous {}",
            r.config,
            format_number(r.discrete),
            r.continuous.map_or(String::new(), format_number)
        );
    }
    Ok(())
}
