mod support;

use std::process::Command;

use support::{json, pdqubo, read};
use tempfile::TempDir;

#[test]
fn build_writes_model_files_and_counts() {
    let dir = TempDir::new().unwrap();
    let run = pdqubo(dir.path(), &["build", "--case", "ds"]).ok();
    assert!(run.stdout.contains("program: 19 variables, 16 constraints"));
    assert!(run
        .stdout
        .contains("qubo: 28 variables (19 program, 0 auxiliary, 9 slack)"));
    for f in ["ip.json", "qubo.json", "reformulation.json", "config-build.json"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let config = json(dir.path().join("config-build.json"));
    assert_eq!(config["command"], "build");
    assert_eq!(config["args"]["case"], "ds");
}

#[test]
fn rho_override_reaches_the_sidecar() {
    let dir = TempDir::new().unwrap();
    pdqubo(dir.path(), &["build", "--case", "il", "--rho", "50"]).ok();
    let sidecar = json(dir.path().join("reformulation.json"));
    assert_eq!(sidecar["rho"], 50.0);
    assert_eq!(sidecar["rho_source"], "user");
}

#[test]
fn output_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("env-out");
    let status = Command::new(env!("CARGO_BIN_EXE_pdqubo"))
        .args(["build", "--case", "ds"])
        .env("PDQUBO_OUT", &out)
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(out.join("qubo.json").is_file());
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let bad = bad.to_str().unwrap();
    let out = dir.path().join("out");
    let cases: Vec<Vec<&str>> = vec![
        vec!["build", "--case", "custom", "--model", bad],
        vec!["build", "--case", "custom"],
        vec!["build", "--case", "il", "--params", bad],
        vec!["build", "--case", "ds", "--params", "/nonexistent/params.json"],
        vec!["build", "--case", "il", "--rho", "-1"],
        vec!["solve", "--case", "ds", "--solver", "import"],
        vec!["solve", "--case", "ds", "--solver", "import", "--input", bad],
        vec!["solve", "--case", "ds", "--solver", "sa", "--reads", "0", "--seed", "1"],
        vec!["report", bad, "--case", "ds"],
        vec!["sweep", "--case", "ds", "--seed", "1"],
    ];
    for args in cases {
        let run = pdqubo(&out, &args);
        assert_eq!(run.code, 2, "{args:?}: {}", run.stderr);
        assert!(run.stderr.starts_with("error:"), "{args:?}");
    }
}

#[test]
fn infeasible_program_is_a_solver_failure() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.json");
    let mut p = pdqubo::ip::BinaryProgram::new();
    let x = p.add_var("x").unwrap();
    p.set_cost(x, 1.0).unwrap();
    p.add_constraint(pdqubo::ip::Constraint::new("impossible", pdqubo::ip::Sense::Eq, 2.0).term(x, 1.0))
        .unwrap();
    p.write(&model).unwrap();
    let run = pdqubo(
        &dir.path().join("out"),
        &[
            "solve",
            "--case",
            "custom",
            "--model",
            model.to_str().unwrap(),
            "--solver",
            "bb",
        ],
    );
    assert_eq!(run.code, 3, "{}", run.stderr);
}

#[test]
fn missing_seed_is_drawn_printed_and_recorded() {
    let dir = TempDir::new().unwrap();
    let run = pdqubo(
        dir.path(),
        &[
            "solve", "--case", "ds", "--solver", "sa", "--reads", "20", "--sweeps", "50",
        ],
    )
    .ok();
    let line = run
        .stdout
        .lines()
        .find(|l| l.starts_with("seed: "))
        .expect("seed printed");
    let seed: u64 = line["seed: ".len()..].parse().unwrap();
    assert_eq!(json(dir.path().join("samples.json"))["seed"], seed);
    assert_eq!(json(dir.path().join("config-solve.json"))["seed"], seed);
}

#[test]
fn enumeration_is_objective_ascending() {
    let dir = TempDir::new().unwrap();
    let run = pdqubo(dir.path(), &["solve", "--case", "il", "--solver", "bb-enumerate"]).ok();
    assert!(run.stdout.contains("feasible configurations: 84"));
    let samples = json(dir.path().join("samples.json"));
    let objs: Vec<f64> = samples["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["objective"].as_f64().unwrap())
        .collect();
    assert_eq!(objs.len(), 84);
    assert!(objs.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn oracle_reports_total_assignments() {
    let dir = TempDir::new().unwrap();
    let run = pdqubo(dir.path(), &["solve", "--case", "ds", "--solver", "oracle"]).ok();
    assert!(run.stdout.contains("feasible configurations: 36"));
    assert!(run.stdout.contains("assignments enumerated: 524288"));
}

#[test]
fn sa_records_are_decoded() {
    let dir = TempDir::new().unwrap();
    pdqubo(
        dir.path(),
        &[
            "solve", "--case", "ds", "--solver", "sa", "--seed", "2", "--reads", "50",
        ],
    )
    .ok();
    let samples = json(dir.path().join("samples.json"));
    assert_eq!(samples["metadata"]["num_reads"], 50);
    for r in samples["records"].as_array().unwrap() {
        assert!(r["objective"].is_f64());
        assert_eq!(r["feasible"].as_bool().unwrap(), r.get("config").is_some());
        assert_eq!(r["assignment"].as_str().unwrap().len(), 28);
    }
}

#[test]
fn strict_import_rejects_tampered_energies() {
    let dir = TempDir::new().unwrap();
    let sa = dir.path().join("sa");
    pdqubo(
        &sa,
        &[
            "solve", "--case", "ds", "--solver", "sa", "--seed", "2", "--reads", "20",
        ],
    )
    .ok();
    let mut samples = json(sa.join("samples.json"));
    let e = samples["records"][0]["energy"].as_f64().unwrap();
    samples["records"][0]["energy"] = (e - 5.0).into();
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, samples.to_string()).unwrap();
    let input = tampered.to_str().unwrap();
    let out = dir.path().join("out");

    let lenient = pdqubo(&out, &["solve", "--case", "ds", "--solver", "import", "--input", input]).ok();
    assert!(lenient.stderr.contains("warning: 1 record"));
    let strict = pdqubo(
        &out,
        &[
            "solve",
            "--case",
            "ds",
            "--solver",
            "import",
            "--input",
            input,
            "--recompute",
        ],
    );
    assert_eq!(strict.code, 2);
}

#[test]
fn report_needs_a_reference_for_feasibility() {
    let dir = TempDir::new().unwrap();
    let bb = dir.path().join("bb");
    pdqubo(&bb, &["solve", "--case", "ds", "--solver", "bb", "--tau", "0.003"]).ok();
    let samples = bb.join("samples.json");
    let samples = samples.to_str().unwrap();
    let out = dir.path().join("report");

    let run = pdqubo(&out, &["report", samples, "--target", "feas", "--seed", "1"]);
    assert_eq!(run.code, 2);
    let run = pdqubo(&out, &["report", samples, "--target", "opt", "--seed", "1"]).ok();
    assert!(run.stdout.contains("bb,0.003,0.003,-,"));

    let oracle = dir.path().join("oracle");
    pdqubo(
        &oracle,
        &["solve", "--case", "ds", "--solver", "oracle", "--tau", "0.01"],
    )
    .ok();
    let reference = oracle.join("samples.json");
    let run = pdqubo(
        &out,
        &[
            "report",
            samples,
            "--reference",
            reference.to_str().unwrap(),
            "--seed",
            "1",
        ],
    )
    .ok();
    assert!(run.stdout.contains("bb,0.003,0.003,-,1/36"));
    let div = json(out.join("diversity.json"));
    assert_eq!(div["runs"][0]["diversity"]["ranks_found"][0], 1);
}

#[test]
fn report_ttt_arithmetic() {
    let dir = TempDir::new().unwrap();
    // 12 optimal reads out of 1000 at tau = 0.34.
    let oracle = dir.path().join("oracle");
    pdqubo(&oracle, &["solve", "--case", "ds", "--solver", "oracle"]).ok();
    let o = json(oracle.join("samples.json"));
    let best = &o["records"][0];
    let other = &o["records"][35];
    let file = serde_json::json!({
        "solver": "synthetic",
        "seed": null,
        "tau_seconds": 0.34,
        "records": [
            {"assignment": best["assignment"], "energy": best["energy"], "objective": best["objective"],
             "feasible": true, "occurrences": 12, "config": best["config"]},
            {"assignment": other["assignment"], "energy": other["energy"], "objective": other["objective"],
             "feasible": true, "occurrences": 988, "config": other["config"]}
        ]
    });
    let path = dir.path().join("synthetic.json");
    std::fs::write(&path, file.to_string()).unwrap();
    let out = dir.path().join("report");
    pdqubo(&out, &["report", path.to_str().unwrap(), "--case", "ds", "--seed", "1"]).ok();
    let table = read(out.join("ttt.csv"));
    let row: Vec<&str> = table.lines().nth(1).unwrap().split(',').collect();
    let ttopt: f64 = row[2].parse().unwrap();
    assert!((ttopt - 129.6).abs() < 0.1, "{ttopt}");
    assert_eq!(row[3], "-");
    assert_eq!(row[4], "2/36");
}

#[test]
fn sweep_with_external_scores() {
    let dir = TempDir::new().unwrap();
    let oracle = dir.path().join("oracle");
    pdqubo(&oracle, &["solve", "--case", "ds", "--solver", "oracle"]).ok();
    let configs = support::feasible_configs(&json(oracle.join("samples.json")));
    let mut scores = String::from("config_id,score\n");
    for (k, c) in configs.iter().enumerate() {
        scores.push_str(&format!("{c},{}\n", -(k as f64)));
    }
    let path = dir.path().join("scores.csv");
    std::fs::write(&path, &scores).unwrap();
    let out = dir.path().join("sweep");
    pdqubo(&out, &["sweep", "--case", "ds", "--scores", path.to_str().unwrap()]).ok();
    let csv = read(out.join("sweep.csv"));
    assert_eq!(csv.lines().count(), 37);
    let ids: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);

    // A missing score is an input error.
    let partial: String = scores.lines().take(10).map(|l| format!("{l}\n")).collect();
    std::fs::write(&path, partial).unwrap();
    let run = pdqubo(&out, &["sweep", "--case", "ds", "--scores", path.to_str().unwrap()]);
    assert_eq!(run.code, 2);
}

#[test]
fn sweep_with_budget_one_keeps_every_row() {
    let dir = TempDir::new().unwrap();
    pdqubo(dir.path(), &["sweep", "--case", "il", "--seed", "1", "--budget", "1"]).ok();
    let csv = read(dir.path().join("sweep.csv"));
    assert_eq!(csv.lines().count(), 85);
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 5);
        assert!(f[3] == "ok" || f[3] == "continuous-infeasible");
        assert!(f[4] == "true" || f[4] == "false");
    }
}
