use std::path::Path;
use std::process::{Command, Output};

fn perculab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perculab")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn simulate_boundaries_distance_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let s0 = dir.path().join("s0.snap");
    let s1 = dir.path().join("s1.snap");
    let c0 = dir.path().join("c0.curves");
    let c1 = dir.path().join("c1.curves");
    let man = dir.path().join("m.json");

    let o = perculab(&["simulate", "--radius", "24", "--seed", "5", "--steps", "0", "--output", path(&s0), "--delta", "0.125"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = perculab(&[
        "simulate", "--input", path(&s0), "--steps", "fixation", "--output", path(&s1), "--curves", path(&c1), "--manifest",
        path(&man),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["stop"], "fixated");

    let o = perculab(&["boundaries", "--input", path(&s0), "--output", path(&c0)]);
    assert_eq!(code(&o), 0);
    let counts: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(counts["curves"].as_u64().unwrap() > 0);

    let o = perculab(&["distance", path(&c0), path(&c0)]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim().parse::<f64>().unwrap(), 0.0);
    let o = perculab(&["distance", path(&c0), path(&c1)]);
    assert_eq!(code(&o), 0);
    let d: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap();
    assert!(d > 0.0 && d <= std::f64::consts::FRAC_PI_2);

    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&man).unwrap()).unwrap();
    assert_eq!(m["tool"], "perculab");
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["config"]["command"]["Simulate"]["steps"], "fixation");
}

#[test]
fn simulation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (p, threads) in [(&a, "1"), (&b, "2")] {
        let o = perculab(&["--threads", threads, "simulate", "--rule", "Q", "--radius", "16", "--seed", "3", "--output", path(p)]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["simulate", "--lambda", "1.5", "--seed", "1", "--output", "x"][..],
        &["simulate", "--radius", "2", "--seed", "1", "--output", "x"],
        &["simulate", "--seed", "1"],
        &["simulate", "--seed", "1", "--output", "x", "--frobnicate"],
        &["experiment", "decay", "--seed", "1", "--seeds", "2,3", "--out", "x"],
        &["nonsense"],
    ] {
        let o = perculab(args);
        assert_eq!(code(&o), 2, "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(err.trim().lines().count(), 1, "{err}");
    }
    let o = perculab(&["--help"]);
    assert_eq!(code(&o), 0);
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("t.snap");
    perculab(&["simulate", "--radius", "6", "--seed", "1", "--steps", "0", "--output", path(&snap)]);
    // rule on the wrong lattice
    let o = perculab(&["simulate", "--input", path(&snap), "--rule", "sync", "--output", path(&snap)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn format_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("t.snap");
    perculab(&["simulate", "--radius", "6", "--seed", "1", "--steps", "0", "--output", path(&snap)]);
    let text = std::fs::read_to_string(&snap).unwrap();
    std::fs::write(&snap, &text[..text.len() / 2]).unwrap();
    let o = perculab(&["boundaries", "--input", path(&snap), "--output", path(&dir.path().join("c"))]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let bad = dir.path().join("bad.curves");
    std::fs::write(&bad, "perculab-curves v1 delta=1 time=0 count=1\n").unwrap();
    assert_eq!(code(&perculab(&["distance", path(&bad), path(&bad)])), 3);
}

#[test]
fn resource_limits_exit_5() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = perculab(&["simulate", "--radius", "16", "--seed", "1", "--max-steps", "1", "--output", path(&out)]);
    assert_eq!(code(&o), 5);
    assert!(out.exists());
    let o = perculab(&[
        "simulate", "--radius", "16", "--seed", "1", "--steps", "5", "--boundary", "shrinking", "--margin", "2", "--output",
        path(&out),
    ]);
    assert_eq!(code(&o), 5);
    let o = perculab(&[
        "simulate", "--radius", "16", "--seed", "1", "--steps", "5", "--boundary", "shrinking", "--margin", "5", "--output",
        path(&out),
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn verify_passes_on_random_starts() {
    let dir = tempfile::tempdir().unwrap();
    let o = perculab(&["verify", "--seeds", "0..3", "--radius", "16", "--steps", "40", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert!(table.starts_with("start,steps,fixated,regions,certified_cells,stable_edges,ancestor_checks,violations\n"));
    assert_eq!(table.lines().count(), 4);
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn experiments_write_tables_and_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name);
    let runs: Vec<(Vec<&str>, &str, &str)> = vec![
        (vec!["experiment", "decay", "--radius", "24", "--seeds", "0..3", "--m", "2,4"], "decay", "M,trials,failures,frequency,rate_estimate"),
        (vec!["experiment", "fixation", "--radius", "12", "--seeds", "0..3", "--rule", "domany-a"], "fixation", "seed,steps_taken,stop"),
        (vec!["experiment", "percolation", "--radius", "12", "--seeds", "0..4"], "percolation", "lambda,radius,horizon,seeds,crossing_frequency,crossing_all_times_frequency,circuit_frequency"),
        (vec!["experiment", "clusters", "--radius", "8,12", "--seeds", "0..4", "--steps", "fixation"], "clusters", "lambda,radius,horizon,seeds,mean,median,max,tail_exponent"),
        (vec!["experiment", "equivalence", "--radius", "12", "--m-max", "3", "--seeds", "0..3"], "equivalence", "seeds,radius,horizon,mismatch"),
        (vec!["experiment", "sync", "--radius", "12", "--n-max", "6", "--seeds", "0..3"], "sync", "seeds,radius,horizon,mismatch"),
    ];
    for (args, name, header) in runs {
        let out = d(name);
        let mut full = args.clone();
        full.extend(["--out", path(&out)]);
        let o = perculab(&full);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let table = std::fs::read_to_string(out.join(format!("{name}.csv"))).unwrap();
        assert_eq!(table.lines().next().unwrap(), header, "{name}");
        let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["command"], format!("experiment {name}"));
        assert!(!m["seeds"].as_array().unwrap().is_empty());
    }
    let ind = std::fs::read_to_string(d("sync").join("sync_independence.csv")).unwrap();
    assert!(ind.starts_with("seeds,time,minus_minus,minus_plus,plus_minus,plus_plus,chi_square\n"));
}

#[test]
fn scaling_tables_are_byte_identical_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for (k, threads) in ["1", "2"].iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let o = perculab(&[
            "--threads", threads, "experiment", "scaling", "--deltas", "0.25,0.125", "--steps", "0,3,fixation", "--seeds",
            "0..3", "--no-timing", "--out", path(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        tables.push(std::fs::read(out.join("scaling.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    let text = String::from_utf8(tables.remove(0)).unwrap();
    assert!(text.starts_with("delta,n,seed,steps,curves_initial,curves_final,hausdorff,stable_edge_coverage,runtime_ms\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 3);
}
