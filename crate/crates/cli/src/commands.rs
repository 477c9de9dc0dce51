//! Subcommand bodies. Each returns `Ok(())` or the failure that decides the
//! exit code; result files are written before a resource-limit failure is
//! reported.

use std::fmt;
use std::path::Path;

use perculab_core::dynamics::{run, BoundaryMode, Evolve, RunRecord, StopReason};
use perculab_core::experiments::{
    cluster_size_stats, fixation_stats, invariant_suite, percolation_probe, readout_independence, scaling_experiment, stable_edge_decay,
    star_triangle_equivalence_check, synchronous_decomposition_check, ExperimentError, ExperimentSpec, Horizon,
    InvariantOptions,
};
use perculab_core::geometry::family_distance;
use perculab_core::io::{
    read_curves, read_snapshot, write_curves, write_manifest, write_results, CurveFile, IoError, Manifest, Snapshot,
};
use perculab_core::topology::{boundaries, TopologyError};
use perculab_core::{DynamicsError, HClass, HexConfig, RuleKind, SpinConfig, Window};
use serde::Serialize;
use serde_json::json;

use crate::args::*;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Format(String),
    Violation(String),
    Resource(String),
    Other(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Other(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Format(_) => 3,
            Failure::Violation(_) => 4,
            Failure::Resource(_) => 5,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, m) = match self {
            Failure::Usage(m) => ("usage", m),
            Failure::Format(m) => ("format", m),
            Failure::Violation(m) => ("invariant violation", m),
            Failure::Resource(m) => ("resource limit", m),
            Failure::Other(m) => ("error", m),
        };
        write!(f, "{kind}: {m}")
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        if e.is_format() {
            Failure::Format(e.to_string())
        } else {
            Failure::Other(e.to_string())
        }
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::MarginExhausted { .. } => Failure::Resource(e.to_string()),
            DynamicsError::RuleLatticeMismatch { .. }
            | DynamicsError::InvalidPairing(_)
            | DynamicsError::InvalidProbability(_)
            | DynamicsError::ZeroSteps => Failure::Usage(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<TopologyError> for Failure {
    fn from(e: TopologyError) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Dynamics(d) => d.into(),
            ExperimentError::InvalidSpec(m) => Failure::Usage(m),
            other => Failure::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

pub fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Simulate(a) => simulate(cli, a),
        Command::Boundaries(a) => extract_boundaries(a),
        Command::Distance(a) => distance(a),
        Command::Experiment(e) => experiment(cli, e),
        Command::Verify(a) => verify(cli, a),
    }
}

fn manifest(cli: &Cli, name: &str, seeds: Vec<u64>) -> Manifest {
    let config = serde_json::to_value(cli).expect("the configuration serializes");
    Manifest::new(name, config, seeds)
}

fn print(v: serde_json::Value) {
    println!("{v}");
}

fn stop_name(s: &StopReason) -> String {
    match s {
        StopReason::Fixated => "fixated".into(),
        StopReason::Cycle { period } => format!("cycle-{period}"),
        StopReason::MaxSteps => "max-steps".into(),
        StopReason::MarginExhausted => "margin-exhausted".into(),
    }
}

/// Runs to `horizon`. A fixed step count is executed in full.
fn evolve<C: Evolve>(c0: &C, rule: RuleKind, horizon: Horizon, max_steps: u64, mode: BoundaryMode) -> Result<(C, Option<RunRecord>), Failure> {
    match horizon {
        Horizon::Steps(n) => {
            let mut cur = c0.clone();
            for _ in 0..n {
                cur = cur.advance(&rule, mode)?;
            }
            Ok((cur, None))
        }
        Horizon::Fixation => {
            let (c, rec) = run(c0, rule, max_steps, mode)?;
            Ok((c, Some(rec)))
        }
    }
}

fn t_config(s: &Snapshot, class: ClassArg) -> SpinConfig {
    match s {
        Snapshot::T(c) => c.clone(),
        Snapshot::H(c) => c.class_config(match class {
            ClassArg::A => HClass::A,
            ClassArg::B => HClass::B,
        }),
    }
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<(), Failure> {
    let w = &a.window;
    let mode: BoundaryMode = w.boundary.into();
    let start = match (&a.input, a.seed) {
        (Some(p), _) => match read_snapshot(p)? {
            Snapshot::T(c) => Snapshot::T(c.with_margin(w.margin)),
            Snapshot::H(c) => Snapshot::H(c.with_margin(w.margin)),
        },
        (None, Some(seed)) => {
            let window = Window::new(w.radius).with_spacing(w.delta).with_margin(w.margin);
            if a.rule.on_h() {
                Snapshot::H(HexConfig::sample(window, w.lambda, seed)?)
            } else {
                Snapshot::T(SpinConfig::sample(window, w.lambda, seed)?)
            }
        }
        (None, None) => return Err(Failure::Usage("either --seed or --input is required".into())),
    };
    let (end, rec) = match &start {
        Snapshot::T(c) => {
            let (e, r) = evolve(c, a.rule, a.steps, a.max_steps, mode)?;
            (Snapshot::T(e), r)
        }
        Snapshot::H(c) => {
            let (e, r) = evolve(c, a.rule, a.steps, a.max_steps, mode)?;
            (Snapshot::H(e), r)
        }
    };
    perculab_core::io::write_snapshot(&a.output, &end)?;
    if let Some(p) = &a.curves {
        let c = t_config(&end, ClassArg::B);
        write_curves(p, &CurveFile::from_boundaries(&boundaries(&c)?, c.window().spacing, c.time()))?;
    }
    if let Some(p) = &a.manifest {
        write_manifest(p, &manifest(cli, "simulate", a.seed.into_iter().collect()))?;
    }
    let stop = rec.as_ref().map(|r| stop_name(&r.stop));
    print(json!({
        "rule": a.rule.name(),
        "time": end.time(),
        "radius": end.window().radius,
        "steps_taken": rec.as_ref().map(|r| r.steps_taken),
        "stop": stop,
    }));
    match rec.map(|r| r.stop) {
        Some(StopReason::MaxSteps) => Err(Failure::Resource(format!("no fixation within {} steps", a.max_steps))),
        Some(StopReason::MarginExhausted) => Err(Failure::Resource("margin exhausted before fixation".into())),
        _ => Ok(()),
    }
}

fn extract_boundaries(a: &BoundariesArgs) -> Result<(), Failure> {
    let c = t_config(&read_snapshot(&a.input)?, a.class);
    let b = boundaries(&c)?;
    let file = CurveFile::from_boundaries(&b, c.window().spacing, c.time());
    write_curves(&a.output, &file)?;
    let loops = b.iter().filter(|x| x.is_loop()).count();
    print(json!({ "curves": b.len(), "loops": loops, "arcs": b.len() - loops }));
    Ok(())
}

fn distance(a: &DistanceArgs) -> Result<(), Failure> {
    let f1 = read_curves(&a.first)?;
    let f2 = read_curves(&a.second)?;
    let step = a.densify_step.unwrap_or(f1.delta / 4.0);
    let d = family_distance(&f1.to_family(), &f2.to_family(), step).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{d:.16e}");
    Ok(())
}

fn write_table<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)?;
    write_results(&dir.join(name), rows)?;
    Ok(())
}

fn finish(cli: &Cli, dir: &Path, name: &str, seeds: Vec<u64>) -> Result<(), Failure> {
    write_manifest(&dir.join("manifest.json"), &manifest(cli, name, seeds))?;
    Ok(())
}

#[derive(Serialize)]
struct FixationRow {
    seed: u64,
    steps_taken: u64,
    stop: String,
}

#[derive(Serialize)]
struct FlipRow {
    flips: u32,
    sites: u64,
}

#[derive(Serialize)]
struct CheckRow {
    seeds: usize,
    radius: u32,
    horizon: u64,
    mismatch: String,
}

/// Joint readout counts at the origin; `minus_plus` means readout (a) is -1
/// and readout (b) is +1.
#[derive(Serialize)]
struct IndependenceRow {
    seeds: usize,
    time: u64,
    minus_minus: u64,
    minus_plus: u64,
    plus_minus: u64,
    plus_plus: u64,
    chi_square: f64,
}

#[derive(Serialize)]
struct VerifyRow {
    start: String,
    steps: u64,
    fixated: bool,
    regions: usize,
    certified_cells: usize,
    stable_edges: usize,
    ancestor_checks: u64,
    violations: usize,
}

fn experiment(cli: &Cli, e: &Experiment) -> Result<(), Failure> {
    match e {
        Experiment::Scaling(a) => {
            let seeds = a.seeds.list();
            let spec = ExperimentSpec {
                rule: a.rule,
                lambda: a.lambda,
                delta_list: a.deltas.clone(),
                n_list: a.steps.clone(),
                seeds: seeds.clone(),
                observation_radius: a.observation_radius,
                max_steps: a.max_steps,
                densify_fraction: a.densify_fraction,
            };
            let mut report = scaling_experiment(&spec)?;
            if a.no_timing {
                report.rows.iter_mut().for_each(|r| r.runtime_ms = 0);
            }
            let dir = &a.output.out;
            write_table(dir, "scaling.csv", &report.rows)?;
            write_table(dir, "scaling_aborted.csv", &report.aborted)?;
            finish(cli, dir, "experiment scaling", seeds)?;
            let mut deltas = a.deltas.clone();
            deltas.sort_by(|x, y| y.total_cmp(x));
            deltas.dedup();
            for d in deltas {
                for &n in &a.steps {
                    let mut v = report.values(d, n);
                    v.sort_by(f64::total_cmp);
                    let median = if v.is_empty() { None } else { Some(v[v.len() / 2]) };
                    print(json!({ "delta": d, "n": n, "rows": v.len(), "median_hausdorff": median }));
                }
            }
            if !report.aborted.is_empty() {
                return Err(Failure::Resource(format!("{} rows aborted", report.aborted.len())));
            }
            Ok(())
        }
        Experiment::Decay(a) => {
            let seeds = a.seeds.list();
            let r = stable_edge_decay(&a.m_list, &seeds, a.radius)?;
            write_table(&a.output.out, "decay.csv", &r.rows)?;
            finish(cli, &a.output.out, "experiment decay", seeds)?;
            print(json!({ "log_slope": r.log_slope, "non_increasing": r.is_non_increasing() }));
            Ok(())
        }
        Experiment::Fixation(a) => {
            let seeds = a.seeds.list();
            let max_steps = a.max_steps.unwrap_or(10 * a.radius as u64);
            let s = fixation_stats(a.rule, a.radius, a.lambda, &seeds, max_steps)?;
            let rows: Vec<FixationRow> = s
                .per_seed
                .iter()
                .map(|(seed, steps, stop)| FixationRow { seed: *seed, steps_taken: *steps, stop: stop_name(stop) })
                .collect();
            let flips: Vec<FlipRow> = s.flip_histogram.iter().map(|(&flips, &sites)| FlipRow { flips, sites }).collect();
            write_table(&a.output.out, "fixation.csv", &rows)?;
            write_table(&a.output.out, "fixation_flips.csv", &flips)?;
            finish(cli, &a.output.out, "experiment fixation", seeds)?;
            print(json!({ "rule": a.rule.name(), "failures": s.failures, "max_steps_to_fixation": s.max_steps_to_fixation }));
            if !s.all_fixated() {
                return Err(Failure::Resource(format!("{} seeds did not fixate within {max_steps} steps", s.failures.len())));
            }
            Ok(())
        }
        Experiment::Percolation(a) => {
            let seeds = a.seeds.list();
            let s = percolation_probe(a.lambda, a.rule, a.steps, a.radius, &seeds)?;
            write_table(&a.output.out, "percolation.csv", std::slice::from_ref(&s))?;
            finish(cli, &a.output.out, "experiment percolation", seeds)?;
            print(serde_json::to_value(&s).expect("summary serializes"));
            Ok(())
        }
        Experiment::Clusters(a) => {
            let seeds = a.seeds.list();
            let rows = a
                .radii
                .iter()
                .map(|&r| cluster_size_stats(a.lambda, a.steps, r, &seeds))
                .collect::<Result<Vec<_>, _>>()?;
            write_table(&a.output.out, "clusters.csv", &rows)?;
            finish(cli, &a.output.out, "experiment clusters", seeds)?;
            for r in &rows {
                print(json!({ "radius": r.radius, "mean": r.mean, "median": r.median, "max": r.max }));
            }
            Ok(())
        }
        Experiment::Equivalence(a) => {
            let seeds = a.seeds.list();
            let m = star_triangle_equivalence_check(&seeds, a.radius, a.m_max, a.lambda)?;
            check_result(cli, &a.output.out, "equivalence", seeds, a.radius, a.m_max, m)
        }
        Experiment::Sync(a) => {
            let seeds = a.seeds.list();
            let w = Window::new(a.radius).with_margin(a.n_max.min(u32::MAX as u64) as u32);
            let initial = seeds
                .iter()
                .map(|&s| Ok((s, HexConfig::sample(w, a.lambda, s)?)))
                .collect::<Result<Vec<_>, DynamicsError>>()?;
            let m = synchronous_decomposition_check(&initial, a.n_max)?;
            let ind = readout_independence(&seeds, a.radius, a.n_max, a.lambda)?;
            let c = ind.counts;
            let row = IndependenceRow {
                seeds: ind.seeds,
                time: ind.time,
                minus_minus: c[0][0],
                minus_plus: c[0][1],
                plus_minus: c[1][0],
                plus_plus: c[1][1],
                chi_square: ind.chi_square,
            };
            write_table(&a.output.out, "sync_independence.csv", &[row])?;
            check_result(cli, &a.output.out, "sync", seeds, a.radius, a.n_max, m)
        }
    }
}

fn check_result(
    cli: &Cli,
    dir: &Path,
    name: &str,
    seeds: Vec<u64>,
    radius: u32,
    horizon: u64,
    m: Option<perculab_core::experiments::Mismatch>,
) -> Result<(), Failure> {
    let mismatch = m.as_ref().map(|m| m.to_string()).unwrap_or_default();
    let row = CheckRow { seeds: seeds.len(), radius, horizon, mismatch: mismatch.clone() };
    write_table(dir, &format!("{name}.csv"), &[row])?;
    finish(cli, dir, &format!("experiment {name}"), seeds)?;
    print(json!({ "check": name, "equal": m.is_none() }));
    match m {
        Some(_) => Err(Failure::Violation(mismatch)),
        None => Ok(()),
    }
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<(), Failure> {
    let w = &a.window;
    let opts = InvariantOptions {
        max_steps: a.steps,
        mode: w.boundary.into(),
        search_radius: a.search_radius,
        energy: !a.no_energy,
        certificates: !a.no_certificates,
        parent: !a.no_parent,
    };
    let starts: Vec<(String, SpinConfig)> = match (&a.input, a.seed, &a.seeds) {
        (Some(p), _, _) => match read_snapshot(p)? {
            Snapshot::T(c) => vec![(p.display().to_string(), c.with_margin(w.margin))],
            Snapshot::H(_) => return Err(Failure::Usage("verify needs a T snapshot".into())),
        },
        (None, seed, seeds) => {
            let list = match (seed, seeds) {
                (Some(s), _) => vec![s],
                (None, Some(l)) => l.0.clone(),
                (None, None) => return Err(Failure::Usage("one of --input, --seed, --seeds is required".into())),
            };
            let window = Window::new(w.radius).with_spacing(w.delta).with_margin(w.margin);
            list.iter()
                .map(|&s| Ok((format!("seed {s}"), SpinConfig::sample(window, w.lambda, s)?)))
                .collect::<Result<_, DynamicsError>>()?
        }
    };
    let reports = {
        use rayon::prelude::*;
        starts
            .par_iter()
            .map(|(name, c)| invariant_suite(c, &opts).map(|r| (name.clone(), r)))
            .collect::<Result<Vec<_>, _>>()?
    };
    let mut total = 0;
    for (name, r) in &reports {
        for v in &r.violations {
            eprintln!("{name}: {v}");
        }
        total += r.violations.len();
    }
    if let Some(dir) = &a.out {
        let rows: Vec<VerifyRow> = reports
            .iter()
            .map(|(name, r)| VerifyRow {
                start: name.clone(),
                steps: r.steps,
                fixated: r.fixated,
                regions: r.regions,
                certified_cells: r.certified_cells,
                stable_edges: r.stable_edges,
                ancestor_checks: r.ancestor_checks,
                violations: r.violations.len(),
            })
            .collect();
        write_table(dir, "verify.csv", &rows)?;
        let seeds = a.seed.into_iter().chain(a.seeds.iter().flat_map(|l| l.0.iter().copied())).collect();
        finish(cli, dir, "verify", seeds)?;
    }
    print(json!({
        "starts": reports.len(),
        "fixated": reports.iter().filter(|(_, r)| r.fixated).count(),
        "regions": reports.iter().map(|(_, r)| r.regions).sum::<usize>(),
        "ancestor_checks": reports.iter().map(|(_, r)| r.ancestor_checks).sum::<u64>(),
        "violations": total,
    }));
    if total > 0 {
        return Err(Failure::Violation(format!("{total} invariant violations")));
    }
    Ok(())
}
