//! Distance between the boundary families at time 0 and at later times, for
//! a sequence of lattice spacings over a fixed observation ball.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentError, ExperimentSpec, Horizon};
use crate::dynamics::{BoundaryMode, Evolve, SpinConfig};
use crate::geometry::{family_distance, CurveFamily};
use crate::lattice::{Cell, Window};
use crate::topology::{boundaries, stability_certificates, unsatisfied_edges, DEFAULT_SEARCH_RADIUS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub delta: f64,
    pub n: Horizon,
    pub seed: u64,
    /// Steps actually executed (smaller than `n` when fixation came first).
    pub steps: u64,
    pub curves_initial: usize,
    pub curves_final: usize,
    pub hausdorff: f64,
    /// Fraction of time-0 boundary edges that are certified stable.
    pub stable_edge_coverage: f64,
    pub runtime_ms: u64,
}

/// A row that could not be produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbortedRow {
    pub delta: f64,
    pub n: Horizon,
    pub seed: u64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    pub aborted: Vec<AbortedRow>,
}

impl ScalingReport {
    /// Hausdorff values at `(delta, n)` in seed order.
    pub fn values(&self, delta: f64, n: Horizon) -> Vec<f64> {
        self.rows.iter().filter(|r| r.delta == delta && r.n == n).map(|r| r.hausdorff).collect()
    }
}

/// Frozen-ring window at spacing `delta` whose inscribed disc contains the
/// observation ball, with one spare ring.
pub fn observation_window(observation_radius: f64, delta: f64) -> Window {
    let r = (2.0 * observation_radius / (3f64.sqrt() * delta)).ceil() as u32 + 1;
    Window::new(r).with_spacing(delta)
}

fn stable_coverage(c: &SpinConfig) -> f64 {
    let edges = unsatisfied_edges(c);
    if edges.is_empty() {
        return 0.0;
    }
    let region: Vec<Cell> = edges.iter().flat_map(|e| [e.a, e.b]).collect();
    let certs = stability_certificates(c, Some(&region), DEFAULT_SEARCH_RADIUS);
    certs.stable_edges(c).len() as f64 / edges.len() as f64
}

type RowResult = Result<ScalingRow, AbortedRow>;

fn run_seed(spec: &ExperimentSpec, delta: f64, seed: u64) -> Result<Vec<RowResult>, ExperimentError> {
    let started = Instant::now();
    let w = observation_window(spec.observation_radius, delta);
    let c0 = SpinConfig::sample(w, spec.lambda, seed)?;
    let f0 = CurveFamily::from_boundaries(&boundaries(&c0)?, delta, 0);
    let coverage = stable_coverage(&c0);
    let step = delta * spec.densify_fraction;

    let mut horizons = spec.n_list.clone();
    horizons.sort();
    horizons.dedup();
    let mut out = Vec::new();
    let mut cur = c0;
    let mut steps = 0u64;
    let mut fixated = false;
    let mut lap = started;
    for n in horizons {
        let limit = match n {
            Horizon::Steps(k) => k,
            Horizon::Fixation => spec.max_steps,
        };
        while !fixated && steps < limit {
            let next = cur.advance(&spec.rule, BoundaryMode::FrozenRing)?;
            steps += 1;
            fixated = next == cur;
            cur = next;
        }
        let abort = |reason: String| AbortedRow { delta, n, seed, reason };
        if n == Horizon::Fixation && !fixated {
            out.push(Err(abort(format!("no fixation within {} steps", spec.max_steps))));
            continue;
        }
        let fam = CurveFamily::from_boundaries(&boundaries(&cur)?, delta, steps);
        let hausdorff = family_distance(&f0, &fam, step)?;
        let now = Instant::now();
        out.push(Ok(ScalingRow {
            delta,
            n,
            seed,
            steps,
            curves_initial: f0.len(),
            curves_final: fam.len(),
            hausdorff,
            stable_edge_coverage: coverage,
            runtime_ms: now.duration_since(lap).as_millis() as u64,
        }));
        lap = now;
    }
    Ok(out)
}

/// Runs every `(delta, n, seed)` of `spec`. Rows come back sorted by
/// `(delta, n, seed)`; `runtime_ms` is the only field that varies between
/// identical runs.
pub fn scaling_experiment(spec: &ExperimentSpec) -> Result<ScalingReport, ExperimentError> {
    spec.validate()?;
    let jobs: Vec<(f64, u64)> = spec.delta_list.iter().flat_map(|&d| spec.seeds.iter().map(move |&s| (d, s))).collect();
    let results: Vec<Vec<RowResult>> =
        jobs.par_iter().map(|&(d, s)| run_seed(spec, d, s)).collect::<Result<_, ExperimentError>>()?;
    let mut report = ScalingReport::default();
    for r in results.into_iter().flatten() {
        match r {
            Ok(row) => report.rows.push(row),
            Err(a) => report.aborted.push(a),
        }
    }
    report.rows.sort_by(|a, b| a.delta.total_cmp(&b.delta).then(a.n.cmp(&b.n)).then(a.seed.cmp(&b.seed)));
    report.aborted.sort_by(|a, b| a.delta.total_cmp(&b.delta).then(a.n.cmp(&b.n)).then(a.seed.cmp(&b.seed)));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n_list: Vec<Horizon>) -> ExperimentSpec {
        ExperimentSpec::new(vec![0.25, 0.125], n_list, vec![3, 1, 2])
    }

    #[test]
    fn time_zero_distance_vanishes() {
        let r = scaling_experiment(&small(vec![Horizon::Steps(0)])).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert!(r.rows.iter().all(|row| row.hausdorff == 0.0 && row.steps == 0));
    }

    #[test]
    fn all_plus_has_empty_families() {
        let spec = ExperimentSpec { lambda: 1.0, ..small(vec![Horizon::Steps(3), Horizon::Fixation]) };
        let r = scaling_experiment(&spec).unwrap();
        assert!(r.rows.iter().all(|row| row.hausdorff == 0.0 && row.curves_initial == 0));
    }

    #[test]
    fn rows_are_sorted_and_reproducible() {
        let spec = small(vec![Horizon::Fixation, Horizon::Steps(2)]);
        let strip = |r: ScalingReport| r.rows.into_iter().map(|x| ScalingRow { runtime_ms: 0, ..x }).collect::<Vec<_>>();
        let a = strip(scaling_experiment(&spec).unwrap());
        let b = strip(scaling_experiment(&spec).unwrap());
        assert_eq!(a, b);
        let keys: Vec<(u64, Horizon)> = a.iter().filter(|r| r.delta == 0.25).map(|r| (r.seed, r.n)).collect();
        assert_eq!(keys[0], (1, Horizon::Steps(2)));
        assert_eq!(keys[3], (1, Horizon::Fixation));
        assert!(a.iter().all(|r| r.hausdorff >= 0.0 && (0.0..=1.0).contains(&r.stable_edge_coverage)));
    }

    #[test]
    fn window_covers_ball() {
        for d in [1.0 / 8.0, 1.0 / 64.0] {
            let w = observation_window(1.0, d);
            assert!(w.radius as f64 * d * 3f64.sqrt() / 2.0 >= 1.0);
        }
    }
}
