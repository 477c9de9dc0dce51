//! Seeded Monte-Carlo suites: scaling of boundary families, stable-edge
//! decay, fixation, crossings and cluster sizes, and bit-exact equivalence
//! checks between the automata.
//!
//! Every function is a pure function of its arguments. Seeds run in parallel
//! and results come back sorted.

mod decay;
mod equivalence;
mod fixation;
mod invariants;
mod percolation;
mod scaling;

pub use decay::{segment_by_diameter, stable_edge_decay, DecayReport, DecayRow};
pub use equivalence::{
    readout_independence, star_triangle_equivalence_check, synchronous_decomposition_check, IndependenceSummary, Mismatch,
};
pub use fixation::{fixation_stats, FixationSummary};
pub use invariants::{ancestor_check, invariant_suite, InvariantOptions, InvariantReport, InvariantViolation};
pub use percolation::{
    cluster_size_stats, crossing_square, has_crossing, has_surrounding_circuit, percolation_probe, ClusterSizeSummary,
    PercolationSummary,
};
pub use scaling::{observation_window, scaling_experiment, AbortedRow, ScalingReport, ScalingRow};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dynamics::{DynamicsError, RuleKind};
use crate::geometry::GeometryError;
use crate::topology::TopologyError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
}

/// A target time: a fixed number of steps, or fixation.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Horizon {
    Steps(u64),
    Fixation,
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Horizon::Steps(n) => write!(f, "{n}"),
            Horizon::Fixation => f.write_str("fixation"),
        }
    }
}

impl FromStr for Horizon {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "fixation" {
            return Ok(Horizon::Fixation);
        }
        s.parse().map(Horizon::Steps).map_err(|_| format!("expected a step count or \"fixation\", got {s:?}"))
    }
}

impl Serialize for Horizon {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Horizon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parameters of a scaling run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub rule: RuleKind,
    pub lambda: f64,
    pub delta_list: Vec<f64>,
    pub n_list: Vec<Horizon>,
    pub seeds: Vec<u64>,
    /// Radius of the observation ball in continuum units.
    pub observation_radius: f64,
    /// Cap on executed steps when the horizon is fixation.
    pub max_steps: u64,
    /// Densification step as a fraction of `delta`.
    pub densify_fraction: f64,
}

impl ExperimentSpec {
    pub fn new(delta_list: Vec<f64>, n_list: Vec<Horizon>, seeds: Vec<u64>) -> Self {
        ExperimentSpec {
            rule: RuleKind::AutomatonT,
            lambda: 0.5,
            delta_list,
            n_list,
            seeds,
            observation_radius: 1.0,
            max_steps: 10_000,
            densify_fraction: 0.25,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::InvalidSpec(m.into()));
        if self.delta_list.is_empty() || self.n_list.is_empty() || self.seeds.is_empty() {
            return bad("delta_list, n_list and seeds must be non-empty");
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad("lambda must lie in [0, 1]");
        }
        if self.delta_list.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return bad("every delta must be positive");
        }
        if !(self.observation_radius > 0.0 && self.observation_radius.is_finite()) {
            return bad("observation_radius must be positive");
        }
        if !(self.densify_fraction > 0.0) {
            return bad("densify_fraction must be positive");
        }
        if self.rule.on_h() {
            return bad("scaling runs use a rule on the triangular lattice");
        }
        Ok(())
    }
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub(crate) fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
