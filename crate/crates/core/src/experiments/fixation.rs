//! Time to fixation and flip-count distribution under frozen-ring dynamics.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::dynamics::{run, BoundaryMode, HexConfig, RuleKind, RunRecord, SpinConfig, StopReason};
use crate::lattice::Window;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixationSummary {
    pub rule: RuleKind,
    pub radius: u32,
    pub lambda: f64,
    /// `(seed, steps that changed the configuration, stop reason)` in seed order.
    pub per_seed: Vec<(u64, u64, StopReason)>,
    /// Seeds that did not fixate within `max_steps`.
    pub failures: Vec<u64>,
    pub max_steps_to_fixation: u64,
    /// Number of sites (over all seeds) by how often they flipped.
    pub flip_histogram: BTreeMap<u32, u64>,
}

impl FixationSummary {
    pub fn all_fixated(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs `rule` from i.i.d. initial data until fixation or `max_steps`.
pub fn fixation_stats(
    rule: RuleKind,
    radius: u32,
    lambda: f64,
    seeds: &[u64],
    max_steps: u64,
) -> Result<FixationSummary, ExperimentError> {
    let w = Window::new(radius);
    let mut records: Vec<(u64, RunRecord)> = seeds
        .par_iter()
        .map(|&seed| {
            let rec = if rule.on_h() {
                run(&HexConfig::sample(w, lambda, seed)?, rule, max_steps, BoundaryMode::FrozenRing)?.1
            } else {
                run(&SpinConfig::sample(w, lambda, seed)?, rule, max_steps, BoundaryMode::FrozenRing)?.1
            };
            Ok((seed, rec))
        })
        .collect::<Result<_, ExperimentError>>()?;
    records.sort_by_key(|r| r.0);

    let mut flip_histogram = BTreeMap::new();
    for (_, r) in &records {
        for &c in &r.flip_counts {
            *flip_histogram.entry(c).or_insert(0) += 1;
        }
    }
    let failures = records.iter().filter(|(_, r)| !r.fixated()).map(|(s, _)| *s).collect();
    let max_steps_to_fixation = records.iter().filter(|(_, r)| r.fixated()).map(|(_, r)| r.steps_taken).max().unwrap_or(0);
    Ok(FixationSummary {
        rule,
        radius,
        lambda,
        per_seed: records.into_iter().map(|(s, r)| (s, r.steps_taken, r.stop)).collect(),
        failures,
        max_steps_to_fixation,
        flip_histogram,
    })
}
