//! Bit-exact cross-checks between rules: `Q` against Domany dynamics read on
//! the B-class, and the synchronous rule on `H` against its two Domany
//! interleavings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::dynamics::{step_domany, step_q, step_sync_h, BoundaryMode, HexConfig, PairingScheme, SpinConfig};
use crate::lattice::{Cell, HClass, HSite, Window};

/// First disagreement between two trajectories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub seed: u64,
    pub time: u64,
    pub site: HSite,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "seed {} time {}: mismatch at {:?} site of {}", self.seed, self.time, self.site.klass, self.site.base)
    }
}

fn first_mismatch(seeds: impl IntoParallelIterator<Item = Result<Option<Mismatch>, ExperimentError>>) -> Result<Option<Mismatch>, ExperimentError> {
    let mut found: Vec<Mismatch> = seeds.into_par_iter().collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect();
    found.sort_by_key(|m| (m.seed, m.time));
    Ok(found.into_iter().next())
}

/// `Q^m(σ)` against the B-class of the A-first Domany trajectory from
/// `σ` on B at time `2m`, for `m ≤ m_max`. `None` when all agree.
pub fn star_triangle_equivalence_check(
    seeds: &[u64],
    radius: u32,
    m_max: u64,
    lambda: f64,
) -> Result<Option<Mismatch>, ExperimentError> {
    let pairing = PairingScheme::default();
    first_mismatch(seeds.par_iter().map(|&seed| {
        let w = Window::new(radius).with_margin(2 * m_max as u32);
        let mut q = SpinConfig::sample(w, lambda, seed)?;
        let mut h = HexConfig::from_b_class(&q, 1);
        for m in 0..=m_max {
            let b = h.class_config(HClass::B);
            for (j, &x) in b.layout().cells().iter().enumerate() {
                if q.get(x) != Some(b.spin_at(j)) {
                    return Ok(Some(Mismatch { seed, time: m, site: HSite::b(x) }));
                }
            }
            if m == m_max {
                break;
            }
            q = step_q(&q, &pairing, BoundaryMode::Shrinking)?;
            h = step_domany(&h, HClass::A, BoundaryMode::Shrinking)?;
            h = step_domany(&h, HClass::B, BoundaryMode::Shrinking)?;
        }
        Ok(None)
    }))
}

/// Class of `H` read from the synchronous trajectory at time `t`: readout
/// (a) takes A at odd and B at even times, readout (b) the complement.
fn readout_class(t: u64, first: bool) -> HClass {
    match (t % 2 == 1, first) {
        (true, true) | (false, false) => HClass::A,
        _ => HClass::B,
    }
}

fn compare_class(seed: u64, t: u64, k: HClass, sync: &HexConfig, dom: &HexConfig) -> Option<Mismatch> {
    let (s, d) = (sync.class(k), dom.class(k));
    sync.layout().cells().iter().enumerate().find(|&(j, _)| s[j] != d[j]).map(|(_, &x)| Mismatch {
        seed,
        time: t,
        site: HSite { base: x, klass: k },
    })
}

/// Compares the synchronous trajectory from `σ` with the A-first and
/// B-first Domany trajectories from the same `σ`, on each readout, for
/// `n ≤ n_max`.
pub fn synchronous_decomposition_check(
    initial: &[(u64, HexConfig)],
    n_max: u64,
) -> Result<Option<Mismatch>, ExperimentError> {
    first_mismatch(initial.par_iter().map(|(seed, c0)| {
        let mut sync = c0.clone();
        let mut a_first = c0.clone();
        let mut b_first = c0.clone();
        for t in 0..=n_max {
            if let Some(m) = compare_class(*seed, t, readout_class(t, true), &sync, &a_first) {
                return Ok(Some(m));
            }
            if let Some(m) = compare_class(*seed, t, readout_class(t, false), &sync, &b_first) {
                return Ok(Some(m));
            }
            if t == n_max {
                break;
            }
            let even = t % 2 == 0;
            sync = step_sync_h(&sync, BoundaryMode::Shrinking)?;
            a_first = step_domany(&a_first, if even { HClass::A } else { HClass::B }, BoundaryMode::Shrinking)?;
            b_first = step_domany(&b_first, if even { HClass::B } else { HClass::A }, BoundaryMode::Shrinking)?;
        }
        Ok(None)
    }))
}

/// Joint counts of the two synchronous readouts at the origin cell at time
/// `time`, over seeds. Readout (a) is driven by the initial B-class alone and
/// readout (b) by the initial A-class, so the counts should look independent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceSummary {
    pub seeds: usize,
    pub time: u64,
    /// `counts[i][j]`: readout (a) is `+1` iff `i == 1`, readout (b) iff `j == 1`.
    pub counts: [[u64; 2]; 2],
    /// Pearson statistic with one degree of freedom (0 when a margin is empty).
    pub chi_square: f64,
}

pub fn readout_independence(seeds: &[u64], radius: u32, time: u64, lambda: f64) -> Result<IndependenceSummary, ExperimentError> {
    let w = Window::new(radius).with_margin(time.min(radius as u64) as u32);
    let pairs: Vec<(usize, usize)> = seeds
        .par_iter()
        .map(|&seed| {
            let mut c = HexConfig::sample(w, lambda, seed)?;
            for _ in 0..time {
                c = step_sync_h(&c, BoundaryMode::Shrinking)?;
            }
            let at = |k: HClass| c.spin(HSite { base: Cell::ORIGIN, klass: k }).map(|s| (s > 0) as usize);
            Ok((at(readout_class(time, true))?, at(readout_class(time, false))?))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let mut counts = [[0u64; 2]; 2];
    for (i, j) in pairs {
        counts[i][j] += 1;
    }
    let n = seeds.len() as f64;
    let row = [counts[0][0] + counts[0][1], counts[1][0] + counts[1][1]];
    let col = [counts[0][0] + counts[1][0], counts[0][1] + counts[1][1]];
    let mut chi_square = 0.0;
    if row.iter().chain(&col).all(|&m| m > 0) {
        for i in 0..2 {
            for j in 0..2 {
                let e = row[i] as f64 * col[j] as f64 / n;
                chi_square += (counts[i][j] as f64 - e).powi(2) / e;
            }
        }
    }
    Ok(IndependenceSummary { seeds: seeds.len(), time, counts, chi_square })
}
