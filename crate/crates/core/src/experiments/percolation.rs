//! Crossings of a central square, circuits around the centre, and the size
//! of the cluster at the centre.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_slope, median, ExperimentError, Horizon};
use crate::dynamics::{BoundaryMode, Evolve, RuleKind, Spin, SpinConfig};
use crate::lattice::{Layout, Window, NO_NEIGHBOR};

/// Cells of the axis-aligned square of side `radius` centred in the window,
/// with the indices touching its left and right sides.
pub fn crossing_square(layout: &Layout) -> (Vec<bool>, Vec<usize>, Vec<usize>) {
    let half = layout.radius() as f64 / 2.0;
    let c = layout.center();
    let mut inside = vec![false; layout.len()];
    // row -> (leftmost, rightmost)
    let mut rows: std::collections::BTreeMap<i32, (usize, usize)> = Default::default();
    for (i, x) in layout.cells().iter().enumerate() {
        let (dq, dr) = ((x.q - c.q) as f64, (x.r - c.r) as f64);
        let (px, py) = (dq + dr / 2.0, dr * 3f64.sqrt() / 2.0);
        if px.abs() <= half && py.abs() <= half {
            inside[i] = true;
            let e = rows.entry(x.r).or_insert((i, i));
            // canonical order runs along rows with increasing q
            e.0 = e.0.min(i);
            e.1 = e.1.max(i);
        }
    }
    let left = rows.values().map(|r| r.0).collect();
    let right = rows.values().map(|r| r.1).collect();
    (inside, left, right)
}

/// Left-right crossing of the central square by cells of sign `sign`.
pub fn has_crossing(c: &SpinConfig, sign: Spin) -> bool {
    let layout = c.layout();
    let (inside, left, right) = crossing_square(layout);
    let mut target = vec![false; layout.len()];
    for &i in &right {
        target[i] = true;
    }
    let mut seen = vec![false; layout.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &i in &left {
        if c.spin_at(i) == sign {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        if target[i] {
            return true;
        }
        for &j in layout.neighbors(i) {
            if j == NO_NEIGHBOR {
                continue;
            }
            let j = j as usize;
            if inside[j] && !seen[j] && c.spin_at(j) == sign {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    false
}

/// A circuit of sign `sign` separating the ball of radius `inner` around the
/// centre from the window edge, inside the window. By duality this holds
/// iff no path of the opposite sign joins the two.
pub fn has_surrounding_circuit(c: &SpinConfig, sign: Spin, inner: u32) -> bool {
    let layout = c.layout();
    let mut seen = vec![false; layout.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for i in 0..layout.len() {
        if layout.depth(i) == inner + 1 && c.spin_at(i) == -sign {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        if layout.on_ring(i) {
            return false;
        }
        for &j in layout.neighbors(i) {
            if j == NO_NEIGHBOR {
                continue;
            }
            let j = j as usize;
            if !seen[j] && c.spin_at(j) == -sign && layout.depth(j) > inner {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercolationSummary {
    pub lambda: f64,
    pub radius: u32,
    pub horizon: Horizon,
    pub seeds: usize,
    /// Plus crossing at the horizon.
    pub crossing_frequency: f64,
    /// Plus crossing at every time from 0 to the horizon.
    pub crossing_all_times_frequency: f64,
    /// Circuits of both signs around the inner quarter at the horizon.
    pub circuit_frequency: f64,
}

fn evolve_to(c0: &SpinConfig, rule: RuleKind, horizon: Horizon, mut visit: impl FnMut(&SpinConfig)) -> Result<SpinConfig, ExperimentError> {
    let limit = match horizon {
        Horizon::Steps(n) => n,
        Horizon::Fixation => 10 * c0.window().radius as u64,
    };
    visit(c0);
    let mut cur = c0.clone();
    for _ in 0..limit {
        let next = cur.advance(&rule, BoundaryMode::FrozenRing)?;
        let quiet = next == cur;
        visit(&next);
        cur = next;
        if quiet {
            break;
        }
    }
    Ok(cur)
}

/// Crossing and circuit frequencies of rule `rule` (on `T`) at `horizon`,
/// frozen-ring windows of radius `radius`.
pub fn percolation_probe(
    lambda: f64,
    rule: RuleKind,
    horizon: Horizon,
    radius: u32,
    seeds: &[u64],
) -> Result<PercolationSummary, ExperimentError> {
    let w = Window::new(radius);
    let results: Vec<(bool, bool, bool)> = seeds
        .par_iter()
        .map(|&seed| {
            let c0 = SpinConfig::sample(w, lambda, seed)?;
            let mut always = true;
            let end = evolve_to(&c0, rule, horizon, |c| always &= has_crossing(c, 1))?;
            let circuits = has_surrounding_circuit(&end, 1, radius / 4) && has_surrounding_circuit(&end, -1, radius / 4);
            Ok((has_crossing(&end, 1), always, circuits))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let n = results.len().max(1) as f64;
    let freq = |f: fn(&(bool, bool, bool)) -> bool| results.iter().filter(|r| f(r)).count() as f64 / n;
    Ok(PercolationSummary {
        lambda,
        radius,
        horizon,
        seeds: seeds.len(),
        crossing_frequency: freq(|r| r.0),
        crossing_all_times_frequency: freq(|r| r.1),
        circuit_frequency: freq(|r| r.2),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSizeSummary {
    pub lambda: f64,
    pub radius: u32,
    pub horizon: Horizon,
    pub seeds: usize,
    pub mean: f64,
    pub median: f64,
    pub max: usize,
    /// Slope of `log P(|C| ≥ s)` against `log s`.
    pub tail_exponent: Option<f64>,
}

fn centre_cluster_size(c: &SpinConfig) -> usize {
    let layout = c.layout();
    let start = layout.index_of(layout.center()).expect("centre lies in the window");
    let s = c.spin_at(start);
    let mut seen = vec![false; layout.len()];
    seen[start] = true;
    let mut stack = vec![start];
    let mut size = 0;
    while let Some(i) = stack.pop() {
        size += 1;
        for &j in layout.neighbors(i) {
            if j != NO_NEIGHBOR && !seen[j as usize] && c.spin_at(j as usize) == s {
                seen[j as usize] = true;
                stack.push(j as usize);
            }
        }
    }
    size
}

/// Distribution of the size of the cluster at the window centre after rule
/// T reaches `horizon` on frozen-ring windows.
pub fn cluster_size_stats(lambda: f64, horizon: Horizon, radius: u32, seeds: &[u64]) -> Result<ClusterSizeSummary, ExperimentError> {
    let w = Window::new(radius);
    let mut sizes: Vec<usize> = seeds
        .par_iter()
        .map(|&seed| {
            let c0 = SpinConfig::sample(w, lambda, seed)?;
            Ok(centre_cluster_size(&evolve_to(&c0, RuleKind::AutomatonT, horizon, |_| {})?))
        })
        .collect::<Result<_, ExperimentError>>()?;
    sizes.sort_unstable();
    let n = sizes.len();
    let mean = sizes.iter().sum::<usize>() as f64 / n.max(1) as f64;
    let mut as_f: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    // one point per distinct size: (log s, log P(|C| >= s))
    let mut tail: Vec<(f64, f64)> = Vec::new();
    for (first, &s) in sizes.iter().enumerate() {
        if first == 0 || sizes[first - 1] != s {
            tail.push(((s as f64).ln(), ((n - first) as f64 / n as f64).ln()));
        }
    }
    Ok(ClusterSizeSummary {
        lambda,
        radius,
        horizon,
        seeds: n,
        mean,
        median: median(&mut as_f),
        max: sizes.last().copied().unwrap_or(0),
        tail_exponent: fit_slope(&tail),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Cell;

    #[test]
    fn square_fits_the_window() {
        let layout = Layout::new(Cell::ORIGIN, 16);
        let (inside, left, right) = crossing_square(&layout);
        assert_eq!(left.len(), right.len());
        assert!(left.len() >= 16);
        assert!(inside.iter().filter(|&&b| b).count() > 200);
        assert!(left.iter().all(|&i| !layout.on_ring(i)));
    }

    #[test]
    fn uniform_configurations() {
        let plus = SpinConfig::uniform(Window::new(16), 1);
        assert!(has_crossing(&plus, 1) && !has_crossing(&plus, -1));
        assert!(has_surrounding_circuit(&plus, 1, 4) && !has_surrounding_circuit(&plus, -1, 4));
        let s = percolation_probe(1.0, RuleKind::AutomatonT, Horizon::Fixation, 16, &[1, 2, 3]).unwrap();
        assert_eq!(s.crossing_frequency, 1.0);
        assert_eq!(s.crossing_all_times_frequency, 1.0);
        let c = cluster_size_stats(1.0, Horizon::Steps(0), 10, &[1, 2]).unwrap();
        assert_eq!(c.mean, Window::new(10).cell_count() as f64);
    }

    #[test]
    fn flip_swaps_crossing_sign() {
        for seed in 0..40 {
            let c = SpinConfig::sample(Window::new(20), 0.5, seed).unwrap();
            assert_eq!(has_crossing(&c, 1), has_crossing(&c.flipped(), -1));
        }
    }
}
