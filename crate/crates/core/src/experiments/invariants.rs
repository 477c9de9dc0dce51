//! Trajectory-wide invariants of rule T: local energy never rises inside a
//! certified loop, certified cells and stable edges persist, and boundaries
//! are neither created, split nor merged and keep a large enough ancestor.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;

use super::ExperimentError;
use crate::dynamics::{energy_delta, outer_boundary, step_t, BoundaryMode, DynamicsError, Spin, SpinConfig};
use crate::lattice::{Cell, DualEdge, Window};
use crate::topology::{cell_loop_interior, parent_map_report, stability_certificates, Traced, DEFAULT_SEARCH_RADIUS};

#[derive(Clone, Debug, PartialEq)]
pub enum InvariantViolation {
    EnergyIncrease { time: u64, region: usize, delta: i64 },
    /// A site of the region flipped but its energy did not drop.
    NoStrictDecrease { time: u64, region: usize },
    EnergyBookkeeping { time: u64, region: usize, direct: i64, flip_sum: i64 },
    CertifiedCellFlipped { time: u64, cell: Cell },
    StableEdgeLost { time: u64, edge: DualEdge },
    Parent { time: u64, description: String },
    Ancestor { time: u64, curve: usize, ancestor_diameter: f64, diameter: f64 },
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InvariantViolation::*;
        match self {
            EnergyIncrease { time, region, delta } => write!(f, "t={time}: energy of region {region} rose by {delta}"),
            NoStrictDecrease { time, region } => write!(f, "t={time}: region {region} flipped without lowering its energy"),
            EnergyBookkeeping { time, region, direct, flip_sum } => {
                write!(f, "t={time}: region {region} energy change {direct} but flip sum {flip_sum}")
            }
            CertifiedCellFlipped { time, cell } => write!(f, "t={time}: certified cell {cell} flipped"),
            StableEdgeLost { time, edge } => write!(f, "t={time}: stable edge {}|{} became satisfied", edge.a, edge.b),
            Parent { time, description } => write!(f, "t={time}: {description}"),
            Ancestor { time, curve, ancestor_diameter, diameter } => {
                write!(f, "t={time}: loop {curve} has diameter {diameter} but its ancestor only {ancestor_diameter}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantOptions {
    pub max_steps: u64,
    pub mode: BoundaryMode,
    pub search_radius: u32,
    pub energy: bool,
    pub certificates: bool,
    pub parent: bool,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions {
            max_steps: 1000,
            mode: BoundaryMode::FrozenRing,
            search_radius: DEFAULT_SEARCH_RADIUS,
            energy: true,
            certificates: true,
            parent: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvariantReport {
    pub steps: u64,
    pub fixated: bool,
    /// Certified regions whose energy was tracked.
    pub regions: usize,
    pub certified_cells: usize,
    pub stable_edges: usize,
    /// Loop/ancestor pairs compared.
    pub ancestor_checks: u64,
    pub violations: Vec<InvariantViolation>,
}

impl InvariantReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Region {
    interior: Vec<Cell>,
    closure: Vec<Cell>,
}

/// Strict interiors of the certified loops, deduplicated.
fn certified_regions(loops: &[Vec<Cell>]) -> Vec<Region> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for cells in loops {
        let mut interior = cell_loop_interior(cells);
        if interior.is_empty() {
            continue;
        }
        interior.sort_unstable();
        if !seen.insert(interior.clone()) {
            continue;
        }
        let mut closure = outer_boundary(&interior);
        closure.extend_from_slice(&interior);
        out.push(Region { interior, closure });
    }
    out
}

/// Runs rule T from `c0` and checks every enabled invariant after each step,
/// until fixation, `max_steps`, or the margin runs out.
pub fn invariant_suite(c0: &SpinConfig, opts: &InvariantOptions) -> Result<InvariantReport, ExperimentError> {
    let mut report = InvariantReport::default();
    let delta = c0.window().spacing;

    let (regions, covered, stable): (Vec<Region>, Vec<(Cell, Spin)>, Vec<DualEdge>) =
        if opts.energy || opts.certificates {
            let certs = stability_certificates(c0, None, opts.search_radius);
            let loops: Vec<Vec<Cell>> = certs.loops().iter().map(|c| c.witness.cells().to_vec()).collect();
            let regions = if opts.energy { certified_regions(&loops) } else { Vec::new() };
            let covered = certs.covered_cells().into_iter().map(|x| (x, certs.covered(x).expect("covered"))).collect();
            (regions, covered, certs.stable_edges(c0))
        } else {
            (Vec::new(), Vec::new(), Vec::new())
        };
    report.regions = regions.len();
    report.certified_cells = covered.len();
    report.stable_edges = stable.len();

    let mut traced = if opts.parent { Some(Traced::new(c0.clone())?) } else { None };
    let diam0: Vec<f64> = traced.as_ref().map_or(Vec::new(), |t| t.curves.iter().map(|c| c.diameter(delta)).collect());
    let mut ancestor: Vec<Option<usize>> = (0..diam0.len()).map(Some).collect();

    let mut cur = c0.clone();
    for _ in 0..opts.max_steps {
        let next = match step_t(&cur, opts.mode) {
            Ok(n) => n,
            Err(DynamicsError::MarginExhausted { .. }) => break,
            Err(e) => return Err(e.into()),
        };
        let t = next.time();
        report.steps += 1;
        let flipped: HashSet<Cell> =
            next.layout().cells().iter().enumerate().filter(|&(j, &x)| cur.get(x) != Some(next.spin_at(j))).map(|(_, &x)| x).collect();

        for (k, r) in regions.iter().enumerate() {
            if !r.closure.iter().any(|x| flipped.contains(x)) || !r.closure.iter().all(|&x| next.contains(x)) {
                continue;
            }
            match energy_delta(&cur, &next, &r.interior) {
                Ok(d) if d.direct > 0 => report.violations.push(InvariantViolation::EnergyIncrease { time: t, region: k, delta: d.direct }),
                Ok(d) if d.direct == 0 && r.interior.iter().any(|x| flipped.contains(x)) => {
                    report.violations.push(InvariantViolation::NoStrictDecrease { time: t, region: k })
                }
                Ok(_) => {}
                Err(DynamicsError::InconsistentEnergy { direct, flip_sum }) => {
                    report.violations.push(InvariantViolation::EnergyBookkeeping { time: t, region: k, direct, flip_sum })
                }
                Err(e) => return Err(e.into()),
            }
        }

        if opts.certificates {
            for &(x, s) in &covered {
                if next.get(x).is_some_and(|v| v != s) {
                    report.violations.push(InvariantViolation::CertifiedCellFlipped { time: t, cell: x });
                }
            }
            for &e in &stable {
                if let (Some(a), Some(b)) = (next.get(e.a), next.get(e.b)) {
                    if a == b {
                        report.violations.push(InvariantViolation::StableEdgeLost { time: t, edge: e });
                    }
                }
            }
        }

        if let Some(prev) = traced.take() {
            let nt = Traced::new(next.clone())?;
            let m = parent_map_report(&prev, &nt);
            for v in &m.violations {
                report.violations.push(InvariantViolation::Parent { time: t, description: v.to_string() });
            }
            let mut next_anc = vec![None; nt.curves.len()];
            for k in nt.loops() {
                let Some(a) = m.pairs.get(&k).and_then(|&p| ancestor[p]) else { continue };
                next_anc[k] = Some(a);
                let d = nt.curves[k].diameter(delta);
                report.ancestor_checks += 1;
                if diam0[a] < d - delta - 1e-9 {
                    report.violations.push(InvariantViolation::Ancestor { time: t, curve: k, ancestor_diameter: diam0[a], diameter: d });
                }
            }
            ancestor = next_anc;
            traced = Some(nt);
        }

        let quiet = flipped.is_empty();
        cur = next;
        if quiet {
            report.fixated = true;
            break;
        }
    }
    Ok(report)
}

/// Parent map and ancestor diameter checks over `n_max` steps of rule T on
/// shrinking windows of radius `radius` at `λ = 1/2`; returns the per-seed
/// reports in seed order.
pub fn ancestor_check(seeds: &[u64], radius: u32, n_max: u64) -> Result<Vec<(u64, InvariantReport)>, ExperimentError> {
    let opts = InvariantOptions {
        max_steps: n_max,
        mode: BoundaryMode::Shrinking,
        energy: false,
        ..InvariantOptions::default()
    };
    let mut out: Vec<(u64, InvariantReport)> = seeds
        .par_iter()
        .map(|&seed| {
            let c = SpinConfig::sample(Window::new(radius).with_margin(n_max as u32), 0.5, seed)?;
            Ok((seed, invariant_suite(&c, &opts)?))
        })
        .collect::<Result<_, ExperimentError>>()?;
    out.sort_by_key(|r| r.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_trajectories_are_clean() {
        for seed in 0..20 {
            let c = SpinConfig::sample(Window::new(24), 0.5, seed).unwrap();
            let r = invariant_suite(&c, &InvariantOptions::default()).unwrap();
            assert!(r.is_clean(), "seed {seed}: {}", r.violations[0]);
            assert!(r.fixated);
            assert!(r.regions > 0 && r.ancestor_checks > 0);
        }
    }

    #[test]
    fn stable_ring_is_its_own_ancestor() {
        let c = SpinConfig::from_fn(Window::new(10).with_margin(5), |x| if x.distance(Cell::ORIGIN) <= 1 { -1 } else { 1 });
        let opts = InvariantOptions { max_steps: 5, mode: BoundaryMode::Shrinking, ..InvariantOptions::default() };
        let r = invariant_suite(&c, &opts).unwrap();
        assert!(r.is_clean());
        assert!(r.fixated);
        assert_eq!(r.ancestor_checks, 1);
    }

    #[test]
    fn vanishing_hexagon_has_nothing_to_check() {
        let mut c = SpinConfig::uniform(Window::new(8).with_margin(3), 1);
        c.set(Cell::ORIGIN, -1).unwrap();
        let opts = InvariantOptions { max_steps: 3, mode: BoundaryMode::Shrinking, ..InvariantOptions::default() };
        let r = invariant_suite(&c, &opts).unwrap();
        assert!(r.is_clean());
        assert_eq!(r.ancestor_checks, 0);
    }

    #[test]
    fn ancestor_check_sorts_by_seed() {
        let r = ancestor_check(&[5, 2, 9], 16, 4).unwrap();
        assert_eq!(r.iter().map(|x| x.0).collect::<Vec<_>>(), vec![2, 5, 9]);
        assert!(r.iter().all(|x| x.1.is_clean()));
    }
}
