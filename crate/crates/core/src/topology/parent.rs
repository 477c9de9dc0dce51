//! Correspondence between boundary loops at consecutive times of rule T,
//! induced by the clusters the loops enclose.

use std::collections::{BTreeMap, HashMap};

use super::boundary::{boundaries, BoundaryCurve};
use super::clusters::ClusterLabels;
use super::TopologyError;
use crate::dynamics::SpinConfig;
use crate::lattice::Cell;

/// A configuration with its clusters and boundaries, and for every loop the
/// cluster just inside it.
#[derive(Clone, Debug)]
pub struct Traced {
    pub config: SpinConfig,
    pub labels: ClusterLabels,
    pub curves: Vec<BoundaryCurve>,
    inner: Vec<Option<u32>>,
    loop_of: HashMap<u32, usize>,
}

impl Traced {
    pub fn new(config: SpinConfig) -> Result<Self, TopologyError> {
        let labels = ClusterLabels::new(&config);
        let curves = boundaries(&config)?;
        let mut inner = Vec::with_capacity(curves.len());
        let mut loop_of = HashMap::new();
        for (k, c) in curves.iter().enumerate() {
            if c.is_loop() {
                let id = labels.label(c.left_cell(0)).expect("loop cells lie in the window");
                loop_of.insert(id, k);
                inner.push(Some(id));
            } else {
                inner.push(None);
            }
        }
        Ok(Traced { config, labels, curves, inner, loop_of })
    }

    /// Cluster enclosed by curve `k`, for loops.
    pub fn inner_cluster(&self, k: usize) -> Option<u32> {
        self.inner[k]
    }

    /// The loop that is the outer boundary of cluster `id`, if it has one.
    pub fn outer_loop(&self, id: u32) -> Option<usize> {
        self.loop_of.get(&id).copied()
    }

    pub fn loops(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.curves.len()).filter(|&k| self.curves[k].is_loop())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParentViolation {
    /// A loop whose enclosed cluster consists only of flipped cells.
    Created { child_loop: usize, at: Cell },
    /// A cluster whose unflipped cells came from two clusters, one of them finite.
    Merge { at: Cell },
    /// A cluster whose unflipped cells ended in two clusters, one of them finite.
    Split { at: Cell },
    /// Two child loops with the same parent.
    NotInjective { parent_loop: usize },
}

impl std::fmt::Display for ParentViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParentViolation::Created { child_loop, at } => write!(f, "loop {child_loop} created at {at}"),
            ParentViolation::Merge { at } => write!(f, "clusters merged at {at}"),
            ParentViolation::Split { at } => write!(f, "cluster split at {at}"),
            ParentViolation::NotInjective { parent_loop } => write!(f, "loop {parent_loop} has two children"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParentMap {
    /// Child loop index at time `n+1` → parent loop index at time `n`.
    pub pairs: BTreeMap<usize, usize>,
    /// Child loops whose parent cluster reaches the window edge.
    pub unresolved: Vec<usize>,
    pub violations: Vec<ParentViolation>,
}

/// Builds the parent map and collects every violation of the no-creation,
/// no-split and no-merge properties.
pub fn parent_map_report(prev: &Traced, next: &Traced) -> ParentMap {
    let (lp, ln) = (prev.config.layout(), next.config.layout());
    let mut links: Vec<(u32, u32, usize)> = Vec::new(); // (child cluster, parent cluster, next index)
    for (j, &x) in ln.cells().iter().enumerate() {
        let i = lp.index_of(x).expect("the next window lies inside the previous one");
        if prev.config.spin_at(i) == next.config.spin_at(j) {
            links.push((next.labels.label_at(j), prev.labels.label_at(i), j));
        }
    }
    let mut parents: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut children: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut witness: HashMap<(u32, u32), usize> = HashMap::new();
    for &(ch, pa, j) in &links {
        if witness.insert((ch, pa), j).is_none() {
            parents.entry(ch).or_default().push(pa);
            children.entry(pa).or_default().push(ch);
        }
    }

    let mut out = ParentMap::default();
    let mut sorted_children: Vec<_> = parents.iter().collect();
    sorted_children.sort();
    for (&ch, pas) in sorted_children {
        if pas.len() >= 2 && pas.iter().any(|&p| !prev.labels.info(p).touches_ring) {
            let j = witness[&(ch, pas[1])];
            out.violations.push(ParentViolation::Merge { at: ln.cell(j) });
        }
    }
    let mut sorted_parents: Vec<_> = children.iter().collect();
    sorted_parents.sort();
    for (&pa, chs) in sorted_parents {
        if chs.len() >= 2 && chs.iter().any(|&c| !next.labels.info(c).touches_ring) {
            let j = witness[&(chs[1], pa)];
            out.violations.push(ParentViolation::Split { at: ln.cell(j) });
        }
    }

    let mut taken: HashMap<usize, usize> = HashMap::new();
    for k in next.loops() {
        let ch = next.inner_cluster(k).expect("loops enclose a cluster");
        let Some(pas) = parents.get(&ch) else {
            out.violations.push(ParentViolation::Created { child_loop: k, at: next.curves[k].left_cell(0) });
            continue;
        };
        if pas.len() != 1 {
            continue;
        }
        match prev.outer_loop(pas[0]) {
            Some(p) if !prev.labels.info(pas[0]).touches_ring => {
                if taken.insert(p, k).is_some() {
                    out.violations.push(ParentViolation::NotInjective { parent_loop: p });
                }
                out.pairs.insert(k, p);
            }
            _ => out.unresolved.push(k),
        }
    }
    out
}

/// Parent map, or the first violation as an error.
pub fn parent_map(prev: &Traced, next: &Traced) -> Result<ParentMap, TopologyError> {
    let m = parent_map_report(prev, next);
    match m.violations.first() {
        Some(v) => Err(TopologyError::Parent(v.clone())),
        None => Ok(m),
    }
}
