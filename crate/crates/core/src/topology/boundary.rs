//! Maximal boundary paths traced along unsatisfied dual edges.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::region::cells_inside;
use super::TopologyError;
use crate::dynamics::{Spin, SpinConfig};
use crate::lattice::{Cell, Direction, DualEdge, DualVertex, SQRT3};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    Loop,
    /// Truncated where it reaches the edge of the window.
    Arc,
}

/// A boundary: consecutive dual edges share a corner and each separates
/// opposite spins. Loops run counter-clockwise, so the cell on the left of
/// every edge is inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryCurve {
    pub edges: Vec<DualEdge>,
    /// `edges.len() + 1` corners; a loop repeats its first corner at the end.
    pub vertices: Vec<DualVertex>,
    pub kind: CurveKind,
    /// Sign of the cell on the left of the first edge.
    pub left_sign: Spin,
}

impl BoundaryCurve {
    pub fn is_loop(&self) -> bool {
        self.kind == CurveKind::Loop
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The cell on the left of edge `k` when walked from `vertices[k]` to `vertices[k+1]`.
    pub fn left_cell(&self, k: usize) -> Cell {
        let e = self.edges[k];
        if e.endpoints()[0] == self.vertices[k] {
            e.a
        } else {
            e.b
        }
    }

    pub fn right_cell(&self, k: usize) -> Cell {
        let e = self.edges[k];
        if self.left_cell(k) == e.a {
            e.b
        } else {
            e.a
        }
    }

    pub fn lattice_points(&self) -> Vec<(i64, i64)> {
        self.vertices.iter().map(|v| v.lattice_point()).collect()
    }

    pub fn embed(&self, delta: f64) -> Vec<(f64, f64)> {
        self.vertices.iter().map(|v| v.embed(delta)).collect()
    }

    /// Euclidean diameter of the embedded corners.
    pub fn diameter(&self, delta: f64) -> f64 {
        diameter_of_points(&self.lattice_points(), delta)
    }

    /// Cells enclosed by a loop (empty for arcs).
    pub fn interior(&self) -> Vec<Cell> {
        if !self.is_loop() {
            return Vec::new();
        }
        let pts = self.lattice_points();
        cells_inside(&pts[..pts.len() - 1], &HashSet::new())
    }
}

/// Squared distance in the `(U, V)` frame scaled so that `36·d² = U² + 3V²` at unit spacing.
#[inline]
fn dist2(a: (i64, i64), b: (i64, i64)) -> i64 {
    let (du, dv) = (a.0 - b.0, a.1 - b.1);
    du * du + 3 * dv * dv
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull (monotone chain), counter-clockwise, without collinear points.
pub(crate) fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut p = points.to_vec();
    p.sort_unstable();
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &pt in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0 {
                hull.pop();
            }
            hull.push(pt);
        }
        hull.pop();
    }
    hull
}

/// Diameter of lattice points given in the `(U, V)` frame, at spacing `delta`.
pub fn diameter_of_points(points: &[(i64, i64)], delta: f64) -> f64 {
    let hull = convex_hull(points);
    let mut best = 0;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            best = best.max(dist2(hull[i], hull[j]));
        }
    }
    delta * (best as f64).sqrt() / 6.0
}

/// Unsatisfied dual edges with both cells in the window, in canonical order.
pub fn unsatisfied_edges(c: &SpinConfig) -> Vec<DualEdge> {
    let l = c.layout();
    let mut out = Vec::new();
    for i in 0..l.len() {
        let nb = l.neighbors(i);
        // E, NE, NW from each cell visit every edge once
        for (k, d) in [Direction::E, Direction::NE, Direction::NW].into_iter().enumerate() {
            let j = nb[k];
            if j != crate::lattice::NO_NEIGHBOR && c.spin_at(i) != c.spin_at(j as usize) {
                out.push(DualEdge::new(l.cell(i), l.cell(i).step(d)).expect("neighbours"));
            }
        }
    }
    out.sort_unstable();
    out
}

fn orient_ccw_from_lowest(vertices: &mut Vec<DualVertex>, edges: &mut Vec<DualEdge>) {
    // vertices closed: first == last
    let n = edges.len();
    let pts: Vec<(i64, i64)> = vertices[..n].iter().map(|v| v.lattice_point()).collect();
    let area2: i64 = (0..n).map(|i| cross((0, 0), pts[i], pts[(i + 1) % n])).sum();
    let mut vs: Vec<DualVertex> = vertices[..n].to_vec();
    let mut es = edges.clone();
    if area2 < 0 {
        // reverse traversal: vertex order reversed, edge k joins v'_k and v'_{k+1}
        vs.reverse();
        es.reverse();
        vs.rotate_right(1);
    }
    debug_assert!((0..n).all(|k| {
        let ep = es[k].endpoints();
        let (a, b) = (vs[k], vs[(k + 1) % n]);
        (ep[0] == a && ep[1] == b) || (ep[0] == b && ep[1] == a)
    }));
    let start = (0..n)
        .min_by_key(|&k| {
            let p = vs[k].lattice_point();
            (p.1, p.0)
        })
        .unwrap();
    vs.rotate_left(start);
    es.rotate_left(start);
    vs.push(vs[0]);
    *vertices = vs;
    *edges = es;
}

/// All maximal boundaries of `c`: arcs first (ordered by their first corner),
/// then loops (ordered by their lowest corner).
pub fn boundaries(c: &SpinConfig) -> Result<Vec<BoundaryCurve>, TopologyError> {
    let edges = unsatisfied_edges(c);
    let mut incident: HashMap<DualVertex, [u32; 2]> = HashMap::with_capacity(edges.len());
    let mut degree: HashMap<DualVertex, u8> = HashMap::with_capacity(edges.len());
    for (k, e) in edges.iter().enumerate() {
        for v in e.endpoints() {
            let d = degree.entry(v).or_insert(0);
            let slot = incident.entry(v).or_insert([u32::MAX; 2]);
            if *d >= 2 {
                return Err(TopologyError::OddDualVertex(v));
            }
            slot[*d as usize] = k as u32;
            *d += 1;
        }
    }
    // A corner with one unsatisfied in-window edge must touch the window edge.
    let mut ends: Vec<DualVertex> = Vec::new();
    for (&v, &d) in &degree {
        if d == 1 {
            if v.cells().iter().all(|&x| c.contains(x)) {
                return Err(TopologyError::OddDualVertex(v));
            }
            ends.push(v);
        }
    }
    ends.sort_by_key(|v| {
        let p = v.lattice_point();
        (p.1, p.0)
    });

    let mut used = vec![false; edges.len()];
    let other_end = |e: DualEdge, v: DualVertex| {
        let [a, b] = e.endpoints();
        if a == v {
            b
        } else {
            a
        }
    };
    let walk = |start: DualVertex, first: u32, used: &mut Vec<bool>| -> (Vec<DualVertex>, Vec<DualEdge>) {
        let mut vs = vec![start];
        let mut es = Vec::new();
        let mut v = start;
        let mut k = first;
        loop {
            used[k as usize] = true;
            let e = edges[k as usize];
            es.push(e);
            v = other_end(e, v);
            vs.push(v);
            let inc = incident[&v];
            match inc.iter().copied().find(|&j| j != u32::MAX && !used[j as usize]) {
                Some(j) => k = j,
                None => break,
            }
        }
        (vs, es)
    };

    let mut arcs = Vec::new();
    for &v in &ends {
        let k = incident[&v][0];
        if used[k as usize] {
            continue;
        }
        let (vs, es) = walk(v, k, &mut used);
        arcs.push((vs, es));
    }
    let mut loops = Vec::new();
    for k in 0..edges.len() {
        if used[k] {
            continue;
        }
        let start = edges[k].endpoints()[0];
        let (mut vs, mut es) = walk(start, k as u32, &mut used);
        if vs.first() != vs.last() {
            return Err(TopologyError::OddDualVertex(*vs.last().unwrap()));
        }
        orient_ccw_from_lowest(&mut vs, &mut es);
        loops.push((vs, es));
    }
    loops.sort_by_key(|(vs, _)| {
        let p = vs[0].lattice_point();
        (p.1, p.0)
    });

    let mut out = Vec::with_capacity(arcs.len() + loops.len());
    for (kind, (vs, es)) in arcs
        .into_iter()
        .map(|a| (CurveKind::Arc, a))
        .chain(loops.into_iter().map(|l| (CurveKind::Loop, l)))
    {
        let mut curve = BoundaryCurve { edges: es, vertices: vs, kind, left_sign: 0 };
        curve.left_sign = c.spin(curve.left_cell(0)).expect("in-window edge");
        out.push(curve);
    }
    Ok(out)
}

/// `true` when the interiors of any two loops are nested or disjoint.
pub fn nesting_is_laminar(curves: &[BoundaryCurve]) -> bool {
    let interiors: Vec<HashSet<Cell>> =
        curves.iter().filter(|c| c.is_loop()).map(|c| c.interior().into_iter().collect()).collect();
    let mut owner: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
    for (i, s) in interiors.iter().enumerate() {
        for &c in s {
            owner.entry(c).or_default().push(i);
        }
    }
    for ids in owner.values() {
        for &i in ids {
            for &j in ids {
                if i < j && !(interiors[i].is_subset(&interiors[j]) || interiors[j].is_subset(&interiors[i])) {
                    return false;
                }
            }
        }
    }
    true
}

/// Diameter of a single hexagon's boundary at spacing `delta`.
pub fn hexagon_diameter(delta: f64) -> f64 {
    2.0 * delta / SQRT3
}
