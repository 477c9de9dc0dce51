//! Polylines in the compactified plane and a discrete Fréchet distance over
//! monotone (increasing or decreasing) reparametrisations.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use super::metric::{point_distance, CompactPoint};
use super::GeometryError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    vertices: Vec<CompactPoint>,
    closed: bool,
}

impl Curve {
    /// Collapses consecutive duplicates. A closed curve ends where it starts;
    /// the closing vertex is appended when missing.
    pub fn new(vertices: Vec<CompactPoint>, closed: bool) -> Result<Self, GeometryError> {
        let mut v: Vec<CompactPoint> = Vec::with_capacity(vertices.len() + 1);
        for p in vertices {
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        if v.is_empty() {
            return Err(GeometryError::EmptyCurve);
        }
        if closed && v.len() > 1 && v.first() != v.last() {
            v.push(v[0]);
        }
        Ok(Curve { vertices: v, closed })
    }

    pub fn from_points(points: &[(f64, f64)], closed: bool) -> Result<Self, GeometryError> {
        Self::new(points.iter().map(|&p| CompactPoint::from(p)).collect(), closed)
    }

    pub fn vertices(&self) -> &[CompactPoint] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn reversed(&self) -> Curve {
        let mut v = self.vertices.clone();
        v.reverse();
        Curve { vertices: v, closed: self.closed }
    }

    /// Vertices with points inserted so that every segment has `d`-length at
    /// most `step`. Finite segments are straight; segments to infinity follow
    /// the radial geodesic.
    pub fn densified(&self, step: f64) -> Result<Vec<CompactPoint>, GeometryError> {
        if !(step > 0.0) {
            return Err(GeometryError::NonPositiveStep(step));
        }
        let mut out = vec![self.vertices[0]];
        for w in self.vertices.windows(2) {
            densify_segment(&w[0], &w[1], step, &mut out);
        }
        Ok(out)
    }
}

fn radial_points(u: (f64, f64), step: f64) -> Vec<CompactPoint> {
    let r = u.0.hypot(u.1);
    let (dx, dy) = if r > 0.0 { (u.0 / r, u.1 / r) } else { (1.0, 0.0) };
    let t0 = r.atan();
    let total = std::f64::consts::FRAC_PI_2 - t0;
    let k = (total / step).ceil().max(1.0) as usize;
    let mut v: Vec<CompactPoint> = (1..k)
        .map(|i| {
            let rr = (t0 + total * i as f64 / k as f64).tan();
            CompactPoint::Finite { x: rr * dx, y: rr * dy }
        })
        .collect();
    v.push(CompactPoint::Infinity);
    v
}

/// Appends the points after `u` up to and including `v`.
fn densify_segment(u: &CompactPoint, v: &CompactPoint, step: f64, out: &mut Vec<CompactPoint>) {
    match (*u, *v) {
        (CompactPoint::Finite { x: a, y: b }, CompactPoint::Finite { x: c, y: d }) => {
            // d-length never exceeds Euclidean length.
            let k = ((c - a).hypot(d - b) / step).ceil().max(1.0) as usize;
            // Interpolate from the nearer end so a reversed segment yields
            // bit-identical points.
            for i in 1..k {
                let p = match (2 * i).cmp(&k) {
                    std::cmp::Ordering::Less => {
                        let t = i as f64 / k as f64;
                        (a + t * (c - a), b + t * (d - b))
                    }
                    std::cmp::Ordering::Greater => {
                        let t = (k - i) as f64 / k as f64;
                        (c + t * (a - c), d + t * (b - d))
                    }
                    std::cmp::Ordering::Equal => ((a + c) * 0.5, (b + d) * 0.5),
                };
                out.push(CompactPoint::from(p));
            }
            out.push(*v);
        }
        (CompactPoint::Finite { x, y }, CompactPoint::Infinity) => out.extend(radial_points((x, y), step)),
        (CompactPoint::Infinity, CompactPoint::Finite { x, y }) => {
            let mut pts = radial_points((x, y), step);
            pts.pop();
            pts.reverse();
            out.extend(pts);
            out.push(*v);
        }
        (CompactPoint::Infinity, CompactPoint::Infinity) => out.push(*v),
    }
}

/// `tan² d(u, v)`, monotone in `d`; infinite for antipodal pairs.
#[inline]
pub(crate) fn tan2(u: &CompactPoint, v: &CompactPoint) -> f64 {
    let (num2, den2) = match (*u, *v) {
        (CompactPoint::Finite { x: a, y: b }, CompactPoint::Finite { x: c, y: d }) => {
            let (p, q) = (1.0 + a * c + b * d, b * c - a * d);
            ((a - c) * (a - c) + (b - d) * (b - d), p * p + q * q)
        }
        (CompactPoint::Finite { x, y }, CompactPoint::Infinity) | (CompactPoint::Infinity, CompactPoint::Finite { x, y }) => {
            (1.0, x * x + y * y)
        }
        (CompactPoint::Infinity, CompactPoint::Infinity) => (0.0, 1.0),
    };
    if num2 == 0.0 {
        0.0
    } else {
        num2 / den2
    }
}

pub(crate) fn from_tan2(t: f64) -> f64 {
    t.sqrt().atan()
}

#[derive(Copy, Clone, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

enum Visited {
    Dense(Vec<u64>),
    Sparse(HashSet<u64>),
}

impl Visited {
    fn new(cells: u64) -> Self {
        if cells <= 1 << 27 {
            Visited::Dense(vec![0; (cells as usize).div_ceil(64)])
        } else {
            Visited::Sparse(HashSet::new())
        }
    }

    /// Marks `k`; `false` if it was already marked.
    fn insert(&mut self, k: u64) -> bool {
        match self {
            Visited::Dense(bits) => {
                let (w, b) = ((k / 64) as usize, k % 64);
                let fresh = bits[w] & (1 << b) == 0;
                bits[w] |= 1 << b;
                fresh
            }
            Visited::Sparse(s) => s.insert(k),
        }
    }
}

/// Discrete Fréchet distance of two vertex sequences (fixed direction) in
/// `tan²` units, or `None` when it is not below `cutoff`.
///
/// Computed as a bottleneck path through the coupling grid, popping cells in
/// increasing cost order, so only cells cheaper than the answer are visited.
pub(crate) fn frechet_tan2(a: &[CompactPoint], b: &[CompactPoint], cutoff: f64) -> Option<f64> {
    let (n, m) = (a.len(), b.len());
    let end = tan2(&a[n - 1], &b[m - 1]);
    let start = tan2(&a[0], &b[0]);
    if start.max(end) >= cutoff {
        return None;
    }
    let mut visited = Visited::new(n as u64 * m as u64);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Key(start), 0u32, 0u32)));
    // Far-apart curves flood most of the grid; the plain table is faster then.
    let mut budget = 8 * (n + m) + 256;
    while let Some(Reverse((Key(c), i, j))) = heap.pop() {
        if c >= cutoff {
            return None;
        }
        if budget == 0 {
            return frechet_table_tan2(a, b, cutoff);
        }
        budget -= 1;
        let (i, j) = (i as usize, j as usize);
        if !visited.insert(i as u64 * m as u64 + j as u64) {
            continue;
        }
        if i == n - 1 && j == m - 1 {
            return Some(c);
        }
        for (ni, nj) in [(i + 1, j + 1), (i + 1, j), (i, j + 1)] {
            if ni < n && nj < m {
                let nc = c.max(tan2(&a[ni], &b[nj]));
                if nc < cutoff {
                    heap.push(Reverse((Key(nc), ni as u32, nj as u32)));
                }
            }
        }
    }
    None
}

/// Row-by-row coupling table; `None` once a whole row reaches `cutoff`.
fn frechet_table_tan2(a: &[CompactPoint], b: &[CompactPoint], cutoff: f64) -> Option<f64> {
    let m = b.len();
    let mut prev = vec![0.0f64; m];
    let mut row = vec![0.0f64; m];
    for (i, p) in a.iter().enumerate() {
        let mut lowest = f64::INFINITY;
        for j in 0..m {
            let c = tan2(p, &b[j]);
            let reach = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => row[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(row[j - 1]).min(prev[j - 1]),
            };
            row[j] = c.max(reach);
            lowest = lowest.min(row[j]);
        }
        if lowest >= cutoff {
            return None;
        }
        std::mem::swap(&mut prev, &mut row);
    }
    let v = prev[m - 1];
    (v < cutoff).then_some(v)
}

/// Closed curve re-started at vertex `s` (the closing vertex is re-appended).
pub(crate) fn rotated(v: &[CompactPoint], s: usize) -> Vec<CompactPoint> {
    let body = &v[..v.len() - 1];
    let mut out = Vec::with_capacity(v.len());
    out.extend_from_slice(&body[s..]);
    out.extend_from_slice(&body[..s]);
    out.push(out[0]);
    out
}

pub(crate) fn nearest_vertex(v: &[CompactPoint], p: &CompactPoint) -> usize {
    let body = if v.len() > 1 { &v[..v.len() - 1] } else { v };
    (0..body.len()).min_by(|&i, &j| tan2(&body[i], p).total_cmp(&tan2(&body[j], p))).unwrap_or(0)
}

/// A densified curve ready for repeated distance queries.
#[derive(Clone, Debug)]
pub(crate) struct Prepared {
    pub fwd: Vec<CompactPoint>,
    pub rev: Vec<CompactPoint>,
    pub closed: bool,
}

impl Prepared {
    pub fn new(c: &Curve, step: f64) -> Result<Self, GeometryError> {
        let fwd = c.densified(step)?;
        let mut rev = fwd.clone();
        rev.reverse();
        let closed = c.is_closed() && fwd.len() > 2;
        Ok(Prepared { fwd, rev, closed })
    }
}

/// The couplings tried for a pair of curves. Open curves: both directions
/// of the second curve. Two closed curves: each curve re-started at its
/// vertex nearest to the other's start, in both directions.
pub(crate) fn pair_tan2(p: &Prepared, q: &Prepared, cutoff: f64) -> Option<f64> {
    let mut best = cutoff;
    let mut found = None;
    let mut try_pair = |a: &[CompactPoint], b: &[CompactPoint], best: &mut f64| {
        if let Some(v) = frechet_tan2(a, b, *best) {
            *best = v;
            found = Some(v);
        }
    };
    if p.closed && q.closed {
        let s = nearest_vertex(&q.fwd, &p.fwd[0]);
        try_pair(&p.fwd, &rotated(&q.fwd, s), &mut best);
        let s = nearest_vertex(&q.rev, &p.fwd[0]);
        try_pair(&p.fwd, &rotated(&q.rev, s), &mut best);
        let t = nearest_vertex(&p.fwd, &q.fwd[0]);
        try_pair(&rotated(&p.fwd, t), &q.fwd, &mut best);
        let t = nearest_vertex(&p.rev, &q.fwd[0]);
        try_pair(&rotated(&p.rev, t), &q.fwd, &mut best);
    } else {
        try_pair(&p.fwd, &q.fwd, &mut best);
        try_pair(&p.fwd, &q.rev, &mut best);
    }
    found
}

/// Curve distance: discrete Fréchet distance under the compactified metric
/// between the densified curves, minimised over both directions of `c2`
/// (and, for two closed curves, over the nearest-start alignments).
pub fn curve_distance(c1: &Curve, c2: &Curve, densify_step: f64) -> Result<f64, GeometryError> {
    let p = Prepared::new(c1, densify_step)?;
    let q = Prepared::new(c2, densify_step)?;
    Ok(from_tan2(pair_tan2(&p, &q, f64::INFINITY).unwrap_or(f64::INFINITY)))
}

/// Largest distance between consecutive densified vertices (test hook for
/// the densification contract).
pub fn max_segment_length(v: &[CompactPoint]) -> f64 {
    v.windows(2).map(|w| point_distance(&w[0], &w[1])).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Full-table discrete Fréchet distance in distance units.
    fn frechet_table(a: &[CompactPoint], b: &[CompactPoint]) -> f64 {
        let (n, m) = (a.len(), b.len());
        let mut t = vec![vec![0.0f64; m]; n];
        for i in 0..n {
            for j in 0..m {
                let c = point_distance(&a[i], &b[j]);
                t[i][j] = match (i, j) {
                    (0, 0) => c,
                    (0, _) => c.max(t[0][j - 1]),
                    (_, 0) => c.max(t[i - 1][0]),
                    _ => c.max(t[i - 1][j].min(t[i][j - 1]).min(t[i - 1][j - 1])),
                };
            }
        }
        t[n - 1][m - 1]
    }

    fn random_curve(rng: &mut ChaCha8Rng, n: usize) -> Vec<CompactPoint> {
        (0..n).map(|_| CompactPoint::from((rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))).collect()
    }

    #[test]
    fn bottleneck_search_matches_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let (n, m) = (rng.gen_range(1..25), rng.gen_range(1..25));
            let (a, b) = (random_curve(&mut rng, n), random_curve(&mut rng, m));
            let fast = from_tan2(frechet_tan2(&a, &b, f64::INFINITY).unwrap());
            assert!((fast - frechet_table(&a, &b)).abs() < 1e-12);
            let exact = frechet_tan2(&a, &b, f64::INFINITY).unwrap();
            assert_eq!(frechet_table_tan2(&a, &b, f64::INFINITY), Some(exact));
            assert!(frechet_table_tan2(&a, &b, exact).is_none());
            assert!(frechet_tan2(&a, &b, exact).is_none());
            assert_eq!(frechet_tan2(&a, &b, exact * 1.5 + 1e-300), Some(exact));
        }
    }

    #[test]
    fn self_and_reverse_distance_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for closed in [false, true] {
            let c = Curve::new(random_curve(&mut rng, 12), closed).unwrap();
            assert_eq!(curve_distance(&c, &c, 0.05).unwrap(), 0.0);
            assert_eq!(curve_distance(&c, &c.reversed(), 0.05).unwrap(), 0.0);
        }
    }

    #[test]
    fn parallel_segments_converge_to_offset() {
        for h in [0.05, 0.2, 0.7] {
            let a = Curve::from_points(&[(0.0, 0.0), (1.0, 0.0)], false).unwrap();
            let b = Curve::from_points(&[(0.0, h), (1.0, h)], false).unwrap();
            let exact = f64::atan(h);
            let mut prev = f64::INFINITY;
            for step in [0.1, 0.03, 0.01, 0.003, 0.001] {
                let d = curve_distance(&a, &b, step).unwrap();
                assert!(d <= exact + step && d >= exact - step, "h {h} step {step}: {d}");
                assert!(d <= prev + 1e-15);
                prev = d;
            }
            assert!((prev - exact).abs() < 1e-3);
        }
    }

    #[test]
    fn densification_respects_step() {
        let c = Curve::new(
            vec![CompactPoint::from((0.5, 0.5)), CompactPoint::Infinity, CompactPoint::from((-3.0, 1.0)), CompactPoint::from((2.0, 2.0))],
            false,
        )
        .unwrap();
        for step in [0.3, 0.05, 0.01] {
            let v = c.densified(step).unwrap();
            assert!(max_segment_length(&v) <= step + 1e-12);
            assert_eq!(v.iter().filter(|p| p.is_infinite()).count(), 1);
        }
    }

    #[test]
    fn empty_and_bad_step_rejected() {
        assert_eq!(Curve::new(vec![], false), Err(GeometryError::EmptyCurve));
        let c = Curve::from_points(&[(0.0, 0.0)], false).unwrap();
        assert!(curve_distance(&c, &c, 0.0).is_err());
    }

    #[test]
    fn closed_curves_ignore_start_vertex() {
        let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let a = Curve::from_points(&square, true).unwrap();
        let mut shifted = square.to_vec();
        shifted.rotate_left(2);
        let b = Curve::from_points(&shifted, true).unwrap();
        assert_eq!(curve_distance(&a, &b, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_and_approximately_triangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let step = 0.05;
        for _ in 0..50 {
            let cs: Vec<Curve> = (0..3).map(|_| Curve::new(random_curve(&mut rng, 6), false).unwrap()).collect();
            let d = |i: usize, j: usize| curve_distance(&cs[i], &cs[j], step).unwrap();
            assert!((d(0, 1) - d(1, 0)).abs() < 1e-12);
            assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 2.0 * step);
        }
    }
}
