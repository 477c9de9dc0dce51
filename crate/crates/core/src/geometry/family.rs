//! Hausdorff distance between finite families of curves, with the curve
//! distance as the underlying metric.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{from_tan2, pair_tan2, Curve, Prepared};
use super::metric::CompactPoint;
use super::GeometryError;
use crate::topology::BoundaryCurve;

/// Distance reported when exactly one family is empty.
pub const EMPTY_FAMILY_DISTANCE: f64 = std::f64::consts::PI;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub curves: Vec<Curve>,
    pub delta: f64,
    pub time: u64,
}

impl CurveFamily {
    pub fn new(curves: Vec<Curve>, delta: f64, time: u64) -> Self {
        CurveFamily { curves, delta, time }
    }

    /// Embeds boundaries at spacing `delta`.
    pub fn from_boundaries(curves: &[BoundaryCurve], delta: f64, time: u64) -> Self {
        let curves = curves
            .iter()
            .map(|c| Curve::from_points(&c.embed(delta), c.is_loop()).expect("boundaries have vertices"))
            .collect();
        CurveFamily { curves, delta, time }
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }
}

/// Cheap data for lower bounds on the distance to a curve.
struct Summary {
    samples: Vec<CompactPoint>,
    /// `(xmin, ymin, xmax, ymax)` of the finite vertices.
    bbox: (f64, f64, f64, f64),
    max_norm: f64,
    has_infinity: bool,
}

impl Summary {
    fn new(v: &[CompactPoint]) -> Self {
        let mut bbox = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let (mut max_norm, mut has_infinity) = (0.0f64, false);
        for p in v {
            match p.coords() {
                Some((x, y)) => {
                    bbox = (bbox.0.min(x), bbox.1.min(y), bbox.2.max(x), bbox.3.max(y));
                    max_norm = max_norm.max(x.hypot(y));
                }
                None => has_infinity = true,
            }
        }
        let k = v.len().min(8);
        let samples = (0..k).map(|i| v[i * (v.len() - 1) / (k - 1).max(1)]).collect();
        Summary { samples, bbox, max_norm, has_infinity }
    }

    /// Lower bound on `tan² d(p, q)` over the vertices `q` this summary covers.
    fn point_bound(&self, p: &CompactPoint) -> f64 {
        if self.has_infinity {
            return 0.0;
        }
        match p.coords() {
            None => 1.0 / (self.max_norm * self.max_norm),
            Some((x, y)) => {
                let (x0, y0, x1, y1) = self.bbox;
                let dx = (x0 - x).max(x - x1).max(0.0);
                let dy = (y0 - y).max(y - y1).max(0.0);
                // |1 + p·conj(q)| ≤ 1 + |p||q|
                let t = dx.hypot(dy) / (1.0 + x.hypot(y) * self.max_norm);
                t * t
            }
        }
    }

    /// Every coupling matches each sample with some vertex of the other curve.
    fn pair_bound(&self, other: &Summary) -> f64 {
        let a = self.samples.iter().map(|p| other.point_bound(p)).fold(0.0, f64::max);
        other.samples.iter().map(|p| self.point_bound(p)).fold(a, f64::max)
    }
}

struct Prep {
    curve: Prepared,
    summary: Summary,
}

fn prepare(f: &CurveFamily, step: f64) -> Result<Vec<Prep>, GeometryError> {
    f.curves
        .par_iter()
        .map(|c| {
            let curve = Prepared::new(c, step)?;
            let summary = Summary::new(&curve.fwd);
            Ok(Prep { curve, summary })
        })
        .collect()
}

/// Raises `floor` (a `tan²` value stored as bits) to the directed distance
/// from `from` to `to`. Curves whose nearest partner is provably within the
/// floor are not resolved exactly, so only the maximum is exact.
fn directed(from: &[Prep], to: &[Prep], floor: &AtomicU64) {
    from.par_iter().for_each(|p| {
        let mut cands: Vec<(f64, usize)> = to.iter().enumerate().map(|(j, q)| (p.summary.pair_bound(&q.summary), j)).collect();
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best = f64::INFINITY;
        for (lb, j) in cands {
            if lb >= best || best <= f64::from_bits(floor.load(Ordering::Relaxed)) {
                break;
            }
            if let Some(v) = pair_tan2(&p.curve, &to[j].curve, best) {
                best = v;
            }
        }
        // Non-negative floats order like their bit patterns.
        floor.fetch_max(best.to_bits(), Ordering::Relaxed);
    });
}

/// Hausdorff distance between `f1` and `f2` over `curve_distance`.
///
/// Exactly one empty family gives [`EMPTY_FAMILY_DISTANCE`]; two empty
/// families give 0.
pub fn family_distance(f1: &CurveFamily, f2: &CurveFamily, densify_step: f64) -> Result<f64, GeometryError> {
    if !(densify_step > 0.0) {
        return Err(GeometryError::NonPositiveStep(densify_step));
    }
    match (f1.is_empty(), f2.is_empty()) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => return Ok(EMPTY_FAMILY_DISTANCE),
        _ => {}
    }
    let (p1, p2) = (prepare(f1, densify_step)?, prepare(f2, densify_step)?);
    let floor = AtomicU64::new(0.0f64.to_bits());
    directed(&p1, &p2, &floor);
    directed(&p2, &p1, &floor);
    Ok(from_tan2(f64::from_bits(floor.into_inner())))
}

/// Two-sided shadowing at level `eps`: every curve of each family lies
/// within curve distance `eps` of some curve of the other.
pub fn shadows(f1: &CurveFamily, f2: &CurveFamily, eps: f64, densify_step: f64) -> Result<bool, GeometryError> {
    let (p1, p2) = (prepare(f1, densify_step)?, prepare(f2, densify_step)?);
    let one_way = |a: &[Prep], b: &[Prep]| {
        a.iter().all(|p| b.iter().any(|q| pair_tan2(&p.curve, &q.curve, f64::INFINITY).is_some_and(|v| from_tan2(v) <= eps)))
    };
    Ok(one_way(&p1, &p2) && one_way(&p2, &p1))
}
