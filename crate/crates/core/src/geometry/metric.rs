//! The conformal metric `|dx| / (1 + |x|²)` on the plane plus a point at
//! infinity.
//!
//! Inverse stereographic projection onto the unit sphere has conformal factor
//! `2 / (1 + |x|²)`, so the metric is half the round one and geodesics are
//! projected great circles. For finite `u`, `v` this gives the closed form
//!
//! ```text
//! d(u, v) = atan2(|u - v|, |1 + u·conj(v)|)
//! ```
//!
//! (the two arguments are the half-chords to `v` and to its antipode), and
//! `d(u, ∞) = atan2(1, |u|)`.

use serde::{Deserialize, Serialize};

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CompactPoint {
    Finite { x: f64, y: f64 },
    Infinity,
}

impl CompactPoint {
    pub const ORIGIN: CompactPoint = CompactPoint::Finite { x: 0.0, y: 0.0 };

    /// `None` unless both coordinates are finite.
    pub fn finite(x: f64, y: f64) -> Option<Self> {
        (x.is_finite() && y.is_finite()).then_some(CompactPoint::Finite { x, y })
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, CompactPoint::Infinity)
    }

    pub fn coords(&self) -> Option<(f64, f64)> {
        match *self {
            CompactPoint::Finite { x, y } => Some((x, y)),
            CompactPoint::Infinity => None,
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        match *self {
            CompactPoint::Finite { x, y } => CompactPoint::Finite { x: alpha * x, y: alpha * y },
            CompactPoint::Infinity => CompactPoint::Infinity,
        }
    }

    /// Point on the unit sphere under inverse stereographic projection
    /// (infinity is the north pole).
    pub fn to_sphere(&self) -> [f64; 3] {
        match *self {
            CompactPoint::Finite { x, y } => {
                let s = x * x + y * y;
                [2.0 * x / (1.0 + s), 2.0 * y / (1.0 + s), (s - 1.0) / (1.0 + s)]
            }
            CompactPoint::Infinity => [0.0, 0.0, 1.0],
        }
    }
}

impl From<(f64, f64)> for CompactPoint {
    fn from((x, y): (f64, f64)) -> Self {
        CompactPoint::Finite { x, y }
    }
}

/// `(|u - v|, |1 + u·conj(v)|)` up to a common positive factor; the distance
/// is `atan2` of the pair.
#[inline]
pub(crate) fn chord_pair(u: &CompactPoint, v: &CompactPoint) -> (f64, f64) {
    match (*u, *v) {
        (CompactPoint::Finite { x: a, y: b }, CompactPoint::Finite { x: c, y: d }) => {
            // u·conj(v) = (a + ib)(c - id) = (ac + bd) + i(bc - ad)
            let num = (a - c).hypot(b - d);
            let den = (1.0 + a * c + b * d).hypot(b * c - a * d);
            (num, den)
        }
        (CompactPoint::Finite { x, y }, CompactPoint::Infinity) | (CompactPoint::Infinity, CompactPoint::Finite { x, y }) => {
            (1.0, x.hypot(y))
        }
        (CompactPoint::Infinity, CompactPoint::Infinity) => (0.0, 1.0),
    }
}

/// Geodesic distance in the compactified plane; values lie in `[0, π/2]`.
pub fn point_distance(u: &CompactPoint, v: &CompactPoint) -> f64 {
    let (num, den) = chord_pair(u, v);
    num.atan2(den)
}

/// `α·d(u, v) ≤ d(αu, αv) ≤ d(u, v)/α` for finite `u`, `v` and `0 < α < 1`,
/// with a `1e-12` allowance for rounding.
pub fn scale_bounds_check(u: &CompactPoint, v: &CompactPoint, alpha: f64) -> bool {
    let d = point_distance(u, v);
    let ds = point_distance(&u.scaled(alpha), &v.scaled(alpha));
    alpha * d <= ds + 1e-12 && ds <= d / alpha + 1e-12
}
