//! `perculab-curves v1`: a header with the spacing, time and curve count,
//! then per curve a line `loop|arc sign=<+1|-1> k=<segments>` followed by
//! `k + 1` lines `x y`. The point at infinity is written `inf inf`. A loop
//! repeats its first point at the end.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::text::{fmt_sign, Lines};
use super::{fmt_real, IoError};
use crate::dynamics::Spin;
use crate::geometry::{CompactPoint, Curve, CurveFamily};
use crate::topology::BoundaryCurve;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub closed: bool,
    /// Sign of the cells on the left.
    pub sign: Spin,
    pub points: Vec<CompactPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub delta: f64,
    pub time: u64,
    pub curves: Vec<CurveRecord>,
}

impl CurveFile {
    pub fn from_boundaries(curves: &[BoundaryCurve], delta: f64, time: u64) -> Self {
        let curves = curves
            .iter()
            .map(|b| CurveRecord {
                closed: b.is_loop(),
                sign: b.left_sign,
                points: b.embed(delta).into_iter().map(CompactPoint::from).collect(),
            })
            .collect();
        CurveFile { delta, time, curves }
    }

    pub fn to_family(&self) -> CurveFamily {
        let curves = self
            .curves
            .iter()
            .map(|r| Curve::new(r.points.clone(), r.closed).expect("records have at least one point"))
            .collect();
        CurveFamily::new(curves, self.delta, self.time)
    }
}

pub fn curves_to_string(f: &CurveFile) -> String {
    let mut out = format!(
        "perculab-curves v1 delta={} time={} count={}\n",
        fmt_real(f.delta),
        f.time,
        f.curves.len()
    );
    for r in &f.curves {
        let kind = if r.closed { "loop" } else { "arc" };
        let _ = writeln!(out, "{kind} sign={} k={}", fmt_sign(r.sign), r.points.len().saturating_sub(1));
        for p in &r.points {
            match p.coords() {
                Some((x, y)) => {
                    let _ = writeln!(out, "{} {}", fmt_real(x), fmt_real(y));
                }
                None => out.push_str("inf inf\n"),
            }
        }
    }
    out
}

pub fn parse_curves(text: &str) -> Result<CurveFile, IoError> {
    let mut lines = Lines::new(text)?;
    let h = lines.tokens("header")?;
    if h.len() != 5 || h[0] != "perculab-curves" || h[1] != "v1" {
        return lines.err("expected header `perculab-curves v1 delta=<real> time=<int> count=<int>`");
    }
    let delta = lines.real(lines.field(h.get(2), "delta")?, "delta")?;
    if delta <= 0.0 {
        return lines.err("delta must be positive");
    }
    let time: u64 = lines.parse(lines.field(h.get(3), "time")?, "time")?;
    let count: usize = lines.parse(lines.field(h.get(4), "count")?, "count")?;

    let mut curves = Vec::with_capacity(count.min(text.len()));
    for _ in 0..count {
        let t = lines.tokens("a curve header")?;
        if t.len() != 3 {
            return lines.err("expected `loop|arc sign=<+1|-1> k=<int>`");
        }
        let closed = match t[0] {
            "loop" => true,
            "arc" => false,
            other => return lines.err(format!("expected loop or arc, got {other:?}")),
        };
        let sign = lines.sign(lines.field(t.get(1), "sign")?)?;
        let k: usize = lines.parse(lines.field(t.get(2), "k")?, "k")?;
        let start = lines.line();
        let mut points = Vec::with_capacity(k.min(text.len()) + 1);
        for _ in 0..=k {
            let t = lines.tokens("a point")?;
            if t.len() != 2 {
                return lines.err(format!("expected 2 coordinates, got {}", t.len()));
            }
            if t == ["inf", "inf"] {
                points.push(CompactPoint::Infinity);
            } else {
                points.push(CompactPoint::Finite { x: lines.real(t[0], "x")?, y: lines.real(t[1], "y")? });
            }
        }
        if closed && points.first() != points.last() {
            return Err(IoError::Format { line: start, message: "a loop must end at its first point".into() });
        }
        curves.push(CurveRecord { closed, sign, points });
    }
    lines.finish()?;
    Ok(CurveFile { delta, time, curves })
}

pub fn read_curves(path: &Path) -> Result<CurveFile, IoError> {
    parse_curves(&std::fs::read_to_string(path)?)
}

pub fn write_curves(path: &Path, f: &CurveFile) -> Result<(), IoError> {
    std::fs::write(path, curves_to_string(f))?;
    Ok(())
}
