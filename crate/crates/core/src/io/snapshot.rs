//! `perculab-snapshot v1`: a header line, then one line per cell in
//! canonical row order. On `T` a cell line is `q r s`; on `H` it is
//! `q r sA sB`. The window centre is implied by the first cell.

use std::fmt::Write as _;
use std::path::Path;

use super::text::{fmt_sign, Lines};
use super::{fmt_real, IoError};
use crate::dynamics::{HexConfig, SpinConfig};
use crate::lattice::{Cell, HClass, Window};

#[derive(Clone, Debug, PartialEq)]
pub enum Snapshot {
    T(SpinConfig),
    H(HexConfig),
}

impl Snapshot {
    pub fn window(&self) -> &Window {
        match self {
            Snapshot::T(c) => c.window(),
            Snapshot::H(c) => c.window(),
        }
    }

    pub fn time(&self) -> u64 {
        match self {
            Snapshot::T(c) => c.time(),
            Snapshot::H(c) => c.time(),
        }
    }
}

pub fn snapshot_to_string(s: &Snapshot) -> String {
    let w = s.window();
    let lattice = if matches!(s, Snapshot::T(_)) { "T" } else { "H" };
    let mut out = format!(
        "perculab-snapshot v1 lattice={lattice} radius={} delta={} time={}\n",
        w.radius,
        fmt_real(w.spacing),
        s.time()
    );
    match s {
        Snapshot::T(c) => {
            for (i, x) in c.layout().cells().iter().enumerate() {
                let _ = writeln!(out, "{} {} {}", x.q, x.r, fmt_sign(c.spin_at(i)));
            }
        }
        Snapshot::H(c) => {
            let (a, b) = (c.class(HClass::A), c.class(HClass::B));
            for (i, x) in c.layout().cells().iter().enumerate() {
                let _ = writeln!(out, "{} {} {} {}", x.q, x.r, fmt_sign(a[i]), fmt_sign(b[i]));
            }
        }
    }
    out
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot, IoError> {
    let mut lines = Lines::new(text)?;
    let h = lines.tokens("header")?;
    if h.len() != 6 || h[0] != "perculab-snapshot" || h[1] != "v1" {
        return lines.err("expected header `perculab-snapshot v1 lattice=<T|H> radius=<int> delta=<real> time=<int>`");
    }
    let on_h = match lines.field(h.get(2), "lattice")? {
        "T" => false,
        "H" => true,
        other => return lines.err(format!("unknown lattice {other:?}")),
    };
    let radius: u32 = lines.parse(lines.field(h.get(3), "radius")?, "radius")?;
    let delta = lines.real(lines.field(h.get(4), "delta")?, "delta")?;
    if delta <= 0.0 {
        return lines.err("delta must be positive");
    }
    let time: u64 = lines.parse(lines.field(h.get(5), "time")?, "time")?;
    if radius > 1 << 14 {
        return lines.err("radius too large");
    }

    let count = Window::new(radius).cell_count();
    let width = if on_h { 4 } else { 3 };
    // the header alone must not trigger a large allocation
    let cap = count.min(text.len() / 6);
    let mut cells: Vec<Cell> = Vec::with_capacity(cap);
    let mut a = Vec::with_capacity(cap);
    let mut b = Vec::with_capacity(cap);
    for _ in 0..count {
        let t = lines.tokens("a cell line")?;
        if t.len() != width {
            return lines.err(format!("expected {width} fields, got {}", t.len()));
        }
        let q: i32 = lines.parse(t[0], "q")?;
        let r: i32 = lines.parse(t[1], "r")?;
        cells.push(Cell::new(q, r));
        a.push(lines.sign(t[2])?);
        if on_h {
            b.push(lines.sign(t[3])?);
        }
    }
    let first = cells[0];
    let center = Cell::new(first.q, first.r + radius as i32);
    let window = Window { center, radius, spacing: delta, margin: 0 };
    let layout = crate::dynamics::shared_layout(center, radius);
    if let Some(k) = (0..count).find(|&k| layout.cell(k) != cells[k]) {
        return Err(IoError::Format {
            line: k + 2,
            message: format!("cell {} out of canonical order, expected {}", cells[k], layout.cell(k)),
        });
    }
    lines.finish()?;
    Ok(if on_h {
        Snapshot::H(HexConfig::from_parts(window, a, b, time))
    } else {
        Snapshot::T(SpinConfig::from_parts(window, a, time))
    })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, IoError> {
    parse_snapshot(&std::fs::read_to_string(path)?)
}

pub fn write_snapshot(path: &Path, s: &Snapshot) -> Result<(), IoError> {
    std::fs::write(path, snapshot_to_string(s))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(s: &Snapshot) {
        let text = snapshot_to_string(s);
        let back = parse_snapshot(&text).unwrap();
        assert_eq!(&back, s);
        assert_eq!(back.time(), s.time());
        assert_eq!(back.window().spacing, s.window().spacing);
        assert_eq!(snapshot_to_string(&back), text);
    }

    #[test]
    fn all_plus_round_trips() {
        round_trip(&Snapshot::T(SpinConfig::uniform(Window::new(8), 1)));
        let text = snapshot_to_string(&Snapshot::T(SpinConfig::uniform(Window::new(8), 1)));
        assert!(text.starts_with("perculab-snapshot v1 lattice=T radius=8 delta=1.0000000000000000e0 time=0\n"));
        assert_eq!(text.lines().count(), 1 + 217);
    }

    #[test]
    fn random_and_off_centre_round_trip() {
        let w = Window { center: Cell::new(5, -3), radius: 6, spacing: 0.1, margin: 0 };
        round_trip(&Snapshot::T(SpinConfig::sample(w, 0.5, 9).unwrap().with_time(12)));
        round_trip(&Snapshot::H(HexConfig::sample(w, 0.3, 4).unwrap().with_time(3)));
    }

    #[test]
    fn every_truncation_is_rejected() {
        for s in [
            Snapshot::T(SpinConfig::sample(Window::new(3), 0.5, 1).unwrap()),
            Snapshot::H(HexConfig::sample(Window::new(2), 0.5, 1).unwrap()),
        ] {
            let text = snapshot_to_string(&s);
            for cut in 0..text.len() {
                assert!(matches!(parse_snapshot(&text[..cut]), Err(IoError::Format { .. })), "cut {cut}");
            }
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = snapshot_to_string(&Snapshot::T(SpinConfig::uniform(Window::new(2), 1)));
        let mut l: Vec<String> = text.lines().map(String::from).collect();
        l[3] = l[3].replace("+1", "0");
        let bad = l.join("\n") + "\n";
        match parse_snapshot(&bad) {
            Err(IoError::Format { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let swapped = {
            let mut l: Vec<&str> = text.lines().collect();
            l.swap(2, 3);
            l.join("\n") + "\n"
        };
        assert!(matches!(parse_snapshot(&swapped), Err(IoError::Format { line: 3, .. })));
        assert!(parse_snapshot(&(text.clone() + "extra\n")).is_err());
        assert!(parse_snapshot(&text.replace("lattice=T", "lattice=X")).is_err());
    }
}
