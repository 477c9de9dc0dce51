//! Cells strictly inside a closed lattice polygon, by even-odd scanlines in
//! the integer `(U, V)` frame of [`Cell::lattice_point`].

use std::collections::HashSet;

use crate::lattice::Cell;

/// Cells whose centres lie strictly inside the polygon `poly` (closing edge
/// implicit), minus `exclude`. Crossings use the half-open rule, so a cell
/// centre that coincides with a vertex must be excluded by the caller.
pub fn cells_inside(poly: &[(i64, i64)], exclude: &HashSet<Cell>) -> Vec<Cell> {
    let n = poly.len();
    if n < 3 {
        return Vec::new();
    }
    let vmin = poly.iter().map(|p| p.1).min().unwrap();
    let vmax = poly.iter().map(|p| p.1).max().unwrap();
    let mut out = Vec::new();
    // Cell rows have V = 3r.
    let rmin = vmin.div_euclid(3);
    let rmax = vmax.div_euclid(3) + 1;
    let mut xs: Vec<(i64, i64)> = Vec::new();
    for r in rmin..=rmax {
        let y = 3 * r;
        xs.clear();
        for k in 0..n {
            let (p, q) = (poly[k], poly[(k + 1) % n]);
            if (p.1 <= y && y < q.1) || (q.1 <= y && y < p.1) {
                // U = p.U + (y - p.V)(q.U - p.U)/(q.V - p.V) as num/den with den > 0
                let mut den = q.1 - p.1;
                let mut num = p.0 * den + (y - p.1) * (q.0 - p.0);
                if den < 0 {
                    den = -den;
                    num = -num;
                }
                xs.push((num, den));
            }
        }
        xs.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
        for pair in xs.chunks_exact(2) {
            let ((n0, d0), (n1, d1)) = (pair[0], pair[1]);
            // U = 6q + 3r strictly between n0/d0 and n1/d1
            let q_lo = (n0 - 3 * r * d0).div_euclid(6 * d0) + 1;
            let q_hi = -((-(n1 - 3 * r * d1)).div_euclid(6 * d1)) - 1;
            for q in q_lo..=q_hi {
                let c = Cell::new(q as i32, r as i32);
                if !exclude.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Cells strictly inside a closed loop of cells (the polygon through their centres).
pub fn cell_loop_interior(cells: &[Cell]) -> Vec<Cell> {
    let poly: Vec<(i64, i64)> = cells.iter().map(|c| c.lattice_point()).collect();
    let exclude: HashSet<Cell> = cells.iter().copied().collect();
    cells_inside(&poly, &exclude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{neighbors_t, Direction};

    /// Point-in-polygon by the winding of a far ray evaluated in floating point.
    fn winding_oracle(poly: &[(i64, i64)], p: (i64, i64)) -> bool {
        let (px, py) = (p.0 as f64, p.1 as f64 + 1e-7);
        let mut inside = false;
        let n = poly.len();
        for k in 0..n {
            let (a, b) = (poly[k], poly[(k + 1) % n]);
            let (ax, ay, bx, by) = (a.0 as f64, a.1 as f64, b.0 as f64, b.1 as f64);
            if (ay > py) != (by > py) {
                let x = ax + (py - ay) * (bx - ax) / (by - ay);
                if x > px {
                    inside = !inside;
                }
            }
        }
        inside
    }

    #[test]
    fn ring_encloses_its_centre() {
        let x = Cell::new(2, -1);
        assert_eq!(cell_loop_interior(&neighbors_t(x)), vec![x]);
    }

    #[test]
    fn larger_ring() {
        // ring of radius 2 around the origin, walked counter-clockwise
        let mut ring = Vec::new();
        let mut c = Cell::new(0, -2).step(Direction::E).step(Direction::E);
        for d in [Direction::NE, Direction::NW, Direction::W, Direction::SW, Direction::SE, Direction::E] {
            for _ in 0..2 {
                ring.push(c);
                c = c.step(d);
            }
        }
        let mut inside = cell_loop_interior(&ring);
        inside.sort();
        let mut expect: Vec<Cell> = std::iter::once(Cell::ORIGIN).chain(neighbors_t(Cell::ORIGIN)).collect();
        expect.sort();
        assert_eq!(inside, expect);
    }

    #[test]
    fn matches_float_oracle_on_hexagon_corners() {
        use crate::lattice::DualVertex;
        // boundary of a three-cell blob traced through hexagon corners
        let x = Cell::ORIGIN;
        let poly: Vec<(i64, i64)> = (0..6).map(|j| DualVertex::corner(x, j).lattice_point()).collect();
        let inside = cells_inside(&poly, &HashSet::new());
        assert_eq!(inside, vec![x]);
        for q in -3..3 {
            for r in -3..3 {
                let c = Cell::new(q, r);
                assert_eq!(winding_oracle(&poly, c.lattice_point()), c == x);
            }
        }
    }
}
