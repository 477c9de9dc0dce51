use std::collections::HashSet;

use super::TopologyError;
use crate::lattice::{are_neighbors, Cell};

/// A path (or loop) of cells in which `ζ_{i-1}` and `ζ_{i+1}` are never
/// neighbours. Loops list each cell once; the closing step from the last
/// cell back to the first is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPath {
    cells: Vec<Cell>,
    closed: bool,
}

impl MPath {
    pub fn new(cells: Vec<Cell>, closed: bool) -> Result<Self, TopologyError> {
        if !is_path(&cells, closed) {
            return Err(TopologyError::InvalidPath("cells are not a simple path".into()));
        }
        if !is_m_path(&cells, closed) {
            return Err(TopologyError::InvalidPath("path has a corner between neighbouring cells".into()));
        }
        Ok(MPath { cells, closed })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<Cell> {
        self.cells
    }

    pub fn is_loop(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Distinct cells with consecutive entries neighbouring; a closed path also
/// needs the last cell next to the first and at least three cells.
pub fn is_path(cells: &[Cell], closed: bool) -> bool {
    if cells.is_empty() {
        return false;
    }
    let distinct: HashSet<&Cell> = cells.iter().collect();
    if distinct.len() != cells.len() {
        return false;
    }
    if !cells.windows(2).all(|w| are_neighbors(w[0], w[1])) {
        return false;
    }
    !closed || (cells.len() >= 3 && are_neighbors(cells[cells.len() - 1], cells[0]))
}

/// The m-condition only; loops must also have at least six cells.
pub fn is_m_path(cells: &[Cell], closed: bool) -> bool {
    let n = cells.len();
    if closed {
        n >= 6 && (0..n).all(|i| !are_neighbors(cells[(i + n - 1) % n], cells[(i + 1) % n]))
    } else {
        cells.windows(3).all(|w| !are_neighbors(w[0], w[2]))
    }
}

/// Removes corner cells until no `ζ_{i-1}`, `ζ_{i+1}` are neighbours. The
/// result uses a subset of the input cells and keeps both endpoints.
pub fn extract_m_path(path: &[Cell]) -> Result<MPath, TopologyError> {
    if !is_path(path, false) {
        return Err(TopologyError::InvalidPath("input is not a simple path".into()));
    }
    Ok(MPath { cells: shortcut_corners(path), closed: false })
}

pub(crate) fn shortcut_corners(path: &[Cell]) -> Vec<Cell> {
    let mut out: Vec<Cell> = Vec::with_capacity(path.len());
    for &c in path {
        out.push(c);
        while out.len() >= 3 && are_neighbors(out[out.len() - 3], out[out.len() - 1]) {
            let last = out.pop().unwrap();
            out.pop();
            out.push(last);
        }
    }
    out
}

/// Cyclic corner removal for a closed simple path; `None` when the repaired
/// loop is shorter than six cells.
pub fn repair_m_loop(cells: &[Cell]) -> Option<MPath> {
    if !is_path(cells, true) {
        return None;
    }
    let mut v = cells.to_vec();
    loop {
        let n = v.len();
        if n < 6 {
            return None;
        }
        match (0..n).find(|&i| are_neighbors(v[(i + n - 1) % n], v[(i + 1) % n])) {
            Some(i) => {
                v.remove(i);
            }
            None => return Some(MPath { cells: v, closed: true }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{neighbors_t, Direction};
    use proptest::prelude::*;

    fn ring(x: Cell) -> Vec<Cell> {
        neighbors_t(x).to_vec()
    }

    #[test]
    fn hexagonal_ring_is_m_loop() {
        assert!(MPath::new(ring(Cell::ORIGIN), true).is_ok());
    }

    #[test]
    fn m_path_is_unchanged() {
        let p: Vec<Cell> = (0..6).map(|i| Cell::new(i, 0)).collect();
        assert_eq!(extract_m_path(&p).unwrap().cells(), &p[..]);
    }

    #[test]
    fn corner_is_removed() {
        let a = Cell::ORIGIN;
        let b = a.step(Direction::E);
        let c = b.step(Direction::NW); // neighbour of a
        let d = c.step(Direction::NE);
        let m = extract_m_path(&[a, b, c, d]).unwrap();
        assert_eq!(m.cells(), &[a, c, d]);
    }

    #[test]
    fn invalid_input_is_rejected() {
        assert!(extract_m_path(&[Cell::ORIGIN, Cell::new(2, 0)]).is_err());
        assert!(extract_m_path(&[Cell::ORIGIN, Cell::new(1, 0), Cell::ORIGIN]).is_err());
        assert!(extract_m_path(&[]).is_err());
    }

    fn random_path(steps: Vec<u8>) -> Vec<Cell> {
        let mut p = vec![Cell::ORIGIN];
        let mut seen: HashSet<Cell> = p.iter().copied().collect();
        for s in steps {
            let next = p.last().unwrap().step(Direction::from_index(s as usize));
            if seen.insert(next) {
                p.push(next);
            }
            else {
                break;
            }
        }
        p
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn extraction_is_valid(steps in proptest::collection::vec(0u8..6, 0..20)) {
            let p = random_path(steps);
            let m = extract_m_path(&p).unwrap();
            prop_assert!(is_path(m.cells(), false));
            prop_assert!(is_m_path(m.cells(), false));
            prop_assert_eq!(m.cells()[0], p[0]);
            prop_assert_eq!(m.cells().last(), p.last());
            let set: HashSet<&Cell> = p.iter().collect();
            prop_assert!(m.cells().iter().all(|c| set.contains(c)));
            prop_assert_eq!(extract_m_path(m.cells()).unwrap(), m);
        }
    }

    #[test]
    fn loop_repair_cuts_corners() {
        // ring of the origin plus a detour cell whose neighbours on the loop are adjacent
        let mut l = ring(Cell::ORIGIN);
        let bump = Cell::new(1, 1); // neighbour of both E and NE
        l.insert(1, bump);
        assert!(!is_m_path(&l, true));
        let m = repair_m_loop(&l).unwrap();
        assert!(is_m_path(m.cells(), true));
    }
}
