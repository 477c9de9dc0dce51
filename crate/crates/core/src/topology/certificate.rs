//! Sound, incomplete detection of stable cells: every certificate is a
//! verified constant-sign m-loop, which rule T can never change.

use std::collections::VecDeque;
use std::sync::Arc;

use super::boundary::unsatisfied_edges;
use super::mpath::{is_m_path, is_path, shortcut_corners, MPath};
use crate::dynamics::{t_keeps, Spin, SpinConfig};
use crate::lattice::{directions_adjacent, Cell, DualEdge, Layout, NO_NEIGHBOR};

pub const DEFAULT_SEARCH_RADIUS: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub sign: Spin,
    pub witness: MPath,
}

impl Certificate {
    /// Re-checks the witness against `c`.
    pub fn verify(&self, c: &SpinConfig) -> bool {
        let cells = self.witness.cells();
        self.witness.is_loop()
            && is_path(cells, true)
            && is_m_path(cells, true)
            && cells.iter().all(|&x| c.get(x) == Some(self.sign))
    }
}

/// Certificates found in a configuration and the cells they cover.
#[derive(Clone, Debug)]
pub struct Certificates {
    layout: Arc<Layout>,
    covered: Vec<Spin>,
    loops: Vec<Certificate>,
}

impl Certificates {
    pub fn loops(&self) -> &[Certificate] {
        &self.loops
    }

    /// Sign of the certificate covering `x`, if any.
    pub fn covered(&self, x: Cell) -> Option<Spin> {
        self.layout.index_of(x).and_then(|i| (self.covered[i] != 0).then_some(self.covered[i]))
    }

    pub fn covered_cells(&self) -> Vec<Cell> {
        (0..self.layout.len()).filter(|&i| self.covered[i] != 0).map(|i| self.layout.cell(i)).collect()
    }

    pub fn covered_count(&self) -> usize {
        self.covered.iter().filter(|&&s| s != 0).count()
    }

    /// Boundary edges whose two cells are both covered (necessarily by loops
    /// of opposite sign).
    pub fn stable_edges(&self, c: &SpinConfig) -> Vec<DualEdge> {
        unsatisfied_edges(c)
            .into_iter()
            .filter(|e| self.covered(e.a).is_some() && self.covered(e.b).is_some())
            .collect()
    }
}

struct Search<'a> {
    c: &'a SpinConfig,
    layout: &'a Layout,
    radius: u32,
    stamp: Vec<u32>,
    parent: Vec<u32>,
    epoch: u32,
    queue: VecDeque<usize>,
}

impl<'a> Search<'a> {
    fn new(c: &'a SpinConfig, radius: u32) -> Self {
        let n = c.len();
        Search {
            c,
            layout: c.layout(),
            radius,
            stamp: vec![0; n],
            parent: vec![u32::MAX; n],
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    /// Breadth-first search from `from` through same-sign cells near `x`,
    /// avoiding `x` and its neighbours. Returns the visited-epoch.
    fn flood(&mut self, x: usize, from: usize, blocked: &[usize; 7]) -> u32 {
        self.epoch += 1;
        let epoch = self.epoch;
        let s = self.c.spin_at(x);
        let centre = self.layout.cell(x);
        self.queue.clear();
        self.stamp[from] = epoch;
        self.parent[from] = u32::MAX;
        self.queue.push_back(from);
        while let Some(i) = self.queue.pop_front() {
            for &j in self.layout.neighbors(i) {
                if j == NO_NEIGHBOR {
                    continue;
                }
                let j = j as usize;
                if self.stamp[j] == epoch || self.c.spin_at(j) != s || blocked.contains(&j) {
                    continue;
                }
                if centre.distance(self.layout.cell(j)) > self.radius {
                    continue;
                }
                self.stamp[j] = epoch;
                self.parent[j] = i as u32;
                self.queue.push_back(j);
            }
        }
        epoch
    }

    /// Shortest route from the flood source to `to`, entering `to` from a
    /// visited neighbour.
    fn route(&self, epoch: u32, to: usize, blocked: &[usize; 7]) -> Option<Vec<usize>> {
        let entry = self
            .layout
            .neighbors(to)
            .iter()
            .filter(|&&j| j != NO_NEIGHBOR && self.stamp[j as usize] == epoch && !blocked.contains(&(j as usize)))
            .copied()
            .next()?;
        let mut path = vec![to];
        let mut k = entry;
        while k != u32::MAX {
            path.push(k as usize);
            k = self.parent[k as usize];
        }
        path.reverse();
        Some(path)
    }
}

/// Looks for a constant-sign m-loop through every not-yet-covered cell of
/// `region` (the whole window when `None`), searching within graph distance
/// `search_radius` of the cell.
pub fn stability_certificates(c: &SpinConfig, region: Option<&[Cell]>, search_radius: u32) -> Certificates {
    let layout = c.layout().clone();
    let mut covered = vec![0 as Spin; layout.len()];
    let mut loops = Vec::new();
    let candidates: Vec<usize> = match region {
        Some(r) => {
            let mut v: Vec<usize> = r.iter().filter_map(|&x| layout.index_of(x)).collect();
            v.sort_unstable();
            v.dedup();
            v
        }
        None => (0..layout.len()).collect(),
    };
    let mut search = Search::new(c, search_radius.max(1));
    for x in candidates {
        if covered[x] != 0 {
            continue;
        }
        let s = c.spin_at(x);
        let nb = *layout.neighbors(x);
        let mut agree = 0u8;
        for (k, &j) in nb.iter().enumerate() {
            if j != NO_NEIGHBOR && c.spin_at(j as usize) == s {
                agree |= 1 << k;
            }
        }
        if !t_keeps(agree) {
            continue;
        }
        let mut blocked = [x; 7];
        for (k, &j) in nb.iter().enumerate() {
            if j != NO_NEIGHBOR {
                blocked[k + 1] = j as usize;
            }
        }
        'outer: for a in 0..6 {
            if agree & (1 << a) == 0 {
                continue;
            }
            let partners: Vec<usize> =
                (a + 1..6).filter(|&b| agree & (1 << b) != 0 && !directions_adjacent(a, b)).collect();
            if partners.is_empty() {
                continue;
            }
            let y1 = nb[a] as usize;
            // y1 is a block entry; let the flood start from it regardless.
            let epoch = search.flood(x, y1, &blocked);
            for b in partners {
                let y2 = nb[b] as usize;
                let Some(route) = search.route(epoch, y2, &blocked) else { continue };
                let path: Vec<Cell> = route.iter().map(|&i| layout.cell(i)).collect();
                let mut cells = vec![layout.cell(x)];
                cells.extend(shortcut_corners(&path));
                if !(is_path(&cells, true) && is_m_path(&cells, true)) {
                    continue;
                }
                for &cell in &cells {
                    covered[layout.index_of(cell).expect("searched inside the window")] = s;
                }
                let witness = MPath::new(cells, true).expect("checked above");
                loops.push(Certificate { sign: s, witness });
                break 'outer;
            }
        }
    }
    Certificates { layout, covered, loops }
}

/// Dual edges separating cells that both lie on certified loops.
pub fn stable_edges(c: &SpinConfig, region: Option<&[Cell]>, search_radius: u32) -> Vec<DualEdge> {
    stability_certificates(c, region, search_radius).stable_edges(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{step_t, BoundaryMode};
    use crate::lattice::{neighbors_t, Window};

    #[test]
    fn isolated_ring_is_certified() {
        let ring = neighbors_t(Cell::ORIGIN);
        let c = SpinConfig::from_fn(Window::new(6), |x| if ring.contains(&x) { 1 } else { -1 });
        let certs = stability_certificates(&c, Some(&ring), DEFAULT_SEARCH_RADIUS);
        assert_eq!(certs.loops().len(), 1);
        assert!(certs.loops()[0].verify(&c));
        assert_eq!(certs.loops()[0].witness.len(), 6);
        for y in ring {
            assert_eq!(certs.covered(y), Some(1));
        }
    }

    #[test]
    fn all_plus_is_certified_but_has_no_stable_edges() {
        let c = SpinConfig::uniform(Window::new(8), 1);
        let certs = stability_certificates(&c, None, 4);
        assert_eq!(certs.covered_count(), c.len());
        assert!(certs.stable_edges(&c).is_empty());
    }

    #[test]
    fn abutting_rings_give_stable_edges() {
        let a = Cell::ORIGIN;
        let b = Cell::new(3, 0);
        let ra = neighbors_t(a);
        let rb = neighbors_t(b);
        // plus ring around a, minus ring around b; they touch along E of a's ring
        let c = SpinConfig::from_fn(Window::new(8), |x| {
            if ra.contains(&x) {
                1
            } else if rb.contains(&x) {
                -1
            } else if x.q <= 1 {
                -1
            } else {
                1
            }
        });
        let e = DualEdge::new(Cell::new(1, 0), Cell::new(2, 0)).unwrap();
        let edges = stable_edges(&c, None, DEFAULT_SEARCH_RADIUS);
        assert!(edges.contains(&e), "{edges:?}");
    }

    #[test]
    fn certified_cells_never_flip() {
        for seed in 0..100 {
            let mut c = SpinConfig::sample(Window::new(24), 0.5, seed).unwrap();
            let certs = stability_certificates(&c, None, DEFAULT_SEARCH_RADIUS);
            let cov = certs.covered_cells();
            for l in certs.loops() {
                assert!(l.verify(&c));
            }
            for _ in 0..50 {
                c = step_t(&c, BoundaryMode::FrozenRing).unwrap();
            }
            for x in cov {
                assert_eq!(Some(c.spin(x).unwrap()), certs.covered(x), "seed {seed} cell {x}");
            }
        }
    }
}
