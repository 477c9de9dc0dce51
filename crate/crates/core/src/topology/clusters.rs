use std::sync::Arc;

use crate::dynamics::{Spin, SpinConfig};
use crate::lattice::{Cell, Layout, NO_NEIGHBOR};

/// A maximal same-sign `T`-connected set of cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub id: u32,
    pub sign: Spin,
    /// Cells in canonical row order.
    pub cells: Vec<Cell>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ClusterInfo {
    pub sign: Spin,
    pub size: usize,
    /// Canonical index of the first cell; ids are ordered by it.
    pub first: usize,
    /// Whether some cell lies on the outermost ring of the window.
    pub touches_ring: bool,
}

/// Cluster id of every cell of a window.
#[derive(Clone, Debug)]
pub struct ClusterLabels {
    layout: Arc<Layout>,
    label: Vec<u32>,
    info: Vec<ClusterInfo>,
}

impl ClusterLabels {
    pub fn new(c: &SpinConfig) -> Self {
        let layout = c.layout().clone();
        let n = layout.len();
        let mut label = vec![u32::MAX; n];
        let mut info = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != u32::MAX {
                continue;
            }
            let id = info.len() as u32;
            let sign = c.spin_at(start);
            let mut size = 0;
            let mut touches_ring = false;
            label[start] = id;
            stack.push(start);
            while let Some(i) = stack.pop() {
                size += 1;
                for &j in layout.neighbors(i) {
                    if j == NO_NEIGHBOR {
                        touches_ring = true;
                        continue;
                    }
                    let j = j as usize;
                    if label[j] == u32::MAX && c.spin_at(j) == sign {
                        label[j] = id;
                        stack.push(j);
                    }
                }
            }
            info.push(ClusterInfo { sign, size, first: start, touches_ring });
        }
        ClusterLabels { layout, label, info }
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn count(&self) -> usize {
        self.info.len()
    }

    #[inline]
    pub fn label_at(&self, i: usize) -> u32 {
        self.label[i]
    }

    pub fn label(&self, x: Cell) -> Option<u32> {
        self.layout.index_of(x).map(|i| self.label[i])
    }

    pub fn labels(&self) -> &[u32] {
        &self.label
    }

    pub fn info(&self, id: u32) -> &ClusterInfo {
        &self.info[id as usize]
    }

    pub fn infos(&self) -> &[ClusterInfo] {
        &self.info
    }

    pub fn clusters(&self, c: &SpinConfig) -> Vec<Cluster> {
        let mut out: Vec<Cluster> = self
            .info
            .iter()
            .enumerate()
            .map(|(id, inf)| Cluster { id: id as u32, sign: inf.sign, cells: Vec::with_capacity(inf.size) })
            .collect();
        for (i, &l) in self.label.iter().enumerate() {
            out[l as usize].cells.push(self.layout.cell(i));
        }
        debug_assert!(out.iter().all(|k| c.spin(k.cells[0]).ok() == Some(k.sign)));
        out
    }
}

/// Same-sign connected components, ids ordered by their first cell in row order.
pub fn clusters(c: &SpinConfig) -> Vec<Cluster> {
    ClusterLabels::new(c).clusters(c)
}
