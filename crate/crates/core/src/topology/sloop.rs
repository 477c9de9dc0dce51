//! Loops of the B-class of `H` and their intermediate A-sites.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::TopologyError;
use crate::lattice::{are_neighbors, shared_a_site, Cell, HSite};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SLoopClass {
    /// Distinct intermediate A-sites, more than three B-sites.
    SLoop,
    /// Three B-sites with one common A-neighbour.
    Star,
    /// Three B-sites with three distinct intermediate A-sites.
    Antistar,
    NotSLoop,
}

/// A-sites `ζ_i` joining consecutive B-sites of a closed sequence.
pub fn intermediate_a_sites(cells: &[Cell]) -> Result<Vec<HSite>, TopologyError> {
    let n = cells.len();
    (0..n)
        .map(|i| {
            shared_a_site(cells[i], cells[(i + 1) % n])
                .map_err(|_| TopologyError::InvalidPath(format!("{} and {} are not neighbours", cells[i], cells[(i + 1) % n])))
        })
        .collect()
}

/// Classifies a closed sequence of distinct B-sites (cells of `T`) whose
/// consecutive entries are `T`-neighbours.
pub fn classify_b_loop(cells: &[Cell]) -> Result<SLoopClass, TopologyError> {
    let n = cells.len();
    if n < 3 {
        return Err(TopologyError::InvalidPath("a loop needs at least three sites".into()));
    }
    if cells.iter().collect::<HashSet<_>>().len() != n || !are_neighbors(cells[n - 1], cells[0]) {
        return Err(TopologyError::InvalidPath("not a closed simple loop".into()));
    }
    let zeta = intermediate_a_sites(cells)?;
    let distinct = zeta.iter().collect::<HashSet<_>>().len();
    Ok(match (n, distinct) {
        (3, 1) => SLoopClass::Star,
        (3, 3) => SLoopClass::Antistar,
        (3, _) => SLoopClass::NotSLoop,
        (_, d) if d == n => SLoopClass::SLoop,
        _ => SLoopClass::NotSLoop,
    })
}
