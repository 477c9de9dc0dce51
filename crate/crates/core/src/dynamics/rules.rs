use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{shared_layout, BoundaryMode, DynamicsError, HexConfig, Spin, SpinConfig};
use crate::lattice::{directions_adjacent, HClass, Layout, Window, NO_NEIGHBOR};

/// Below this many sites a step runs on the calling thread.
const PAR_THRESHOLD: usize = 1 << 15;

fn map_sites(n: usize, f: impl Fn(usize) -> Spin + Sync + Send) -> Vec<Spin> {
    if n >= PAR_THRESHOLD {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// Rule T keeps `σ_x` iff two agreeing neighbours are mutually non-adjacent.
/// `agree` has bit `i` set when the neighbour in direction `i` agrees with `x`.
pub const fn t_keeps(agree: u8) -> bool {
    let mut i = 0;
    while i < 6 {
        let mut j = i + 1;
        while j < 6 {
            if agree & (1 << i) != 0 && agree & (1 << j) != 0 && !directions_adjacent(i, j) {
                return true;
            }
            j += 1;
        }
        i += 1;
    }
    false
}

const fn t_flip_table() -> [bool; 64] {
    let mut t = [false; 64];
    let mut m = 0;
    while m < 64 {
        t[m] = !t_keeps(m as u8);
        m += 1;
    }
    t
}

static T_FLIP: [bool; 64] = t_flip_table();

/// Three disjoint pairs of cyclically adjacent directions covering all six.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairingScheme {
    pairs: [(u8, u8); 3],
}

impl Default for PairingScheme {
    /// `(E, NE), (NW, W), (SW, SE)`: the pairing induced by the star-triangle
    /// embedding used by the sublattice dynamics.
    fn default() -> Self {
        PairingScheme { pairs: [(0, 1), (2, 3), (4, 5)] }
    }
}

impl PairingScheme {
    pub fn new(pairs: [(u8, u8); 3]) -> Result<Self, DynamicsError> {
        let mut seen = 0u8;
        for (a, b) in pairs {
            if a > 5 || b > 5 {
                return Err(DynamicsError::InvalidPairing(format!("direction index out of range in {pairs:?}")));
            }
            if !directions_adjacent(a as usize, b as usize) {
                return Err(DynamicsError::InvalidPairing(format!("directions {a} and {b} are not adjacent")));
            }
            seen |= (1 << a) | (1 << b);
        }
        if seen != 0b11_1111 {
            return Err(DynamicsError::InvalidPairing(format!("{pairs:?} does not partition the directions")));
        }
        Ok(PairingScheme { pairs })
    }

    /// `(NE, NW), (W, SW), (SE, E)`.
    pub fn alternate() -> Self {
        PairingScheme { pairs: [(1, 2), (3, 4), (5, 0)] }
    }

    pub fn pairs(&self) -> [(u8, u8); 3] {
        self.pairs
    }

    /// Parses `"01,23,45"` (direction indices, pairs separated by commas).
    pub fn parse(s: &str) -> Result<Self, DynamicsError> {
        let bad = || DynamicsError::InvalidPairing(format!("cannot parse {s:?}"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut pairs = [(0u8, 0u8); 3];
        for (slot, p) in pairs.iter_mut().zip(&parts) {
            let d: Vec<u8> = p.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect::<Option<_>>().ok_or_else(bad)?;
            if d.len() != 2 {
                return Err(bad());
            }
            *slot = (d[0], d[1]);
        }
        Self::new(pairs)
    }
}

impl std::fmt::Display for PairingScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [(a, b), (c, d), (e, g)] = self.pairs;
        write!(f, "{a}{b},{c}{d},{e}{g}")
    }
}

/// Flip table of rule Q indexed by the agreement mask: flip iff at least two
/// pairs are unanimously opposite to `x`.
pub fn q_flip_table(p: &PairingScheme) -> [bool; 64] {
    let mut t = [false; 64];
    for (m, slot) in t.iter_mut().enumerate() {
        let opposite = !m & 63;
        let unanimous = p
            .pairs
            .iter()
            .filter(|(a, b)| opposite & (1 << a) != 0 && opposite & (1 << b) != 0)
            .count();
        *slot = unanimous >= 2;
    }
    t
}

#[inline]
fn agreement(spins: &[Spin], nb: &[u32; 6], s: Spin) -> u8 {
    let mut m = 0;
    for (k, &n) in nb.iter().enumerate() {
        if spins[n as usize] == s {
            m |= 1 << k;
        }
    }
    m
}

fn step_with_table(c: &SpinConfig, flip: &[bool; 64], mode: BoundaryMode) -> Result<SpinConfig, DynamicsError> {
    let old = c.layout();
    let spins = c.spins();
    match mode {
        BoundaryMode::FrozenRing => {
            let next = map_sites(old.len(), |i| {
                let nb = old.neighbors(i);
                let s = spins[i];
                if nb.contains(&NO_NEIGHBOR) || !flip[agreement(spins, nb, s) as usize] {
                    s
                } else {
                    -s
                }
            });
            Ok(SpinConfig::from_parts(*c.window(), next, c.time() + 1))
        }
        BoundaryMode::Shrinking => {
            let w = c.window().shrunk().ok_or(DynamicsError::MarginExhausted { time: c.time() })?;
            let new = shared_layout(w.center, w.radius);
            let next = map_sites(new.len(), |j| {
                let i = old.index_of(new.cell(j)).expect("inner ring lies in the old window");
                let s = spins[i];
                if flip[agreement(spins, old.neighbors(i), s) as usize] {
                    -s
                } else {
                    s
                }
            });
            Ok(SpinConfig::from_parts(w, next, c.time() + 1))
        }
    }
}

/// One synchronous step of automaton T.
pub fn step_t(c: &SpinConfig, mode: BoundaryMode) -> Result<SpinConfig, DynamicsError> {
    step_with_table(c, &T_FLIP, mode)
}

/// One synchronous step of automaton Q with the given pairing.
pub fn step_q(c: &SpinConfig, pairing: &PairingScheme, mode: BoundaryMode) -> Result<SpinConfig, DynamicsError> {
    step_with_table(c, &q_flip_table(pairing), mode)
}

/// A site of `H` flips iff at least two of its three neighbours disagree.
#[inline]
pub fn domany_flips(s: Spin, neighbors: [Spin; 3]) -> bool {
    neighbors.iter().filter(|&&n| n != s).count() >= 2
}

#[inline]
fn majority(a: Spin, b: Spin, c: Spin) -> Spin {
    if a as i32 + b as i32 + c as i32 > 0 {
        1
    } else {
        -1
    }
}

/// Index triples of the `H`-neighbours of each class inside one layout. A
/// neighbour outside the window is `NO_NEIGHBOR`.
#[inline]
fn h_neighbors(l: &Layout, i: usize, k: HClass) -> [u32; 3] {
    let nb = l.neighbors(i);
    match k {
        // A(x) ~ B(x), B(x+E), B(x+NE)
        HClass::A => [i as u32, nb[0], nb[1]],
        // B(x) ~ A(x), A(x+W), A(x+SW)
        HClass::B => [i as u32, nb[3], nb[4]],
    }
}

/// New values of class `k` read from `other` (the opposite class), or `None`
/// to keep the old value.
fn update_class(
    old: &Layout,
    new: &Layout,
    own: &[Spin],
    other: &[Spin],
    k: HClass,
    frozen_ring: bool,
) -> Vec<Spin> {
    let same = std::ptr::eq(old, new);
    map_sites(new.len(), |j| {
        let i = if same { j } else { old.index_of(new.cell(j)).expect("inner ring lies in the old window") };
        let [a, b, c] = h_neighbors(old, i, k);
        if frozen_ring && (b == NO_NEIGHBOR || c == NO_NEIGHBOR) {
            return own[i];
        }
        majority(other[a as usize], other[b as usize], other[c as usize])
    })
}

fn copy_class(old: &Layout, new: &Layout, v: &[Spin]) -> Vec<Spin> {
    if std::ptr::eq(old, new) {
        return v.to_vec();
    }
    new.cells().iter().map(|&c| v[old.index_of(c).expect("sub-window")]).collect()
}

fn target_window(w: &Window, time: u64, mode: BoundaryMode) -> Result<Window, DynamicsError> {
    match mode {
        BoundaryMode::FrozenRing => Ok(*w),
        BoundaryMode::Shrinking => w.shrunk().ok_or(DynamicsError::MarginExhausted { time }),
    }
}

/// One half-step of the zero-temperature Domany dynamics: only class `phase` updates.
pub fn step_domany(c: &HexConfig, phase: HClass, mode: BoundaryMode) -> Result<HexConfig, DynamicsError> {
    let w = target_window(c.window(), c.time(), mode)?;
    let old = c.layout().clone();
    let new = if mode == BoundaryMode::FrozenRing { old.clone() } else { shared_layout(w.center, w.radius) };
    let frozen = mode == BoundaryMode::FrozenRing;
    let (a, b) = match phase {
        HClass::A => (
            update_class(&old, &new, c.class(HClass::A), c.class(HClass::B), HClass::A, frozen),
            copy_class(&old, &new, c.class(HClass::B)),
        ),
        HClass::B => (
            copy_class(&old, &new, c.class(HClass::A)),
            update_class(&old, &new, c.class(HClass::B), c.class(HClass::A), HClass::B, frozen),
        ),
    };
    Ok(HexConfig::from_parts(w, a, b, c.time() + 1))
}

/// One step of the totally synchronous dynamics on `H`: both classes update
/// from the common old state.
pub fn step_sync_h(c: &HexConfig, mode: BoundaryMode) -> Result<HexConfig, DynamicsError> {
    let w = target_window(c.window(), c.time(), mode)?;
    let old = c.layout().clone();
    let new = if mode == BoundaryMode::FrozenRing { old.clone() } else { shared_layout(w.center, w.radius) };
    let frozen = mode == BoundaryMode::FrozenRing;
    let a = update_class(&old, &new, c.class(HClass::A), c.class(HClass::B), HClass::A, frozen);
    let b = update_class(&old, &new, c.class(HClass::B), c.class(HClass::A), HClass::B, frozen);
    Ok(HexConfig::from_parts(w, a, b, c.time() + 1))
}
