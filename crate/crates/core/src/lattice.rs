//! Triangular lattice `T` in axial coordinates, its dual honeycomb, and the
//! hexagonal lattice `H` obtained by the star-triangle construction.
//!
//! Sites of `T` are the hexagonal cells of the honeycomb. Cell `(q, r)` is
//! embedded (pointy-top orientation) at `δ·(q + r/2, r·√3/2)`, so `T`
//! neighbours sit at Euclidean distance `δ` and the honeycomb sides have
//! length `δ/√3`.
//!
//! Dual vertices (hexagon corners) are the triangles of `T`. Every triangle is
//! either an *up* triangle `{x, x+E, x+NE}` or a *down* triangle
//! `{x, x+NE, x+NW}`, indexed by `x`.
//!
//! The hexagonal lattice `H` used by the sublattice dynamics has class-B sites
//! equal to the cells of `T` and class-A sites at the centres of the up
//! triangles. `HSite { base, klass: A }` therefore sits at the centroid of
//! `{base, base+E, base+NE}`, and two `T`-neighbours share exactly one
//! A-neighbour in `H`.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// The six lattice directions in the canonical cyclic (counter-clockwise) order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    E,
    NE,
    NW,
    W,
    SW,
    SE,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::E,
        Direction::NE,
        Direction::NW,
        Direction::W,
        Direction::SW,
        Direction::SE,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn from_index(i: usize) -> Direction {
        Self::ALL[i % 6]
    }

    pub const fn offset(self) -> (i32, i32) {
        OFFSETS[self as usize]
    }

    pub const fn opposite(self) -> Direction {
        Self::from_index(self as usize + 3)
    }
}

/// Axial offsets in canonical order E, NE, NW, W, SW, SE.
pub const OFFSETS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// `true` when directions `i` and `j` point at cells that are themselves neighbours.
#[inline]
pub const fn directions_adjacent(i: usize, j: usize) -> bool {
    let d = (i + 6 - j) % 6;
    d == 1 || d == 5
}

/// A site of the triangular lattice (a hexagonal cell of the honeycomb).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub q: i32,
    pub r: i32,
}

impl Cell {
    pub const ORIGIN: Cell = Cell { q: 0, r: 0 };

    pub const fn new(q: i32, r: i32) -> Self {
        Cell { q, r }
    }

    #[inline]
    pub const fn step(self, dir: Direction) -> Cell {
        let (dq, dr) = OFFSETS[dir as usize];
        Cell::new(self.q + dq, self.r + dr)
    }

    /// Graph distance on `T`.
    #[inline]
    pub fn distance(self, other: Cell) -> u32 {
        let dq = other.q - self.q;
        let dr = other.r - self.r;
        ((dq.abs() + dr.abs() + (dq + dr).abs()) / 2) as u32
    }

    /// Direction index from `self` to `other`, if they are neighbours.
    pub fn direction_to(self, other: Cell) -> Option<Direction> {
        let d = (other.q - self.q, other.r - self.r);
        OFFSETS.iter().position(|&o| o == d).map(Direction::from_index)
    }

    /// Doubled-and-tripled integer coordinates `(U, V)` with
    /// `x = δ·U/6`, `y = δ·√3·V/6`. Hexagon corners are integral too.
    #[inline]
    pub const fn lattice_point(self) -> (i64, i64) {
        (3 * (2 * self.q as i64 + self.r as i64), 3 * self.r as i64)
    }

    /// Row-major key used to order cells canonically: by `r`, then by `q`.
    #[inline]
    pub const fn row_key(self) -> (i32, i32) {
        (self.r, self.q)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.r)
    }
}

/// The six `T`-neighbours of `x`, in canonical order E, NE, NW, W, SW, SE.
/// Consecutive entries (cyclically) are neighbours of each other.
pub fn neighbors_t(x: Cell) -> [Cell; 6] {
    Direction::ALL.map(|d| x.step(d))
}

pub fn are_neighbors(x: Cell, y: Cell) -> bool {
    x.distance(y) == 1
}

/// Converts integer lattice coordinates (see [`Cell::lattice_point`]) to the plane.
#[inline]
pub fn lattice_to_plane(p: (i64, i64), delta: f64) -> (f64, f64) {
    (delta * p.0 as f64 / 6.0, delta * SQRT3 * p.1 as f64 / 6.0)
}

/// Centre of hexagon `x` at spacing `delta`.
pub fn embed(x: Cell, delta: f64) -> (f64, f64) {
    (
        delta * (x.q as f64 + 0.5 * x.r as f64),
        delta * SQRT3 * 0.5 * x.r as f64,
    )
}

/// Class of a site of the hexagonal lattice `H`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HClass {
    A,
    B,
}

impl HClass {
    pub const fn other(self) -> HClass {
        match self {
            HClass::A => HClass::B,
            HClass::B => HClass::A,
        }
    }
}

/// A site of the hexagonal lattice `H`: the cell `base` (class B) or the up
/// triangle anchored at `base` (class A).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HSite {
    pub base: Cell,
    pub klass: HClass,
}

impl HSite {
    pub const fn a(base: Cell) -> Self {
        HSite { base, klass: HClass::A }
    }

    pub const fn b(base: Cell) -> Self {
        HSite { base, klass: HClass::B }
    }
}

/// Directions from an A-site's base to its three B-neighbours.
pub const A_TO_B: [Option<Direction>; 3] = [None, Some(Direction::E), Some(Direction::NE)];
/// Directions from a B-site's base to its three A-neighbours.
pub const B_TO_A: [Option<Direction>; 3] = [None, Some(Direction::W), Some(Direction::SW)];

/// The three `H`-neighbours of `s`; all of the opposite class.
pub fn neighbors_h(s: HSite) -> [HSite; 3] {
    let table = match s.klass {
        HClass::A => A_TO_B,
        HClass::B => B_TO_A,
    };
    table.map(|d| HSite {
        base: d.map_or(s.base, |d| s.base.step(d)),
        klass: s.klass.other(),
    })
}

/// Embedded position of an `H` site. B-sites sit at hexagon centres, A-sites
/// at the centroids of up triangles.
pub fn embed_h(s: HSite, delta: f64) -> (f64, f64) {
    match s.klass {
        HClass::B => embed(s.base, delta),
        HClass::A => lattice_to_plane(DualVertex::up(s.base).lattice_point(), delta),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("{0:?} is an A-site; only B-sites correspond to cells of T")]
    NotBSite(HSite),
    #[error("cells {0} and {1} are not neighbours")]
    NotNeighbors(Cell, Cell),
}

/// Star-triangle map from `T` onto the B-class of `H`.
pub const fn star_triangle(x: Cell) -> HSite {
    HSite::b(x)
}

pub fn star_triangle_inverse(s: HSite) -> Result<Cell, LatticeError> {
    match s.klass {
        HClass::B => Ok(s.base),
        HClass::A => Err(LatticeError::NotBSite(s)),
    }
}

/// The unique A-site adjacent (in `H`) to both of two neighbouring B-sites.
pub fn shared_a_site(x: Cell, y: Cell) -> Result<HSite, LatticeError> {
    let d = x.direction_to(y).ok_or(LatticeError::NotNeighbors(x, y))?;
    // The up triangle containing the edge x–y.
    let base = match d {
        Direction::E | Direction::NE => x,
        Direction::W | Direction::SW => y,
        Direction::NW => x.step(Direction::W),
        Direction::SE => y.step(Direction::W),
    };
    Ok(HSite::a(base))
}

/// A hexagon corner, i.e. a triangle of `T`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualVertex {
    pub base: Cell,
    pub up: bool,
}

impl DualVertex {
    pub const fn up(base: Cell) -> Self {
        DualVertex { base, up: true }
    }

    pub const fn down(base: Cell) -> Self {
        DualVertex { base, up: false }
    }

    /// Corner `j` of hexagon `x`, lying between directions `j` and `j+1`.
    pub fn corner(x: Cell, j: usize) -> DualVertex {
        match j % 6 {
            0 => DualVertex::up(x),
            1 => DualVertex::down(x),
            2 => DualVertex::up(x.step(Direction::W)),
            3 => DualVertex::down(x.step(Direction::SW)),
            4 => DualVertex::up(x.step(Direction::SW)),
            _ => DualVertex::down(x.step(Direction::SE)),
        }
    }

    /// The three cells meeting at this corner.
    pub fn cells(self) -> [Cell; 3] {
        let x = self.base;
        if self.up {
            [x, x.step(Direction::E), x.step(Direction::NE)]
        } else {
            [x, x.step(Direction::NE), x.step(Direction::NW)]
        }
    }

    /// Integer coordinates (same frame as [`Cell::lattice_point`]).
    pub fn lattice_point(self) -> (i64, i64) {
        self.cells().iter().fold((0, 0), |acc, c| {
            let p = c.lattice_point();
            (acc.0 + p.0 / 3, acc.1 + p.1 / 3)
        })
    }

    pub fn embed(self, delta: f64) -> (f64, f64) {
        lattice_to_plane(self.lattice_point(), delta)
    }
}

/// The dual edge separating two neighbouring cells, stored with `a < b`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualEdge {
    pub a: Cell,
    pub b: Cell,
}

impl DualEdge {
    pub fn new(x: Cell, y: Cell) -> Result<Self, LatticeError> {
        if !are_neighbors(x, y) {
            return Err(LatticeError::NotNeighbors(x, y));
        }
        Ok(if x.row_key() <= y.row_key() {
            DualEdge { a: x, b: y }
        } else {
            DualEdge { a: y, b: x }
        })
    }

    /// The two corners this edge joins.
    pub fn endpoints(self) -> [DualVertex; 2] {
        let i = self.a.direction_to(self.b).expect("dual edge joins neighbours").index();
        [DualVertex::corner(self.a, i + 5), DualVertex::corner(self.a, i)]
    }

    pub fn contains(self, x: Cell) -> bool {
        self.a == x || self.b == x
    }
}

/// Embedded segment of a dual edge: the hexagon side between the two cells.
pub fn embed_dual(e: DualEdge, delta: f64) -> [(f64, f64); 2] {
    e.endpoints().map(|v| v.embed(delta))
}

/// A hexagonal ball of cells with lattice spacing and a light-cone margin.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: Cell,
    pub radius: u32,
    pub spacing: f64,
    pub margin: u32,
}

impl Window {
    pub fn new(radius: u32) -> Self {
        Window { center: Cell::ORIGIN, radius, spacing: 1.0, margin: 0 }
    }

    pub fn with_spacing(mut self, spacing: f64) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn with_margin(mut self, margin: u32) -> Self {
        self.margin = margin;
        self
    }

    pub fn contains(&self, x: Cell) -> bool {
        self.center.distance(x) <= self.radius
    }

    /// Number of cells: `3R(R+1) + 1`.
    pub fn cell_count(&self) -> usize {
        let r = self.radius as usize;
        3 * r * (r + 1) + 1
    }

    /// The window one ring smaller, with one unit of margin consumed.
    pub fn shrunk(&self) -> Option<Window> {
        if self.margin == 0 || self.radius == 0 {
            return None;
        }
        Some(Window { radius: self.radius - 1, margin: self.margin - 1, ..*self })
    }

    /// Radius of the region whose values are exact for an infinite lattice.
    pub fn observation_radius(&self) -> u32 {
        self.radius.saturating_sub(self.margin)
    }
}

pub const NO_NEIGHBOR: u32 = u32::MAX;

/// Dense indexing of a window: canonical row order plus a neighbour table.
#[derive(Debug)]
pub struct Layout {
    center: Cell,
    radius: u32,
    row_start: Vec<usize>,
    cells: Vec<Cell>,
    neighbors: Vec<[u32; 6]>,
}

impl Layout {
    pub fn new(center: Cell, radius: u32) -> Self {
        let r = radius as i32;
        let mut row_start = Vec::with_capacity(2 * radius as usize + 2);
        let mut cells = Vec::new();
        for dr in -r..=r {
            row_start.push(cells.len());
            let (lo, hi) = row_span(r, dr);
            cells.extend((lo..=hi).map(|dq| Cell::new(center.q + dq, center.r + dr)));
        }
        row_start.push(cells.len());
        let mut layout = Layout { center, radius, row_start, cells, neighbors: Vec::new() };
        layout.neighbors = layout
            .cells
            .iter()
            .map(|&c| {
                Direction::ALL.map(|d| layout.index_of(c.step(d)).map_or(NO_NEIGHBOR, |i| i as u32))
            })
            .collect();
        layout
    }

    pub fn for_window(w: &Window) -> Self {
        Layout::new(w.center, w.radius)
    }

    pub fn center(&self) -> Cell {
        self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> Cell {
        self.cells[i]
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32; 6] {
        &self.neighbors[i]
    }

    /// Canonical (row-order) index of `x`, if it lies in the window.
    #[inline]
    pub fn index_of(&self, x: Cell) -> Option<usize> {
        let r = self.radius as i32;
        let dr = x.r - self.center.r;
        if dr < -r || dr > r {
            return None;
        }
        let (lo, hi) = row_span(r, dr);
        let dq = x.q - self.center.q;
        if dq < lo || dq > hi {
            return None;
        }
        Some(self.row_start[(dr + r) as usize] + (dq - lo) as usize)
    }

    pub fn contains(&self, x: Cell) -> bool {
        self.index_of(x).is_some()
    }

    /// Cells on the outermost ring have at least one neighbour outside.
    #[inline]
    pub fn on_ring(&self, i: usize) -> bool {
        self.neighbors[i].contains(&NO_NEIGHBOR)
    }

    /// Distance of cell `i` from the window centre.
    pub fn depth(&self, i: usize) -> u32 {
        self.center.distance(self.cells[i])
    }
}

fn row_span(r: i32, dr: i32) -> (i32, i32) {
    ((-r).max(-dr - r), r.min(-dr + r))
}
