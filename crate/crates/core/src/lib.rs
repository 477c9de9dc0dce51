//! Dependent-percolation cellular automata on the triangular and hexagonal
//! lattices, cluster-boundary extraction on the dual lattice, and distances
//! between curve families in the compactified plane.

pub mod dynamics;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod lattice;
pub mod rng;
pub mod topology;

pub use dynamics::{BoundaryMode, DynamicsError, HexConfig, PairingScheme, RuleKind, RunRecord, SpinConfig};
pub use lattice::{Cell, DualEdge, DualVertex, HClass, HSite, Window};
