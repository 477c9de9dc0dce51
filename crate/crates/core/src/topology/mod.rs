//! Clusters, m-paths, boundaries on the dual lattice, stability certificates
//! and the parent map between boundaries at consecutive times.

mod boundary;
mod certificate;
mod clusters;
mod mpath;
mod parent;
mod region;
mod sloop;

pub use boundary::{
    boundaries, diameter_of_points, hexagon_diameter, nesting_is_laminar, unsatisfied_edges, BoundaryCurve,
    CurveKind,
};
pub use certificate::{stability_certificates, stable_edges, Certificate, Certificates, DEFAULT_SEARCH_RADIUS};
pub use clusters::{clusters, Cluster, ClusterInfo, ClusterLabels};
pub use mpath::{extract_m_path, is_m_path, is_path, repair_m_loop, MPath};
pub use parent::{parent_map, parent_map_report, ParentMap, ParentViolation, Traced};
pub use region::{cell_loop_interior, cells_inside};
pub use sloop::{classify_b_loop, intermediate_a_sites, SLoopClass};

use crate::lattice::DualVertex;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopologyError {
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("corner {0:?} has an odd number of unsatisfied edges")]
    OddDualVertex(DualVertex),
    #[error("parent map violation: {0}")]
    Parent(ParentViolation),
}

/// Euclidean diameter of a boundary at spacing `delta`.
pub fn diameter(curve: &BoundaryCurve, delta: f64) -> f64 {
    curve.diameter(delta)
}
