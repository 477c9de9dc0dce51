//! The compactified-plane metric, curve distance over monotone
//! reparametrisations, and the Hausdorff distance between curve families.

mod curve;
mod family;
mod metric;

pub use curve::{curve_distance, max_segment_length, Curve};
pub use family::{family_distance, shadows, CurveFamily, EMPTY_FAMILY_DISTANCE};
pub use metric::{point_distance, scale_bounds_check, CompactPoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("curve has no vertices")]
    EmptyCurve,
    #[error("densify step must be positive, got {0}")]
    NonPositiveStep(f64),
}
