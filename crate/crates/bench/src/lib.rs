//! Fixed inputs shared by the benchmarks in `benches/`.

use perculab_core::geometry::CurveFamily;
use perculab_core::topology::boundaries;
use perculab_core::{SpinConfig, Window};

/// A λ = 1/2 configuration on a frozen-ring window of the given radius.
pub fn random_t(radius: u32, seed: u64) -> SpinConfig {
    SpinConfig::sample(Window::new(radius), 0.5, seed).expect("valid probability")
}

/// Boundary family of [`random_t`] at spacing `1 / radius`.
pub fn random_family(radius: u32, seed: u64) -> CurveFamily {
    let c = random_t(radius, seed);
    let delta = 1.0 / radius as f64;
    CurveFamily::from_boundaries(&boundaries(&c).expect("consistent boundaries"), delta, 0)
}
