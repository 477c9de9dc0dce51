//! Counter-based spin sampling.
//!
//! Every site draws its initial spin from a stateless hash of `(seed, site key)`,
//! so the value at a site never depends on the window it is sampled in. The
//! hash is two rounds of the SplitMix64 finaliser:
//!
//! ```text
//! u = mix(seed ^ mix(key + 0x9E3779B97F4A7C15))
//! ```
//!
//! and the top 53 bits of `u` give a uniform `f64` in `[0, 1)`. A site is `+1`
//! iff that uniform is `< λ`.

use crate::lattice::{Cell, HClass, HSite};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Window-independent key of a cell.
#[inline]
pub fn cell_key(x: Cell) -> u64 {
    ((x.q as u32 as u64) << 32) | (x.r as u32 as u64)
}

/// Key of an `H` site; B-sites share the key of their cell so that a `T`
/// configuration and the B-class of an `H` configuration drawn with the same
/// seed coincide.
#[inline]
pub fn hsite_key(s: HSite) -> u64 {
    match s.klass {
        HClass::B => cell_key(s.base),
        HClass::A => mix64(cell_key(s.base) ^ 0xA5A5_A5A5_5A5A_5A5A),
    }
}

#[inline]
pub fn hash(seed: u64, key: u64) -> u64 {
    mix64(seed ^ mix64(key.wrapping_add(GOLDEN)))
}

#[inline]
pub fn uniform(seed: u64, key: u64) -> f64 {
    (hash(seed, key) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn spin_for(seed: u64, key: u64, lambda: f64) -> i8 {
    if uniform(seed, key) < lambda {
        1
    } else {
        -1
    }
}
