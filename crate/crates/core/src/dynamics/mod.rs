//! Spin configurations and the deterministic zero-temperature update rules.

mod energy;
mod rules;
mod run;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::lattice::{Cell, HClass, HSite, Layout, Window};
use crate::rng;

pub use energy::{energy_delta, local_energy, outer_boundary, site_energy, EnergyDelta};
pub use rules::{
    domany_flips, q_flip_table, step_domany, step_q, step_sync_h, step_t, t_keeps, PairingScheme,
};
pub use run::{run, run_with, Evolve, RuleKind, RunOptions, RunRecord, StopReason};

pub type Spin = i8;

/// How a finite window stands in for the infinite lattice.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryMode {
    /// Each step drops the outer ring; the remaining values equal the
    /// infinite-volume ones. Consumes one unit of window margin per step.
    #[default]
    Shrinking,
    /// The outermost ring never updates.
    FrozenRing,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("window margin exhausted at time {time}")]
    MarginExhausted { time: u64 },
    #[error("cell {0} is outside the window")]
    OutOfWindow(Cell),
    #[error("rule {rule} cannot act on a {lattice} configuration")]
    RuleLatticeMismatch { rule: String, lattice: &'static str },
    #[error("invalid pairing scheme: {0}")]
    InvalidPairing(String),
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("energy bookkeeping mismatch: direct {direct}, flip sum {flip_sum}")]
    InconsistentEnergy { direct: i64, flip_sum: i64 },
    #[error("max_steps must be at least 1")]
    ZeroSteps,
}

/// Layouts are immutable and shared between every configuration on the same window.
pub(crate) fn shared_layout(center: Cell, radius: u32) -> Arc<Layout> {
    static CACHE: OnceLock<Mutex<HashMap<(Cell, u32), Arc<Layout>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    if guard.len() > 512 {
        guard.clear();
    }
    guard
        .entry((center, radius))
        .or_insert_with(|| Arc::new(Layout::new(center, radius)))
        .clone()
}

fn check_lambda(lambda: f64) -> Result<(), DynamicsError> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(DynamicsError::InvalidProbability(lambda))
    }
}

/// A ±1 assignment to every cell of a window of `T`.
#[derive(Clone, Debug)]
pub struct SpinConfig {
    window: Window,
    layout: Arc<Layout>,
    spins: Vec<Spin>,
    time: u64,
}

impl PartialEq for SpinConfig {
    fn eq(&self, other: &Self) -> bool {
        self.window.center == other.window.center
            && self.window.radius == other.window.radius
            && self.spins == other.spins
    }
}

impl Eq for SpinConfig {}

impl SpinConfig {
    pub fn from_fn(window: Window, mut f: impl FnMut(Cell) -> Spin) -> Self {
        let layout = shared_layout(window.center, window.radius);
        let spins = layout.cells().iter().map(|&c| if f(c) > 0 { 1 } else { -1 }).collect();
        SpinConfig { window, layout, spins, time: 0 }
    }

    pub fn uniform(window: Window, spin: Spin) -> Self {
        Self::from_fn(window, |_| spin)
    }

    /// I.i.d. spins with `P(+1) = lambda`, keyed by `(seed, cell)`.
    pub fn sample(window: Window, lambda: f64, seed: u64) -> Result<Self, DynamicsError> {
        check_lambda(lambda)?;
        Ok(Self::from_fn(window, |c| rng::spin_for(seed, rng::cell_key(c), lambda)))
    }

    pub(crate) fn from_parts(window: Window, spins: Vec<Spin>, time: u64) -> Self {
        let layout = shared_layout(window.center, window.radius);
        debug_assert_eq!(layout.len(), spins.len());
        SpinConfig { window, layout, spins, time }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// Sets the number of rings shrinking boundaries may consume.
    pub fn with_margin(mut self, margin: u32) -> Self {
        self.window.margin = margin;
        self
    }

    pub fn with_time(mut self, time: u64) -> Self {
        self.time = time;
        self
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    #[inline]
    pub fn spin_at(&self, i: usize) -> Spin {
        self.spins[i]
    }

    pub fn spin(&self, x: Cell) -> Result<Spin, DynamicsError> {
        self.layout.index_of(x).map(|i| self.spins[i]).ok_or(DynamicsError::OutOfWindow(x))
    }

    pub fn get(&self, x: Cell) -> Option<Spin> {
        self.layout.index_of(x).map(|i| self.spins[i])
    }

    pub fn set(&mut self, x: Cell, s: Spin) -> Result<(), DynamicsError> {
        let i = self.layout.index_of(x).ok_or(DynamicsError::OutOfWindow(x))?;
        self.spins[i] = if s > 0 { 1 } else { -1 };
        Ok(())
    }

    pub fn contains(&self, x: Cell) -> bool {
        self.layout.contains(x)
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn plus_fraction(&self) -> f64 {
        self.spins.iter().filter(|&&s| s > 0).count() as f64 / self.spins.len() as f64
    }

    /// Restriction to a smaller window with the same centre.
    pub fn restrict(&self, radius: u32) -> Result<SpinConfig, DynamicsError> {
        if radius > self.window.radius {
            return Err(DynamicsError::OutOfWindow(Cell::new(
                self.window.center.q + radius as i32,
                self.window.center.r,
            )));
        }
        let window = Window {
            radius,
            margin: self.window.margin.saturating_sub(self.window.radius - radius),
            ..self.window
        };
        let layout = shared_layout(window.center, radius);
        let spins = layout
            .cells()
            .iter()
            .map(|&c| self.spins[self.layout.index_of(c).expect("sub-window")])
            .collect();
        Ok(SpinConfig { window, layout, spins, time: self.time })
    }

    pub fn flipped(&self) -> SpinConfig {
        SpinConfig { spins: self.spins.iter().map(|s| -s).collect(), ..self.clone() }
    }
}

/// A ±1 assignment to both classes of `H` over a window of base cells.
#[derive(Clone, Debug)]
pub struct HexConfig {
    window: Window,
    layout: Arc<Layout>,
    a: Vec<Spin>,
    b: Vec<Spin>,
    time: u64,
}

impl PartialEq for HexConfig {
    fn eq(&self, other: &Self) -> bool {
        self.window.center == other.window.center
            && self.window.radius == other.window.radius
            && self.a == other.a
            && self.b == other.b
    }
}

impl Eq for HexConfig {}

impl HexConfig {
    pub fn from_fn(window: Window, mut f: impl FnMut(HSite) -> Spin) -> Self {
        let layout = shared_layout(window.center, window.radius);
        let norm = |s: Spin| if s > 0 { 1 } else { -1 };
        let a = layout.cells().iter().map(|&c| norm(f(HSite::a(c)))).collect();
        let b = layout.cells().iter().map(|&c| norm(f(HSite::b(c)))).collect();
        HexConfig { window, layout, a, b, time: 0 }
    }

    pub fn uniform(window: Window, spin: Spin) -> Self {
        Self::from_fn(window, |_| spin)
    }

    /// I.i.d. spins on both classes; the B-class agrees with
    /// [`SpinConfig::sample`] for the same seed.
    pub fn sample(window: Window, lambda: f64, seed: u64) -> Result<Self, DynamicsError> {
        check_lambda(lambda)?;
        Ok(Self::from_fn(window, |s| rng::spin_for(seed, rng::hsite_key(s), lambda)))
    }

    /// Puts a `T` configuration on the B-class; A-sites get `a_spin`.
    pub fn from_b_class(t: &SpinConfig, a_spin: Spin) -> Self {
        HexConfig {
            window: t.window,
            layout: t.layout.clone(),
            a: vec![if a_spin > 0 { 1 } else { -1 }; t.len()],
            b: t.spins.clone(),
            time: t.time,
        }
    }

    pub(crate) fn from_parts(window: Window, a: Vec<Spin>, b: Vec<Spin>, time: u64) -> Self {
        let layout = shared_layout(window.center, window.radius);
        HexConfig { window, layout, a, b, time }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// Sets the number of rings shrinking boundaries may consume.
    pub fn with_margin(mut self, margin: u32) -> Self {
        self.window.margin = margin;
        self
    }

    pub fn with_time(mut self, time: u64) -> Self {
        self.time = time;
        self
    }

    pub fn class(&self, k: HClass) -> &[Spin] {
        match k {
            HClass::A => &self.a,
            HClass::B => &self.b,
        }
    }

    pub fn spin(&self, s: HSite) -> Result<Spin, DynamicsError> {
        self.layout
            .index_of(s.base)
            .map(|i| self.class(s.klass)[i])
            .ok_or(DynamicsError::OutOfWindow(s.base))
    }

    pub fn set(&mut self, s: HSite, v: Spin) -> Result<(), DynamicsError> {
        let i = self.layout.index_of(s.base).ok_or(DynamicsError::OutOfWindow(s.base))?;
        let v = if v > 0 { 1 } else { -1 };
        match s.klass {
            HClass::A => self.a[i] = v,
            HClass::B => self.b[i] = v,
        }
        Ok(())
    }

    /// One class viewed as a configuration of `T` (B-sites are cells; A-sites
    /// are indexed by the base of their up triangle).
    pub fn class_config(&self, k: HClass) -> SpinConfig {
        SpinConfig {
            window: self.window,
            layout: self.layout.clone(),
            spins: self.class(k).to_vec(),
            time: self.time,
        }
    }

    pub fn restrict(&self, radius: u32) -> Result<HexConfig, DynamicsError> {
        let a = self.class_config(HClass::A).restrict(radius)?;
        let b = self.class_config(HClass::B).restrict(radius)?;
        Ok(HexConfig { window: a.window, layout: a.layout, a: a.spins, b: b.spins, time: self.time })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_extremes() {
        let w = Window::new(10);
        assert!(SpinConfig::sample(w, 1.0, 3).unwrap().spins().iter().all(|&s| s == 1));
        assert!(SpinConfig::sample(w, 0.0, 3).unwrap().spins().iter().all(|&s| s == -1));
        assert!(SpinConfig::sample(w, 1.5, 3).is_err());
    }

    #[test]
    fn critical_sample_is_balanced() {
        let c = SpinConfig::sample(Window::new(100), 0.5, 11).unwrap();
        let plus = c.spins().iter().filter(|&&s| s > 0).count();
        assert_eq!(c.len(), 30301);
        // 0.01 is ~3.5 binomial standard deviations at n = 30301.
        assert!((plus as f64 / c.len() as f64 - 0.5).abs() < 0.01, "{plus}");
    }

    #[test]
    fn enlarging_window_preserves_spins() {
        let small = SpinConfig::sample(Window::new(8), 0.5, 42).unwrap();
        let big = SpinConfig::sample(Window::new(20), 0.5, 42).unwrap();
        for &c in small.layout().cells() {
            assert_eq!(small.spin(c), big.spin(c));
        }
        assert_eq!(big.restrict(8).unwrap(), small);
    }

    #[test]
    fn out_of_window_is_an_error() {
        let c = SpinConfig::uniform(Window::new(3), 1);
        assert_eq!(c.spin(Cell::new(4, 0)), Err(DynamicsError::OutOfWindow(Cell::new(4, 0))));
    }

    #[test]
    fn hex_b_class_matches_t_sample() {
        let w = Window::new(12);
        let t = SpinConfig::sample(w, 0.5, 9).unwrap();
        let h = HexConfig::sample(w, 0.5, 9).unwrap();
        assert_eq!(h.class(HClass::B), t.spins());
    }
}
