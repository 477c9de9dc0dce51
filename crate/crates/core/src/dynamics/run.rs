use serde::{Deserialize, Serialize};

use super::{
    local_energy, step_domany, step_q, step_sync_h, step_t, BoundaryMode, DynamicsError, HexConfig,
    PairingScheme, SpinConfig,
};
use crate::lattice::{Cell, HClass, Layout};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleKind {
    AutomatonT,
    DomanyAFirst,
    DomanyBFirst,
    AutomatonQ(PairingScheme),
    SynchronousH,
}

impl RuleKind {
    /// `true` for rules acting on the hexagonal lattice.
    pub fn on_h(&self) -> bool {
        matches!(self, RuleKind::DomanyAFirst | RuleKind::DomanyBFirst | RuleKind::SynchronousH)
    }

    /// Class updated by a Domany rule at the step leaving time `t`.
    pub fn domany_phase(&self, t: u64) -> Option<HClass> {
        let even = t % 2 == 0;
        match self {
            RuleKind::DomanyAFirst => Some(if even { HClass::A } else { HClass::B }),
            RuleKind::DomanyBFirst => Some(if even { HClass::B } else { HClass::A }),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            RuleKind::AutomatonT => "T".into(),
            RuleKind::DomanyAFirst => "domany-a".into(),
            RuleKind::DomanyBFirst => "domany-b".into(),
            RuleKind::AutomatonQ(p) if *p == PairingScheme::default() => "Q".into(),
            RuleKind::AutomatonQ(p) => format!("Q:{p}"),
            RuleKind::SynchronousH => "sync".into(),
        }
    }

    pub fn parse(s: &str) -> Option<RuleKind> {
        Some(match s {
            "T" | "t" => RuleKind::AutomatonT,
            "domany-a" | "domany" => RuleKind::DomanyAFirst,
            "domany-b" => RuleKind::DomanyBFirst,
            "Q" | "q" => RuleKind::AutomatonQ(PairingScheme::default()),
            "sync" => RuleKind::SynchronousH,
            _ => {
                let p = s.strip_prefix("Q:").or_else(|| s.strip_prefix("q:"))?;
                RuleKind::AutomatonQ(PairingScheme::parse(p).ok()?)
            }
        })
    }

    fn mismatch(&self, lattice: &'static str) -> DynamicsError {
        DynamicsError::RuleLatticeMismatch { rule: self.name(), lattice }
    }
}

impl std::fmt::Display for RuleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

/// A configuration type a rule can be iterated on.
pub trait Evolve: Clone + Sized {
    fn advance(&self, rule: &RuleKind, mode: BoundaryMode) -> Result<Self, DynamicsError>;
    fn time(&self) -> u64;
    fn layout(&self) -> &Layout;
    /// Equality of `self` and `other` over the window of `other`, which is
    /// contained in the window of `self`.
    fn agrees_on(&self, other: &Self) -> bool;
    /// Number of flip-count slots per cell of the layout.
    fn slots_per_cell() -> usize;
    /// Adds one to `counts[slot]` for every site that differs between `self` and `next`.
    fn count_flips(&self, next: &Self, initial: &Layout, counts: &mut [u32]);
    fn region_energy(&self, region: &[Cell]) -> Result<i64, DynamicsError>;
}

fn agree_slices(big: &Layout, a: &[i8], small: &Layout, b: &[i8]) -> bool {
    if big.len() == small.len() {
        return a == b;
    }
    small.cells().iter().zip(b).all(|(&c, &s)| a[big.index_of(c).expect("sub-window")] == s)
}

impl Evolve for SpinConfig {
    fn advance(&self, rule: &RuleKind, mode: BoundaryMode) -> Result<Self, DynamicsError> {
        match rule {
            RuleKind::AutomatonT => step_t(self, mode),
            RuleKind::AutomatonQ(p) => step_q(self, p, mode),
            _ => Err(rule.mismatch("T")),
        }
    }

    fn time(&self) -> u64 {
        SpinConfig::time(self)
    }

    fn layout(&self) -> &Layout {
        SpinConfig::layout(self)
    }

    fn agrees_on(&self, other: &Self) -> bool {
        agree_slices(self.layout(), self.spins(), other.layout(), other.spins())
    }

    fn slots_per_cell() -> usize {
        1
    }

    fn count_flips(&self, next: &Self, initial: &Layout, counts: &mut [u32]) {
        let (old, new) = (SpinConfig::layout(self), SpinConfig::layout(next));
        for (j, &c) in new.cells().iter().enumerate() {
            let i = old.index_of(c).expect("sub-window");
            if self.spin_at(i) != next.spin_at(j) {
                counts[initial.index_of(c).expect("initial window")] += 1;
            }
        }
    }

    fn region_energy(&self, region: &[Cell]) -> Result<i64, DynamicsError> {
        local_energy(self, region)
    }
}

impl Evolve for HexConfig {
    fn advance(&self, rule: &RuleKind, mode: BoundaryMode) -> Result<Self, DynamicsError> {
        match rule {
            RuleKind::SynchronousH => step_sync_h(self, mode),
            r => match r.domany_phase(HexConfig::time(self)) {
                Some(phase) => step_domany(self, phase, mode),
                None => Err(rule.mismatch("H")),
            },
        }
    }

    fn time(&self) -> u64 {
        HexConfig::time(self)
    }

    fn layout(&self) -> &Layout {
        HexConfig::layout(self)
    }

    fn agrees_on(&self, other: &Self) -> bool {
        [HClass::A, HClass::B]
            .iter()
            .all(|&k| agree_slices(HexConfig::layout(self), self.class(k), HexConfig::layout(other), other.class(k)))
    }

    fn slots_per_cell() -> usize {
        2
    }

    fn count_flips(&self, next: &Self, initial: &Layout, counts: &mut [u32]) {
        let (old, new) = (HexConfig::layout(self), HexConfig::layout(next));
        for (j, &c) in new.cells().iter().enumerate() {
            let i = old.index_of(c).expect("sub-window");
            let slot = 2 * initial.index_of(c).expect("initial window");
            for (k, off) in [(HClass::A, 0), (HClass::B, 1)] {
                if self.class(k)[i] != next.class(k)[j] {
                    counts[slot + off] += 1;
                }
            }
        }
    }

    fn region_energy(&self, _region: &[Cell]) -> Result<i64, DynamicsError> {
        Err(DynamicsError::RuleLatticeMismatch { rule: "energy trace".into(), lattice: "H" })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Fixated,
    Cycle { period: u32 },
    MaxSteps,
    MarginExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Steps that changed the configuration.
    pub steps_taken: u64,
    /// Steps executed, including the confirming no-change step(s).
    pub steps_executed: u64,
    pub stop: StopReason,
    /// Flip counts in the canonical order of the initial window; on `H` the
    /// A- and B-site of cell `i` occupy slots `2i` and `2i + 1`.
    pub flip_counts: Vec<u32>,
    /// `H_Λ` at time 0 and after every executed step.
    pub energy_trace: Option<Vec<i64>>,
}

impl RunRecord {
    pub fn fixated(&self) -> bool {
        self.stop == StopReason::Fixated
    }

    pub fn cycle_period(&self) -> Option<u32> {
        match self.stop {
            StopReason::Cycle { period } => Some(period),
            _ => None,
        }
    }

    pub fn max_flips(&self) -> u32 {
        self.flip_counts.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub max_steps: u64,
    pub mode: BoundaryMode,
    pub region: Option<Vec<Cell>>,
}

impl RunOptions {
    pub fn new(max_steps: u64, mode: BoundaryMode) -> Self {
        RunOptions { max_steps, mode, region: None }
    }
}

/// Runs `rule` from `c0` until fixation, a period-2 cycle, `max_steps`, or
/// (in shrinking mode) exhaustion of the margin.
pub fn run<C: Evolve>(c0: &C, rule: RuleKind, max_steps: u64, mode: BoundaryMode) -> Result<(C, RunRecord), DynamicsError> {
    run_with(c0, rule, &RunOptions::new(max_steps, mode))
}

pub fn run_with<C: Evolve>(c0: &C, rule: RuleKind, opts: &RunOptions) -> Result<(C, RunRecord), DynamicsError> {
    if opts.max_steps == 0 {
        return Err(DynamicsError::ZeroSteps);
    }
    // A single quiet half-step of a Domany rule only shows that the updated
    // class agrees with the other one; a second quiet step closes the argument.
    let quiet_needed = if rule.domany_phase(0).is_some() { 2 } else { 1 };
    let initial = c0.layout();
    let mut counts = vec![0u32; initial.len() * C::slots_per_cell()];
    let mut trace = match &opts.region {
        Some(r) => Some(vec![c0.region_energy(r)?]),
        None => None,
    };

    let mut prev: Option<C> = None;
    let mut cur = c0.clone();
    let mut changing = 0u64;
    let mut executed = 0u64;
    let mut quiet = 0;
    let stop = loop {
        if executed == opts.max_steps {
            break StopReason::MaxSteps;
        }
        let next = match cur.advance(&rule, opts.mode) {
            Ok(n) => n,
            Err(DynamicsError::MarginExhausted { .. }) => break StopReason::MarginExhausted,
            Err(e) => return Err(e),
        };
        executed += 1;
        if let (Some(t), Some(r)) = (trace.as_mut(), &opts.region) {
            t.push(next.region_energy(r)?);
        }
        if cur.agrees_on(&next) {
            quiet += 1;
            prev = Some(std::mem::replace(&mut cur, next));
            if quiet >= quiet_needed {
                break StopReason::Fixated;
            }
            continue;
        }
        quiet = 0;
        changing += 1;
        cur.count_flips(&next, initial, &mut counts);
        let cycled = prev.as_ref().is_some_and(|p| p.agrees_on(&next));
        prev = Some(std::mem::replace(&mut cur, next));
        if cycled {
            break StopReason::Cycle { period: 2 };
        }
    };
    Ok((cur, RunRecord { steps_taken: changing, steps_executed: executed, stop, flip_counts: counts, energy_trace: trace }))
}
