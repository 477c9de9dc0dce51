//! Command-line grammar. Every numeric flag is range-checked by clap, so a
//! bad value is a usage error before any work starts.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use perculab_core::dynamics::BoundaryMode;
use perculab_core::experiments::Horizon;
use perculab_core::topology::DEFAULT_SEARCH_RADIUS;
use perculab_core::RuleKind;
use serde::{Deserialize, Serialize};

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[command(name = "perculab", version, about = "Zero-temperature dynamics of percolation configurations on T and H")]
pub struct Cli {
    /// Worker threads for seed-parallel work; results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Command {
    /// Sample (or read) a configuration, run a rule on it, write the result.
    Simulate(SimulateArgs),
    /// Extract the boundary curves of a snapshot.
    Boundaries(BoundariesArgs),
    /// Hausdorff distance between two curve files.
    Distance(DistanceArgs),
    /// Run a seeded experiment and write a CSV table plus a manifest.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Run the invariant suite on rule-T trajectories; exit 4 on any violation.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Keep the outermost ring fixed.
    #[default]
    Frozen,
    /// Drop one ring per step, consuming the margin.
    Shrinking,
}

impl From<Boundary> for BoundaryMode {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Frozen => BoundaryMode::FrozenRing,
            Boundary::Shrinking => BoundaryMode::Shrinking,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassArg {
    A,
    #[default]
    B,
}

/// Seeds given as `7`, `1,5,9` or a half-open range `0..100`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeedList(pub Vec<u64>);

impl FromStr for SeedList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some((a, b)) = s.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
            let b: u64 = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
            if a >= b {
                return Err(format!("empty seed range {s:?}"));
            }
            return Ok(SeedList((a..b).collect()));
        }
        let seeds = s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| format!("bad seed {t:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SeedList(seeds))
    }
}

/// `--seed` or `--seeds`, never both.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[group(required = true, multiple = false)]
pub struct SeedArgs {
    /// A single seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Several seeds: `1,5,9` or `0..100`.
    #[arg(long)]
    pub seeds: Option<SeedList>,
}

impl SeedArgs {
    pub fn list(&self) -> Vec<u64> {
        match (&self.seed, &self.seeds) {
            (Some(s), _) => vec![*s],
            (None, Some(l)) => l.0.clone(),
            (None, None) => Vec::new(),
        }
    }
}

pub fn parse_rule(s: &str) -> Result<RuleKind, String> {
    RuleKind::parse(s).ok_or_else(|| format!("unknown rule {s:?} (T, Q, Q:<pairs>, domany-a, domany-b, sync)"))
}

pub fn parse_lambda(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("lambda must lie in [0, 1], got {v}"))
    }
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive, got {s}"))
    }
}

fn radius_parser() -> clap::builder::RangedI64ValueParser<u32> {
    clap::value_parser!(u32).range(4..)
}

/// Window and initial-data options shared by `simulate` and `verify`.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowArgs {
    /// Probability of a plus spin.
    #[arg(long, default_value = "0.5", value_parser = parse_lambda)]
    pub lambda: f64,
    /// Lattice spacing.
    #[arg(long, default_value = "1", value_parser = parse_positive)]
    pub delta: f64,
    /// Window radius in cells (at least 4).
    #[arg(long, default_value = "64", value_parser = radius_parser())]
    pub radius: u32,
    /// Extra rings consumed by shrinking boundaries.
    #[arg(long, default_value = "0")]
    pub margin: u32,
    #[arg(long, value_enum, default_value_t = Boundary::Frozen)]
    pub boundary: Boundary,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// T, Q, Q:<pairs>, domany-a, domany-b or sync.
    #[arg(long, default_value = "T", value_parser = parse_rule)]
    pub rule: RuleKind,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Number of steps, or `fixation`.
    #[arg(long, default_value = "fixation")]
    pub steps: Horizon,
    /// Step cap when running to fixation.
    #[arg(long, default_value = "100000", value_parser = clap::value_parser!(u64).range(1..))]
    pub max_steps: u64,
    /// Sample the initial configuration from this seed.
    #[arg(long, required_unless_present = "input", conflicts_with = "input")]
    pub seed: Option<u64>,
    /// Start from a snapshot file instead of sampling.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Snapshot of the final configuration.
    #[arg(long)]
    pub output: PathBuf,
    /// Also write the boundary curves of the final configuration.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// Also write a run manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundariesArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Class of an `H` snapshot whose boundaries are taken.
    #[arg(long, value_enum, default_value_t = ClassArg::B)]
    pub class: ClassArg,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    /// Densification step; defaults to a quarter of the first file's spacing.
    #[arg(long, value_parser = parse_positive)]
    pub densify_step: Option<f64>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Directory receiving the CSV table(s) and `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Experiment {
    /// Family distance between time 0 and later times over a spacing grid.
    Scaling(ScalingArgs),
    /// Frequency of boundary stretches without stable edges.
    Decay(DecayArgs),
    /// Steps to fixation and flip counts.
    Fixation(FixationArgs),
    /// Square crossings and surrounding circuits.
    Percolation(PercolationArgs),
    /// Size of the cluster at the centre.
    Clusters(ClustersArgs),
    /// `Q` against Domany dynamics read on the B-class.
    Equivalence(EquivalenceArgs),
    /// Synchronous `H` dynamics against its Domany interleavings.
    Sync(SyncArgs),
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingArgs {
    #[arg(long, default_value = "T", value_parser = parse_rule)]
    pub rule: RuleKind,
    #[arg(long, default_value = "0.5", value_parser = parse_lambda)]
    pub lambda: f64,
    /// Lattice spacings.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_positive)]
    pub deltas: Vec<f64>,
    /// Horizons: step counts and/or `fixation`.
    #[arg(long, value_delimiter = ',', default_value = "fixation")]
    pub steps: Vec<Horizon>,
    #[command(flatten)]
    pub seeds: SeedArgs,
    /// Radius of the observation ball.
    #[arg(long, default_value = "1", value_parser = parse_positive)]
    pub observation_radius: f64,
    #[arg(long, default_value = "10000", value_parser = clap::value_parser!(u64).range(1..))]
    pub max_steps: u64,
    /// Densification step as a fraction of the spacing.
    #[arg(long, default_value = "0.25", value_parser = parse_positive)]
    pub densify_fraction: f64,
    /// Write `runtime_ms` as 0 so that reruns give byte-identical tables.
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayArgs {
    /// Diameter thresholds in lattice units.
    #[arg(long = "m", value_delimiter = ',', default_value = "5,10,20,40", value_parser = parse_positive)]
    pub m_list: Vec<f64>,
    #[arg(long, default_value = "128", value_parser = radius_parser())]
    pub radius: u32,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixationArgs {
    #[arg(long, default_value = "T", value_parser = parse_rule)]
    pub rule: RuleKind,
    #[arg(long, default_value = "0.5", value_parser = parse_lambda)]
    pub lambda: f64,
    #[arg(long, default_value = "64", value_parser = radius_parser())]
    pub radius: u32,
    /// Step cap; defaults to ten times the radius.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_steps: Option<u64>,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercolationArgs {
    #[arg(long, default_value = "T", value_parser = parse_rule)]
    pub rule: RuleKind,
    #[arg(long, default_value = "0.5", value_parser = parse_lambda)]
    pub lambda: f64,
    #[arg(long, default_value = "0")]
    pub steps: Horizon,
    #[arg(long, default_value = "128", value_parser = radius_parser())]
    pub radius: u32,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClustersArgs {
    #[arg(long, default_value = "0.5", value_parser = parse_lambda)]
    pub lambda: f64,
    #[arg(long, default_value = "0")]
    pub steps: Horizon,
    /// One table row per radius.
    #[arg(long = "radius", value_delimiter = ',', default_value = "32,64,128", value_parser = radius_parser())]
    pub radii: Vec<u32>,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceArgs {
    #[arg(long, default_value = "0.5", value_parser = parse_lambda)]
    pub lambda: f64,
    #[arg(long, default_value = "64", value_parser = radius_parser())]
    pub radius: u32,
    /// Largest number of `Q` steps compared.
    #[arg(long, default_value = "8")]
    pub m_max: u64,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyncArgs {
    #[arg(long, default_value = "0.5", value_parser = parse_lambda)]
    pub lambda: f64,
    #[arg(long, default_value = "48", value_parser = radius_parser())]
    pub radius: u32,
    /// Largest time compared.
    #[arg(long, default_value = "20")]
    pub n_max: u64,
    #[command(flatten)]
    pub seeds: SeedArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// A `T` snapshot to start from.
    #[arg(long, conflicts_with_all = ["seed", "seeds"])]
    pub input: Option<PathBuf>,
    /// A single sampled start.
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Several sampled starts: `1,5,9` or `0..100`.
    #[arg(long)]
    pub seeds: Option<SeedList>,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Steps of rule T to check.
    #[arg(long, default_value = "1000", value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
    /// Largest loop searched for stability certificates.
    #[arg(long, default_value_t = DEFAULT_SEARCH_RADIUS)]
    pub search_radius: u32,
    #[arg(long)]
    pub no_energy: bool,
    #[arg(long)]
    pub no_certificates: bool,
    #[arg(long)]
    pub no_parent: bool,
    /// Also write a per-start table and manifest here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
