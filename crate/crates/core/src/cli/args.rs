use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

/// Seed used by randomized commands when none is given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "kqi", version, about = "Knowledge quantification over citation networks")]
pub struct Cli {
    /// TOML file with defaults; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct Common {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "KQI_THREADS")]
    pub threads: Option<usize>,
    /// RNG seed for randomized commands [default: 42].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output path (stdout when absent); an output prefix for `simulate`.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-node KQI table.
    Kqi(KqiArgs),
    /// KQI summed by author, affiliation, country or discipline.
    Rank(RankArgs),
    /// Knowledge vein over the highest-KQI papers.
    Vein(VeinArgs),
    /// Yearly total KQI with linear fit and boom test.
    Growth(GrowthArgs),
    /// Generate a preferential-attachment citation network.
    Simulate(SimulateArgs),
    /// Bootstrap percolation on a citation network.
    Percolate(PercolateArgs),
    /// KQI against PageRank and citation counts, plus the Pareto split.
    Compare(CompareArgs),
}

/// Config-file layout. Section names match subcommands.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub kqi: KqiArgs,
    pub rank: RankArgs,
    pub vein: VeinArgs,
    pub growth: GrowthArgs,
    pub simulate: SimulateArgs,
    pub percolate: PercolateArgs,
    pub compare: CompareArgs,
}

/// Fills unset options from a lower-priority source.
pub trait Overlay {
    fn overlay(&mut self, lower: Self);
}

macro_rules! overlay {
    ($ty:ty; $($opt:ident),*; $($flag:ident),*) => {
        impl Overlay for $ty {
            fn overlay(&mut self, lower: Self) {
                $( if self.$opt.is_none() { self.$opt = lower.$opt; } )*
                $( self.$flag |= lower.$flag; )*
            }
        }
    };
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct GraphInput {
    /// Edge file: `citing<TAB>cited[<TAB>weight]` per line.
    #[arg(value_name = "EDGES")]
    pub edges: Option<PathBuf>,
    /// Node file: `id<TAB>year<TAB>kind=key;key...`.
    #[arg(long, value_name = "FILE")]
    pub nodes: Option<PathBuf>,
    /// Edge decay rate; weights become exp(-rate * age gap).
    #[arg(long, value_name = "RATE")]
    pub decay: Option<f64>,
    /// Restrict to papers up to this year, which is also the decay reference.
    #[arg(long)]
    pub year: Option<i32>,
    /// Leave super-root edges out of the total weight.
    #[arg(long)]
    pub exclude_root_weight: bool,
}
overlay!(GraphInput; edges, nodes, decay, year; exclude_root_weight);

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct KqiArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GraphInput,
}

impl Overlay for KqiArgs {
    fn overlay(&mut self, lower: Self) {
        self.input.overlay(lower.input);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ByKind {
    Author,
    Affiliation,
    Country,
    Discipline,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct RankArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GraphInput,
    /// Grouping key [default: author].
    #[arg(long, value_enum)]
    pub by: Option<ByKind>,
    /// Credit only the first listed key of each paper.
    #[arg(long)]
    pub first_author: bool,
    /// Keep the first N rows.
    #[arg(long, value_name = "N")]
    pub top: Option<usize>,
}

impl Overlay for RankArgs {
    fn overlay(&mut self, lower: Self) {
        self.input.overlay(lower.input);
        self.by = self.by.or(lower.by);
        self.first_author |= lower.first_author;
        self.top = self.top.or(lower.top);
    }
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct VeinArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GraphInput,
    /// Select the top fraction of papers by KQI.
    #[arg(long, value_name = "FRACTION")]
    pub select_top: Option<f64>,
    /// Select the ids listed in a file, one per line.
    #[arg(long, value_name = "FILE")]
    pub select_file: Option<PathBuf>,
    /// Deepest ancestor search [default: 10].
    #[arg(long, value_name = "D")]
    pub max_depth: Option<usize>,
    /// End each search at the first vein edge found.
    #[arg(long)]
    pub stop_at_first_edge: bool,
    /// Also write Graphviz output here.
    #[arg(long, value_name = "FILE")]
    pub dot: Option<PathBuf>,
}

impl Overlay for VeinArgs {
    fn overlay(&mut self, lower: Self) {
        self.input.overlay(lower.input);
        self.select_top = self.select_top.or(lower.select_top);
        self.select_file = self.select_file.take().or(lower.select_file);
        self.max_depth = self.max_depth.or(lower.max_depth);
        self.stop_at_first_edge |= lower.stop_at_first_edge;
        self.dot = self.dot.take().or(lower.dot);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoomTargetArg {
    Total,
    Increments,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct GrowthArgs {
    #[arg(value_name = "EDGES")]
    pub edges: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub nodes: Option<PathBuf>,
    #[arg(long, value_name = "RATE")]
    pub decay: Option<f64>,
    /// First year [default: earliest publication year].
    #[arg(long)]
    pub from: Option<i32>,
    /// Last year [default: latest publication year].
    #[arg(long)]
    pub to: Option<i32>,
    /// Series tested for a boom [default: total].
    #[arg(long, value_enum)]
    pub boom_target: Option<BoomTargetArg>,
    /// Residual sum of squares above which the series counts as a boom [default: 9].
    #[arg(long)]
    pub rss_critical: Option<f64>,
    /// Fit the raw series instead of rescaling it to [0, 100].
    #[arg(long)]
    pub no_rescale: bool,
}
overlay!(GrowthArgs; edges, nodes, decay, from, to, boom_target, rss_critical; no_rescale);

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Standard,
    Accelerated,
    Decelerated,
    Constant,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelArg {
    Citations,
    TotalDegree,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct SimulateArgs {
    /// References per new paper [default: 3].
    #[arg(long)]
    pub m: Option<usize>,
    /// Arrival schedule [default: standard].
    #[arg(long, value_enum)]
    pub schedule: Option<ScheduleKind>,
    /// Number of steps [default: 20].
    #[arg(long)]
    pub steps: Option<u32>,
    /// Standard schedule: target node count when k is not given [default: 10000].
    #[arg(long)]
    pub total: Option<f64>,
    /// Standard schedule slope.
    #[arg(long)]
    pub k: Option<f64>,
    /// Standard schedule intercept [default: 0].
    #[arg(long)]
    pub b: Option<f64>,
    /// Rate schedules: arrivals per step at t = 1 [default: 100].
    #[arg(long)]
    pub scale: Option<f64>,
    /// Rate schedules: exponent of t [default: m + 2 accelerated, 1 decelerated].
    #[arg(long)]
    pub exponent: Option<f64>,
    /// Custom schedule: comma-separated arrivals per step.
    #[arg(long, value_delimiter = ',')]
    pub arrivals: Option<Vec<u64>>,
    /// Attachment weight [default: citations].
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    /// Also report yearly total KQI with linear and quadratic fits.
    #[arg(long)]
    pub growth: bool,
}
overlay!(SimulateArgs; m, schedule, steps, total, k, b, scale, exponent, arrivals, kernel; growth);

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct PercolateArgs {
    #[arg(value_name = "EDGES")]
    pub edges: Option<PathBuf>,
    /// Active neighbours needed to activate [default: 1].
    #[arg(long)]
    pub a: Option<u32>,
    /// Fraction of papers seeded active [default: 0.01].
    #[arg(long)]
    pub seed_fraction: Option<f64>,
    /// Independent runs with seeds seed, seed+1, ... [default: 1].
    #[arg(long)]
    pub runs: Option<u32>,
}
overlay!(PercolateArgs; edges, a, seed_fraction, runs;);

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionArg {
    CitingToCited,
    CitedToCiting,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct CompareArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: GraphInput,
    /// PageRank damping [default: 0.85].
    #[arg(long)]
    pub damping: Option<f64>,
    /// PageRank walk direction [default: citing-to-cited].
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    /// Write the Pareto curve (`fraction,share`) here.
    #[arg(long, value_name = "FILE")]
    pub pareto: Option<PathBuf>,
}

impl Overlay for CompareArgs {
    fn overlay(&mut self, lower: Self) {
        self.input.overlay(lower.input);
        self.damping = self.damping.or(lower.damping);
        self.direction = self.direction.or(lower.direction);
        self.pareto = self.pareto.take().or(lower.pareto);
    }
}
