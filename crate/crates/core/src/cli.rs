//! Command-line front end.
//!
//! Replicate `i` of every sampling command draws from stream `i` of the
//! root seed, so a single row can be replayed with `RngStream::new(seed, i)`.
//! Exit codes: 0 success, 1 a verification suite failed, 2 usage or runtime
//! error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bridge::{
    d_partition, default_epsilon, excursions, local_time_profile, sample_local_time, simulate_bridge,
    simulate_pseudo_bridge, t_partition, DiscretePath, ExcursionSet, LocalTimeProfile,
};
use crate::error::{Error, Result};
use crate::io::{num, nums, write_verification, Format, Table, REPORTS_FILE, SUMMARY_FILE};
use crate::mappings::{
    analyze_digraph, build_mapping_walk, enumerate_exact, sample_uniform_mapping, scaled_walk_statistics,
    OrderingMode,
};
use crate::partitions::{
    discrete_d_partition, discrete_t_partition, exact_t_count_dist, make_exchangeable, stirling_cycle_dist,
    t_block_law, ExactDist,
};
use crate::pointproc::{construct_points_d, reorder_biased, Coordinate, DEFAULT_TAIL_TOLERANCE};
use crate::randkit::{gem_lengths, rank_lengths, sample_beta, sample_gamma, sample_stable, StableParams};
use crate::rng::RngStream;
use crate::suites::{Suite, SuiteResult, Verifier, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bridgecut", version, about = "D- and T-partitions of Brownian bridge: samplers, exact tables and verification suites")]
pub struct Cli {
    /// Root seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "BRIDGECUT_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Output file, or directory for `verify`. Defaults to standard output
    /// (current directory for `verify`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Raw draws from the random-variable samplers.
    Sample(SampleArgs),
    /// Uniform random mappings and their walk statistics.
    Walk(WalkArgs),
    /// Discretized bridges (or pseudo-bridges) with their partitions.
    Bridge(BridgeArgs),
    /// Discrete D- or T-partitions of an exchangeable interval partition.
    Partition(PartitionArgs),
    /// Exact rational distribution tables.
    Enumerate(EnumerateArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Dist {
    Gem,
    Stable,
    Beta,
    Gamma,
    Points,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub dist: Dist,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// GEM parameter.
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Stable index.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Stable constant `c` in `E exp(-ξ τ_ℓ) = exp(-ℓ c ξ^α)`.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    pub c: f64,
    /// Local-time level of the stable draw.
    #[arg(long, default_value_t = 1.0)]
    pub level: f64,
    /// Point-process tilt.
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    /// Beta parameters, or gamma shape in `a`.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Reorder point sets by the Y coordinate.
    #[arg(long)]
    pub y_biased: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub tail_tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    CyclesFirst,
    BasinsFirst,
}

impl From<ModeArg> for OrderingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::CyclesFirst => OrderingMode::CyclesFirst,
            ModeArg::BasinsFirst => OrderingMode::BasinsFirst,
        }
    }
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    /// Mapping size.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::BasinsFirst)]
    pub mode: ModeArg,
    /// Emit every walk level instead of per-replicate statistics.
    #[arg(long)]
    pub levels: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum EpsilonPolicy {
    /// Exact conditional sampling of the per-step local time.
    Conditional,
    /// Excursion counting above `epsilon` (square root of the step when
    /// absent).
    Count { epsilon: Option<f64> },
}

#[derive(Debug, Args)]
pub struct BridgeArgs {
    /// Grid size.
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Simulate pseudo-bridges instead.
    #[arg(long)]
    pub pseudo: bool,
    /// Emit the full paths instead of per-replicate statistics.
    #[arg(long)]
    pub path: bool,
    /// Estimate local time by excursion counting above this width; `0`
    /// picks the square root of the step.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    D,
    T,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Number of intervals.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, value_enum, default_value_t = PartitionKind::D)]
    pub kind: PartitionKind,
    /// GEM index used to draw the lengths when `--lengths` is absent.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Fixed comma-separated lengths, normalized to sum to one.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Table_ {
    MappingCycles,
    MappingCyclic,
    FirstBasinCyclesFirst,
    FirstBasinBasinsFirst,
    Stirling,
    TCounts,
    PartitionBlocks,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long, value_enum)]
    pub what: Table_,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_suite)]
    pub suite: Suite,
    /// Replicates per Monte Carlo batch.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Bridge grid size.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Mapping size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Stable constant handed to the samplers; targets keep the Brownian
    /// value.
    #[arg(long, hide = true)]
    pub stable_c: Option<f64>,
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Validated run parameters echoed into every JSON document.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub seed: u64,
    pub n: Option<usize>,
    pub reps: Option<usize>,
    pub grid: Option<usize>,
    pub alpha: Option<f64>,
    pub xi: Option<f64>,
    pub epsilon: Option<EpsilonPolicy>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub suite: Option<Suite>,
    pub detail: Value,
}

impl RunConfig {
    fn new(command: &'static str, cli: &Cli) -> Self {
        RunConfig {
            command,
            seed: cli.seed,
            n: None,
            reps: None,
            grid: None,
            alpha: None,
            xi: None,
            epsilon: None,
            format: cli.format.into(),
            out: cli.out.clone(),
            suite: None,
            detail: Value::Null,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("n", self.n), ("reps", self.reps), ("grid", self.grid)] {
            if v == Some(0) {
                return Err(Error::Parameter(format!("--{name} must be positive")));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Parameter(format!("--alpha must lie in (0,1), got {a}")));
            }
        }
        if let Some(x) = self.xi {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Parameter(format!("--xi must be positive, got {x}")));
            }
        }
        if let Some(EpsilonPolicy::Count { epsilon: Some(e) }) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::Parameter(format!("--epsilon must be positive, got {e}")));
            }
        }
        Ok(())
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Sample(a) => cmd_sample(cli, a),
        Command::Walk(a) => cmd_walk(cli, a),
        Command::Bridge(a) => cmd_bridge(cli, a),
        Command::Partition(a) => cmd_partition(cli, a),
        Command::Enumerate(a) => cmd_enumerate(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
    }
    .map(|_| EXIT_OK)
    .or_else(|e| match e {
        Error::Structural(ref m) if m == SUITE_FAILED => Ok(EXIT_FAILED),
        e => Err(e),
    })
}

const SUITE_FAILED: &str = "suite failed";

fn emit(cli: &Cli, config: &RunConfig, table: &Table) -> Result<()> {
    table.emit(cli.format.into(), config, cli.out.as_deref())
}

fn stream(seed: u64, i: usize) -> crate::rng::StreamRng {
    RngStream::new(seed, i as u64).rng()
}

/// Maps replicates in parallel, keeping replicate order.
fn replicates<T: Send>(reps: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..reps).into_par_iter().map(&f).collect()
}

pub fn cmd_sample(cli: &Cli, a: &SampleArgs) -> Result<()> {
    let mut cfg = RunConfig::new("sample", cli);
    cfg.reps = Some(a.reps);
    cfg.detail = json!({ "dist": a.dist });
    let seed = cli.seed;
    let table = match a.dist {
        Dist::Gem => {
            cfg.detail = json!({ "dist": a.dist, "theta": a.theta, "tail_tolerance": a.tail_tolerance });
            cfg.validate()?;
            let mut t = Table::new(&["replicate", "sticks", "residual_mass", "first", "lengths"]);
            for (i, s) in replicates(a.reps, |i| gem_lengths(a.theta, a.tail_tolerance, &mut stream(seed, i)))?
                .into_iter()
                .enumerate()
            {
                t.push(vec![json!(i), json!(s.values.len()), num(s.residual_mass), num(s.values[0]), nums(&s.values)]);
            }
            t
        }
        Dist::Stable => {
            cfg.alpha = Some(a.alpha);
            cfg.detail = json!({ "dist": a.dist, "c": a.c, "level": a.level });
            cfg.validate()?;
            let p = StableParams::new(a.alpha, a.c)?;
            let mut t = Table::new(&["replicate", "x", "exp_neg_x"]);
            for (i, x) in replicates(a.reps, |i| sample_stable(&p, a.level, &mut stream(seed, i)))?
                .into_iter()
                .enumerate()
            {
                t.push(vec![json!(i), num(x), num((-x).exp())]);
            }
            t
        }
        Dist::Beta | Dist::Gamma => {
            cfg.detail = json!({ "dist": a.dist, "a": a.a, "b": a.b });
            cfg.validate()?;
            let beta = a.dist == Dist::Beta;
            let mut t = Table::new(&["replicate", "x"]);
            let xs = replicates(a.reps, |i| {
                let mut r = stream(seed, i);
                if beta {
                    sample_beta(a.a, a.b, &mut r)
                } else {
                    sample_gamma(a.a, &mut r)
                }
            })?;
            for (i, x) in xs.into_iter().enumerate() {
                t.push(vec![json!(i), num(x)]);
            }
            t
        }
        Dist::Points => {
            cfg.alpha = Some(a.alpha);
            cfg.xi = Some(a.xi);
            cfg.detail = json!({ "dist": a.dist, "c": a.c, "y_biased": a.y_biased });
            cfg.validate()?;
            let p = StableParams::new(a.alpha, a.c)?;
            let sets = replicates(a.reps, |i| {
                let mut r = stream(seed, i);
                let s = construct_points_d(a.xi, &p, DEFAULT_TAIL_TOLERANCE, &mut r)?;
                if a.y_biased {
                    reorder_biased(&s, Coordinate::Y, &mut r)
                } else {
                    Ok(s)
                }
            })?;
            let mut t = Table::new(&["replicate", "order_index", "x", "y"]);
            for (i, s) in sets.iter().enumerate() {
                for (k, &(x, y)) in s.points.iter().enumerate() {
                    t.push(vec![json!(i), json!(k), num(x), num(y)]);
                }
            }
            t
        }
    };
    emit(cli, &cfg, &table)
}

pub fn cmd_walk(cli: &Cli, a: &WalkArgs) -> Result<()> {
    let mut cfg = RunConfig::new("walk", cli);
    cfg.n = Some(a.n);
    cfg.reps = Some(a.reps);
    cfg.detail = json!({ "mode": a.mode, "levels": a.levels });
    cfg.validate()?;
    let mode: OrderingMode = a.mode.into();
    let seed = cli.seed;
    let walks = replicates(a.reps, |i| {
        let m = sample_uniform_mapping(a.n, &mut stream(seed, i))?;
        let d = analyze_digraph(&m);
        let w = build_mapping_walk(&d, mode);
        let s = scaled_walk_statistics(&w, &d, mode);
        Ok(if a.levels { (Some(w.levels()), s) } else { (None, s) })
    })?;
    let table = if a.levels {
        let mut t = Table::new(&["replicate", "step", "level"]);
        for (i, (levels, _)) in walks.iter().enumerate() {
            for (k, l) in levels.as_deref().unwrap_or_default().iter().enumerate() {
                t.push(vec![json!(i), json!(k), json!(l)]);
            }
        }
        t
    } else {
        let mut t = Table::new(&[
            "replicate",
            "components",
            "cyclic_scaled",
            "first_basin_fraction",
            "first_cycle_scaled",
            "scaled_max",
        ]);
        for (i, (_, s)) in walks.iter().enumerate() {
            t.push(vec![
                json!(i),
                json!(s.components.len()),
                num(s.cyclic_scaled),
                num(s.components[0].0),
                num(s.components[0].1),
                num(s.scaled_max),
            ]);
        }
        t
    };
    emit(cli, &cfg, &table)
}

fn local_time_for(path: &DiscretePath, policy: EpsilonPolicy, rng: &mut crate::rng::StreamRng) -> Result<(LocalTimeProfile, ExcursionSet)> {
    match policy {
        EpsilonPolicy::Conditional => {
            let lt = sample_local_time(path, rng);
            let z = ExcursionSet::from_local_time(path, &lt);
            Ok((lt, z))
        }
        EpsilonPolicy::Count { epsilon } => {
            let eps = epsilon.unwrap_or_else(|| default_epsilon(path));
            Ok((local_time_profile(path, eps)?, excursions(path)))
        }
    }
}

pub fn cmd_bridge(cli: &Cli, a: &BridgeArgs) -> Result<()> {
    let mut cfg = RunConfig::new("bridge", cli);
    cfg.grid = Some(a.grid);
    cfg.reps = Some(a.reps);
    let policy = match a.epsilon {
        None => EpsilonPolicy::Conditional,
        Some(0.0) => EpsilonPolicy::Count { epsilon: None },
        Some(e) => EpsilonPolicy::Count { epsilon: Some(e) },
    };
    if a.pseudo && policy != EpsilonPolicy::Conditional {
        return Err(Error::Parameter("pseudo-bridges carry their own local time; drop --epsilon".into()));
    }
    cfg.epsilon = Some(policy);
    cfg.detail = json!({ "pseudo": a.pseudo, "path": a.path });
    cfg.validate()?;
    let seed = cli.seed;
    let rows = replicates(a.reps, |i| {
        let mut rng = stream(seed, i);
        let (path, lt, zeros, tau) = if a.pseudo {
            let pb = simulate_pseudo_bridge(a.grid, &mut rng)?;
            let z = ExcursionSet::from_local_time(&pb.path, &pb.local_time);
            (pb.path, pb.local_time, z, Some(pb.tau))
        } else {
            let b = simulate_bridge(a.grid, &mut rng)?;
            let (lt, z) = local_time_for(&b, policy, &mut rng)?;
            (b, lt, z, None)
        };
        if a.path {
            return Ok(BridgeRow::Path(path, lt));
        }
        let d = d_partition(&path, &zeros, &lt, &mut rng)?;
        let t = t_partition(&path, &lt, &mut rng)?;
        let times = path.times();
        Ok(BridgeRow::Summary(vec![
            json!(i),
            num(lt.total()),
            num(d[0].length),
            json!(d.len()),
            num(t[0].end),
            json!(t.len()),
            num(times[lt.inverse_normalized(0.5)]),
            num(path.sample_abs_max(&mut rng)),
            tau.map_or(Value::Null, num),
        ]))
    })?;
    let mut table = if a.path {
        Table::new(&["replicate", "step", "time", "value", "local_time"])
    } else {
        Table::new(&[
            "replicate",
            "local_time",
            "d_first",
            "d_blocks",
            "t_first",
            "t_blocks",
            "tau_half",
            "abs_max",
            "tau",
        ])
    };
    for (i, row) in rows.into_iter().enumerate() {
        match row {
            BridgeRow::Summary(r) => table.push(r),
            BridgeRow::Path(p, lt) => {
                let times = p.times();
                let mut acc = 0.0;
                for (k, (&t, &v)) in times.iter().zip(&p.values).enumerate() {
                    table.push(vec![json!(i), json!(k), num(t), num(v), num(acc)]);
                    if k < p.m() {
                        acc += lt.increment(k);
                    }
                }
            }
        }
    }
    emit(cli, &cfg, &table)
}

enum BridgeRow {
    Summary(Vec<Value>),
    Path(DiscretePath, LocalTimeProfile),
}

pub fn cmd_partition(cli: &Cli, a: &PartitionArgs) -> Result<()> {
    let mut cfg = RunConfig::new("partition", cli);
    cfg.n = Some(a.n);
    cfg.reps = Some(a.reps);
    cfg.alpha = Some(a.alpha);
    cfg.detail = json!({ "kind": a.kind, "lengths": a.lengths });
    cfg.validate()?;
    let fixed = match &a.lengths {
        Some(l) => {
            if l.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(Error::Parameter("--lengths must be positive".into()));
            }
            let total: f64 = l.iter().sum();
            Some(l.iter().map(|x| x / total).collect::<Vec<f64>>())
        }
        None => None,
    };
    let seed = cli.seed;
    let parts = replicates(a.reps, |i| {
        let mut rng = stream(seed, i);
        let lengths = match &fixed {
            Some(l) => l.clone(),
            None => {
                // the n longest of a ranked GEM, renormalized
                let ranked = rank_lengths(&gem_lengths(a.alpha, 1e-12, &mut rng)?);
                let top: Vec<f64> = ranked.values.iter().take(a.n).copied().collect();
                let total: f64 = top.iter().sum();
                top.iter().map(|x| x / total).collect()
            }
        };
        let ip = make_exchangeable(&lengths, &mut rng)?;
        Ok(match a.kind {
            PartitionKind::D => discrete_d_partition(&ip, &mut rng),
            PartitionKind::T => discrete_t_partition(&ip, &mut rng),
        })
    })?;
    let mut t = Table::new(&["replicate", "blocks", "block_sizes", "first_length", "first_block"]);
    for (i, p) in parts.iter().enumerate() {
        let (l, r) = p.intervals[0];
        t.push(vec![json!(i), json!(p.count), json!(p.sub_counts()), num(r - l), json!(p.ordered_blocks[0].iter().map(|x| x + 1).collect::<Vec<_>>())]);
    }
    emit(cli, &cfg, &t)
}

fn dist_table<K: Serialize + Ord + Clone>(d: &ExactDist<K>) -> Table {
    let mut t = Table::new(&["outcome", "probability", "value"]);
    for (k, p) in d.iter() {
        t.push(vec![json!(k), json!(p.to_string()), num(crate::partitions::ratio_to_f64(p))]);
    }
    t
}

/// `{1,2},{3}` renders as `1,2|3`.
fn block_string(blocks: &[Vec<usize>]) -> String {
    blocks
        .iter()
        .map(|b| b.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("|")
}

pub fn cmd_enumerate(cli: &Cli, a: &EnumerateArgs) -> Result<()> {
    let mut cfg = RunConfig::new("enumerate", cli);
    cfg.n = Some(a.n);
    cfg.detail = json!({ "what": a.what });
    cfg.validate()?;
    let table = match a.what {
        Table_::MappingCycles => dist_table(&enumerate_exact(a.n)?.cycles_dist()),
        Table_::MappingCyclic => dist_table(&enumerate_exact(a.n)?.cyclic_points_dist()),
        Table_::FirstBasinCyclesFirst => dist_table(&enumerate_exact(a.n)?.first_basin_dist(OrderingMode::CyclesFirst)),
        Table_::FirstBasinBasinsFirst => dist_table(&enumerate_exact(a.n)?.first_basin_dist(OrderingMode::BasinsFirst)),
        Table_::Stirling => dist_table(&stirling_cycle_dist(a.n)?),
        Table_::TCounts => dist_table(&exact_t_count_dist(a.n)?),
        Table_::PartitionBlocks => {
            let mut t = Table::new(&["outcome", "probability", "value"]);
            for (p, q) in t_block_law(a.n)? {
                t.push(vec![json!(block_string(&p.blocks)), json!(q.to_string()), num(crate::partitions::ratio_to_f64(&q))]);
            }
            t
        }
    };
    emit(cli, &cfg, &table)
}

pub fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<()> {
    let mut cfg = RunConfig::new("verify", cli);
    cfg.suite = Some(a.suite);
    let mut vc = VerifyConfig::default().with_seed(cli.seed);
    if let Some(r) = a.reps {
        vc = vc.with_reps(r);
    }
    if let Some(g) = a.grid {
        vc = vc.with_grid(g);
    }
    if let Some(n) = a.n {
        vc = vc.with_mapping_size(n);
    }
    if let Some(c) = a.stable_c {
        vc = vc.with_stable_constant(c);
    }
    cfg.reps = Some(vc.reps);
    cfg.grid = Some(vc.grid);
    cfg.n = Some(vc.mapping_size);
    cfg.detail = serde_json::to_value(&vc)?;
    cfg.validate()?;
    let verifier = Verifier::new(vc)?;
    let result = verifier.run(a.suite)?;
    for c in &result.criteria {
        println!("{}", c.summary_line());
    }
    for r in &result.checks {
        println!("{}", r.summary_line());
    }
    let passed = result.passed();
    println!("suite {} {}", a.suite, if passed { "PASS" } else { "FAIL" });
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let results: Vec<SuiteResult> = vec![result];
    write_verification(&dir, &cfg, &results)?;
    eprintln!("wrote {} and {}", dir.join(REPORTS_FILE).display(), dir.join(SUMMARY_FILE).display());
    if passed {
        Ok(())
    } else {
        Err(Error::Structural(SUITE_FAILED.into()))
    }
}
