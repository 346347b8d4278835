//! Named verification suites and the numbered acceptance criteria they are
//! assembled from.
//!
//! Monte Carlo batches are simulated once per [`Verifier`] and shared by
//! every criterion that reads them. Replicate `i` of a batch always uses
//! stream `i` of the batch's derived seed.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Gamma};
use std::f64::consts::FRAC_PI_2;

use crate::bridge::{
    d_partition, occupation_histogram, path_swap, sample_local_time, simulate_bessel3_hitting, simulate_bridge,
    simulate_pseudo_bridge, t_partition, ExcursionSet,
};
use crate::error::{Error, Result};
use crate::mappings::{
    analyze_digraph, build_mapping_walk, enumerate_exact, sample_uniform_mapping, scaled_walk_statistics,
    OrderingMode,
};
use crate::numerics::integrate;
use crate::partitions::{
    exact_d_count_dist, exact_t_count_dist, pt_form_probability, ratio_to_f64, set_partitions, stick_identity_sum,
    stirling_cycle_dist, symmetrized_d_block_probability, SetPartition,
};
use crate::pointproc::{
    construct_points_d, default_jump_cutoff, palm_checks, reorder_biased, verify_lemma_gp, Coordinate, PalmSample,
    DEFAULT_TAIL_TOLERANCE,
};
use crate::randkit::{
    cdf_t1, density_t1, density_tau_br, gem_lengths, rank_lengths, rayleigh_cdf, sample_gamma,
    sample_stable, size_biased_permute, split_integral, stable_cdf, StableParams,
};
use crate::rng::RngStream;
use crate::statlab::{
    chi_square_uniform_grid, ks_critical_value, ks_one_sample, ks_two_sample, ks_two_sample_critical_value, mean_se,
    mean_test, weighted_mean, Criterion, StatReport,
};

/// Family-wise level of each suite.
pub const SUITE_LEVEL: f64 = 0.01;
pub const CRITERIA: std::ops::RangeInclusive<u8> = 1..=12;

const KS_TOLERANCE: f64 = 0.02;
const KS_TOLERANCE_WIDE: f64 = 0.03;
const MEAN_TOLERANCE: f64 = 0.01;
const SWAP_CHECKS: u64 = 200;
const SPLIT_BINS: usize = 8;
const GEM_THETA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Distributions,
    Mappings,
    Bridge,
    Partitions,
    Pointproc,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["distributions", "mappings", "bridge", "partitions", "pointproc", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Distributions => "distributions",
            Suite::Mappings => "mappings",
            Suite::Bridge => "bridge",
            Suite::Partitions => "partitions",
            Suite::Pointproc => "pointproc",
            Suite::All => "all",
        }
    }

    /// Numbered criteria run by the suite.
    pub fn criteria(self) -> Vec<u8> {
        match self {
            Suite::Distributions => vec![],
            Suite::Mappings => vec![4, 10],
            Suite::Bridge => vec![5, 6, 7, 8, 9, 11],
            Suite::Partitions => vec![1, 2, 3],
            Suite::Pointproc => vec![12],
            Suite::All => CRITERIA.collect(),
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Distributions, Suite::Mappings, Suite::Bridge, Suite::Partitions, Suite::Pointproc],
            s => vec![s],
        }
    }

    /// Number of level-calibrated tests, used for the Bonferroni split.
    /// Tests with pinned tolerances do not count.
    fn calibrated_tests(self) -> usize {
        match self {
            Suite::Distributions => 4,
            Suite::Bridge => 4,
            Suite::Pointproc => 3,
            Suite::Mappings | Suite::Partitions => 0,
            Suite::All => self.members().iter().map(|s| s.calibrated_tests()).sum(),
        }
    }

    /// Per-test level after the Bonferroni split.
    pub fn level(self) -> f64 {
        SUITE_LEVEL / self.calibrated_tests().max(1) as f64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "distributions" => Suite::Distributions,
            "mappings" => Suite::Mappings,
            "bridge" => Suite::Bridge,
            "partitions" => Suite::Partitions,
            "pointproc" => Suite::Pointproc,
            "all" => Suite::All,
            _ => {
                return Err(Error::Parameter(format!(
                    "unknown suite {s:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

/// Sizes and seed of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Replicates of the bridge, pseudo-bridge and mapping batches.
    pub reps: usize,
    /// Bridge grid size.
    pub grid: usize,
    pub mapping_size: usize,
    /// Replicates of the point-process checks.
    pub palm_reps: usize,
    /// Constant `c` handed to the stable samplers. Targets always use the
    /// Brownian value, so anything else should make the affected suites
    /// fail.
    pub stable_c: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 1,
            reps: 10_000,
            grid: 1 << 16,
            mapping_size: 40_000,
            palm_reps: 100_000,
            stable_c: std::f64::consts::SQRT_2,
        }
    }
}

impl VerifyConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Overrides the batch sizes; point-process batches scale along.
    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self.palm_reps = 10 * reps;
        self
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_mapping_size(mut self, n: usize) -> Self {
        self.mapping_size = n;
        self
    }

    pub fn with_stable_constant(mut self, c: f64) -> Self {
        self.stable_c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 100 || self.palm_reps < 100 {
            return Err(Error::Parameter("verification needs at least 100 replicates".into()));
        }
        if self.grid < 256 || !self.grid.is_multiple_of(16) {
            return Err(Error::Parameter(format!("grid must be a multiple of 16 and at least 256, got {}", self.grid)));
        }
        if self.mapping_size < 2 {
            return Err(Error::Parameter("mapping size must be at least 2".into()));
        }
        StableParams::new(0.5, self.stable_c)?;
        Ok(())
    }

    fn sampler_params(&self) -> StableParams {
        StableParams::new(0.5, self.stable_c).expect("validated")
    }

    fn stream(&self, label: &str) -> RngStream {
        RngStream::new(self.seed, 0).derive(label)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub reports: Vec<StatReport>,
    pub runtime_secs: f64,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(StatReport::passed)
    }

    pub fn summary_line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let parts: Vec<String> = self
            .reports
            .iter()
            .map(|r| format!("{}={:.4}{}{:.4}", r.name, r.statistic, op(r.criterion), r.threshold))
            .collect();
        format!(
            "criterion {:>2} {verdict} ({:.1}s) {}: {}",
            self.id,
            self.runtime_secs,
            self.title,
            parts.join(", ")
        )
    }
}

fn op(c: Criterion) -> &'static str {
    match c {
        Criterion::AtMost => "<=",
        Criterion::AtLeast => ">=",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub level: f64,
    pub criteria: Vec<CriterionResult>,
    /// Checks that belong to the suite but to no numbered criterion.
    pub checks: Vec<StatReport>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(CriterionResult::passed) && self.checks.iter().all(StatReport::passed)
    }

    pub fn reports(&self) -> impl Iterator<Item = &StatReport> {
        self.criteria.iter().flat_map(|c| c.reports.iter()).chain(self.checks.iter())
    }
}

/// One bridge replicate, reduced to the statistics the criteria read.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeRecord {
    pub local_time: f64,
    /// Local time after thinning the path to every fourth grid point.
    pub local_time_coarse: f64,
    pub d_first: f64,
    pub d_top: f64,
    pub t_first: f64,
    pub t_top: f64,
    pub t_top_local: f64,
    pub tau_half: f64,
    pub abs_max: f64,
    /// Standardized local times before and after the first T-cut.
    pub split: Option<(f64, f64)>,
    pub d_blocks: usize,
    pub t_blocks: usize,
}

impl BridgeRecord {
    pub fn simulate(m: usize, stream: RngStream) -> Result<Self> {
        let mut rng = stream.rng();
        let b = simulate_bridge(m, &mut rng)?;
        let lt = sample_local_time(&b, &mut rng);
        let local_time_coarse = sample_local_time(&b.subsample(4)?, &mut rng).total();
        let zeros = ExcursionSet::from_local_time(&b, &lt);
        let d = d_partition(&b, &zeros, &lt, &mut rng)?;
        let t = t_partition(&b, &lt, &mut rng)?;
        let l1 = lt.total();
        let tau_half = b.times()[lt.inverse_normalized(0.5)];
        let abs_max = b.sample_abs_max(&mut rng);
        let first = t[0];
        let split = (first.length < 1.0).then(|| {
            (first.local_time / first.length.sqrt(), (l1 - first.local_time) / (1.0 - first.length).sqrt())
        });
        let top = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, f64::max);
        Ok(BridgeRecord {
            local_time: l1,
            local_time_coarse,
            d_first: d[0].length,
            d_top: top(&mut d.iter().map(|f| f.length)),
            t_first: first.end,
            t_top: top(&mut t.iter().map(|f| f.length)),
            t_top_local: top(&mut t.iter().map(|f| f.local_time)),
            tau_half,
            abs_max,
            split,
            d_blocks: d.len(),
            t_blocks: t.len(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudoRecord {
    pub local_time: f64,
    pub abs_max: f64,
    pub tau: f64,
}

type Batch<T> = OnceLock<std::result::Result<Vec<T>, String>>;

fn batch<'a, T: Clone + Send>(
    cell: &'a Batch<T>,
    label: &str,
    reps: usize,
    f: impl Fn(u64) -> Result<T> + Sync,
) -> Result<&'a [T]> {
    cell.get_or_init(|| {
        (0..reps as u64)
            .into_par_iter()
            .map(&f)
            .collect::<Result<Vec<T>>>()
            .map_err(|e| e.to_string())
    })
    .as_deref()
    .map_err(|e| Error::Structural(format!("{label} batch failed: {e}")))
}

/// Runs criteria and suites for one configuration, simulating each shared
/// batch at most once.
pub struct Verifier {
    config: VerifyConfig,
    bridges: Batch<BridgeRecord>,
    pseudo: Batch<PseudoRecord>,
    bessel: Batch<f64>,
}

impl Verifier {
    pub fn new(config: VerifyConfig) -> Result<Self> {
        config.validate()?;
        Ok(Verifier { config, bridges: OnceLock::new(), pseudo: OnceLock::new(), bessel: OnceLock::new() })
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.config
    }

    pub fn bridge_batch(&self) -> Result<&[BridgeRecord]> {
        let m = self.config.grid;
        let s = self.config.stream("bridge");
        batch(&self.bridges, "bridge", self.config.reps, |i| BridgeRecord::simulate(m, s.with_stream(i)))
    }

    fn pseudo_grid(&self) -> usize {
        self.config.grid / 4
    }

    pub fn pseudo_batch(&self) -> Result<&[PseudoRecord]> {
        let m = self.pseudo_grid();
        let s = self.config.stream("pseudo-bridge");
        batch(&self.pseudo, "pseudo-bridge", self.config.reps, |i| {
            let mut rng = s.with_stream(i).rng();
            let pb = simulate_pseudo_bridge(m, &mut rng)?;
            let abs_max = pb.path.sample_abs_max(&mut rng);
            Ok(PseudoRecord { local_time: pb.local_time.total(), abs_max, tau: pb.tau })
        })
    }

    /// Samples of `1 / (2 sqrt(H))` with `H` the Bessel(3) hitting time of 1.
    pub fn bessel_batch(&self) -> Result<&[f64]> {
        let m = self.config.grid / 16;
        let s = self.config.stream("bessel");
        batch(&self.bessel, "bessel", self.config.reps, |i| {
            let h = simulate_bessel3_hitting(m, &mut s.with_stream(i).rng())?;
            Ok(0.5 / h.sqrt())
        })
    }

    pub fn criterion(&self, id: u8, level: f64) -> Result<CriterionResult> {
        let start = Instant::now();
        let (title, reports) = match id {
            1 => ("symmetrized D block law equals the product formula", self.exact_block_law()?),
            2 => ("block counts of D and T follow the Stirling law", self.exact_block_counts()?),
            3 => ("stick identity sums to one", self.stick_identity()?),
            4 => ("mapping enumeration: cycle law agrees, first basin differs", self.mapping_enumeration()?),
            5 => ("first D length mean 2/3, first T cut mean 1/2", self.first_means()?),
            6 => ("bridge local time is Rayleigh and refines", self.local_time_law()?),
            7 => ("inverse local time at one half is uniform", self.tau_half()?),
            8 => ("first T cut matches its density", self.first_t_cut()?),
            9 => ("top length law agrees between D and T", self.top_lengths()?),
            10 => ("uniform mappings against bridge limits", self.mapping_limits()?),
            11 => ("pseudo-bridge weighting, swap and maximum", self.pseudo_bridge()?),
            12 => ("point-process marginals, ordering and marked jumps", self.point_processes(level)?),
            _ => return Err(Error::Parameter(format!("no criterion numbered {id}"))),
        };
        let runtime = start.elapsed().as_secs_f64();
        let seed = self.config.seed;
        let reports = reports.into_iter().map(|r| r.with_seed(seed)).collect();
        Ok(CriterionResult { id, title, reports, runtime_secs: runtime })
    }

    pub fn run(&self, suite: Suite) -> Result<SuiteResult> {
        let level = suite.level();
        let mut criteria = Vec::new();
        for id in suite.criteria() {
            criteria.push(self.criterion(id, level)?);
        }
        let mut checks = Vec::new();
        for s in suite.members() {
            let start = Instant::now();
            let extra = match s {
                Suite::Distributions => self.distribution_checks(level)?,
                Suite::Bridge => self.bridge_checks(level)?,
                _ => Vec::new(),
            };
            let secs = start.elapsed().as_secs_f64() / extra.len().max(1) as f64;
            checks.extend(extra.into_iter().map(|r| r.with_seed(self.config.seed).with_runtime(secs)));
        }
        Ok(SuiteResult { suite, level, criteria, checks })
    }

    fn exact_block_law(&self) -> Result<Vec<StatReport>> {
        let mut rng = self.config.stream("exact-block-law").rng();
        let mut worst = 0.0f64;
        let mut checked = 0;
        for n in 2..=8 {
            let parts = set_partitions(n);
            let exact: Vec<f64> = parts.iter().map(|p| ratio_to_f64(&pt_form_probability(p))).collect();
            for _ in 0..5 {
                let lengths = distinct_lengths(n, &mut rng);
                for (p, e) in parts.iter().zip(&exact) {
                    let q = symmetrized_d_block_probability(&lengths, p)?;
                    worst = worst.max((q - e).abs());
                    checked += 1;
                }
            }
        }
        Ok(vec![StatReport::new("block-law-max-error", worst, 1e-10, Criterion::AtMost).with_sizes(&[checked])])
    }

    fn exact_block_counts(&self) -> Result<Vec<StatReport>> {
        let mut mismatches = 0;
        for n in 1..=8usize {
            let target = stirling_cycle_dist(n)?;
            let lengths: Vec<BigRational> = (1..=n as i64)
                .map(|i| BigRational::new(BigInt::from(i), BigInt::from((n * (n + 1) / 2) as i64)))
                .collect();
            mismatches += usize::from(exact_d_count_dist(&lengths)? != target);
            mismatches += usize::from(exact_t_count_dist(n)? != target);
        }
        Ok(vec![StatReport::new("count-law-mismatches", mismatches as f64, 0.0, Criterion::AtMost).with_sizes(&[16])])
    }

    fn stick_identity(&self) -> Result<Vec<StatReport>> {
        let mut rng = self.config.stream("stick-identity").rng();
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let n = rng.random_range(2..=8);
            let lengths = distinct_lengths(n, &mut rng);
            let blocks = random_set_partition(n, &mut rng);
            let weights: Vec<f64> = blocks.blocks.iter().map(|b| b.iter().map(|&i| lengths[i]).sum()).collect();
            worst = worst.max((stick_identity_sum(&weights) - 1.0).abs());
        }
        Ok(vec![StatReport::new("stick-identity-max-error", worst, 1e-12, Criterion::AtMost).with_sizes(&[100])])
    }

    fn mapping_enumeration(&self) -> Result<Vec<StatReport>> {
        let (mut unequal_cycles, mut equal_means) = (0, 0);
        for n in 1..=6 {
            let t = enumerate_exact(n)?;
            if t.cycle_sequence_dist(OrderingMode::CyclesFirst) != t.cycle_sequence_dist(OrderingMode::BasinsFirst) {
                unequal_cycles += 1;
            }
            if n >= 3 && t.mean_first_basin(OrderingMode::CyclesFirst) == t.mean_first_basin(OrderingMode::BasinsFirst) {
                equal_means += 1;
            }
        }
        Ok(vec![
            StatReport::new("cycle-law-disagreements", unequal_cycles as f64, 0.0, Criterion::AtMost).with_sizes(&[6]),
            StatReport::new("first-basin-mean-coincidences", equal_means as f64, 0.0, Criterion::AtMost)
                .with_sizes(&[4])
                .with_detail("n = 3..6"),
        ])
    }

    fn first_means(&self) -> Result<Vec<StatReport>> {
        let b = self.bridge_batch()?;
        let d: Vec<f64> = b.iter().map(|r| r.d_first).collect();
        let t: Vec<f64> = b.iter().map(|r| r.t_first).collect();
        Ok(vec![
            mean_test(&d, 2.0 / 3.0, MEAN_TOLERANCE).named("d-first-length-mean"),
            mean_test(&t, 0.5, MEAN_TOLERANCE).named("t-first-cut-mean"),
        ])
    }

    fn local_time_law(&self) -> Result<Vec<StatReport>> {
        let b = self.bridge_batch()?;
        let fine: Vec<f64> = b.iter().map(|r| r.local_time).collect();
        let coarse: Vec<f64> = b.iter().map(|r| r.local_time_coarse).collect();
        let ks_fine = ks_one_sample(&fine, rayleigh_cdf)?.with_threshold(KS_TOLERANCE).named("local-time-rayleigh");
        let ks_coarse = ks_one_sample(&coarse, rayleigh_cdf)?;
        let ratio = ks_fine.statistic / ks_coarse.statistic.max(f64::MIN_POSITIVE);
        let refine = StatReport::new("grid-refinement-ratio", ratio, 2.0, Criterion::AtMost)
            .with_sizes(&[fine.len()])
            .with_detail(format!(
                "KS {:.5} at m={}, {:.5} at m={}",
                ks_fine.statistic,
                self.config.grid,
                ks_coarse.statistic,
                self.config.grid / 4
            ));
        Ok(vec![ks_fine, refine])
    }

    fn tau_half(&self) -> Result<Vec<StatReport>> {
        let b = self.bridge_batch()?;
        let u: Vec<f64> = b.iter().map(|r| r.tau_half).collect();
        Ok(vec![ks_one_sample(&u, |x| x.clamp(0.0, 1.0))?.with_threshold(KS_TOLERANCE).named("tau-half-uniform")])
    }

    fn first_t_cut(&self) -> Result<Vec<StatReport>> {
        let b = self.bridge_batch()?;
        let t: Vec<f64> = b.iter().map(|r| r.t_first).collect();
        Ok(vec![ks_one_sample(&t, cdf_t1)?.with_threshold(KS_TOLERANCE).named("t-first-cut-law")])
    }

    fn top_lengths(&self) -> Result<Vec<StatReport>> {
        let b = self.bridge_batch()?;
        let d: Vec<f64> = b.iter().map(|r| r.d_top).collect();
        let t: Vec<f64> = b.iter().map(|r| r.t_top).collect();
        Ok(vec![ks_two_sample(&d, &t)?.with_threshold(KS_TOLERANCE).named("top-length-d-vs-t")])
    }

    fn mapping_limits(&self) -> Result<Vec<StatReport>> {
        let n = self.config.mapping_size;
        let s = self.config.stream("mappings");
        let stats: Vec<(f64, f64)> = (0..self.config.reps as u64)
            .into_par_iter()
            .map(|i| {
                let m = sample_uniform_mapping(n, &mut s.with_stream(i).rng())?;
                let d = analyze_digraph(&m);
                let w = build_mapping_walk(&d, OrderingMode::BasinsFirst);
                let st = scaled_walk_statistics(&w, &d, OrderingMode::BasinsFirst);
                Ok((st.cyclic_scaled, st.components[0].0))
            })
            .collect::<Result<_>>()?;
        let cyclic: Vec<f64> = stats.iter().map(|s| s.0).collect();
        let basin: Vec<f64> = stats.iter().map(|s| s.1).collect();
        let d: Vec<f64> = self.bridge_batch()?.iter().map(|r| r.d_first).collect();
        Ok(vec![
            ks_one_sample(&cyclic, rayleigh_cdf)?.with_threshold(KS_TOLERANCE).named("cyclic-points-rayleigh"),
            ks_two_sample(&basin, &d)?.with_threshold(KS_TOLERANCE_WIDE).named("first-basin-vs-d-first"),
        ])
    }

    fn pseudo_bridge(&self) -> Result<Vec<StatReport>> {
        let b = self.bridge_batch()?;
        let p = self.pseudo_batch()?;
        let weights: Vec<f64> = b.iter().map(|r| 1.0 / r.local_time).collect();
        let mut out = Vec::new();
        for (name, direct, bridge) in [
            (
                "weighting-max",
                p.iter().map(|r| r.abs_max).collect::<Vec<f64>>(),
                b.iter().map(|r| r.abs_max).collect::<Vec<f64>>(),
            ),
            (
                "weighting-local-time",
                p.iter().map(|r| r.local_time).collect(),
                b.iter().map(|r| r.local_time).collect(),
            ),
        ] {
            let (m, se) = mean_se(&direct);
            let w = weighted_mean(&bridge, &weights)?;
            let z = (m - w.mean).abs() / (se * se + w.se * w.se).sqrt();
            out.push(
                StatReport::new(name, z, 3.0, Criterion::AtMost)
                    .with_sizes(&[direct.len(), bridge.len()])
                    .with_detail(format!("direct {m:.5} ± {se:.5}, weighted {:.5} ± {:.5}", w.mean, w.se)),
            );
        }
        out.push(self.swap_check()?);
        let h = self.bessel_batch()?;
        let maxima: Vec<f64> = p.iter().map(|r| r.abs_max).collect();
        out.push(ks_two_sample(&maxima, h)?.with_threshold(KS_TOLERANCE_WIDE).named("pseudo-max-vs-bessel"));
        Ok(out)
    }

    /// Count of swaps whose occupation histogram differs in any bit.
    fn swap_check(&self) -> Result<StatReport> {
        let s = self.config.stream("swap");
        let m = (self.config.grid / 64).max(64);
        let edges: Vec<f64> = (0..=120).map(|i| -3.0 + 0.05 * i as f64).collect();
        let mismatches: usize = (0..SWAP_CHECKS)
            .into_par_iter()
            .map(|i| -> Result<usize> {
                let mut rng = s.with_stream(i).rng();
                let (path, lt) = if i % 2 == 0 {
                    let pb = simulate_pseudo_bridge(m, &mut rng)?;
                    (pb.path, pb.local_time)
                } else {
                    let b = simulate_bridge(m, &mut rng)?;
                    let lt = sample_local_time(&b, &mut rng);
                    (b, lt)
                };
                let u = rng.random_range(0.0..path.duration());
                if u <= 0.0 {
                    return Ok(0);
                }
                let (y, _) = path_swap(&path, &lt, u)?;
                Ok(usize::from(occupation_histogram(&path, &edges)? != occupation_histogram(&y, &edges)?))
            })
            .collect::<Result<Vec<usize>>>()?
            .into_iter()
            .sum();
        Ok(StatReport::new("swap-occupation-mismatches", mismatches as f64, 0.0, Criterion::AtMost)
            .with_sizes(&[SWAP_CHECKS as usize]))
    }

    fn point_processes(&self, level: f64) -> Result<Vec<StatReport>> {
        let p = self.config.sampler_params();
        let brownian = StableParams::brownian();
        let xi = 1.0;
        let psi = brownian.laplace_exponent(xi);
        let s = self.config.stream("points");
        let pairs: Vec<(PalmSample, PalmSample, f64, f64)> = (0..self.config.palm_reps as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = s.with_stream(i).rng();
                let set = construct_points_d(xi, &p, DEFAULT_TAIL_TOLERANCE, &mut rng)?;
                let y = reorder_biased(&set, Coordinate::Y, &mut rng)?;
                Ok((PalmSample::from_set(&set)?, PalmSample::from_set(&y)?, set.sum_x() + set.dropped_x, set.sum_y()))
            })
            .collect::<Result<_>>()?;
        let gamma = Gamma::new(brownian.alpha, xi).map_err(|e| Error::Parameter(e.to_string()))?;
        let sx: Vec<f64> = pairs.iter().map(|q| q.2).collect();
        let sy: Vec<f64> = pairs.iter().map(|q| q.3).collect();
        let mut out = vec![
            ks_one_sample(&sx, |x| if x <= 0.0 { 0.0 } else { gamma.cdf(x) })?
                .with_threshold(KS_TOLERANCE)
                .named("sum-x-gamma"),
            ks_one_sample(&sy, |y| if y <= 0.0 { 0.0 } else { -(-psi * y).exp_m1() })?
                .with_threshold(KS_TOLERANCE)
                .named("sum-y-exponential"),
        ];
        let (xs, ys): (Vec<PalmSample>, Vec<PalmSample>) = pairs.into_iter().map(|q| (q.0, q.1)).unzip();
        out.extend(palm_checks(&xs, &ys, psi, level)?);
        let reps = 2 * self.config.reps;
        let gp = verify_lemma_gp(xi, &p, default_jump_cutoff(xi, &p), reps, self.config.stream("marked-jumps"), level)?;
        for r in gp {
            out.push(if r.name == "marked-jumps-exponential-l" { r.with_threshold(KS_TOLERANCE) } else { r });
        }
        Ok(out)
    }

    fn distribution_checks(&self, level: f64) -> Result<Vec<StatReport>> {
        let p = self.config.sampler_params();
        let brownian = StableParams::brownian();
        let n = 10 * self.config.reps;
        let s = self.config.stream("distributions");

        let taus: Vec<f64> = (0..10 * n as u64)
            .into_par_iter()
            .map(|i| sample_stable(&p, 1.0, &mut s.with_stream(i).rng()))
            .collect::<Result<_>>()?;
        let mut out = Vec::new();
        for xi in [0.5, 1.0, 2.0] {
            let e: Vec<f64> = taus.iter().map(|t| (-xi * t).exp()).collect();
            let (m, se) = mean_se(&e);
            let target = (-brownian.laplace_exponent(xi)).exp();
            out.push(
                StatReport::new(format!("stable-laplace-xi-{xi}"), (m - target).abs() / se, 4.0, Criterion::AtMost)
                    .with_sizes(&[e.len()])
                    .with_detail(format!("mean {m:.6} ± {se:.6}, target {target:.6}")),
            );
        }
        let ks = |name: &str, xs: &[f64], cdf: &dyn Fn(f64) -> f64| -> Result<StatReport> {
            Ok(ks_one_sample(xs, cdf)?.with_threshold(ks_critical_value(level, xs.len() as f64)).named(name))
        };
        out.push(ks("stable-cdf", &taus[..n], &|t| stable_cdf(&brownian, 1.0, t))?);

        let g = s.derive("gem");
        let sticks: Vec<(f64, f64, f64)> = (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = g.with_stream(i).rng();
                let seq = gem_lengths(GEM_THETA, 1e-9, &mut rng)?;
                let q2 = seq.values.get(1).copied().unwrap_or(0.0) / (1.0 - seq.values[0]);
                let sb = size_biased_permute(&rank_lengths(&seq), &mut rng)?;
                Ok((seq.values[0], q2, sb.values[0]))
            })
            .collect::<Result<_>>()?;
        let beta_cdf = |x: f64| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powf(GEM_THETA);
        let col = |k: usize| -> Vec<f64> { sticks.iter().map(|t| [t.0, t.1, t.2][k]).collect() };
        out.push(ks("gem-first-stick", &col(0), &beta_cdf)?);
        out.push(ks("gem-second-stick", &col(1), &beta_cdf)?);
        out.push(ks("size-biased-ranked-gem", &col(2), &beta_cdf)?);

        let mut worst = 0.0f64;
        worst = worst.max((integrate(|x| density_t1(x).unwrap_or(0.0), 0.0, 1.0, 1e-12) - 1.0).abs());
        for u in [0.2, 0.5, 0.9] {
            let total = integrate(|x| density_tau_br(u, x, 0.5).unwrap_or(0.0), 0.0, 1.0, 1e-12);
            worst = worst.max((total - 1.0).abs());
        }
        for x in [0.1, 0.5, 0.7] {
            worst = worst.max((density_tau_br(0.5, x, 0.5)? - 1.0).abs());
        }
        out.push(StatReport::new("density-normalization", worst, 1e-6, Criterion::AtMost));
        Ok(out)
    }

    fn bridge_checks(&self, level: f64) -> Result<Vec<StatReport>> {
        let b = self.bridge_batch()?;
        let mut out = vec![split_grid_check(b, level)?];

        // T-fragments scaled by an independent gamma against the direct
        // point-process construction
        let brownian = StableParams::brownian();
        let s = self.config.stream("t-construction");
        let from_t: Vec<(f64, f64, f64)> = b
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let g = sample_gamma(0.5, &mut s.with_stream(i as u64).rng())?;
                let ga = g.sqrt();
                Ok((ga * r.local_time, g * r.t_top, ga * r.t_top_local))
            })
            .collect::<Result<_>>()?;
        let s = self.config.stream("d-construction");
        let direct: Vec<(f64, f64, f64)> = (0..b.len() as u64)
            .into_par_iter()
            .map(|i| {
                let ps = construct_points_d(1.0, &brownian, DEFAULT_TAIL_TOLERANCE, &mut s.with_stream(i).rng())?;
                let rx = ps.ranked(Coordinate::X);
                let ry = ps.ranked(Coordinate::Y);
                Ok((ps.sum_y(), rx[0], ry[0]))
            })
            .collect::<Result<_>>()?;
        let crit = ks_two_sample_critical_value(level, from_t.len(), direct.len());
        for (k, name) in ["construction-sum-y", "construction-top-x", "construction-top-y"].iter().enumerate() {
            let pick = |v: &[(f64, f64, f64)]| -> Vec<f64> { v.iter().map(|t| [t.0, t.1, t.2][k]).collect() };
            out.push(ks_two_sample(&pick(&from_t), &pick(&direct))?.with_threshold(crit).named(*name));
        }
        Ok(out)
    }
}

/// Distinct positive lengths summing to one.
fn distinct_lengths<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|i| rng.random::<f64>() + 1e-3 * i as f64 + 1e-6).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// Set partition of `[n]` with uniform random block labels.
fn random_set_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SetPartition {
    let k = rng.random_range(1..=n);
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 0..n {
        blocks[rng.random_range(0..k)].push(i);
    }
    blocks.retain(|b| !b.is_empty());
    SetPartition::new(n, blocks).expect("labels cover every point once")
}

/// CDF of the polar angle of the standardized local-time pair. The joint
/// density is `r² e^{-r²/2} / sqrt(2π)` times `cos φ sin φ I(cos φ, sin φ)`,
/// so radius and angle are independent.
fn split_angle_cdf(phi: f64) -> f64 {
    let g = |t: f64| 0.5 * t.cos() * t.sin() * split_integral(t.cos(), t.sin());
    integrate(g, 0.0, phi.clamp(0.0, FRAC_PI_2), 1e-11).clamp(0.0, 1.0)
}

/// Chi-square of the standardized local-time pair around the first T-cut
/// against its joint density, on an equal-probability polar grid.
fn split_grid_check(b: &[BridgeRecord], level: f64) -> Result<StatReport> {
    let chi3 = ChiSquared::new(3.0).map_err(|e| Error::Parameter(e.to_string()))?;
    let pairs: Vec<(f64, f64)> = b.iter().filter_map(|r| r.split).collect();
    let u: Vec<f64> = pairs.iter().map(|&(x, y)| chi3.cdf(x * x + y * y)).collect();
    let v: Vec<f64> = pairs.par_iter().map(|&(x, y)| split_angle_cdf(y.atan2(x))).collect();
    Ok(chi_square_uniform_grid(&[u, v], SPLIT_BINS, level)?.named("split-local-time-grid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randkit::joint_density_split;

    fn small() -> Verifier {
        Verifier::new(VerifyConfig::default().with_reps(400).with_grid(1024).with_mapping_size(2000)).unwrap()
    }

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().name(), name);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn bonferroni_levels() {
        assert_eq!(Suite::Pointproc.level(), 0.01 / 3.0);
        assert_eq!(Suite::Partitions.level(), 0.01);
        assert_eq!(Suite::All.level(), 0.01 / 11.0);
    }

    #[test]
    fn config_validation() {
        assert!(VerifyConfig::default().with_grid(1000).validate().is_err());
        assert!(VerifyConfig::default().with_reps(10).validate().is_err());
        assert!(VerifyConfig::default().with_stable_constant(-1.0).validate().is_err());
        assert!(VerifyConfig::default().validate().is_ok());
    }

    #[test]
    fn split_density_factors_in_polar_coordinates() {
        assert!((split_angle_cdf(FRAC_PI_2) - 1.0).abs() < 1e-8);
        assert!((split_angle_cdf(FRAC_PI_2 / 2.0) - 0.5).abs() < 1e-9);
        // joint density at (r cos φ, r sin φ) times r splits into the two factors
        let chi = |r: f64| r * r * (-0.5 * r * r).exp() / (std::f64::consts::PI / 2.0).sqrt();
        for (r, phi) in [(0.7, 0.3), (1.9, 1.1), (3.0, 0.8)] {
            let (a, b) = (r * f64::cos(phi), r * f64::sin(phi));
            let h = 1e-6;
            let dens = (split_angle_cdf(phi + h) - split_angle_cdf(phi - h)) / (2.0 * h);
            assert!((r * joint_density_split(a, b) - chi(r) * dens).abs() < 1e-6);
        }
    }

    #[test]
    fn random_set_partitions_are_valid() {
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..50 {
            let n = rng.random_range(1..=8);
            let p = random_set_partition(n, &mut rng);
            assert_eq!(p.block_sizes().iter().sum::<usize>(), n);
        }
    }

    #[test]
    fn batches_are_cached_and_deterministic() {
        let v = small();
        let a = v.bridge_batch().unwrap().as_ptr();
        assert_eq!(a, v.bridge_batch().unwrap().as_ptr());
        let w = small();
        assert_eq!(v.bridge_batch().unwrap()[..10], w.bridge_batch().unwrap()[..10]);
        let r = &v.bridge_batch().unwrap()[0];
        assert!(r.t_top >= r.t_first);
        assert!(r.d_top >= r.d_first);
    }

    #[test]
    fn exact_criteria_pass() {
        let v = small();
        for id in [3, 4] {
            let c = v.criterion(id, SUITE_LEVEL).unwrap();
            assert!(c.passed(), "{}", c.summary_line());
        }
        assert!(v.criterion(13, SUITE_LEVEL).is_err());
    }
}
