//! Grid-sampled Brownian bridge and motion paths, excursions, local time at
//! zero, the D- and T-partitions of a path, pseudo-bridges, the path swap
//! and hitting times of the three-dimensional Bessel process.

mod pseudo;

pub use pseudo::*;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};
use crate::randkit::StableParams;
use crate::rng::open_unit;

/// Beyond this value of `2ab/h` a step between same-sign values is treated
/// as zero-free; the neglected probability is `exp(-45)`.
const SKIP_EXPONENT: f64 = 45.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    Bridge,
    Motion,
    PseudoBridge,
    Fragment,
}

/// Time grid of a path. `Steps` stores the width of every step so that
/// rearranging steps never perturbs their widths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Grid {
    Uniform { dt: f64 },
    Steps(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretePath {
    pub kind: PathKind,
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl DiscretePath {
    pub fn new(kind: PathKind, grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return param("a path needs at least two grid points");
        }
        match &grid {
            Grid::Uniform { dt } if !(dt.is_finite() && *dt > 0.0) => {
                return param(format!("grid step must be positive, got {dt}"));
            }
            Grid::Steps(w) if w.len() + 1 != values.len() => {
                return param("one width per step required");
            }
            Grid::Steps(w) if w.iter().any(|h| !(h.is_finite() && *h > 0.0)) => {
                return param("step widths must be positive");
            }
            _ => {}
        }
        if kind == PathKind::Bridge && (values[0] != 0.0 || *values.last().unwrap() != 0.0) {
            return Err(Error::Structural("bridge must start and end at 0".into()));
        }
        Ok(DiscretePath { kind, grid, values })
    }

    /// Number of steps.
    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self, i: usize) -> f64 {
        match &self.grid {
            Grid::Uniform { dt } => *dt,
            Grid::Steps(w) => w[i],
        }
    }

    pub fn max_step(&self) -> f64 {
        match &self.grid {
            Grid::Uniform { dt } => *dt,
            Grid::Steps(w) => w.iter().cloned().fold(0.0, f64::max),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        let m = self.m();
        match &self.grid {
            Grid::Uniform { dt } => (0..=m).map(|i| i as f64 * dt).collect(),
            Grid::Steps(w) => {
                let mut t = Vec::with_capacity(m + 1);
                let mut acc = 0.0;
                t.push(0.0);
                for h in w {
                    acc += h;
                    t.push(acc);
                }
                t
            }
        }
    }

    pub fn duration(&self) -> f64 {
        match &self.grid {
            Grid::Uniform { dt } => self.m() as f64 * dt,
            Grid::Steps(w) => w.iter().sum(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Every `factor`-th grid point of a uniform path.
    pub fn subsample(&self, factor: usize) -> Result<DiscretePath> {
        let dt = match self.grid {
            Grid::Uniform { dt } => dt,
            Grid::Steps(_) => return param("subsampling needs a uniform grid"),
        };
        if factor == 0 || !self.m().is_multiple_of(factor) || self.m() / factor < 2 {
            return param(format!("cannot subsample {} steps by {factor}", self.m()));
        }
        let values = self.values.iter().step_by(factor).cloned().collect();
        DiscretePath::new(self.kind, Grid::Uniform { dt: dt * factor as f64 }, values)
    }

    /// Supremum of `|x|` over the path, with each step filled in by an exact
    /// draw of the maximum of the Brownian bridge between its endpoints.
    pub fn sample_abs_max<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let grid_max = self.max_abs();
        let mut best = grid_max;
        for i in 0..self.m() {
            let h = self.step(i);
            for sign in [1.0, -1.0] {
                let a = sign * self.values[i];
                let b = sign * self.values[i + 1];
                if 2.0 * (grid_max - a) * (grid_max - b) / h > SKIP_EXPONENT {
                    continue;
                }
                best = best.max(bridge_step_max(a, b, h, rng));
            }
        }
        best
    }
}

/// Maximum of a Brownian bridge from `a` to `b` over time `h`.
pub fn bridge_step_max<R: Rng + ?Sized>(a: f64, b: f64, h: f64, rng: &mut R) -> f64 {
    let e = -2.0 * h * open_unit(rng).ln();
    0.5 * ((a + b) + ((a - b) * (a - b) + e).sqrt())
}

/// Local time at zero accumulated by a Brownian bridge from `a` to `b` over
/// time `h`, drawn from its exact conditional law
/// `P(L > y) = exp(-((|a|+|b|+y)^2 - (b-a)^2) / 2h)`.
pub fn bridge_step_local_time<R: Rng + ?Sized>(a: f64, b: f64, h: f64, rng: &mut R) -> f64 {
    if a * b > 0.0 && 2.0 * a * b / h > SKIP_EXPONENT {
        return 0.0;
    }
    let e = -2.0 * h * open_unit(rng).ln();
    (((b - a) * (b - a) + e).sqrt() - a.abs() - b.abs()).max(0.0)
}

fn check_grid(m: usize) -> Result<()> {
    if m < 2 {
        return param(format!("grid size must be at least 2, got {m}"));
    }
    Ok(())
}

pub fn simulate_motion<R: Rng + ?Sized>(m: usize, duration: f64, rng: &mut R) -> Result<DiscretePath> {
    check_grid(m)?;
    if !(duration.is_finite() && duration > 0.0) {
        return param(format!("duration must be positive, got {duration}"));
    }
    let dt = duration / m as f64;
    let sd = dt.sqrt();
    let mut values = Vec::with_capacity(m + 1);
    let mut w = 0.0;
    values.push(0.0);
    for _ in 0..m {
        let z: f64 = rng.sample(StandardNormal);
        w += sd * z;
        values.push(w);
    }
    DiscretePath::new(PathKind::Motion, Grid::Uniform { dt }, values)
}

/// `B_t = W_t - t W_1` on a uniform grid of `m` steps.
pub fn simulate_bridge<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<DiscretePath> {
    let mut path = simulate_motion(m, 1.0, rng)?;
    let w1 = path.values[m];
    let dt = 1.0 / m as f64;
    for (i, v) in path.values.iter_mut().enumerate() {
        *v -= i as f64 * dt * w1;
    }
    path.values[0] = 0.0;
    path.values[m] = 0.0;
    path.kind = PathKind::Bridge;
    Ok(path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalTimeMethod {
    /// Scaled count of excursions longer than epsilon.
    ExcursionCount,
    /// Exact draw of the local time of each step given its endpoints.
    Conditional,
}

/// Cumulative local time at zero on the grid of a path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeProfile {
    pub grid: Grid,
    pub cumulative: Vec<f64>,
    pub epsilon: Option<f64>,
    pub alpha: f64,
    pub c: f64,
    pub method: LocalTimeMethod,
}

impl LocalTimeProfile {
    fn from_increments(grid: Grid, incs: &[f64], epsilon: Option<f64>, method: LocalTimeMethod) -> Self {
        let mut cumulative = Vec::with_capacity(incs.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for x in incs {
            acc += x;
            cumulative.push(acc);
        }
        let p = StableParams::brownian();
        LocalTimeProfile { grid, cumulative, epsilon, alpha: p.alpha, c: p.c, method }
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn increment(&self, step: usize) -> f64 {
        self.cumulative[step + 1] - self.cumulative[step]
    }

    pub fn increments(&self) -> Vec<f64> {
        self.cumulative.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Steps carrying positive local time.
    pub fn zero_steps(&self) -> Vec<usize> {
        (0..self.cumulative.len() - 1).filter(|&i| self.increment(i) > 0.0).collect()
    }

    /// Local time between two grid indices.
    pub fn between(&self, start: usize, end: usize) -> f64 {
        self.cumulative[end] - self.cumulative[start]
    }

    /// First grid index where `L / L(end)` exceeds `u`. The profile must have
    /// positive total.
    pub fn inverse_normalized(&self, u: f64) -> usize {
        let target = u * self.total();
        let i = self.cumulative.partition_point(|&c| c <= target);
        i.min(self.cumulative.len() - 1)
    }

    /// Profile of a standardized fragment: restricted to `[start, end]` and
    /// divided by `length^alpha`.
    pub fn standardized(&self, start: usize, end: usize, length: f64) -> LocalTimeProfile {
        let scale = length.powf(self.alpha);
        let base = self.cumulative[start];
        let cumulative = self.cumulative[start..=end].iter().map(|c| (c - base) / scale).collect();
        let grid = match &self.grid {
            Grid::Uniform { dt } => Grid::Uniform { dt: dt / length },
            Grid::Steps(w) => Grid::Steps(w[start..end].iter().map(|h| h / length).collect()),
        };
        LocalTimeProfile {
            grid,
            cumulative,
            epsilon: self.epsilon.map(|e| e / length),
            alpha: self.alpha,
            c: self.c,
            method: self.method,
        }
    }
}

/// Samples the local time at zero of every step given the grid values.
pub fn sample_local_time<R: Rng + ?Sized>(path: &DiscretePath, rng: &mut R) -> LocalTimeProfile {
    let incs: Vec<f64> = (0..path.m())
        .map(|i| bridge_step_local_time(path.values[i], path.values[i + 1], path.step(i), rng))
        .collect();
    LocalTimeProfile::from_increments(path.grid.clone(), &incs, None, LocalTimeMethod::Conditional)
}

/// Default epsilon for the excursion-count estimator: `sqrt(dt)`.
pub fn default_epsilon(path: &DiscretePath) -> f64 {
    path.max_step().sqrt()
}

/// `L(t) = Gamma(1-alpha)/c * eps^alpha * N(t, eps)` where `N(t, eps)` counts
/// excursions completed by time `t` that are longer than `eps`.
pub fn local_time_profile(path: &DiscretePath, epsilon: f64) -> Result<LocalTimeProfile> {
    if !(epsilon > path.max_step()) {
        return Err(Error::Resolution(format!(
            "epsilon {epsilon} must exceed the grid step {}",
            path.max_step()
        )));
    }
    let p = StableParams::brownian();
    let unit = statrs::function::gamma::gamma(1.0 - p.alpha) / p.c * epsilon.powf(p.alpha);
    let ex = excursions(path);
    let mut incs = vec![0.0; path.m()];
    for (&(_, end), &len) in ex.intervals.iter().zip(&ex.lengths) {
        if len > epsilon {
            incs[end - 1] += unit;
        }
    }
    Ok(LocalTimeProfile::from_increments(
        path.grid.clone(),
        &incs,
        Some(epsilon),
        LocalTimeMethod::ExcursionCount,
    ))
}

/// Excursion intervals between successive grid zeros.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcursionSet {
    /// Grid indices of zeros, increasing.
    pub zeros: Vec<usize>,
    /// `(start, end)` grid indices of each excursion, left to right.
    pub intervals: Vec<(usize, usize)>,
    pub lengths: Vec<f64>,
}

impl ExcursionSet {
    fn from_zeros(path: &DiscretePath, zeros: Vec<usize>) -> Self {
        let times = path.times();
        let mut intervals = Vec::new();
        let mut lengths = Vec::new();
        for w in zeros.windows(2) {
            if w[1] - w[0] >= 2 {
                intervals.push((w[0], w[1]));
                lengths.push(times[w[1]] - times[w[0]]);
            }
        }
        ExcursionSet { zeros, intervals, lengths }
    }

    /// Zeros implied by a local-time profile: both ends of every step that
    /// carries local time, plus the ends of any path other than a motion.
    pub fn from_local_time(path: &DiscretePath, lt: &LocalTimeProfile) -> Self {
        let pinned = path.kind != PathKind::Motion;
        let mut zeros = Vec::new();
        if pinned {
            zeros.push(0);
        }
        for i in lt.zero_steps() {
            if zeros.last() != Some(&i) {
                zeros.push(i);
            }
            zeros.push(i + 1);
        }
        if pinned && zeros.last() != Some(&path.m()) {
            zeros.push(path.m());
        }
        ExcursionSet::from_zeros(path, zeros)
    }

    pub fn ranked_lengths(&self) -> Vec<f64> {
        let mut l = self.lengths.clone();
        l.sort_by(|a, b| b.total_cmp(a));
        l
    }

    /// First zero at or after grid time `t`, given the path's times.
    pub fn first_zero_at_or_after(&self, times: &[f64], t: f64) -> Option<usize> {
        let k = self.zeros.partition_point(|&z| times[z] < t);
        self.zeros.get(k).copied()
    }
}

/// Zeros are grid points where the value is 0 or where the sign changes
/// before the next point. Both ends of any path other than a motion count as
/// zeros. Excursions shorter than two steps are absorbed
/// into the zero set.
pub fn excursions(path: &DiscretePath) -> ExcursionSet {
    let v = &path.values;
    let m = path.m();
    let mut zeros = Vec::new();
    let pinned = path.kind != PathKind::Motion;
    for i in 0..=m {
        let crossing = i < m && v[i] * v[i + 1] < 0.0;
        let end = pinned && (i == 0 || i == m);
        if v[i] == 0.0 || crossing || end {
            zeros.push(i);
        }
    }
    ExcursionSet::from_zeros(path, zeros)
}

/// A piece of a path between two of its zeros.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fragment {
    pub start: f64,
    pub end: f64,
    pub start_index: usize,
    pub end_index: usize,
    pub length: f64,
    pub local_time: f64,
}

impl Fragment {
    fn new(times: &[f64], lt: &LocalTimeProfile, start_index: usize, end_index: usize) -> Self {
        Fragment {
            start: times[start_index],
            end: times[end_index],
            start_index,
            end_index,
            length: times[end_index] - times[start_index],
            local_time: lt.between(start_index, end_index),
        }
    }

    /// Maximum of `|x|` on the fragment after Brownian scaling.
    pub fn standardized_max(&self, path: &DiscretePath) -> f64 {
        let m = path.values[self.start_index..=self.end_index]
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        m / self.length.sqrt()
    }
}

/// Brownian scaling of `path` restricted to the grid interval `[start, end]`:
/// time rescaled to `[0,1]`, values divided by the square root of the length.
pub fn standardize_fragment(path: &DiscretePath, interval: (usize, usize)) -> Result<DiscretePath> {
    let (start, end) = interval;
    if end > path.m() || start >= end {
        return domain(format!("empty or out-of-range interval [{start}, {end}]"));
    }
    let times = path.times();
    let length = times[end] - times[start];
    if !(length > 0.0) {
        return domain("zero-length interval");
    }
    let s = length.sqrt();
    let values = path.values[start..=end].iter().map(|v| v / s).collect();
    let grid = match &path.grid {
        Grid::Uniform { dt } => Grid::Uniform { dt: dt / length },
        Grid::Steps(w) => Grid::Steps(w[start..end].iter().map(|h| h / length).collect()),
    };
    DiscretePath::new(PathKind::Fragment, grid, values)
}

fn require_bridge_end(path: &DiscretePath, zeros: &ExcursionSet) -> Result<()> {
    if zeros.zeros.last() != Some(&path.m()) {
        return Err(Error::Structural("path must end at a zero".into()));
    }
    Ok(())
}

/// D-partition: `V_j` uniform on `[D_{j-1}, 1]`, cut at the first grid zero
/// at or after `V_j`. Stops once less than two grid steps remain.
pub fn d_partition<R: Rng + ?Sized>(
    path: &DiscretePath,
    zeros: &ExcursionSet,
    lt: &LocalTimeProfile,
    rng: &mut R,
) -> Result<Vec<Fragment>> {
    require_bridge_end(path, zeros)?;
    let times = path.times();
    let m = path.m();
    let total = times[m];
    let resolution = 2.0 * path.max_step();
    let mut out = Vec::new();
    let mut start = 0;
    while start < m {
        let t0 = times[start];
        let v = t0 + open_unit(rng) * (total - t0);
        let mut end = zeros.first_zero_at_or_after(&times, v).unwrap_or(m);
        if total - times[end] < resolution {
            end = m;
        }
        out.push(Fragment::new(&times, lt, start, end));
        start = end;
    }
    Ok(out)
}

/// T-partition: cut at the first grid time where `L / L(1)` exceeds
/// `Vhat_j = 1 - prod (1 - U_i)`.
pub fn t_partition<R: Rng + ?Sized>(
    path: &DiscretePath,
    lt: &LocalTimeProfile,
    rng: &mut R,
) -> Result<Vec<Fragment>> {
    if !(lt.total() > 0.0) {
        return Err(Error::Resolution("path carries no local time at zero".into()));
    }
    let times = path.times();
    let m = path.m();
    let resolution = 2.0 * path.max_step();
    let mut out = Vec::new();
    let mut start = 0;
    let mut rest = 1.0;
    while start < m {
        rest *= 1.0 - rng.random::<f64>();
        let mut end = lt.inverse_normalized(1.0 - rest);
        if times[m] - times[end] < resolution {
            end = m;
        }
        if end > start {
            out.push(Fragment::new(&times, lt, start, end));
            start = end;
        }
    }
    Ok(out)
}

/// Occupation measure of `path` binned by `edges`: each step contributes its
/// width to the bin of its left value. Per-bin sums are taken in sorted order
/// so the result depends only on the multiset of steps.
pub fn occupation_histogram(path: &DiscretePath, edges: &[f64]) -> Result<Vec<f64>> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return param("edges must be strictly increasing with at least two entries");
    }
    let mut contributions: Vec<Vec<f64>> = vec![Vec::new(); edges.len() - 1];
    for i in 0..path.m() {
        let x = path.values[i];
        if x < edges[0] || x >= edges[edges.len() - 1] {
            continue;
        }
        let b = edges.partition_point(|&e| e <= x) - 1;
        contributions[b].push(path.step(i));
    }
    Ok(contributions
        .into_iter()
        .map(|mut c| {
            c.sort_by(f64::total_cmp);
            c.iter().sum()
        })
        .collect())
}

/// Hitting time of 1 by a three-dimensional Bessel process started at 0,
/// simulated from exact Gaussian increments of a 3-d Brownian motion with
/// step `1/m` and a per-step crossing correction.
pub fn simulate_bessel3_hitting<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<f64> {
    check_grid(m)?;
    let h = 1.0 / m as f64;
    let sd = h.sqrt();
    let budget = 1000 * m;
    let mut x = [0.0f64; 3];
    let mut r = 0.0;
    for k in 0..budget {
        for c in x.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *c += sd * z;
        }
        let r_next = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r_next >= 1.0 {
            return Ok((k as f64 + 1.0) * h);
        }
        let p = (-2.0 * (1.0 - r) * (1.0 - r_next) / h).exp();
        if rng.random::<f64>() < p {
            return Ok((k as f64 + 0.5) * h);
        }
        r = r_next;
    }
    Err(Error::Budget(format!("no hit of radius 1 within {budget} steps")))
}
