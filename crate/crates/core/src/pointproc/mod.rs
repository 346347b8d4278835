//! Bivariate Poisson point processes of lengths and local times, the
//! marked-subordinator construction and Palm checks on orderings.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::bridge::Fragment;
use crate::error::{param, Error, Result};
use crate::numerics::{integrate, normal_cdf};
use crate::randkit::{gem_lengths, sample_gamma, sample_stable, size_biased_order, stable_density, StableParams};
use crate::rng::{open_unit, RngStream};
use crate::statlab::{Criterion, StatReport};
use crate::statlab::{chi_square_uniform_grid, ks_one_sample, mean_se, mean_test, rejection_test};

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointOrder {
    Unordered,
    XBiased,
    YBiased,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coordinate {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedPointSet {
    pub points: Vec<(f64, f64)>,
    pub order: PointOrder,
    pub xi: f64,
    pub params: StableParams,
    /// X-mass of points dropped by tail truncation.
    pub dropped_x: f64,
}

impl MarkedPointSet {
    pub fn new(points: Vec<(f64, f64)>, order: PointOrder, xi: f64, params: StableParams) -> Result<Self> {
        if let Some(p) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
            return param(format!("point coordinates must be positive and finite, got {p:?}"));
        }
        Ok(MarkedPointSet { points, order, xi, params, dropped_x: 0.0 })
    }

    pub fn sum_x(&self) -> f64 {
        self.points.iter().map(|p| p.0).sum()
    }

    pub fn sum_y(&self) -> f64 {
        self.points.iter().map(|p| p.1).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Descending values of one coordinate.
    pub fn ranked(&self, coord: Coordinate) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .points
            .iter()
            .map(|p| match coord {
                Coordinate::X => p.0,
                Coordinate::Y => p.1,
            })
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi.is_finite()) {
        return param(format!("xi must be positive, got {xi}"));
    }
    Ok(())
}

/// GEM(alpha) lengths with local times `lambda^alpha * tau_j^(-alpha)` for
/// i.i.d. `tau_j` distributed as the subordinator at level 1.
pub fn sample_length_local_times<R: Rng + ?Sized>(
    p: &StableParams,
    tail_tolerance: f64,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let seq = gem_lengths(p.alpha, tail_tolerance, rng)?;
    let mut locals = Vec::with_capacity(seq.values.len());
    for &l in &seq.values {
        let tau = sample_stable(p, 1.0, rng)?;
        locals.push(l.powf(p.alpha) * tau.powf(-p.alpha));
    }
    Ok((seq.values, locals, seq.residual_mass))
}

/// Points `(G lambda_j, G^alpha L_j)` of the D-construction in X-biased
/// order, with `G ~ Gamma(alpha) / xi`.
pub fn construct_points_d<R: Rng + ?Sized>(
    xi: f64,
    p: &StableParams,
    tail_tolerance: f64,
    rng: &mut R,
) -> Result<MarkedPointSet> {
    check_xi(xi)?;
    let g = sample_gamma(p.alpha, rng)? / xi;
    let (lengths, locals, residual) = sample_length_local_times(p, tail_tolerance, rng)?;
    let ga = g.powf(p.alpha);
    let points = lengths.iter().zip(&locals).map(|(l, y)| (g * l, ga * y)).collect();
    let mut ps = MarkedPointSet::new(points, PointOrder::XBiased, xi, *p)?;
    ps.dropped_x = g * residual;
    Ok(ps)
}

/// Points `(G lambda_I, G^alpha L_I)` built from fragments of a path. With
/// T-partition fragments the result is in Y-biased order.
pub fn points_from_fragments(
    fragments: &[Fragment],
    g: f64,
    xi: f64,
    p: &StableParams,
    order: PointOrder,
) -> Result<MarkedPointSet> {
    let ga = g.powf(p.alpha);
    let points = fragments
        .iter()
        .filter(|f| f.local_time > 0.0 && f.length > 0.0)
        .map(|f| (g * f.length, ga * f.local_time))
        .collect();
    MarkedPointSet::new(points, order, xi, *p)
}

/// Size-biased reordering by one coordinate.
pub fn reorder_biased<R: Rng + ?Sized>(ps: &MarkedPointSet, coord: Coordinate, rng: &mut R) -> Result<MarkedPointSet> {
    if ps.is_empty() {
        return param("cannot reorder an empty point set");
    }
    let weights: Vec<f64> = ps
        .points
        .iter()
        .map(|p| match coord {
            Coordinate::X => p.0,
            Coordinate::Y => p.1,
        })
        .collect();
    let order = size_biased_order(&weights, rng)?;
    let mut out = ps.clone();
    out.points = order.iter().map(|&i| ps.points[i]).collect();
    out.order = match coord {
        Coordinate::X => PointOrder::XBiased,
        Coordinate::Y => PointOrder::YBiased,
    };
    Ok(out)
}

/// Summary of one replicate point set used by the Palm checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PalmSample {
    pub x1: f64,
    pub y1: f64,
    /// Absent when tail truncation left a single point.
    pub y2: Option<f64>,
    pub sum_x: f64,
    pub sum_y: f64,
}

impl PalmSample {
    pub fn from_set(ps: &MarkedPointSet) -> Result<Self> {
        if ps.is_empty() {
            return Err(Error::Degenerate("empty point set".into()));
        }
        Ok(PalmSample {
            x1: ps.points[0].0,
            y1: ps.points[0].1,
            y2: ps.points.get(1).map(|p| p.1),
            sum_x: ps.sum_x() + ps.dropped_x,
            sum_y: ps.sum_y(),
        })
    }
}

pub const PALM_MIN_REPLICATES: usize = 100_000;

/// Palm checks on replicate summaries.
///
/// With `x_biased` samples: `(Y_1, Sigma_Y - Y_1)` against the size-biased
/// pick density `rho_Y(y) f_Y(v) y/(y+v) = psi e^{-psi (y+v)} / (y+v)` on an
/// 8x8 grid, plus the two-step version on 4x4x4.
///
/// With `y_biased` samples: the mean of `X_1 / Sigma_X` against 1/2 and the
/// rejection of 2/3.
/// `psi` is the rate of the exponential law of `Sigma_Y`.
pub fn palm_checks(x_biased: &[PalmSample], y_biased: &[PalmSample], psi: f64, level: f64) -> Result<Vec<StatReport>> {
    let mut out = Vec::new();
    let power = |r: StatReport, n: usize| {
        if n < PALM_MIN_REPLICATES {
            r.warn(format!("only {n} replicates; at least {PALM_MIN_REPLICATES} advised"))
        } else {
            r
        }
    };
    if !x_biased.is_empty() {
        let s: Vec<f64> = x_biased.iter().map(|p| 1.0 - (-psi * p.sum_y).exp()).collect();
        let r1: Vec<f64> = x_biased.iter().map(|p| p.y1 / p.sum_y).collect();
        let rep = chi_square_uniform_grid(&[s, r1], 8, level)?.named("palm-x-biased-grid");
        out.push(power(rep, x_biased.len()));
        let two: Vec<&PalmSample> = x_biased.iter().filter(|p| p.y2.is_some()).collect();
        let s2: Vec<f64> = two.iter().map(|p| 1.0 - (-psi * p.sum_y).exp()).collect();
        let r1: Vec<f64> = two.iter().map(|p| p.y1 / p.sum_y).collect();
        let r2: Vec<f64> = two.iter().map(|p| (p.y2.unwrap() / (p.sum_y - p.y1)).min(1.0)).collect();
        let rep = chi_square_uniform_grid(&[s2, r1, r2], 4, level)?.named("palm-two-step-grid");
        out.push(power(rep, two.len()));
    }
    if !y_biased.is_empty() {
        let share: Vec<f64> = y_biased.iter().map(|p| p.x1 / p.sum_x).collect();
        out.push(power(mean_test(&share, 0.5, 0.01).named("palm-x-share-y-biased"), y_biased.len()));
        out.push(power(rejection_test(&share, 2.0 / 3.0, 5.0).named("palm-reject-two-thirds"), y_biased.len()));
    }
    Ok(out)
}

/// Cutoff below which subordinator jumps are replaced by their mean, chosen
/// so the replaced mass is below `1e-4 E[G]`.
pub fn default_jump_cutoff(xi: f64, p: &StableParams) -> f64 {
    // discarded mean up to L: c a d^(1-a) / (G(1-a)(1-a)) / psi ; E[G] = a/xi
    let a = p.alpha;
    let budget = 1e-4 * a / xi * p.laplace_exponent(xi);
    let k = p.c * a / (gamma(1.0 - a) * (1.0 - a));
    (budget / k).powf(1.0 / (1.0 - a))
}

/// Jump process of the subordinator above `cutoff`: rate per unit local
/// time and a sampler of jump sizes.
struct Jumps {
    rate: f64,
    cutoff: f64,
    alpha: f64,
    drift: f64,
}

impl Jumps {
    fn new(p: &StableParams, cutoff: f64) -> Self {
        let a = p.alpha;
        Jumps {
            rate: p.c / gamma(1.0 - a) * cutoff.powf(-a),
            cutoff,
            alpha: a,
            drift: p.c * a / (gamma(1.0 - a) * (1.0 - a)) * cutoff.powf(1.0 - a),
        }
    }

    fn size<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.cutoff * open_unit(rng).powf(-1.0 / self.alpha)
    }
}

/// `(G, L)`: local time `L` of the first jump marked by an independent
/// rate-`xi` Poisson clock, and `G` the sum of earlier jumps.
pub fn simulate_first_marked<R: Rng + ?Sized>(xi: f64, p: &StableParams, cutoff: f64, rng: &mut R) -> (f64, f64) {
    let j = Jumps::new(p, cutoff);
    let gap = Exp::new(j.rate).expect("positive rate");
    let (mut g, mut l) = (0.0, 0.0);
    loop {
        l += gap.sample(rng);
        let s = j.size(rng);
        if rng.random::<f64>() < -(-xi * s).exp_m1() {
            return (g + j.drift * l, l);
        }
        g += s;
    }
}

/// Sum of unmarked jumps over local time `[0, level]`.
pub fn simulate_unmarked_sum<R: Rng + ?Sized>(xi: f64, p: &StableParams, cutoff: f64, level: f64, rng: &mut R) -> f64 {
    let j = Jumps::new(p, cutoff);
    let gap = Exp::new(j.rate).expect("positive rate");
    let (mut sum, mut l) = (0.0, 0.0);
    loop {
        l += gap.sample(rng);
        if l > level {
            return sum + j.drift * level;
        }
        let s = j.size(rng);
        if rng.random::<f64>() >= -(-xi * s).exp_m1() {
            sum += s;
        }
    }
}

/// `P(G <= t | L = l)` for the law `e^{psi l - xi t} P(tau_l in dt)`. Closed
/// form (inverse Gaussian) at `alpha = 1/2`.
pub fn tilted_stable_cdf(xi: f64, p: &StableParams, level: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if p.alpha == 0.5 {
        let a = p.c * level / 2.0;
        let lam = 2.0 * a * a;
        let mu = a / xi.sqrt();
        let r = (lam / t).sqrt();
        let first = normal_cdf(r * (t / mu - 1.0));
        let x = r * (t / mu + 1.0);
        let second = (2.0 * lam / mu + ln_normal_tail(x)).exp();
        return (first + second).clamp(0.0, 1.0);
    }
    let w = (p.laplace_exponent(xi) * level).exp();
    let f = |s: f64| w * (-xi * s).exp() * stable_density(p, level, s);
    integrate(f, 0.0, t, 1e-10).clamp(0.0, 1.0)
}

/// `ln P(N > x)`.
fn ln_normal_tail(x: f64) -> f64 {
    if x < 25.0 {
        return normal_cdf(-x).ln();
    }
    let x2 = x * x;
    -0.5 * x2 - (x * (2.0 * std::f64::consts::PI).sqrt()).ln() + (1.0 - 1.0 / x2 + 3.0 / (x2 * x2)).ln()
}

/// Monte Carlo checks of the marked subordinator: `L ~ Exp(psi)`,
/// the joint law of `(G, L)` on a 6x6 grid, and the Laplace transform of the
/// unmarked sum at level 1.
pub fn verify_lemma_gp(
    xi: f64,
    p: &StableParams,
    jump_cutoff: f64,
    reps: usize,
    stream: RngStream,
    level: f64,
) -> Result<Vec<StatReport>> {
    check_xi(xi)?;
    if !(jump_cutoff > 0.0) {
        return param("jump cutoff must be positive");
    }
    let psi = p.laplace_exponent(xi);
    let pairs: Vec<(f64, f64)> = (0..reps as u64)
        .into_par_iter()
        .map(|i| simulate_first_marked(xi, p, jump_cutoff, &mut stream.with_stream(i).rng()))
        .collect();
    let sums = stream.derive("unmarked");
    let unmarked: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|i| simulate_unmarked_sum(xi, p, jump_cutoff, 1.0, &mut sums.with_stream(i).rng()))
        .collect();

    let coarse = jump_cutoff > 1.0001 * default_jump_cutoff(xi, p);
    let bias = |r: StatReport| {
        if coarse {
            r.warn(format!("jump cutoff {jump_cutoff:e} is coarser than the default"))
        } else {
            r
        }
    };
    let ls: Vec<f64> = pairs.iter().map(|q| q.1).collect();
    let ks = ks_one_sample(&ls, |l| if l <= 0.0 { 0.0 } else { -(-psi * l).exp_m1() })?.named("marked-jumps-exponential-l");
    let u1: Vec<f64> = ls.iter().map(|&l| -(-psi * l).exp_m1()).collect();
    let u2: Vec<f64> = pairs.iter().map(|&(g, l)| tilted_stable_cdf(xi, p, l, g)).collect();
    let grid = chi_square_uniform_grid(&[u1, u2], 6, level)?.named("marked-jumps-joint");
    let e: Vec<f64> = unmarked.iter().map(|t| (-t).exp()).collect();
    let (m, se) = mean_se(&e);
    let target = (psi - p.laplace_exponent(1.0 + xi)).exp();
    let z = (m - target).abs() / se;
    let lap = StatReport::new("marked-jumps-unmarked-laplace", z, 4.0, Criterion::AtMost)
        .with_sizes(&[reps])
        .with_detail(format!("mean {m:.6} ± {se:.6}, target {target:.6}"));
    Ok(vec![bias(ks), bias(grid), bias(lap)])
}
