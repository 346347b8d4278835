//! Goodness-of-fit tests, estimators and report assembly.

mod report;

pub use report::{Criterion, Decision, StatReport};

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Default significance level for single tests.
pub const DEFAULT_LEVEL: f64 = 0.01;
const MIN_KS_SAMPLES: usize = 100;

/// Empirical distribution function over a sorted copy of the samples.
#[derive(Clone, Debug)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(samples: &[f64]) -> Self {
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ecdf { sorted }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    use std::f64::consts::PI;
    if lambda < 1.18 {
        let a = -PI * PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=20).map(|k| ((2 * k - 1) as f64).powi(2) * a).map(f64::exp).sum();
        (1.0 - (2.0 * PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

fn ks_scale(n_eff: f64) -> f64 {
    let r = n_eff.sqrt();
    r + 0.12 + 0.11 / r
}

pub fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    kolmogorov_survival(ks_scale(n_eff) * d)
}

/// `λ` with `P(K > λ) = level`.
pub fn kolmogorov_quantile(level: f64) -> f64 {
    crate::numerics::bisect(|l| -kolmogorov_survival(l), -level, 0.0, 10.0)
}

/// Smallest distance rejected at `level` for effective sample size `n_eff`.
pub fn ks_critical_value(level: f64, n_eff: f64) -> f64 {
    kolmogorov_quantile(level) / ks_scale(n_eff)
}

/// Two-sample version of [`ks_critical_value`], without the small-sample
/// correction.
pub fn ks_two_sample_critical_value(level: f64, n: usize, m: usize) -> f64 {
    let n_eff = (n * m) as f64 / (n + m) as f64;
    kolmogorov_quantile(level) / n_eff.sqrt()
}

/// Sup distance between the ECDF of `samples` and `cdf`. Ties are handled
/// by comparing against the left limit of `cdf` below each distinct value.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    let ecdf = Ecdf::new(samples);
    let xs = ecdf.sorted();
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    let mut last_f = f64::NEG_INFINITY;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == v {
            j += 1;
        }
        let f = cdf(v);
        let f_left = cdf(v.next_down());
        if !(0.0..=1.0 + 1e-9).contains(&f) || f + 1e-9 < last_f || f_left > f + 1e-9 {
            return Err(Error::Contract(format!("cdf is not a monotone map into [0,1] near {v}")));
        }
        last_f = f;
        d = d.max(j as f64 / n - f).max(f_left - i as f64 / n);
        i = j;
    }
    Ok(d)
}

pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<StatReport> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::Contract(format!(
            "one-sample KS needs at least {MIN_KS_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let d = ks_statistic(samples, cdf)?;
    let n = samples.len() as f64;
    Ok(StatReport::new("ks-one-sample", d, ks_critical_value(DEFAULT_LEVEL, n), Criterion::AtMost)
        .with_p_value(ks_p_value(d, n))
        .with_sizes(&[samples.len()]))
}

pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let a = Ecdf::new(a);
    let b = Ecdf::new(b);
    let (xa, xb) = (a.sorted(), b.sorted());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let v = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] == v {
            i += 1;
        }
        while j < xb.len() && xb[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<StatReport> {
    if a.len() < MIN_KS_SAMPLES || b.len() < MIN_KS_SAMPLES {
        return Err(Error::Contract(format!(
            "two-sample KS needs at least {MIN_KS_SAMPLES} samples per side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let d = ks_two_sample_statistic(a, b);
    let n_eff = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    // the small-sample correction is tuned for one-sample tests and makes
    // the two-sample test conservative, so the plain scaling is used here
    let crit = ks_two_sample_critical_value(DEFAULT_LEVEL, a.len(), b.len());
    Ok(StatReport::new("ks-two-sample", d, crit, Criterion::AtMost)
        .with_p_value(kolmogorov_survival(n_eff.sqrt() * d))
        .with_sizes(&[a.len(), b.len()]))
}

/// Pearson test of observed counts against expected counts. Adjacent bins
/// with expected count below 5 are merged and the report carries a warning.
pub fn chi_square_counts(observed: &[f64], expected: &[f64], level: f64) -> Result<StatReport> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::Contract("observed and expected must have equal length ≥ 2".into()));
    }
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= 5.0 {
            merged.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match merged.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => merged.push(acc),
        }
    }
    if merged.len() < 2 {
        return Err(Error::Degenerate("fewer than two bins after merging sparse bins".into()));
    }
    let stat: f64 = merged.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = (merged.len() - 1) as f64;
    let chi = ChiSquared::new(dof).map_err(|e| Error::Parameter(e.to_string()))?;
    let total: f64 = observed.iter().sum();
    let mut rep = StatReport::new("chi-square", stat, chi.inverse_cdf(1.0 - level), Criterion::AtMost)
        .with_p_value(1.0 - chi.cdf(stat))
        .with_sizes(&[total as usize])
        .with_detail(format!("{} bins", merged.len()));
    if merged.len() < observed.len() {
        rep = rep.warn(format!("merged {} sparse bins into {}", observed.len(), merged.len()));
    }
    Ok(rep)
}

/// Chi-square test of points in `[0,1]^d` against the uniform law on a
/// grid with `bins` cells per axis. `columns[k][i]` is coordinate `k` of
/// point `i`.
pub fn chi_square_uniform_grid(columns: &[Vec<f64>], bins: usize, level: f64) -> Result<StatReport> {
    let d = columns.len();
    if d == 0 || bins < 2 {
        return Err(Error::Contract("need at least one column and two bins".into()));
    }
    let n = columns[0].len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::Contract("columns differ in length".into()));
    }
    let cells = bins.pow(d as u32);
    let mut counts = vec![0.0; cells];
    for i in 0..n {
        let mut idx = 0;
        for col in columns {
            let u = col[i];
            if !(0.0..=1.0).contains(&u) {
                return Err(Error::Contract(format!("coordinate {u} outside [0,1]")));
            }
            idx = idx * bins + ((u * bins as f64) as usize).min(bins - 1);
        }
        counts[idx] += 1.0;
    }
    let expected = vec![n as f64 / cells as f64; cells];
    chi_square_counts(&counts, &expected, level)
}

/// Equal-probability binning of one-dimensional samples under `cdf`.
pub fn chi_square_cdf<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, bins: usize, level: f64) -> Result<StatReport> {
    let u: Vec<f64> = samples.iter().map(|&x| cdf(x).clamp(0.0, 1.0)).collect();
    chi_square_uniform_grid(&[u], bins, level)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Passes when the sample mean lies within `tolerance` of `target`.
pub fn mean_test(samples: &[f64], target: f64, tolerance: f64) -> StatReport {
    let (m, se) = mean_se(samples);
    StatReport::new("mean", (m - target).abs(), tolerance, Criterion::AtMost)
        .with_sizes(&[samples.len()])
        .with_detail(format!("mean {m:.6} ± {se:.6}, target {target:.6}"))
}

/// Passes when the mean is at least `z_min` standard errors from `value`.
pub fn rejection_test(samples: &[f64], value: f64, z_min: f64) -> StatReport {
    let (m, se) = mean_se(samples);
    StatReport::new("rejection", (m - value).abs() / se, z_min, Criterion::AtLeast)
        .with_sizes(&[samples.len()])
        .with_detail(format!("mean {m:.6} ± {se:.6}, rejected value {value:.6}"))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

/// Self-normalized weighted mean `Σ w f / Σ w` with delta-method error.
pub fn weighted_mean(samples: &[f64], weights: &[f64]) -> Result<WeightedEstimate> {
    if samples.len() != weights.len() {
        return Err(Error::Contract("samples and weights differ in length".into()));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::Contract("weights must be finite and nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("total weight is zero".into()));
    }
    let mu = samples.iter().zip(weights).map(|(f, w)| f * w).sum::<f64>() / total;
    let var = samples.iter().zip(weights).map(|(f, w)| (w * (f - mu)).powi(2)).sum::<f64>() / (total * total);
    Ok(WeightedEstimate { mean: mu, se: var.sqrt(), n: samples.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand::Rng;
    use rand_distr::{Distribution, Exp1};

    #[test]
    fn kolmogorov_branches_agree() {
        for l in [1.0, 1.15, 1.2, 1.4] {
            use std::f64::consts::PI;
            let small = {
                let a = -PI * PI / (8.0 * l * l);
                let s: f64 = (1..=20).map(|k| (((2 * k - 1) as f64).powi(2) * a).exp()).sum();
                1.0 - (2.0 * PI).sqrt() / l * s
            };
            let large: f64 = 2.0 * (1..=100).map(|k| {
                let sgn = if k % 2 == 1 { 1.0 } else { -1.0 };
                sgn * (-2.0 * (k * k) as f64 * l * l).exp()
            }).sum::<f64>();
            assert!((small - large).abs() < 1e-12);
        }
        assert!((kolmogorov_survival(1.3580986) - 0.05).abs() < 1e-6);
        assert!((kolmogorov_survival(1.6276236) - 0.01).abs() < 1e-6);
    }

    #[test]
    fn critical_value_matches_quantile() {
        let n = 1e4;
        let d = ks_critical_value(0.001, n);
        assert!((d * (n.sqrt() + 0.12 + 0.11 / n.sqrt()) - 1.9495).abs() < 1e-3);
    }

    #[test]
    fn point_mass_statistic_zero() {
        let xs = vec![2.0; 200];
        let d = ks_statistic(&xs, |x| if x >= 2.0 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn non_monotone_cdf_rejected() {
        let xs: Vec<f64> = (0..200).map(|i| i as f64 / 200.0).collect();
        assert!(matches!(ks_one_sample(&xs, |x| 1.0 - x), Err(Error::Contract(_))));
        assert!(ks_one_sample(&xs[..50], |x| x).is_err());
    }

    #[test]
    fn ks_uniform_bound() {
        let mut r = RngStream::new(1, 0).rng();
        let n = 10_000;
        let mut exceed = 0;
        for _ in 0..200 {
            let xs: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
            let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
            if d >= 1.95 / (n as f64).sqrt() {
                exceed += 1;
            }
        }
        assert!(exceed <= 2);
    }

    #[test]
    fn ks_calibration() {
        let mut r = RngStream::new(2, 0).rng();
        let trials = 1000;
        let mut rejected = 0;
        for _ in 0..trials {
            let xs: Vec<f64> = (0..500).map(|_| Exp1.sample(&mut r)).collect();
            if ks_one_sample(&xs, |x: f64| 1.0 - (-x).exp()).unwrap().p_value.unwrap() < 0.05 {
                rejected += 1;
            }
        }
        let rate = rejected as f64 / trials as f64;
        assert!((rate - 0.05).abs() < 0.025, "{rate}");
    }

    #[test]
    fn two_sample_identity_and_calibration() {
        let mut r = RngStream::new(3, 0).rng();
        let a: Vec<f64> = (0..1000).map(|_| r.random::<f64>()).collect();
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        let mut rejected = 0;
        for _ in 0..2000 {
            let a: Vec<f64> = (0..400).map(|_| r.random::<f64>()).collect();
            let b: Vec<f64> = (0..300).map(|_| r.random::<f64>()).collect();
            if ks_two_sample(&a, &b).unwrap().p_value.unwrap() < 0.05 {
                rejected += 1;
            }
        }
        let rate = rejected as f64 / 2000.0;
        assert!((rate - 0.05).abs() < 0.015, "{rate}");
    }

    #[test]
    fn two_sample_power() {
        let mut r = RngStream::new(4, 0).rng();
        let ray: Vec<f64> = (0..10_000).map(|_| (-2.0 * (1.0 - r.random::<f64>()).ln()).sqrt()).collect();
        let exp: Vec<f64> = (0..10_000).map(|_| Exp1.sample(&mut r)).collect();
        let rep = ks_two_sample(&ray, &exp).unwrap();
        assert!(rep.p_value.unwrap() < 1e-6);
        assert_eq!(rep.decision, Decision::Fail);
    }

    #[test]
    fn chi_square_uniform_calibration() {
        let mut r = RngStream::new(5, 0).rng();
        let mut accepted = 0;
        for _ in 0..300 {
            let xs: Vec<f64> = (0..10_000).map(|_| r.random::<f64>()).collect();
            if chi_square_cdf(&xs, |x| x, 10, 0.01).unwrap().passed() {
                accepted += 1;
            }
        }
        assert!(accepted as f64 / 300.0 >= 0.97, "{accepted}");
    }

    #[test]
    fn chi_square_merges_sparse_bins() {
        let obs = [3.0, 1.0, 50.0, 46.0];
        let exp = [2.0, 2.0, 48.0, 48.0];
        let rep = chi_square_counts(&obs, &exp, 0.01).unwrap();
        assert_eq!(rep.decision, Decision::Warn);
        assert!(!rep.warnings.is_empty());
    }

    #[test]
    fn chi_square_detects_wrong_density() {
        let mut r = RngStream::new(6, 0).rng();
        let xs: Vec<f64> = (0..10_000).map(|_| r.random::<f64>().powi(2)).collect();
        assert_eq!(chi_square_cdf(&xs, |x| x, 10, 0.01).unwrap().decision, Decision::Fail);
    }

    #[test]
    fn weighted_mean_basics() {
        let f = [1.0, 2.0, 3.0, 4.0];
        let e = weighted_mean(&f, &[1.0; 4]).unwrap();
        assert!((e.mean - 2.5).abs() < 1e-15);
        let c = weighted_mean(&[7.0; 4], &[0.1, 3.0, 2.0, 9.0]).unwrap();
        assert_eq!(c.mean, 7.0);
        assert_eq!(c.se, 0.0);
        assert!(matches!(weighted_mean(&f, &[0.0; 4]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn mean_and_rejection_tests() {
        let xs: Vec<f64> = (0..1000).map(|i| (i % 2) as f64).collect();
        assert!(mean_test(&xs, 0.5, 0.01).passed());
        assert!(rejection_test(&xs, 2.0 / 3.0, 5.0).passed());
        assert!(!rejection_test(&xs, 0.5, 5.0).passed());
    }

    #[test]
    fn ecdf_eval() {
        let e = Ecdf::new(&[3.0, 1.0, 2.0, 2.0]);
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(2.0), 0.75);
        assert_eq!(e.eval(3.0), 1.0);
    }
}
