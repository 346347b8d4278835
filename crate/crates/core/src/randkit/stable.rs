use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sample_exp1;
use crate::error::{param, Result};
use crate::numerics::{integrate, normal_cdf};
use crate::rng::open_unit;

/// One-sided stable law with `E exp(-ξ τ_ℓ) = exp(-ℓ c ξ^α)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub c: f64,
}

impl StableParams {
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return param(format!("alpha must lie in (0,1), got {alpha}"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return param(format!("c must be positive, got {c}"));
        }
        Ok(StableParams { alpha, c })
    }

    /// Inverse local time of Brownian motion: α = 1/2, c = √2.
    pub fn brownian() -> Self {
        StableParams { alpha: 0.5, c: SQRT_2 }
    }

    pub fn laplace_exponent(&self, xi: f64) -> f64 {
        self.c * xi.powf(self.alpha)
    }

    /// τ_ℓ equals this factor times a standard (c = 1, ℓ = 1) variable.
    pub fn scale(&self, level: f64) -> f64 {
        (level * self.c).powf(1.0 / self.alpha)
    }

    fn is_half(&self) -> bool {
        self.alpha == 0.5
    }
}

/// Kanter's function `A(u) = [sin(αu)/sin u]^{1/(1-α)} sin((1-α)u)/sin(αu)`.
pub fn kanter_a(alpha: f64, u: f64) -> f64 {
    let sa = (alpha * u).sin();
    let ln = ((sa / u.sin()).ln()) / (1.0 - alpha) + ((1.0 - alpha) * u).sin().ln() - sa.ln();
    ln.exp()
}

/// Chambers–Mallows–Stuck draw of τ_level.
pub fn sample_stable<R: Rng + ?Sized>(p: &StableParams, level: f64, rng: &mut R) -> Result<f64> {
    StableParams::new(p.alpha, p.c)?;
    if !(level > 0.0 && level.is_finite()) {
        return param(format!("level must be positive, got {level}"));
    }
    Ok(p.scale(level) * standard_stable(p.alpha, rng))
}

/// Draw with Laplace transform `exp(-ξ^α)`.
pub(crate) fn standard_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = PI * open_unit(rng);
    let e = sample_exp1(rng);
    (kanter_a(alpha, u) / e).powf((1.0 - alpha) / alpha)
}

/// CDF of τ_level.
pub fn stable_cdf(p: &StableParams, level: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if p.is_half() {
        // τ_ℓ = (ℓc)²/(2N²)
        let s = level * p.c / SQRT_2;
        return 2.0 * (1.0 - normal_cdf(s / t.sqrt()));
    }
    let x = t / p.scale(level);
    let z = x.powf(-p.alpha / (1.0 - p.alpha));
    integrate(|u| (-kanter_a(p.alpha, u) * z).exp(), 0.0, PI, 1e-13) / PI
}

/// Density `f_ℓ(t)` of τ_level.
pub fn stable_density(p: &StableParams, level: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if p.is_half() {
        let s = level * p.c / SQRT_2;
        return s / (2.0 * PI).sqrt() * t.powf(-1.5) * (-0.5 * s * s / t).exp();
    }
    let scale = p.scale(level);
    standard_stable_density(p.alpha, t / scale) / scale
}

/// Density of the c = 1, ℓ = 1 variable by quadrature over Kanter's
/// representation, valid for every α.
pub fn standard_stable_density(alpha: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let k = alpha / (1.0 - alpha);
    let z = x.powf(-k);
    let inner = integrate(
        |u| {
            let a = kanter_a(alpha, u);
            a * (-a * z).exp()
        },
        0.0,
        PI,
        1e-13,
    );
    k * z / x * inner / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::statlab::{ks_one_sample, ks_two_sample};
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn params_validate() {
        assert!(StableParams::new(0.0, 1.0).is_err());
        assert!(StableParams::new(1.0, 1.0).is_err());
        assert!(StableParams::new(0.5, 0.0).is_err());
        let mut r = RngStream::new(1, 0).rng();
        assert!(sample_stable(&StableParams::brownian(), 0.0, &mut r).is_err());
    }

    #[test]
    fn kanter_at_half() {
        for u in [0.3, 1.0, 2.5] {
            let c = (u / 2.0f64).cos();
            assert!((kanter_a(0.5, u) - 1.0 / (4.0 * c * c)).abs() < 1e-12);
        }
    }

    #[test]
    fn brownian_density_closed_form() {
        let p = StableParams::brownian();
        for x in [0.1f64, 1.0, 4.0] {
            let want = (2.0 * PI).powf(-0.5) * x.powf(-1.5) * (-0.5 / x).exp();
            assert!((stable_density(&p, 1.0, x) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn numeric_density_agrees_at_half() {
        let p = StableParams::brownian();
        let scale = p.scale(1.0);
        for x in [0.05, 0.3, 1.0, 3.0, 20.0] {
            let numeric = standard_stable_density(0.5, x / scale) / scale;
            let closed = stable_density(&p, 1.0, x);
            assert!((numeric - closed).abs() < 1e-8 * closed.max(1e-3), "{x}: {numeric} {closed}");
        }
    }

    #[test]
    fn numeric_cdf_agrees_at_half() {
        let alpha = 0.5;
        let p = StableParams::new(alpha + 1e-15, SQRT_2).unwrap();
        let q = StableParams::brownian();
        for t in [0.2, 1.0, 5.0] {
            assert!((stable_cdf(&p, 1.0, t) - stable_cdf(&q, 1.0, t)).abs() < 1e-8);
        }
    }

    #[test]
    fn numeric_density_normalized_general_alpha() {
        for alpha in [0.3, 0.7] {
            let p = StableParams::new(alpha, 1.0).unwrap();
            for x in [0.5, 2.0, 10.0] {
                let mass = integrate(|t| standard_stable_density(alpha, t), 0.0, x, 1e-10);
                let cdf = stable_cdf(&p, 1.0, x);
                assert!((mass - cdf).abs() < 1e-7, "alpha {alpha} x {x}: {mass} {cdf}");
            }
            assert!(stable_cdf(&p, 1.0, 1e12) > 0.999);
        }
    }

    #[test]
    fn laplace_transform() {
        let n = 1_000_000;
        for (alpha, c) in [(0.5, SQRT_2), (0.3, 1.0), (0.8, 2.0)] {
            let p = StableParams::new(alpha, c).unwrap();
            let mut r = RngStream::new(42, 0).rng();
            let xs: Vec<f64> = (0..n).map(|_| sample_stable(&p, 1.0, &mut r).unwrap()).collect();
            for xi in [0.5, 1.0, 2.0] {
                let v: Vec<f64> = xs.iter().map(|x| (-xi * x).exp()).collect();
                let m = v.iter().sum::<f64>() / n as f64;
                let sd = (v.iter().map(|y| (y - m).powi(2)).sum::<f64>() / n as f64).sqrt();
                let want = (-p.laplace_exponent(xi)).exp();
                assert!((m - want).abs() < 4.0 * sd / (n as f64).sqrt(), "α={alpha} ξ={xi}: {m} vs {want}");
            }
        }
    }

    #[test]
    fn level_scaling() {
        let p = StableParams::brownian();
        let mut r = RngStream::new(43, 0).rng();
        let n = 200_000;
        let m = (0..n).map(|_| (-sample_stable(&p, 2.5, &mut r).unwrap()).exp()).sum::<f64>() / n as f64;
        assert!((m - (-2.5 * SQRT_2).exp()).abs() < 0.002);
    }

    #[test]
    fn brownian_matches_inverse_square_normal() {
        let p = StableParams::brownian();
        let mut r = RngStream::new(44, 0).rng();
        let a: Vec<f64> = (0..20_000).map(|_| sample_stable(&p, 1.0, &mut r).unwrap()).collect();
        let b: Vec<f64> = (0..20_000)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut r);
                1.0 / (z * z)
            })
            .collect();
        assert!(ks_two_sample(&a, &b).unwrap().p_value.unwrap() > 1e-3);
        let rep = ks_one_sample(&a, |t| stable_cdf(&p, 1.0, t)).unwrap();
        assert!(rep.p_value.unwrap() > 1e-3);
    }

    #[test]
    fn general_alpha_samples_match_numeric_cdf() {
        let p = StableParams::new(0.3, 1.0).unwrap();
        let mut r = RngStream::new(45, 0).rng();
        let a: Vec<f64> = (0..5_000).map(|_| sample_stable(&p, 1.0, &mut r).unwrap()).collect();
        let rep = ks_one_sample(&a, |t| stable_cdf(&p, 1.0, t)).unwrap();
        assert!(rep.p_value.unwrap() > 1e-3, "{rep:?}");
    }
}
