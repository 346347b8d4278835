use std::f64::consts::PI;

use statrs::function::gamma::{gamma, ln_gamma};

use super::stable::{standard_stable_density, stable_density, StableParams};
use crate::error::{domain, Result};
use crate::numerics::{integrate, integrate_to_infinity};

fn open_unit_interval(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        domain(format!("{name} must lie in (0,1), got {v}"))
    }
}

pub fn beta_density(u: f64, a: f64, b: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let ln_norm = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
    (ln_norm + (a - 1.0) * u.ln() + (b - 1.0) * (1.0 - u).ln()).exp()
}

/// `P(L > ℓ) = exp(-ℓ²/2)` complement.
pub fn rayleigh_cdf(l: f64) -> f64 {
    if l <= 0.0 {
        0.0
    } else {
        -(-0.5 * l * l).exp_m1()
    }
}

/// Density at `x` of the first time bridge local time reaches the fraction
/// `u` of its total.
pub fn density_tau_br(u: f64, x: f64, alpha: f64) -> Result<f64> {
    open_unit_interval("u", u)?;
    open_unit_interval("x", x)?;
    open_unit_interval("alpha", alpha)?;
    if alpha == 0.5 {
        let (ub, xb) = (1.0 - u, 1.0 - x);
        return Ok(u * ub / (2.0 * (xb * u * u + x * ub * ub).powf(1.5)));
    }
    Ok(density_tau_br_numeric(u, x, alpha))
}

/// `Γ(α) ∫ g_{um}(x) g_{(1-u)m}(1-x) dm` with `g` the c = 1 stable density
/// evaluated by quadrature.
pub fn density_tau_br_numeric(u: f64, x: f64, alpha: f64) -> f64 {
    let g = |level: f64, t: f64| {
        let s = level.powf(1.0 / alpha);
        standard_stable_density(alpha, t / s) / s
    };
    let (ub, xb) = (1.0 - u, 1.0 - x);
    gamma(alpha) * integrate_to_infinity(|m| if m <= 0.0 { 0.0 } else { g(u * m, x) * g(ub * m, xb) }, 0.0, 1e-10)
}

fn h_t1(x: f64) -> f64 {
    let r = x.sqrt().recip();
    r + (r - 1.0).ln()
}

/// Density of the first T-partition cut point for Brownian bridge.
pub fn density_t1(x: f64) -> Result<f64> {
    open_unit_interval("x", x)?;
    Ok(0.5 * (h_t1(x) + h_t1(1.0 - x)))
}

pub fn cdf_t1(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    0.5 * (big_h_t1(x) - big_h_t1(0.0) + big_h_t1(1.0) - big_h_t1(1.0 - x))
}

/// Antiderivative of `h_t1`.
fn big_h_t1(s: f64) -> f64 {
    let xlnx = |t: f64| if t <= 0.0 { 0.0 } else { t * t.ln() };
    let v = s.sqrt();
    let w = 1.0 - v;
    2.0 * v + 2.0 * (w - xlnx(w) + 0.5 * w * xlnx(w) - 0.25 * w * w) - (v * xlnx(v) - 0.5 * v * v)
}

/// Mean density `α x^{-1} (1-x)^{α-1}` of T-interval lengths.
pub fn intensity_t_lengths(x: f64, alpha: f64) -> Result<f64> {
    open_unit_interval("x", x)?;
    open_unit_interval("alpha", alpha)?;
    Ok(alpha / x * (1.0 - x).powf(alpha - 1.0))
}

/// `∫ α x^{-1}(1-x)^{α-1} dx` over `[a, b]`.
pub fn intensity_t_mass(a: f64, b: f64, alpha: f64) -> f64 {
    integrate(|x| alpha / x * (1.0 - x).powf(alpha - 1.0), a, b, 1e-12)
}

/// Closed form of `∫₀¹ (x(1-x))^{-1/2} / (a√x + b√(1-x)) dx`.
pub fn split_integral(a: f64, b: f64) -> f64 {
    let r = (a * a + b * b).sqrt();
    (((r + a) * (r + b)) / ((r - a) * (r - b))).ln() / r
}

pub fn split_integral_quadrature(a: f64, b: f64) -> f64 {
    // x = sin²θ removes both endpoint singularities
    integrate(|t: f64| 2.0 / (a * t.sin() + b * t.cos()), 0.0, PI / 2.0, 1e-13)
}

/// Joint density of the standardized local times on either side of the
/// first T-cut, Brownian case.
pub fn joint_density_split(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    a * b / (2.0 * PI).sqrt() * split_integral(a, b) * (-0.5 * a * a - 0.5 * b * b).exp()
}

/// Joint density of `(L_1, λ_1, L_{I_1})` for the first T-interval:
/// `c Γ(α) f_{ℓ-y}(1-x) f_y(x) / ℓ`.
pub fn density_first_t_interval(p: &StableParams, ell: f64, x: f64, y: f64) -> f64 {
    if !(x > 0.0 && x < 1.0 && y > 0.0 && y < ell) {
        return 0.0;
    }
    p.c * gamma(p.alpha) * stable_density(p, ell - y, 1.0 - x) * stable_density(p, y, x) / ell
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn beta_density_value() {
        let v = beta_density(0.25, 1.0, 0.5);
        assert!((v - 0.5 / 0.75f64.sqrt()).abs() < 1e-12);
        let total = integrate(|u| beta_density(u, 1.0, 0.5), 0.0, 1.0, 1e-12);
        assert!((total - 1.0).abs() < 1e-7, "{total}");
    }

    #[test]
    fn tau_br_values() {
        for x in [0.01, 0.3, 0.77, 0.999] {
            assert!((density_tau_br(0.5, x, 0.5).unwrap() - 1.0).abs() < 1e-14);
        }
        let v = density_tau_br(0.25, 0.25, 0.5).unwrap();
        let want = (3.0 / 16.0) / (2.0 * (3.0f64 / 64.0 + 9.0 / 64.0).powf(1.5));
        assert!((v - want).abs() < 1e-14);
        assert!(density_tau_br(0.0, 0.5, 0.5).is_err());
        assert!(density_tau_br(0.5, 1.0, 0.5).is_err());
    }

    #[test]
    fn tau_br_normalized() {
        for u in [0.1, 0.37, 0.9] {
            let total = integrate(|x| density_tau_br(u, x, 0.5).unwrap(), 0.0, 1.0, 1e-12);
            assert!((total - 1.0).abs() < 1e-8, "u={u}: {total}");
        }
    }

    #[test]
    fn tau_br_numeric_matches_closed_form() {
        for (u, x) in [(0.25, 0.25), (0.6, 0.4), (0.5, 0.8)] {
            let n = density_tau_br_numeric(u, x, 0.5);
            let c = density_tau_br(u, x, 0.5).unwrap();
            assert!((n - c).abs() < 1e-6, "({u},{x}): {n} vs {c}");
        }
    }

    #[test]
    fn tau_br_general_alpha_normalized() {
        let alpha = 0.35;
        let total = quadrature::integrate(|x| density_tau_br(0.4, x, alpha).unwrap_or(0.0), 0.0, 1.0, 1e-6).integral;
        assert!((total - 1.0).abs() < 1e-4, "{total}");
        let a = density_tau_br(0.4, 0.3, alpha).unwrap();
        let b = density_tau_br(0.6, 0.7, alpha).unwrap();
        assert!((a - b).abs() < 1e-8 * a, "{a} {b}");
    }

    #[test]
    fn t1_values() {
        assert!((h_t1(0.25) - 2.0).abs() < 1e-15);
        for x in [0.1, 0.25, 0.4] {
            assert!((density_t1(x).unwrap() - density_t1(1.0 - x).unwrap()).abs() < 1e-12);
        }
        let total = integrate(|x| density_t1(x).unwrap_or(0.0), 0.0, 1.0, 1e-12);
        assert!((total - 1.0).abs() < 1e-7, "{total}");
        assert!((cdf_t1(0.5) - 0.5).abs() < 1e-14);
        for x in [0.05, 0.3, 0.8] {
            let q = integrate(|s| density_t1(s).unwrap_or(0.0), 0.0, x, 1e-12);
            assert!((cdf_t1(x) - q).abs() < 1e-7, "{x}");
        }
        assert!(density_t1(0.0).is_err());
    }

    #[test]
    fn t1_is_mixture_of_tau_br() {
        // P(1 - T_1 ∈ dx) = ∫ f(x|u) du, and T_1 is symmetric
        for x in [0.2, 0.5, 0.9] {
            let mix = integrate(|u| density_tau_br(u, x, 0.5).unwrap(), 0.0, 1.0, 1e-12);
            assert!((mix - density_t1(x).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn intensity_values() {
        assert!((intensity_t_lengths(0.75, 0.5).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!((intensity_t_lengths(0.5, 0.5).unwrap() - SQRT_2).abs() < 1e-14);
        assert!(intensity_t_lengths(1.0, 0.5).is_err());
    }

    #[test]
    fn intensity_equals_tau_br_mixture() {
        for x in [0.1, 0.5, 0.85] {
            let v = integrate(|u| density_tau_br(u, x, 0.5).unwrap() / u, 0.0, 1.0, 1e-12);
            assert!((v - intensity_t_lengths(x, 0.5).unwrap()).abs() < 1e-6, "{x}: {v}");
        }
    }

    #[test]
    fn split_integral_forms() {
        for (a, b) in [(0.3, 1.2), (1.0, 1.0), (2.5, 0.1)] {
            assert!((split_integral(a, b) - split_integral(b, a)).abs() < 1e-12);
            assert!((split_integral(a, b) - split_integral_quadrature(a, b)).abs() < 1e-8);
        }
    }

    #[test]
    fn split_density_normalized() {
        let inner = |a: f64| integrate_to_infinity(|b| joint_density_split(a, b), 0.0, 1e-10);
        let total = integrate_to_infinity(inner, 0.0, 1e-8);
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn first_t_interval_density_consistent() {
        let p = StableParams::brownian();
        // integrates to the Rayleigh density in ℓ
        for ell in [0.5, 1.3] {
            let v = integrate(
                |x| integrate(|y| density_first_t_interval(&p, ell, x, y), 0.0, ell, 1e-12),
                0.0,
                1.0,
                1e-10,
            );
            assert!((v - ell * (-0.5 * ell * ell).exp()).abs() < 1e-6, "{ell}: {v}");
        }
    }
}
