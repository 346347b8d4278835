//! Quadrature and special-function helpers.

use statrs::function::erf::erfc;

/// Adaptive tanh-sinh quadrature. Bisects the interval whenever the
/// reported error estimate exceeds both `tol` and `1e-12` relative to the
/// piece's integral.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    adaptive(&f, a, b, tol, 0)
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let out = quadrature::integrate(f, a, b, tol);
    if out.error_estimate <= tol.max(1e-12 * out.integral.abs()) || depth >= 14 {
        return out.integral;
    }
    let mid = 0.5 * (a + b);
    adaptive(f, a, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, b, 0.5 * tol, depth + 1)
}

/// Integral over consecutive pieces `[breaks[i], breaks[i+1]]`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> f64 {
    let share = tol / breaks.len().max(1) as f64;
    breaks.windows(2).map(|w| integrate(&f, w[0], w[1], share)).sum()
}

/// Integral over `[a, ∞)` via `x = a + t/(1-t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> f64 {
    integrate(
        |t: f64| {
            let s = 1.0 - t;
            f(a + t / s) / (s * s)
        },
        0.0,
        1.0,
        tol,
    )
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Solves `f(x) = target` for nondecreasing `f` on `[lo, hi]` by bisection.
pub fn bisect<F: Fn(f64) -> f64>(f: F, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-12);
        assert!((v - 9.0).abs() < 1e-10);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn semi_infinite() {
        let v = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-10);
        let g = integrate_to_infinity(|x: f64| (-x * x / 2.0).exp(), 0.0, 1e-12);
        assert!((g - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn normal_cdf_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        let p = normal_cdf(1.959963984540054);
        assert!((p - 0.975).abs() < 1e-10, "{p}");
    }

    #[test]
    fn bisect_sqrt() {
        let r = bisect(|x| x * x, 2.0, 0.0, 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }
}
