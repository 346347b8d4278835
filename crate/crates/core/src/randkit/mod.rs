//! Samplers and density evaluators.

mod densities;
mod stable;

pub use densities::*;
pub use stable::*;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::rng::open_unit;

const MAX_STICKS: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthOrder {
    StickOrder,
    Ranked,
    SizeBiased,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthSequence {
    pub values: Vec<f64>,
    pub residual_mass: f64,
    pub order_tag: LengthOrder,
}

impl LengthSequence {
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() + self.residual_mass
    }
}

pub fn sample_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return param(format!("beta parameters must be positive, got ({a}, {b})"));
    }
    let d = rand_distr::Beta::new(a, b).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(d.sample(rng))
}

pub fn sample_gamma<R: Rng + ?Sized>(s: f64, rng: &mut R) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return param(format!("gamma shape must be positive, got {s}"));
    }
    let d = rand_distr::Gamma::new(s, 1.0).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(d.sample(rng))
}

pub fn sample_exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// GEM(θ) stick-breaking with beta(1, θ) sticks, stopped once the
/// unbroken remainder drops below `tail_tolerance`.
pub fn gem_lengths<R: Rng + ?Sized>(
    theta: f64,
    tail_tolerance: f64,
    rng: &mut R,
) -> Result<LengthSequence> {
    if !(theta > 0.0 && theta.is_finite()) {
        return param(format!("theta must be positive, got {theta}"));
    }
    if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
        return param(format!("tail tolerance must lie in (0,1), got {tail_tolerance}"));
    }
    let mut values = Vec::new();
    let mut rest = 1.0f64;
    while rest >= tail_tolerance {
        if values.len() >= MAX_STICKS {
            return Err(Error::Budget(format!("more than {MAX_STICKS} sticks")));
        }
        // 1 - W with W ~ beta(1, θ) is U^{1/θ}
        let keep = open_unit(rng).powf(1.0 / theta);
        let next = rest * keep;
        values.push(rest - next);
        rest = next;
    }
    Ok(LengthSequence { values, residual_mass: rest, order_tag: LengthOrder::StickOrder })
}

/// Sorts nonincreasing; equal values keep their original relative order.
pub fn rank_lengths(seq: &LengthSequence) -> LengthSequence {
    let mut values = seq.values.clone();
    values.sort_by(|a, b| b.total_cmp(a));
    LengthSequence { values, residual_mass: seq.residual_mass, order_tag: LengthOrder::Ranked }
}

/// Random permutation where each next index is drawn with probability
/// proportional to its weight among those not yet drawn.
pub fn size_biased_order<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<Vec<usize>> {
    if weights.is_empty() {
        return param("empty weight list");
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return param(format!("weights must be finite and positive, got {w}"));
    }
    // exponential race: arrival times E_i / w_i sorted ascending
    let mut keys: Vec<(f64, usize)> =
        weights.iter().enumerate().map(|(i, w)| (sample_exp1(rng) / w, i)).collect();
    keys.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(keys.into_iter().map(|(_, i)| i).collect())
}

pub fn size_biased_permute<R: Rng + ?Sized>(
    seq: &LengthSequence,
    rng: &mut R,
) -> Result<LengthSequence> {
    let order = size_biased_order(&seq.values, rng)?;
    Ok(LengthSequence {
        values: order.iter().map(|&i| seq.values[i]).collect(),
        residual_mass: seq.residual_mass,
        order_tag: LengthOrder::SizeBiased,
    })
}
