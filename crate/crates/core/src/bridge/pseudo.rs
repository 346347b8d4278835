use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{bridge_step_local_time, check_grid, DiscretePath, Grid, LocalTimeMethod, LocalTimeProfile, PathKind};
use crate::error::{Error, Result};

/// Below this time the pseudo-bridge grid step stays at `FLOOR / m`.
const FLOOR: f64 = 0.25;
const BUDGET_FACTOR: usize = 96;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoBridge {
    pub path: DiscretePath,
    pub local_time: LocalTimeProfile,
    /// Inverse local time at 1 of the motion before rescaling.
    pub tau: f64,
}

/// Brownian motion run until its local time at zero reaches 1, then
/// rescaled to unit length. The grid step at time `t` is `max(t, 1/4) / m`
/// so the rescaled path has roughly `m` steps per unit time whatever `tau`.
/// The crossing step is cut where the sampled local time reaches 1 and
/// ends at 0.
pub fn simulate_pseudo_bridge<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<PseudoBridge> {
    check_grid(m)?;
    let budget = BUDGET_FACTOR * m;
    let mut widths = Vec::with_capacity(2 * m);
    let mut values = Vec::with_capacity(2 * m + 1);
    let mut incs = Vec::with_capacity(2 * m);
    let (mut t, mut x, mut l) = (0.0f64, 0.0f64, 0.0f64);
    values.push(0.0);
    loop {
        if widths.len() >= budget {
            return Err(Error::Budget(format!("local time stayed below 1 for {budget} steps")));
        }
        let h = t.max(FLOOR) / m as f64;
        let z: f64 = rng.sample(StandardNormal);
        let y = x + h.sqrt() * z;
        let inc = bridge_step_local_time(x, y, h, rng);
        if l + inc >= 1.0 {
            let part = h * ((1.0 - l) / inc).clamp(f64::MIN_POSITIVE, 1.0);
            widths.push(part);
            values.push(0.0);
            incs.push(1.0 - l);
            break;
        }
        widths.push(h);
        values.push(y);
        incs.push(inc);
        t += h;
        x = y;
        l += inc;
    }
    let tau: f64 = widths.iter().sum();
    let s = tau.sqrt();
    for w in widths.iter_mut() {
        *w /= tau;
    }
    for v in values.iter_mut() {
        *v /= s;
    }
    for i in incs.iter_mut() {
        *i /= s;
    }
    let grid = Grid::Steps(widths);
    let local_time = LocalTimeProfile::from_increments(grid.clone(), &incs, None, LocalTimeMethod::Conditional);
    let path = DiscretePath::new(PathKind::PseudoBridge, grid, values)?;
    Ok(PseudoBridge { path, local_time, tau })
}

/// Grid indices `(p, q)` bounding the run of zero-free steps that contains
/// time `u`: `G_u = t_p`, `D_u = t_q`. When the step containing `u` itself
/// carries local time the run is empty and `p = q`.
pub fn straddling_excursion(path: &DiscretePath, lt: &LocalTimeProfile, u: f64) -> Result<(usize, usize)> {
    let times = path.times();
    let m = path.m();
    if !(u > 0.0 && u < times[m]) {
        return Err(Error::Domain(format!("u must lie inside the path's time range, got {u}")));
    }
    let s = (times.partition_point(|&t| t <= u) - 1).min(m - 1);
    let zero = |i: usize| lt.increment(i) > 0.0;
    if zero(s) {
        return Ok((s, s));
    }
    let q = (s..m)
        .find(|&i| zero(i))
        .ok_or_else(|| Error::Structural(format!("no zero after time {u}")))?;
    let p = (0..s).rev().find(|&i| zero(i)).map_or(0, |i| i + 1);
    Ok((p, q))
}

/// `x[0, G_u] : x[D_u, end] : x[G_u, D_u]`, rearranging whole steps
/// together with their widths and local-time increments.
pub fn path_swap(path: &DiscretePath, lt: &LocalTimeProfile, u: f64) -> Result<(DiscretePath, LocalTimeProfile)> {
    let (p, q) = straddling_excursion(path, lt, u)?;
    let m = path.m();
    let order: Vec<usize> = (0..p).chain(q..m).chain(p..q).collect();
    let mut values: Vec<f64> = order.iter().map(|&i| path.values[i]).collect();
    values.push(path.values[m]);
    let grid = match &path.grid {
        Grid::Uniform { dt } => Grid::Uniform { dt: *dt },
        Grid::Steps(w) => Grid::Steps(order.iter().map(|&i| w[i]).collect()),
    };
    let incs: Vec<f64> = order.iter().map(|&i| lt.increment(i)).collect();
    let new_lt = LocalTimeProfile::from_increments(grid.clone(), &incs, lt.epsilon, lt.method);
    Ok((DiscretePath::new(path.kind, grid, values)?, new_lt))
}
