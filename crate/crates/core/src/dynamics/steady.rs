use serde::Serialize;

use super::generator::{build_generator, GeneratorMatrix};
use super::integrate::{Integrator, Propagator, Tolerances};
use crate::error::{Error, Result};
use crate::model::{
    apply_kick, thermal_distribution, KickMap, PhononDistribution, ProtocolParams, TAIL_TOL,
};

/// Hard cap for automatic truncation growth.
pub const MAX_LEVELS: usize = 1 << 20;

/// Rates below this fraction of the largest escape rate count as absent
/// when the kernel structure is analysed.
pub const KERNEL_TOL: f64 = 1e-8;

/// Relative residual `|G p|_1 / (|G|_1 |p|_1)` at which time stepping stops.
pub const LONG_TIME_RESIDUAL: f64 = 1e-12;

/// Largest per-level change over one stepping chunk, relative to the total
/// mass, at which time stepping stops.
pub const LONG_TIME_CHANGE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteadyStateMethod {
    AnalyticProduct,
    NullSpace,
    LongTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateResult {
    pub populations: PhononDistribution,
    pub mean_n_s: f64,
    /// Mean number of phonons removed by one kick in the steady state.
    pub delta_n: f64,
    pub p0_s: f64,
    pub method: SteadyStateMethod,
}

impl SteadyStateResult {
    pub(crate) fn new(
        populations: PhononDistribution,
        kick: &KickMap,
        method: SteadyStateMethod,
    ) -> Result<Self> {
        let kick = if kick.n_max() == populations.n_max() {
            kick.clone()
        } else {
            KickMap::from_pulse_area(
                kick.pulse_area(),
                kick.excited_probability(),
                populations.n_max(),
            )?
        };
        let delta_n = kick_fluctuation(&populations, &kick)?;
        Ok(Self {
            mean_n_s: populations.mean(),
            p0_s: populations.vacuum_probability(),
            populations,
            delta_n,
            method,
        })
    }
}

/// Mean phonon number removed by one kick: `<n> - <n>_after`.
pub fn kick_fluctuation(dist: &PhononDistribution, kick: &KickMap) -> Result<f64> {
    let after = apply_kick(dist, kick)?.value;
    Ok(dist.mean() - after.mean())
}

/// One factor of the detailed-balance product between levels `l-1` and `l`.
///
/// `coupling` is the effective swap probability out of level `l` (the
/// `|c_{e,l-1}|^2` table, possibly scaled by a fidelity factor).
#[inline]
pub(crate) fn balance_ratio(n_th: f64, leverage: f64, p: f64, coupling: f64, l: usize) -> f64 {
    let l = l as f64;
    (n_th * l + p * coupling * leverage) / ((n_th + 1.0) * l + (1.0 - p) * coupling * leverage)
}

/// Normalized product-form distribution; computed in log space so that
/// ratios far above or below one neither overflow nor underflow early.
pub(crate) fn product_distribution(
    n_max: usize,
    ratio: impl Fn(usize) -> f64,
) -> Result<PhononDistribution> {
    let mut logs = Vec::with_capacity(n_max + 1);
    logs.push(0.0f64);
    for l in 1..=n_max {
        let prev = logs[l - 1];
        logs.push(prev + ratio(l).ln());
    }
    let peak = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights = logs.iter().map(|&lw| (lw - peak).exp()).collect();
    PhononDistribution::from_weights(weights)
}

/// Repeats `solve` on a truncation grown by 50% until the tail is negligible.
pub(crate) fn grow_until_contained(
    n_max: usize,
    mut solve: impl FnMut(usize) -> Result<PhononDistribution>,
) -> Result<PhononDistribution> {
    let mut n_max = n_max.clamp(1, MAX_LEVELS);
    loop {
        let dist = solve(n_max)?;
        if dist.tail_mass() <= TAIL_TOL {
            return Ok(dist);
        }
        if n_max >= MAX_LEVELS {
            return Err(Error::NonNormalizable {
                max_levels: MAX_LEVELS,
            });
        }
        n_max = (n_max + n_max / 2).min(MAX_LEVELS);
    }
}

/// Steady state from the closed-form detailed-balance product.
///
/// The kick's excited-state probability enters as the thermal-excitation
/// generalization. `n_max` is a starting point; it grows until the top level
/// carries less than [`TAIL_TOL`].
pub fn steady_state_analytic(
    params: &ProtocolParams,
    kick: &KickMap,
    n_max: usize,
) -> Result<SteadyStateResult> {
    params.validate()?;
    if !(params.kappa > 0.0) {
        return Err(Error::Domain("the product formula needs kappa > 0".into()));
    }
    let leverage = params.ra_over_kappa();
    let theta = kick.pulse_area();
    let p = kick.excited_probability();
    let n_th = params.n_th;
    let dist = grow_until_contained(n_max, |size| {
        let table = KickMap::from_pulse_area(theta, p, size)?;
        let ce2 = table.ce2();
        product_distribution(size, |l| balance_ratio(n_th, leverage, p, ce2[l - 1], l))
    })?;
    SteadyStateResult::new(dist, kick, SteadyStateMethod::AnalyticProduct)
}

/// Analytic steady state with automatic truncation and the kick built from `params`.
pub fn steady_state_for(params: &ProtocolParams) -> Result<SteadyStateResult> {
    let n_max = crate::model::default_n_max(params.n_th);
    let kick = super::generator::kick_for(params, n_max)?;
    steady_state_analytic(params, &kick, n_max)
}

/// Kernel of the generator by direct elimination.
///
/// Only the block of levels connected to the vacuum is kept (couplings below
/// [`KERNEL_TOL`] relative count as cut). Inside that block the closed
/// communicating classes are counted; more than one means the kernel is not
/// one-dimensional. The single closed class is then solved with one equation
/// replaced by a pinning condition, and the result is normalized.
pub fn steady_state_numeric(gen: &GeneratorMatrix) -> Result<SteadyStateResult> {
    let n = gen.dim();
    let thr = KERNEL_TOL * gen.max_rate();
    let up = |m: usize| if m + 1 < n { gen.birth_rate(m) } else { 0.0 };
    let down = |m: usize| gen.death_rate(m);
    let live = |r: f64| r > thr;

    // block containing the vacuum
    let mut end = 0;
    while end + 1 < n && (live(up(end)) || live(down(end + 1))) {
        end += 1;
    }

    // closed classes: maximal runs joined by two-way edges with no exit
    let mut closed = Vec::new();
    let mut start = 0;
    for m in 0..=end {
        let two_way = m < end && live(up(m)) && live(down(m + 1));
        if !two_way {
            let leaves_down = start > 0 && live(down(start));
            let leaves_up = m < end && live(up(m));
            if !leaves_down && !leaves_up {
                closed.push((start, m));
            }
            start = m + 1;
        }
    }
    if closed.len() != 1 {
        return Err(Error::DegenerateKernel(closed.len()));
    }
    let (lo, hi) = closed[0];

    let solution = solve_reduced(
        lo,
        hi,
        |m| if m < hi { up(m) } else { 0.0 },
        |m| if m > lo { down(m) } else { 0.0 },
    );
    let mut weights = vec![0.0; n];
    weights[lo..=hi].copy_from_slice(&solution);
    let dist = PhononDistribution::from_weights(weights)?;
    SteadyStateResult::new(dist, gen.kick(), SteadyStateMethod::NullSpace)
}

/// Solves `G x = 0` on levels `lo..=hi` by state reduction from the top.
///
/// Each pivot is the rate out of the removed level towards the retained ones,
/// taken from the off-diagonal entries, so no subtraction occurs. Removing the
/// top level of a tridiagonal chain leaves the remaining rates unchanged.
/// Back substitution runs in log space and the result peaks at one.
fn solve_reduced(
    lo: usize,
    hi: usize,
    up: impl Fn(usize) -> f64,
    down: impl Fn(usize) -> f64,
) -> Vec<f64> {
    let len = hi - lo + 1;
    let mut log_x = Vec::with_capacity(len);
    log_x.push(0.0);
    for m in lo + 1..=hi {
        let inflow = up(m - 1);
        let pivot = down(m);
        log_x.push(log_x[m - lo - 1] + inflow.ln() - pivot.ln());
    }
    let peak = log_x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    log_x.iter().map(|l| (l - peak).exp()).collect()
}

/// Steady state by integrating from the thermal state.
///
/// Chunks of doubling length are stepped until the relative residual is
/// below [`LONG_TIME_RESIDUAL`] and no level moved by more than
/// [`LONG_TIME_CHANGE`] (relative to the total mass) during the last chunk.
/// If rounding keeps the change above that, the state from the quietest
/// chunk is returned once the change starts growing again.
pub fn steady_state_long_time(gen: &GeneratorMatrix) -> Result<SteadyStateResult> {
    let n_max = gen.n_max();
    let start = thermal_distribution(gen.params().n_th, n_max)?.value;
    let mut p = start.into_populations();
    let norm_g = 2.0 * gen.max_rate();
    if norm_g == 0.0 {
        let dist = PhononDistribution::from_weights(p)?;
        return SteadyStateResult::new(dist, gen.kick(), SteadyStateMethod::LongTime);
    }
    let tol = Tolerances::default();
    let mut prop = Propagator::new(gen, Integrator::RationalExp, tol);
    let mut chunk = 1.0 / norm_g;
    // (change, state) of the quietest chunk once the residual is small
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..400 {
        let before = p.clone();
        prop.advance(&mut p, chunk)?;
        let residual: f64 = gen.apply(&p).iter().map(|r| r.abs()).sum();
        let mass: f64 = p.iter().map(|x| x.abs()).sum();
        let change = p
            .iter()
            .zip(&before)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / mass;
        if residual <= LONG_TIME_RESIDUAL * norm_g * mass {
            if change <= LONG_TIME_CHANGE {
                return finish_long_time(p, gen);
            }
            match &best {
                // rounding in very long steps makes the state wander; stop at the floor
                Some((quietest, state)) if change > 2.0 * quietest => {
                    return finish_long_time(state.clone(), gen)
                }
                Some((quietest, _)) if change >= *quietest => {}
                _ => best = Some((change, p.clone())),
            }
        }
        chunk *= 2.0;
    }
    Err(Error::StepFailure {
        t: chunk,
        reason: "no stationary state reached".into(),
    })
}

fn finish_long_time(p: Vec<f64>, gen: &GeneratorMatrix) -> Result<SteadyStateResult> {
    let dist = crate::model::sanitize(p)?.value;
    SteadyStateResult::new(dist, gen.kick(), SteadyStateMethod::LongTime)
}

/// Builds the generator for `params` at `n_max` and returns the null-space steady state.
pub fn steady_state_numeric_for(
    params: &ProtocolParams,
    n_max: usize,
) -> Result<SteadyStateResult> {
    let kick = super::generator::kick_for(params, n_max)?;
    let gen = build_generator(params, &kick, n_max)?;
    steady_state_numeric(&gen)
}
