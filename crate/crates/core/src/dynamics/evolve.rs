use super::generator::GeneratorMatrix;
use super::integrate::{choose_integrator, Integrator, Propagator, Tolerances};
use crate::error::{Error, Result};
use crate::model::{sanitize, PhononDistribution, TAIL_TOL};

/// Sampled transient of the coarse-grained dynamics. Times are in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub mean_n: Vec<f64>,
    pub p0: Vec<f64>,
    pub snapshots: Option<Vec<PhononDistribution>>,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// First sample time after which `<n>` stays within `rel` of `target`.
    pub fn settling_time(&self, target: f64, rel: f64) -> Option<f64> {
        let band = rel * target.abs();
        let last_outside = self.mean_n.iter().rposition(|m| (m - target).abs() > band);
        match last_outside {
            None => self.times.first().copied(),
            Some(i) => self.times.get(i + 1).copied(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub integrator: Integrator,
    pub tolerances: Tolerances,
    pub keep_snapshots: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            integrator: Integrator::Auto,
            tolerances: Tolerances::default(),
            keep_snapshots: false,
        }
    }
}

/// Integrates `dP/dt = G P` from `initial` and samples at `sample_times`.
pub fn evolve(
    initial: &PhononDistribution,
    gen: &GeneratorMatrix,
    t_end: f64,
    sample_times: &[f64],
) -> Result<EvolutionTrace> {
    evolve_with(initial, gen, t_end, sample_times, &EvolveOptions::default())
}

pub fn evolve_with(
    initial: &PhononDistribution,
    gen: &GeneratorMatrix,
    t_end: f64,
    sample_times: &[f64],
    options: &EvolveOptions,
) -> Result<EvolutionTrace> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Domain(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    if initial.n_max() != gen.n_max() {
        return Err(Error::SizeMismatch {
            expected: gen.dim(),
            found: initial.len(),
        });
    }
    let default_samples = [0.0, t_end];
    let samples = if sample_times.is_empty() {
        &default_samples[..]
    } else {
        sample_times
    };
    if samples.iter().any(|&t| !(0.0..=t_end).contains(&t)) {
        return Err(Error::Domain("sample times must lie in [0, t_end]".into()));
    }
    if samples.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "sample times must be strictly increasing".into(),
        ));
    }

    let method = choose_integrator(gen, t_end, options.integrator);
    let mut prop = Propagator::new(gen, method, options.tolerances);
    let tail_limit = TAIL_TOL.max(initial.tail_mass());

    let mut trace = EvolutionTrace {
        times: Vec::with_capacity(samples.len()),
        mean_n: Vec::with_capacity(samples.len()),
        p0: Vec::with_capacity(samples.len()),
        snapshots: options.keep_snapshots.then(Vec::new),
    };
    let mut p = initial.populations().to_vec();
    let mut t = 0.0;
    for &target in samples {
        prop.advance(&mut p, target - t)?;
        t = target;
        let dist = sanitize(p.clone())?.value;
        if dist.tail_mass() > tail_limit {
            return Err(Error::TruncationOverflow {
                n_max: dist.n_max(),
                tail: dist.tail_mass(),
                tol: TAIL_TOL,
            });
        }
        trace.times.push(t);
        trace.mean_n.push(dist.mean());
        trace.p0.push(dist.vacuum_probability());
        if let Some(snaps) = trace.snapshots.as_mut() {
            snaps.push(dist);
        }
    }
    Ok(trace)
}

/// `count` evenly spaced sample times covering `[0, t_end]`.
pub fn uniform_samples(t_end: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|i| {
            if i + 1 == count {
                t_end
            } else {
                t_end * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}
