use super::distribution::{sanitize, PhononDistribution, TAIL_TOL};
use crate::diagnostics::{Warned, Warning};
use crate::error::{Error, Result};

/// Population transfer of one resonant interaction with a freshly prepared qubit.
///
/// `ce2[n] = sin^2(theta sqrt(n+1))` is the probability that a ground-state
/// qubit absorbs a phonon out of level `n+1`; `cg2[n] = cos^2(theta sqrt(n))`
/// is the probability that level `n` is left untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct KickMap {
    ce2: Vec<f64>,
    cg2: Vec<f64>,
    p_e: f64,
    theta: f64,
}

impl KickMap {
    /// Builds the tables directly from the pulse area `theta = g * tau`.
    pub fn from_pulse_area(theta: f64, p_e: f64, n_max: usize) -> Result<Self> {
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(Error::Domain(format!(
                "pulse area must be >= 0, got {theta}"
            )));
        }
        if !(0.0..=1.0).contains(&p_e) {
            return Err(Error::Domain(format!(
                "excited preparation {p_e} outside [0, 1]"
            )));
        }
        if n_max < 1 {
            return Err(Error::Domain("n_max must be at least 1".into()));
        }
        let ce2 = (0..=n_max)
            .map(|n| (theta * ((n + 1) as f64).sqrt()).sin().powi(2))
            .collect();
        let cg2 = (0..=n_max)
            .map(|n| (theta * (n as f64).sqrt()).cos().powi(2))
            .collect();
        Ok(Self {
            ce2,
            cg2,
            p_e,
            theta,
        })
    }

    /// Same map with a different excited-state preparation probability.
    pub fn with_excited_probability(&self, p_e: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_e) {
            return Err(Error::Domain(format!(
                "excited preparation {p_e} outside [0, 1]"
            )));
        }
        Ok(Self {
            p_e,
            ..self.clone()
        })
    }

    pub fn ce2(&self) -> &[f64] {
        &self.ce2
    }

    pub fn cg2(&self) -> &[f64] {
        &self.cg2
    }

    pub fn excited_probability(&self) -> f64 {
        self.p_e
    }

    pub fn pulse_area(&self) -> f64 {
        self.theta
    }

    pub fn n_max(&self) -> usize {
        self.ce2.len() - 1
    }

    /// Probability that level `m` loses one phonon during a kick.
    pub fn down_probability(&self, m: usize) -> f64 {
        if m == 0 || m > self.n_max() {
            0.0
        } else {
            (1.0 - self.p_e) * self.ce2[m - 1]
        }
    }

    /// Probability that level `m` gains one phonon during a kick.
    ///
    /// Zero at the truncation edge: the block that would leave the space is
    /// frozen.
    pub fn up_probability(&self, m: usize) -> f64 {
        if m >= self.n_max() {
            0.0
        } else {
            self.p_e * self.ce2[m]
        }
    }

    /// Probability that an excited qubit leaves level `n` untouched.
    fn excited_stay(&self, n: usize) -> f64 {
        if n < self.n_max() {
            self.cg2[n + 1]
        } else {
            1.0
        }
    }
}

/// Builds the kick tables for coupling `g` (rad/s) acting for `tau` seconds.
pub fn build_kick_map(g: f64, tau: f64, p_e: f64, n_max: usize) -> Result<KickMap> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::Domain(format!("coupling must be positive, got {g}")));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!(
            "kick duration must be positive, got {tau}"
        )));
    }
    KickMap::from_pulse_area(g * tau, p_e, n_max)
}

/// Applies one kick to a population vector.
///
/// A ground-state qubit can only lower the phonon number; an excited one can
/// only raise it. The result is the `p_e` mixture of both branches.
pub fn apply_kick(dist: &PhononDistribution, kick: &KickMap) -> Result<Warned<PhononDistribution>> {
    if dist.n_max() != kick.n_max() {
        return Err(Error::SizeMismatch {
            expected: kick.n_max() + 1,
            found: dist.len(),
        });
    }
    let p = dist.populations();
    let top = kick.n_max();
    let (ce2, cg2) = (kick.ce2(), kick.cg2());
    let p_e = kick.excited_probability();
    let p_g = 1.0 - p_e;

    let mut out = vec![0.0; top + 1];
    for n in 0..=top {
        let from_above = if n < top { ce2[n] * p[n + 1] } else { 0.0 };
        let ground = cg2[n] * p[n] + from_above;
        let excited = if p_e > 0.0 {
            let from_below = if n > 0 { ce2[n - 1] * p[n - 1] } else { 0.0 };
            kick.excited_stay(n) * p[n] + from_below
        } else {
            0.0
        };
        out[n] = p_g * ground + p_e * excited;
    }

    let mut result = sanitize(out)?;
    if p_e > 0.0 && result.value.tail_mass() > TAIL_TOL {
        result.warnings.push(Warning::TruncationTail {
            n_max: top,
            tail: result.value.tail_mass(),
        });
    }
    Ok(result)
}
