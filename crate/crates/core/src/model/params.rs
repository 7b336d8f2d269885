use serde::{Deserialize, Serialize};

use crate::diagnostics::Warning;
use crate::error::{Error, Result};

/// Model-level protocol parameters in SI units.
///
/// `g` is an angular frequency (rad/s), `tau` a duration (s), `r_a` and
/// `kappa` rates (1/s). `n_th` and `p_e` are dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub g: f64,
    pub tau: f64,
    pub r_a: f64,
    pub kappa: f64,
    pub n_th: f64,
    pub p_e: f64,
}

impl ProtocolParams {
    /// Validates and builds.
    ///
    /// `r_a` and `kappa` may be zero so the pure-damping and damping-free
    /// limits stay expressible; everything that divides by them checks again.
    pub fn new(g: f64, tau: f64, r_a: f64, kappa: f64, n_th: f64, p_e: f64) -> Result<Self> {
        let p = Self {
            g,
            tau,
            r_a,
            kappa,
            n_th,
            p_e,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds from the dimensionless combinations that fix the dynamics:
    /// pulse area `g*tau`, leverage `r_a/kappa`, and the decay rate `kappa`.
    pub fn from_dimensionless(
        g: f64,
        pulse_area: f64,
        ra_over_kappa: f64,
        kappa: f64,
        n_th: f64,
        p_e: f64,
    ) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::Domain(format!("coupling must be positive, got {g}")));
        }
        Self::new(g, pulse_area / g, ra_over_kappa * kappa, kappa, n_th, p_e)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive, got {v}")))
            }
        };
        let non_negative = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be >= 0, got {v}")))
            }
        };
        positive("g", self.g)?;
        positive("tau", self.tau)?;
        non_negative("r_a", self.r_a)?;
        non_negative("kappa", self.kappa)?;
        non_negative("n_th", self.n_th)?;
        if !(0.0..=1.0).contains(&self.p_e) {
            return Err(Error::Domain(format!(
                "p_e must lie in [0, 1], got {}",
                self.p_e
            )));
        }
        Ok(())
    }

    pub fn pulse_area(&self) -> f64 {
        self.g * self.tau
    }

    /// `r_a / kappa`; infinite when the resonator is undamped.
    pub fn ra_over_kappa(&self) -> f64 {
        self.r_a / self.kappa
    }

    /// Coarse-graining assumptions that no longer hold for these values.
    pub fn validity_warnings(&self) -> Vec<Warning> {
        let mut warnings = Vec::new();
        let ra_tau = self.r_a * self.tau;
        if ra_tau > 0.5 {
            warnings.push(Warning::LongDutyCycle { ra_tau });
        }
        let kappa_tau = self.kappa * self.tau;
        if kappa_tau > 0.01 {
            warnings.push(Warning::DampingDuringKick { kappa_tau });
        }
        warnings
    }
}
