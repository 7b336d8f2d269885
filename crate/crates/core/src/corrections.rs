//! First-order corrections from an imperfect qubit: charge-noise relaxation,
//! thermal excitation before a kick, loss of swap fidelity during it, and
//! the resulting floor on the achievable phonon number.

use serde::Serialize;

use crate::diagnostics::{Warned, Warning};
use crate::dynamics::{
    balance_ratio, grow_until_contained, product_distribution, SteadyStateMethod, SteadyStateResult,
};
use crate::error::{Error, Result};
use crate::model::{KickMap, ProtocolParams};
use crate::units::{HBAR, K_B};

/// Qubit-side quantities: fluctuation coupling `alpha_g`, temperature (K),
/// Josephson energy (J) and the resonator frequency (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitEnvironment {
    pub alpha_g: f64,
    pub temperature: f64,
    pub e_j: f64,
    pub omega0: f64,
}

impl QubitEnvironment {
    pub fn new(alpha_g: f64, temperature: f64, e_j: f64, omega0: f64) -> Result<Self> {
        if !(alpha_g >= 0.0) || !alpha_g.is_finite() {
            return Err(Error::Domain(format!(
                "alpha_g must be >= 0, got {alpha_g}"
            )));
        }
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::Domain(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        if !(e_j > 0.0) || !e_j.is_finite() {
            return Err(Error::Domain(format!("E_J must be positive, got {e_j}")));
        }
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::Domain(format!(
                "omega0 must be positive, got {omega0}"
            )));
        }
        Ok(Self {
            alpha_g,
            temperature,
            e_j,
            omega0,
        })
    }

    /// `Gamma(omega0)`, the relaxation rate while on resonance.
    pub fn gamma_resonant(&self) -> f64 {
        gamma(self.alpha_g, self.temperature, self.omega0)
    }

    /// `Gamma(E_J / hbar)`, the relaxation rate at the reset point.
    pub fn gamma_reset(&self) -> f64 {
        gamma(self.alpha_g, self.temperature, self.e_j / HBAR)
    }
}

fn gamma(alpha_g: f64, temperature: f64, omega: f64) -> f64 {
    let x = HBAR * omega / (2.0 * K_B * temperature);
    let coth = 1.0 / x.tanh();
    std::f64::consts::PI * alpha_g * omega * (coth + 1.0) / 2.0
}

/// Charge-noise relaxation rate (1/s) of the qubit when its splitting is `omega` (rad/s).
pub fn relaxation_rate(env: &QubitEnvironment, omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "omega must be positive, got {omega}"
        )));
    }
    Ok(gamma(env.alpha_g, env.temperature, omega))
}

/// Occupation of the upper qubit level for splitting `energy` (J) at `temperature` (K).
pub fn excitation_probability(energy: f64, temperature: f64) -> f64 {
    let x = energy / (K_B * temperature);
    // 1 / (1 + e^x) written to stay finite for large x
    let e = (-x).exp();
    e / (1.0 + e)
}

pub fn thermal_excitation_probability(env: &QubitEnvironment) -> f64 {
    excitation_probability(env.e_j, env.temperature)
}

/// `integral_0^tau sin^2(g sqrt(l) t) dt`.
pub fn swap_exposure(g: f64, tau: f64, level: usize) -> f64 {
    let w = g * (level as f64).sqrt();
    tau / 2.0 - (2.0 * w * tau).sin() / (4.0 * w)
}

/// First-order swap fidelity `F_{level-1}` for a qubit decaying at `gamma0`.
pub fn kick_fidelity(gamma0: f64, g: f64, tau: f64, level: usize) -> Result<Warned<f64>> {
    if level < 1 {
        return Err(Error::Domain("fidelity is defined for levels >= 1".into()));
    }
    if !(gamma0 >= 0.0) || !(g > 0.0) || !(tau > 0.0) {
        return Err(Error::Domain("need gamma0 >= 0, g > 0, tau > 0".into()));
    }
    let fidelity = 1.0 - gamma0 * swap_exposure(g, tau, level);
    let mut warnings = Vec::new();
    let gamma_tau = gamma0 * tau;
    if gamma_tau > 0.1 {
        warnings.push(Warning::QubitDecayDuringKick { gamma_tau });
    }
    if fidelity < 0.9 {
        warnings.push(Warning::LowFidelity { level, fidelity });
    }
    Ok(Warned::new(fidelity, warnings))
}

/// Which corrections enter the product formula.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorrectionOptions {
    /// Excited-state probability to use instead of the environment's thermal value.
    pub p_override: Option<f64>,
    /// Scale each swap probability by its first-order fidelity.
    pub include_fidelity: bool,
}

impl CorrectionOptions {
    pub fn full() -> Self {
        Self {
            p_override: None,
            include_fidelity: true,
        }
    }

    pub fn excitation_only(p: f64) -> Self {
        Self {
            p_override: Some(p),
            include_fidelity: false,
        }
    }
}

/// Product-form steady state with thermal excitation and (optionally) the
/// fidelity factor applied to every swap probability.
pub fn corrected_steady_state(
    params: &ProtocolParams,
    env: &QubitEnvironment,
    n_max: usize,
    options: &CorrectionOptions,
) -> Result<Warned<SteadyStateResult>> {
    params.validate()?;
    if !(params.kappa > 0.0) {
        return Err(Error::Domain("the product formula needs kappa > 0".into()));
    }
    let p = options
        .p_override
        .unwrap_or_else(|| thermal_excitation_probability(env));
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "excited preparation {p} outside [0, 1]"
        )));
    }
    let gamma0 = if options.include_fidelity {
        env.gamma_resonant()
    } else {
        0.0
    };
    let leverage = params.ra_over_kappa();
    let theta = params.pulse_area();
    let n_th = params.n_th;

    let mut warnings = Vec::new();
    if options.include_fidelity && gamma0 * params.tau > 0.1 {
        warnings.push(Warning::QubitDecayDuringKick {
            gamma_tau: gamma0 * params.tau,
        });
    }
    let mut worst: Option<(usize, f64)> = None;
    let dist = grow_until_contained(n_max, |size| {
        let table = KickMap::from_pulse_area(theta, p, size)?;
        let ce2 = table.ce2();
        let fidelity: Vec<f64> = (1..=size)
            .map(|l| {
                if options.include_fidelity {
                    (1.0 - gamma0 * swap_exposure(params.g, params.tau, l)).max(0.0)
                } else {
                    1.0
                }
            })
            .collect();
        worst = fidelity
            .iter()
            .enumerate()
            .map(|(i, &f)| (i + 1, f))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        product_distribution(size, |l| {
            balance_ratio(n_th, leverage, p, ce2[l - 1] * fidelity[l - 1], l)
        })
    })?;
    if let Some((level, fidelity)) = worst {
        if fidelity < 0.9 {
            warnings.push(Warning::LowFidelity { level, fidelity });
        }
    }
    let kick = KickMap::from_pulse_area(theta, p, dist.n_max())?;
    let result = SteadyStateResult::new(dist, &kick, SteadyStateMethod::AnalyticProduct)?;
    Ok(Warned::new(result, warnings))
}

/// Lower bound on the steady phonon number from thermal excitation plus
/// heating by qubit decay during the kick: `p + N_th Gamma(omega0) tau / 2`.
pub fn cooling_floor(params: &ProtocolParams, env: &QubitEnvironment) -> f64 {
    cooling_floor_from(
        thermal_excitation_probability(env),
        env.gamma_resonant(),
        params.n_th,
        params.tau,
    )
}

pub fn cooling_floor_from(p: f64, gamma0: f64, n_th: f64, tau: f64) -> f64 {
    p + n_th * gamma0 * tau / 2.0
}
