//! Circuit-level parameters of the qubit–resonator device and their
//! mapping to protocol-level quantities.

use serde::{Deserialize, Serialize};

use crate::corrections::{excitation_probability, QubitEnvironment};
use crate::error::{Error, Result};
use crate::model::ProtocolParams;
use crate::units::{bose_occupation, ATTOFARAD, E_CHARGE, HBAR, MHZ};

/// Physical device description in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Josephson energy, J.
    pub e_j: f64,
    /// Charging energy, J. Derived from the total capacitance when absent.
    pub e_c: Option<f64>,
    pub c_x: f64,
    pub c_g: f64,
    pub c_j: f64,
    pub v_x: f64,
    /// Gate voltage; only fixes the operating point, never enters a rate.
    pub v_g: Option<f64>,
    /// Fluctuation impedance, ohm.
    pub resistance: f64,
    pub temperature: f64,
    /// Resonator angular frequency, rad/s.
    pub omega0: f64,
    pub quality: f64,
    pub mass: Option<f64>,
    pub gap: Option<f64>,
    /// Coupling (rad/s) supplied directly.
    pub g_override: Option<f64>,
}

/// Largest tolerated relative disagreement between a supplied and a computed coupling.
pub const COUPLING_CONSISTENCY: f64 = 0.2;

impl DeviceParams {
    /// The parameter set of the reference device: a 100 MHz resonator with
    /// Q = 2e5, 20 aF coupling and gate capacitances, 250 aF total
    /// capacitance, 50 ohm lines, 0.25 V bias at 10 mK and a coupling of
    /// 2 pi x 10 MHz. The Josephson splitting is 4 pi x 10^4 MHz.
    pub fn reference() -> Self {
        Self {
            e_j: HBAR * 4.0 * std::f64::consts::PI * 1e4 * MHZ,
            e_c: None,
            c_x: 20.0 * ATTOFARAD,
            c_g: 20.0 * ATTOFARAD,
            c_j: 210.0 * ATTOFARAD,
            v_x: 0.25,
            v_g: None,
            resistance: 50.0,
            temperature: 0.01,
            omega0: 2.0 * std::f64::consts::PI * 100.0 * MHZ,
            quality: 2e5,
            mass: None,
            gap: None,
            g_override: Some(2.0 * std::f64::consts::PI * 10.0 * MHZ),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("E_J", self.e_j),
            ("C_x", self.c_x),
            ("C_g", self.c_g),
            ("C_J", self.c_j),
            ("R", self.resistance),
            ("T", self.temperature),
            ("omega0", self.omega0),
            ("Q", self.quality),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.v_x.abs() > 0.0) || !self.v_x.is_finite() {
            return Err(Error::Domain(format!(
                "V_x must be non-zero, got {}",
                self.v_x
            )));
        }
        if let Some(v_g) = self.v_g {
            if !(v_g.abs() > 0.0) {
                return Err(Error::Domain("V_g must be non-zero when given".into()));
            }
        }
        for (name, v) in [
            ("E_c", self.e_c),
            ("m", self.mass),
            ("d", self.gap),
            ("g", self.g_override),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::Domain(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.mass.is_some() != self.gap.is_some() {
            return Err(Error::Domain("mass and gap must be given together".into()));
        }
        if self.g_override.is_none() && self.mass.is_none() {
            return Err(Error::Domain(
                "need either a coupling or the mass and gap".into(),
            ));
        }
        Ok(())
    }

    pub fn c_sigma(&self) -> f64 {
        self.c_x + self.c_g + self.c_j
    }

    /// `E_c = e^2 / (2 C_sigma)` unless given explicitly.
    pub fn charging_energy(&self) -> f64 {
        self.e_c
            .unwrap_or_else(|| E_CHARGE * E_CHARGE / (2.0 * self.c_sigma()))
    }

    /// Cooper pairs induced by the bias, `C_x V_x / 2e`.
    pub fn n_x(&self) -> f64 {
        self.c_x * self.v_x / (2.0 * E_CHARGE)
    }

    /// Dimensionless gate-charge fluctuation coupling.
    pub fn alpha_g(&self) -> f64 {
        let conductance_ratio = E_CHARGE * E_CHARGE * self.resistance / HBAR;
        2.0 * conductance_ratio * (self.c_x.powi(2) + self.c_g.powi(2))
            / (std::f64::consts::PI * self.c_sigma().powi(2))
    }

    pub fn kappa(&self) -> f64 {
        self.omega0 / self.quality
    }

    pub fn n_th(&self) -> f64 {
        bose_occupation(self.omega0, self.temperature)
    }

    /// Coupling from the geometry: `4 E_c n_x x_zpf / (hbar d)`.
    pub fn geometric_coupling(&self) -> Option<f64> {
        let (m, d) = (self.mass?, self.gap?);
        let x_zpf = (HBAR / (2.0 * m * self.omega0)).sqrt();
        Some(4.0 * self.charging_energy() * self.n_x() * x_zpf / (HBAR * d))
    }

    /// The coupling to use; checks the two routes against each other when both exist.
    pub fn coupling(&self) -> Result<f64> {
        match (self.g_override, self.geometric_coupling()) {
            (Some(g), Some(geo)) => {
                if (g - geo).abs() > COUPLING_CONSISTENCY * g {
                    return Err(Error::Inconsistent(format!(
                        "supplied coupling {g:e} rad/s vs geometric {geo:e} rad/s"
                    )));
                }
                Ok(g)
            }
            (Some(g), None) => Ok(g),
            (None, Some(geo)) => Ok(geo),
            (None, None) => Err(Error::Domain(
                "need either a coupling or the mass and gap".into(),
            )),
        }
    }

    pub fn environment(&self) -> Result<QubitEnvironment> {
        QubitEnvironment::new(self.alpha_g(), self.temperature, self.e_j, self.omega0)
    }
}

/// Maps a device to protocol parameters and the qubit environment.
///
/// When `pulse_area` is given the kick duration is `pulse_area / g` and
/// `tau` is ignored.
pub fn derive_protocol(
    dev: &DeviceParams,
    tau: f64,
    r_a: f64,
    pulse_area: Option<f64>,
) -> Result<(ProtocolParams, QubitEnvironment)> {
    dev.validate()?;
    let g = dev.coupling()?;
    let tau = match pulse_area {
        Some(area) if area > 0.0 => area / g,
        Some(area) => {
            return Err(Error::Domain(format!(
                "pulse area must be positive, got {area}"
            )))
        }
        None => tau,
    };
    let p_e = excitation_probability(dev.e_j, dev.temperature);
    let params = ProtocolParams::new(g, tau, r_a, dev.kappa(), dev.n_th(), p_e)?;
    Ok((params, dev.environment()?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleInputs {
    pub g: f64,
    pub tau: f64,
    pub r_a: f64,
    /// Relaxation rate at the reset point, 1/s.
    pub gamma_reset: f64,
    /// Relaxation rate while resonant, if known.
    pub gamma_resonant: Option<f64>,
    pub kappa: Option<f64>,
    /// Reset lasts this many relaxation times.
    pub reset_multiplier: f64,
}

impl ScheduleInputs {
    pub fn new(g: f64, gamma_reset: f64, r_a: f64, tau: f64) -> Self {
        Self {
            g,
            tau,
            r_a,
            gamma_reset,
            gamma_resonant: None,
            kappa: None,
            reset_multiplier: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScheduleViolation {
    /// Kick plus reset does not fit in one period.
    BudgetExceeded {
        cycle_time: f64,
        period: f64,
    },
    CouplingNotDominantOverQubitDecay {
        ratio: f64,
    },
    CouplingNotDominantOverDamping {
        ratio: f64,
    },
    QubitDecayDuringKick {
        gamma_tau: f64,
    },
    DampingDuringKick {
        kappa_tau: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleReport {
    /// `tau + k / Gamma(E_J)`, s.
    pub cycle_time: f64,
    /// `1 / r_a`, s.
    pub period: f64,
    pub closes: bool,
    /// Largest repetition rate that still fits kick and reset, 1/s.
    pub max_rate: f64,
    /// Ground-state population after the reset, `1 - exp(-k)`.
    pub reset_fidelity: f64,
    pub violations: Vec<ScheduleViolation>,
}

/// Separation factor read as "much larger".
pub const DOMINANCE: f64 = 10.0;

/// Checks whether kick and reset fit one period and whether the timescale
/// separations behind the coarse-grained description hold.
pub fn duty_cycle_schedule(inputs: &ScheduleInputs) -> ScheduleReport {
    let reset = if inputs.gamma_reset.is_finite() {
        inputs.reset_multiplier / inputs.gamma_reset
    } else {
        0.0
    };
    let cycle_time = inputs.tau + reset;
    let period = 1.0 / inputs.r_a;
    let closes = cycle_time <= period;
    let mut violations = Vec::new();
    if !closes {
        violations.push(ScheduleViolation::BudgetExceeded { cycle_time, period });
    }
    if let Some(gamma) = inputs.gamma_resonant {
        let ratio = inputs.g / gamma;
        if ratio < DOMINANCE {
            violations.push(ScheduleViolation::CouplingNotDominantOverQubitDecay { ratio });
        }
        let gamma_tau = gamma * inputs.tau;
        if gamma_tau > 0.1 {
            violations.push(ScheduleViolation::QubitDecayDuringKick { gamma_tau });
        }
    }
    if let Some(kappa) = inputs.kappa {
        let ratio = inputs.g / kappa;
        if ratio < DOMINANCE {
            violations.push(ScheduleViolation::CouplingNotDominantOverDamping { ratio });
        }
        let kappa_tau = kappa * inputs.tau;
        if kappa_tau > 0.01 {
            violations.push(ScheduleViolation::DampingDuringKick { kappa_tau });
        }
    }
    ScheduleReport {
        cycle_time,
        period,
        closes,
        max_rate: 1.0 / cycle_time,
        reset_fidelity: -(-inputs.reset_multiplier).exp_m1(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{temperature_for_occupation, MICRO_EV};
    use std::f64::consts::PI;

    #[test]
    fn reference_numbers() {
        let dev = DeviceParams::reference();
        dev.validate().unwrap();
        assert!((dev.n_x() - 15.6).abs() < 0.1);
        assert!((dev.alpha_g() - 1e-4).abs() / 1e-4 < 0.2);
        assert!((dev.kappa() - PI * 1e-3 * MHZ).abs() < 1e-9);
        assert!((dev.charging_energy() / MICRO_EV - 320.0).abs() < 5.0);
    }

    #[test]
    fn derived_protocol() {
        let dev = DeviceParams::reference();
        let (p, env) = derive_protocol(&dev, 0.0, 3.0 * MHZ, Some(PI / 2.0)).unwrap();
        assert!((p.tau - 25e-9).abs() < 1e-15);
        assert!(p.g / p.kappa > 1e3);
        assert!(p.p_e < 1e-40);
        let t = temperature_for_occupation(dev.omega0, p.n_th);
        assert!((t - dev.temperature).abs() / dev.temperature < 1e-10);
        assert_eq!(env.alpha_g, dev.alpha_g());
    }

    #[test]
    fn coupling_routes() {
        let mut dev = DeviceParams::reference();
        dev.g_override = None;
        assert!(dev.validate().is_err());
        // pick a gap that reproduces the supplied coupling for a 1e-16 kg beam
        dev.mass = Some(1e-16);
        let x_zpf = (HBAR / (2.0 * 1e-16 * dev.omega0)).sqrt();
        let g = 2.0 * PI * 10.0 * MHZ;
        dev.gap = Some(4.0 * dev.charging_energy() * dev.n_x() * x_zpf / (HBAR * g));
        assert!((dev.coupling().unwrap() - g).abs() / g < 1e-12);
        dev.g_override = Some(g * 1.1);
        assert!(dev.coupling().is_ok());
        dev.g_override = Some(g * 1.5);
        assert!(matches!(dev.coupling(), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn budget_closes_for_reference_cycle() {
        let r = duty_cycle_schedule(&ScheduleInputs::new(
            2.0 * PI * 10.0 * MHZ,
            40.0 * MHZ,
            3.0 * MHZ,
            25e-9,
        ));
        assert!(r.closes);
        assert!((r.cycle_time - 275e-9).abs() < 1e-15);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn instant_reset_limit() {
        let r = duty_cycle_schedule(&ScheduleInputs::new(1e8, f64::INFINITY, 1e6, 25e-9));
        assert!((r.max_rate - 1.0 / 25e-9).abs() < 1e-3);
    }

    #[test]
    fn fast_repetition_flagged() {
        let r = duty_cycle_schedule(&ScheduleInputs::new(
            2.0 * PI * 10.0 * MHZ,
            40.0 * MHZ,
            100.0 * MHZ,
            25e-9,
        ));
        assert!(!r.closes);
        assert!(matches!(
            r.violations[0],
            ScheduleViolation::BudgetExceeded { .. }
        ));
    }
}
