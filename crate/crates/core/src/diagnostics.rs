//! Non-fatal conditions reported alongside a computed value.
//!
//! Validity warnings never abort a computation. They travel with the result
//! in a [`Warned`] wrapper so callers (and tests) can inspect them.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Mass sitting on the highest retained level.
    TruncationTail { n_max: usize, tail: f64 },
    /// Probability drift that was removed by renormalizing.
    Renormalized { drift: f64 },
    /// `r_a * tau` is no longer a short duty cycle.
    LongDutyCycle { ra_tau: f64 },
    /// Resonator decay during a kick is not negligible.
    DampingDuringKick { kappa_tau: f64 },
    /// Qubit decay during a kick is not negligible (`gamma * tau`).
    QubitDecayDuringKick { gamma_tau: f64 },
    /// First-order fidelity correction is no longer small.
    LowFidelity { level: usize, fidelity: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::TruncationTail { n_max, tail } => {
                write!(f, "tail mass {tail:e} at truncation level {n_max}")
            }
            Warning::Renormalized { drift } => write!(f, "renormalized away drift {drift:e}"),
            Warning::LongDutyCycle { ra_tau } => {
                write!(f, "r_a*tau = {ra_tau:.3} exceeds 0.5; kicks are not short")
            }
            Warning::DampingDuringKick { kappa_tau } => {
                write!(f, "kappa*tau = {kappa_tau:.3e} exceeds 0.01")
            }
            Warning::QubitDecayDuringKick { gamma_tau } => {
                write!(
                    f,
                    "gamma*tau = {gamma_tau:.3e}; first-order correction is unreliable"
                )
            }
            Warning::LowFidelity { level, fidelity } => {
                write!(
                    f,
                    "kick fidelity {fidelity:.4} at level {level} is below 0.9"
                )
            }
        }
    }
}

/// A value together with the warnings raised while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Warned<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Warned<T> {
    pub fn clean(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }

    pub fn new(value: T, warnings: Vec<Warning>) -> Self {
        Self { value, warnings }
    }

    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn into_inner(self) -> T {
        self.value
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Warned<U> {
        Warned {
            value: f(self.value),
            warnings: self.warnings,
        }
    }
}
