//! SI constants (exact 2019 values where defined) and unit helpers.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;

pub const MICRO_EV: f64 = 1e-6 * E_CHARGE;
/// Rates and angular frequencies quoted "in MHz" mean units of 10^6 s^-1.
pub const MHZ: f64 = 1e6;
pub const ATTOFARAD: f64 = 1e-18;
pub const NANOSECOND: f64 = 1e-9;
pub const MILLIKELVIN: f64 = 1e-3;

/// Energy (J) to angular frequency (rad/s).
pub fn energy_to_angular(energy: f64) -> f64 {
    energy / HBAR
}

pub fn angular_to_energy(omega: f64) -> f64 {
    omega * HBAR
}

/// Bose occupation of a mode at angular frequency `omega` and temperature `t`.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    let x = HBAR * omega / (K_B * temperature);
    1.0 / x.exp_m1()
}

/// Temperature at which a mode at `omega` has mean occupation `n`.
pub fn temperature_for_occupation(omega: f64, n: f64) -> f64 {
    HBAR * omega / (K_B * (1.0 / n).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn occupation_round_trip() {
        let omega = 2.0 * std::f64::consts::PI * 1e8;
        for t in [1e-3, 1e-2, 0.3, 4.0] {
            let n = bose_occupation(omega, t);
            assert!((temperature_for_occupation(omega, n) - t).abs() / t < 1e-12);
        }
    }

    #[test]
    fn hundred_mhz_is_half_micro_ev() {
        let e = angular_to_energy(2.0 * std::f64::consts::PI * 1e8) / MICRO_EV;
        assert!((e - 0.4136).abs() < 1e-3);
    }
}
