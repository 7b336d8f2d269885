//! Time stepping for `dP/dt = G P`.
//!
//! Two adaptive schemes share one driver:
//!
//! * Dormand–Prince 5(4), explicit, used when the horizon is short compared
//!   with the fastest rate of the generator;
//! * a rational approximation of `exp(hG)` built from the subdiagonal Padé
//!   pair `[3/4]` / `[2/3]` (the Radau IIA stability functions), evaluated by
//!   partial fractions. Each term is one tridiagonal solve, the scheme is
//!   L-stable and conserves probability exactly because the columns of `G`
//!   sum to zero. It takes over when the explicit scheme would be limited by
//!   stability rather than accuracy.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::generator::GeneratorMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    Auto,
    RungeKutta,
    RationalExp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-13,
        }
    }
}

/// Above this many (stability-limited) explicit steps the rational scheme is used.
const STIFF_STEP_LIMIT: f64 = 20_000.0;
const MAX_STEPS: usize = 5_000_000;

/// Resolves [`Integrator::Auto`] for a horizon of `duration` seconds.
pub fn choose_integrator(
    gen: &GeneratorMatrix,
    duration: f64,
    requested: Integrator,
) -> Integrator {
    match requested {
        Integrator::Auto => {
            // DP5 is stable on the negative real axis down to about -3.3
            let explicit_steps = 2.0 * gen.max_rate() * duration / 3.3;
            if explicit_steps <= STIFF_STEP_LIMIT {
                Integrator::RungeKutta
            } else {
                Integrator::RationalExp
            }
        }
        other => other,
    }
}

/// Carries the step size between successive calls to [`Propagator::advance`].
pub struct Propagator<'a> {
    gen: &'a GeneratorMatrix,
    method: Integrator,
    tol: Tolerances,
    h: f64,
    steps: usize,
}

impl<'a> Propagator<'a> {
    pub fn new(gen: &'a GeneratorMatrix, method: Integrator, tol: Tolerances) -> Self {
        let rate = gen.max_rate();
        let h = if rate > 0.0 {
            0.5 / rate
        } else {
            f64::INFINITY
        };
        let method = if method == Integrator::Auto {
            Integrator::RungeKutta
        } else {
            method
        };
        Self {
            gen,
            method,
            tol,
            h,
            steps: 0,
        }
    }

    pub fn method(&self) -> Integrator {
        self.method
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    /// Advances `p` in place by `duration` seconds.
    pub fn advance(&mut self, p: &mut Vec<f64>, duration: f64) -> Result<()> {
        if duration <= 0.0 || self.gen.max_rate() == 0.0 {
            return Ok(());
        }
        let mut t = 0.0;
        let mut rk = DormandPrince::new(p.len());
        while t < duration {
            if self.steps >= MAX_STEPS {
                return Err(Error::StepFailure {
                    t,
                    reason: "step budget exhausted".into(),
                });
            }
            let remaining = duration - t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            let (candidate, err) = match self.method {
                Integrator::RationalExp => rational_step(self.gen, p, h),
                _ => rk.step(self.gen, p, h),
            };
            let norm = error_norm(p, &candidate, &err, &self.tol);
            if !norm.is_finite() {
                return Err(Error::StepFailure {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }
            let exponent = match self.method {
                Integrator::RationalExp => 1.0 / 6.0,
                _ => 1.0 / 5.0,
            };
            let factor = if norm == 0.0 {
                10.0
            } else {
                (0.9 * norm.powf(-exponent)).clamp(0.2, 10.0)
            };
            if norm <= 1.0 {
                t = if last { duration } else { t + h };
                *p = candidate;
                self.steps += 1;
                rk.accepted();
                // a clipped final step says nothing about the natural step size
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
            } else {
                self.h = h * factor.min(0.9);
                rk.rejected();
                if self.h <= 1e-15 * duration.max(t) {
                    return Err(Error::StepFailure {
                        t,
                        reason: "step size underflow".into(),
                    });
                }
            }
        }
        Ok(())
    }
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], tol: &Tolerances) -> f64 {
    let n = y.len() as f64;
    let sum: f64 = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| {
            let scale = tol.atol + tol.rtol * a.abs().max(b.abs());
            (e / scale).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

struct DormandPrince {
    k1: Option<Vec<f64>>,
    k7: Vec<f64>,
}

impl DormandPrince {
    const A2: [f64; 1] = [1.0 / 5.0];
    const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
    const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
    const A5: [f64; 4] = [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
    ];
    const A6: [f64; 5] = [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ];
    const B: [f64; 6] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ];
    // difference between the 5th and embedded 4th order weights
    const E: [f64; 7] = [
        35.0 / 384.0 - 5179.0 / 57600.0,
        0.0,
        500.0 / 1113.0 - 7571.0 / 16695.0,
        125.0 / 192.0 - 393.0 / 640.0,
        -2187.0 / 6784.0 + 92097.0 / 339200.0,
        11.0 / 84.0 - 187.0 / 2100.0,
        -1.0 / 40.0,
    ];

    fn new(n: usize) -> Self {
        Self {
            k1: None,
            k7: vec![0.0; n],
        }
    }

    fn accepted(&mut self) {
        self.k1 = Some(self.k7.clone());
    }

    fn rejected(&mut self) {}

    fn step(&mut self, gen: &GeneratorMatrix, y: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
        let n = y.len();
        let k1 = match &self.k1 {
            Some(k) => k.clone(),
            None => gen.apply(y),
        };
        let stage = |coeffs: &[f64], ks: &[&Vec<f64>]| -> Vec<f64> {
            (0..n)
                .map(|i| y[i] + h * coeffs.iter().zip(ks).map(|(a, k)| a * k[i]).sum::<f64>())
                .collect()
        };
        let k2 = gen.apply(&stage(&Self::A2, &[&k1]));
        let k3 = gen.apply(&stage(&Self::A3, &[&k1, &k2]));
        let k4 = gen.apply(&stage(&Self::A4, &[&k1, &k2, &k3]));
        let k5 = gen.apply(&stage(&Self::A5, &[&k1, &k2, &k3, &k4]));
        let k6 = gen.apply(&stage(&Self::A6, &[&k1, &k2, &k3, &k4, &k5]));
        let y_new = stage(&Self::B, &[&k1, &k2, &k3, &k4, &k5, &k6]);
        let k7 = gen.apply(&y_new);
        let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];
        let err = (0..n)
            .map(|i| h * Self::E.iter().zip(ks).map(|(e, k)| e * k[i]).sum::<f64>())
            .collect();
        self.k7 = k7;
        (y_new, err)
    }
}

/// `R(z) = sum_j r_j / (z - z_j)` for a rational approximant with
/// numerator degree below denominator degree.
#[derive(Debug, Clone)]
pub(crate) struct PartialFractions {
    real: Vec<(f64, f64)>,
    complex: Vec<(Complex64, Complex64)>,
}

impl PartialFractions {
    /// Partial fractions of the `[n-1/n]` Padé approximant of `exp`.
    pub(crate) fn subdiagonal_pade(n: usize) -> Self {
        let m = n - 1;
        let (num, den) = pade_coefficients(m, n);
        let roots = polynomial_roots(&den);
        let deriv: Vec<f64> = den
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| j as f64 * c)
            .collect();
        let mut real = Vec::new();
        let mut complex = Vec::new();
        for z in roots {
            let r = horner(&num, z) / horner(&deriv, z);
            if z.im.abs() < 1e-10 {
                real.push((r.re, z.re));
            } else if z.im > 0.0 {
                complex.push((r, z));
            }
        }
        // R(0) = 1 is what conserves probability; rounding in the residues
        // would otherwise leak mass at every step
        let at_zero: f64 = real.iter().map(|&(r, z)| -r / z).sum::<f64>()
            + complex.iter().map(|&(r, z)| -2.0 * (r / z).re).sum::<f64>();
        real.iter_mut().for_each(|(r, _)| *r /= at_zero);
        complex.iter_mut().for_each(|(r, _)| *r /= at_zero);
        Self { real, complex }
    }

    /// Scalar evaluation, for tests.
    #[cfg(test)]
    pub(crate) fn eval(&self, x: f64) -> f64 {
        let mut s = 0.0;
        for &(r, z) in &self.real {
            s += r / (x - z);
        }
        for &(r, z) in &self.complex {
            s += 2.0 * (r / (Complex64::new(x, 0.0) - z)).re;
        }
        s
    }

    pub(crate) fn apply(&self, gen: &GeneratorMatrix, h: f64, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for &(r, z) in &self.real {
            let x = gen.solve_shifted(h, z, v);
            out.iter_mut().zip(&x).for_each(|(o, xi)| *o += r * xi);
        }
        if !self.complex.is_empty() {
            let cv: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            for &(r, z) in &self.complex {
                let x = gen.solve_shifted(h, z, &cv);
                out.iter_mut()
                    .zip(&x)
                    .for_each(|(o, xi)| *o += 2.0 * (r * xi).re);
            }
        }
        out
    }
}

fn pade_pair() -> &'static (PartialFractions, PartialFractions) {
    static PAIR: OnceLock<(PartialFractions, PartialFractions)> = OnceLock::new();
    PAIR.get_or_init(|| {
        (
            PartialFractions::subdiagonal_pade(4),
            PartialFractions::subdiagonal_pade(3),
        )
    })
}

fn rational_step(gen: &GeneratorMatrix, y: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let (high, low) = pade_pair();
    let y_high = high.apply(gen, h, y);
    let y_low = low.apply(gen, h, y);
    let err = y_high.iter().zip(&y_low).map(|(a, b)| a - b).collect();
    (y_high, err)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Numerator and denominator coefficients (ascending powers) of the `[m/n]`
/// Padé approximant of `exp(z)`.
pub(crate) fn pade_coefficients(m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let total = factorial(m + n);
    let num = (0..=m)
        .map(|j| factorial(m + n - j) * factorial(m) / (total * factorial(j) * factorial(m - j)))
        .collect();
    let den = (0..=n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * factorial(m + n - j) * factorial(n) / (total * factorial(j) * factorial(n - j))
        })
        .collect();
    (num, den)
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Roots of a real polynomial (ascending coefficients): companion-matrix
/// eigenvalues refined by Newton iterations.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let mut companion = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let deriv: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| j as f64 * c)
        .collect();
    companion
        .complex_eigenvalues()
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..20 {
                let dz = horner(coeffs, z) / horner(&deriv, z);
                z -= dz;
                if dz.norm() <= 1e-16 * z.norm() {
                    break;
                }
            }
            z
        })
        .collect()
}
