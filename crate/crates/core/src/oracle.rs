//! Brute-force kick on the full resonator ⊗ qubit space.
//!
//! Everything here uses explicit dense matrices and is meant as a reference
//! for tests, not as a production path. Basis index of `|q, n>` is
//! `2 n + q` with `q = 0` for ground and `q = 1` for excited.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::diagnostics::{Warned, Warning};
use crate::error::{Error, Result};
use crate::model::{sanitize, PhononDistribution, TAIL_TOL};

/// Off-diagonal phonon coherence above this signals a broken kick.
pub const CLOSURE_TOL: f64 = 1e-12;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

fn idx(n: usize, excited: bool) -> usize {
    2 * n + usize::from(excited)
}

/// Resonant Jaynes–Cummings propagator `exp(-i h tau)` truncated at `n_max`.
///
/// The pair `{|g,n+1>, |e,n>}` rotates by `g tau sqrt(n+1)`. The state
/// `|e,n_max>` has no partner inside the space and is left invariant.
pub fn jc_unitary(g: f64, tau: f64, n_max: usize) -> DMatrix<Complex64> {
    let dim = 2 * (n_max + 1);
    let mut u = DMatrix::from_element(dim, dim, C0);
    u[(idx(0, false), idx(0, false))] = C1;
    u[(idx(n_max, true), idx(n_max, true))] = C1;
    for n in 0..n_max {
        let theta = g * tau * ((n + 1) as f64).sqrt();
        let (s, c) = theta.sin_cos();
        let a = idx(n + 1, false);
        let b = idx(n, true);
        u[(a, a)] = Complex64::new(c, 0.0);
        u[(b, b)] = Complex64::new(c, 0.0);
        u[(a, b)] = Complex64::new(0.0, -s);
        u[(b, a)] = Complex64::new(0.0, -s);
    }
    u
}

/// Density matrix of the resonator and qubit together.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    rho: DMatrix<Complex64>,
    n_max: usize,
}

impl BipartiteState {
    /// `diag(dist) ⊗ ((1 - p_e)|g><g| + p_e |e><e|)`.
    pub fn product(dist: &PhononDistribution, p_e: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_e) {
            return Err(Error::Domain(format!("p_e must lie in [0, 1], got {p_e}")));
        }
        let n_max = dist.n_max();
        let dim = 2 * (n_max + 1);
        let mut rho = DMatrix::from_element(dim, dim, C0);
        for (n, &p) in dist.populations().iter().enumerate() {
            rho[(idx(n, false), idx(n, false))] = Complex64::new(p * (1.0 - p_e), 0.0);
            rho[(idx(n, true), idx(n, true))] = Complex64::new(p * p_e, 0.0);
        }
        Ok(Self { rho, n_max })
    }

    pub fn from_matrix(rho: DMatrix<Complex64>) -> Result<Self> {
        if !rho.is_square() || rho.nrows() < 2 || rho.nrows() % 2 != 0 {
            return Err(Error::Domain(format!(
                "need an even square matrix, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let n_max = rho.nrows() / 2 - 1;
        let state = Self { rho, n_max };
        state.validate()?;
        Ok(state)
    }

    /// Hermitian and unit trace within 1e-12, no eigenvalue below -1e-10.
    pub fn validate(&self) -> Result<()> {
        let herm = (&self.rho - self.rho.adjoint())
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        if herm > 1e-12 {
            return Err(Error::Domain(format!(
                "density matrix not Hermitian ({herm:e})"
            )));
        }
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::NotNormalized(tr.re));
        }
        let eig = self.rho.clone().symmetric_eigenvalues();
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::Domain(format!(
                "density matrix has eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, u: &DMatrix<Complex64>) -> Self {
        Self {
            rho: u * &self.rho * u.adjoint(),
            n_max: self.n_max,
        }
    }

    /// Reduced resonator density matrix.
    pub fn trace_out_qubit(&self) -> DMatrix<Complex64> {
        let m = self.n_max + 1;
        DMatrix::from_fn(m, m, |i, j| {
            self.rho[(idx(i, false), idx(j, false))] + self.rho[(idx(i, true), idx(j, true))]
        })
    }
}

/// Kick computed by conjugating the full product state with the JC
/// propagator and tracing out the qubit.
///
/// Fails with [`Error::DiagonalClosure`] if the reduced state acquires a
/// phonon coherence above [`CLOSURE_TOL`]. Mass on the two highest levels
/// is reported as a truncation warning.
pub fn kick_oracle(
    dist: &PhononDistribution,
    g: f64,
    tau: f64,
    p_e: f64,
) -> Result<Warned<PhononDistribution>> {
    if !(g >= 0.0) || !(tau >= 0.0) || !g.is_finite() || !tau.is_finite() {
        return Err(Error::Domain(format!(
            "need finite g >= 0 and tau >= 0, got {g}, {tau}"
        )));
    }
    let n_max = dist.n_max();
    let state = BipartiteState::product(dist, p_e)?;
    let u = jc_unitary(g, tau, n_max);
    let reduced = state.conjugate(&u).trace_out_qubit();
    for i in 0..=n_max {
        for j in 0..=n_max {
            let v = reduced[(i, j)].norm();
            if i != j && v > CLOSURE_TOL {
                return Err(Error::DiagonalClosure {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    let diag: Vec<f64> = (0..=n_max).map(|n| reduced[(n, n)].re).collect();
    let mut out = sanitize(diag)?;
    let edge: f64 = dist.populations()[n_max.saturating_sub(1)..].iter().sum();
    if edge > TAIL_TOL {
        out.warnings
            .push(Warning::TruncationTail { n_max, tail: edge });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{apply_kick, build_kick_map, thermal_distribution};
    use std::f64::consts::PI;

    fn max_dev(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    #[test]
    fn zero_duration_is_identity() {
        let u = jc_unitary(1.0, 0.0, 6);
        assert_eq!(u, DMatrix::identity(14, 14));
    }

    #[test]
    fn half_swap_moves_excitation() {
        let u = jc_unitary(1.0, PI / 2.0, 4);
        let col = u.column(idx(0, true));
        assert!((col[idx(1, false)] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!(col[idx(0, true)].norm() < 1e-15);
    }

    #[test]
    fn unitary() {
        for (g, tau, n) in [(1.3, 0.7, 5), (0.2, 11.0, 12), (3.0, 0.01, 30)] {
            let u = jc_unitary(g, tau, n);
            let dim = 2 * (n + 1);
            assert!(max_dev(&(u.adjoint() * &u), &DMatrix::identity(dim, dim)) < 1e-13);
        }
    }

    #[test]
    fn matches_matrix_exponential() {
        let (g, tau, n_max) = (1.1, 0.9, 8);
        let dim = 2 * (n_max + 1);
        // h = g (a sigma+ + a^dag sigma-), with |e,n_max> decoupled
        let mut h = DMatrix::from_element(dim, dim, C0);
        for n in 0..n_max {
            let amp = Complex64::new(g * ((n + 1) as f64).sqrt(), 0.0);
            h[(idx(n, true), idx(n + 1, false))] = amp;
            h[(idx(n + 1, false), idx(n, true))] = amp;
        }
        let expm = (h * Complex64::new(0.0, -tau)).exp();
        assert!(max_dev(&expm, &jc_unitary(g, tau, n_max)) < 1e-12);
    }

    #[test]
    fn vacuum_cases() {
        let vac = PhononDistribution::vacuum(10);
        let out = kick_oracle(&vac, 1.0, PI / 2.0, 1.0).unwrap().value;
        assert!((out.p(1) - 1.0).abs() < 1e-15);
        let same = kick_oracle(&vac, 1.0, 0.37, 0.0).unwrap().value;
        assert_eq!(same, vac);
    }

    #[test]
    fn agrees_with_population_map() {
        let dist = thermal_distribution(1.7, 60).unwrap().value;
        let g = 1.0;
        let tau = PI / 8.0;
        let oracle = kick_oracle(&dist, g, tau, 0.0).unwrap();
        let fast = apply_kick(&dist, &build_kick_map(g, tau, 0.0, 60).unwrap()).unwrap();
        assert!(oracle.value.max_abs_diff(&fast.value) < 1e-12);
    }

    #[test]
    fn product_state_is_valid() {
        let dist = thermal_distribution(0.5, 12).unwrap().value;
        let s = BipartiteState::product(&dist, 0.3).unwrap();
        s.validate().unwrap();
        let after = s.conjugate(&jc_unitary(1.0, 0.4, 12));
        after.validate().unwrap();
        assert!(BipartiteState::product(&dist, 1.5).is_err());
    }

    #[test]
    fn top_mass_is_flagged() {
        let w = kick_oracle(&PhononDistribution::fock(5, 5), 1.0, 0.3, 0.5).unwrap();
        assert!(matches!(
            w.warnings[..],
            [Warning::TruncationTail { .. }, ..]
        ));
    }
}
