use std::ops::{Add, Div, Mul, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{KickMap, ProtocolParams};

/// Linear generator `r_a (M - 1) + L` restricted to populations.
///
/// Every process moves one phonon at a time, so the matrix is tridiagonal
/// and is stored as three bands:
///
/// * `lower[m] = G[m+1][m]`, the total rate `m -> m+1`,
/// * `upper[m] = G[m][m+1]`, the total rate `m+1 -> m`,
/// * `diag[m]  = -(lower[m] + upper[m-1])`, the escape rate of level `m`.
///
/// Columns therefore sum to zero and off-diagonals are non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    params: ProtocolParams,
    kick: KickMap,
}

impl GeneratorMatrix {
    /// Assembles a generator from explicit birth (`lower`) and death (`upper`) rates.
    pub(crate) fn from_rates(
        lower: Vec<f64>,
        upper: Vec<f64>,
        params: ProtocolParams,
        kick: KickMap,
    ) -> Self {
        let n = lower.len();
        let diag = (0..=n)
            .map(|m| {
                let up = if m < n { lower[m] } else { 0.0 };
                let down = if m > 0 { upper[m - 1] } else { 0.0 };
                -(up + down)
            })
            .collect();
        Self {
            lower,
            diag,
            upper,
            params,
            kick,
        }
    }

    pub fn n_max(&self) -> usize {
        self.diag.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn kick(&self) -> &KickMap {
        &self.kick
    }

    /// Rate `m -> m+1`.
    pub fn birth_rate(&self, m: usize) -> f64 {
        self.lower.get(m).copied().unwrap_or(0.0)
    }

    /// Rate `m -> m-1`.
    pub fn death_rate(&self, m: usize) -> f64 {
        if m == 0 {
            0.0
        } else {
            self.upper.get(m - 1).copied().unwrap_or(0.0)
        }
    }

    /// Largest escape rate; bounds the spectral radius by twice this value.
    pub fn max_rate(&self) -> f64 {
        self.diag.iter().fold(0.0, |acc, d| acc.max(d.abs()))
    }

    /// `G p`.
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        self.apply_into(p, &mut out);
        out
    }

    pub fn apply_into(&self, p: &[f64], out: &mut [f64]) {
        let n = self.diag.len();
        debug_assert_eq!(p.len(), n);
        for i in 0..n {
            let mut acc = self.diag[i] * p[i];
            if i > 0 {
                acc += self.lower[i - 1] * p[i - 1];
            }
            if i + 1 < n {
                acc += self.upper[i] * p[i + 1];
            }
            out[i] = acc;
        }
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|j| {
                let mut s = self.diag[j];
                if j > 0 {
                    s += self.upper[j - 1];
                }
                if j < self.n_max() {
                    s += self.lower[j];
                }
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.lower[i];
                m[(i, i + 1)] = self.upper[i];
            }
        }
        m
    }

    /// Solves `(h G - z I) x = rhs`.
    ///
    /// With `Re z > 0` the shifted matrix is strictly column diagonally
    /// dominant, so elimination without pivoting is stable.
    pub(crate) fn solve_shifted<T>(&self, h: f64, z: T, rhs: &[T]) -> Vec<T>
    where
        T: Copy + From<f64> + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
    {
        let n = self.dim();
        let mut c = Vec::with_capacity(n);
        let mut d = Vec::with_capacity(n);
        let mut pivot = T::from(h * self.diag[0]) - z;
        c.push(if n > 1 {
            T::from(h * self.upper[0]) / pivot
        } else {
            T::from(0.0)
        });
        d.push(rhs[0] / pivot);
        for i in 1..n {
            let low = T::from(h * self.lower[i - 1]);
            pivot = T::from(h * self.diag[i]) - z - low * c[i - 1];
            c.push(if i + 1 < n {
                T::from(h * self.upper[i]) / pivot
            } else {
                T::from(0.0)
            });
            d.push((rhs[i] - low * d[i - 1]) / pivot);
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] = x[i] - c[i] * x[i + 1];
        }
        x
    }
}

/// Kick tables for `params` at truncation `n_max`.
pub fn kick_for(params: &ProtocolParams, n_max: usize) -> Result<KickMap> {
    KickMap::from_pulse_area(params.pulse_area(), params.p_e, n_max)
}

/// Assembles the coarse-grained generator.
///
/// The kick part uses `kick` (including its excited-state probability); the
/// damping part uses `params.kappa` and `params.n_th`. Thermal excitation out
/// of the top level is dropped so the truncated chain conserves probability.
pub fn build_generator(
    params: &ProtocolParams,
    kick: &KickMap,
    n_max: usize,
) -> Result<GeneratorMatrix> {
    params.validate()?;
    if kick.n_max() != n_max {
        return Err(Error::SizeMismatch {
            expected: n_max + 1,
            found: kick.n_max() + 1,
        });
    }
    let r_a = params.r_a;
    let kappa = params.kappa;
    let n_th = params.n_th;

    let lower: Vec<f64> = (0..n_max)
        .map(|m| r_a * kick.up_probability(m) + kappa * n_th * (m + 1) as f64)
        .collect();
    let upper: Vec<f64> = (1..=n_max)
        .map(|m| r_a * kick.down_probability(m) + kappa * (n_th + 1.0) * m as f64)
        .collect();
    Ok(GeneratorMatrix::from_rates(
        lower,
        upper,
        *params,
        kick.clone(),
    ))
}

/// Generator of free thermal damping alone (no kicks).
pub fn build_damping_generator(params: &ProtocolParams, n_max: usize) -> Result<GeneratorMatrix> {
    let free = ProtocolParams {
        r_a: 0.0,
        ..*params
    };
    let kick = KickMap::from_pulse_area(0.0, 0.0, n_max)?;
    build_generator(&free, &kick, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn fig2(n_max: usize) -> (ProtocolParams, KickMap) {
        let p =
            ProtocolParams::from_dimensionless(2.0 * PI * 1e7, PI / 8.0, 133.0, PI * 1e3, 1.7, 0.0)
                .unwrap();
        let k = kick_for(&p, n_max).unwrap();
        (p, k)
    }

    #[test]
    fn columns_sum_to_zero() {
        let (p, k) = fig2(60);
        let g = build_generator(&p, &k, 60).unwrap();
        let scale = g.max_rate();
        for s in g.column_sums() {
            assert!(s.abs() <= 1e-12 * scale, "column sum {s}");
        }
        assert!(g.lower().iter().chain(g.upper()).all(|&r| r >= 0.0));
    }

    #[test]
    fn dense_matches_bands() {
        let (p, k) = fig2(12);
        let g = build_generator(&p, &k, 12).unwrap();
        let dense = g.to_dense();
        let v: Vec<f64> = (0..13).map(|i| (i as f64 * 0.37).sin()).collect();
        let banded = g.apply(&v);
        let full = &dense * nalgebra::DVector::from_vec(v);
        for i in 0..13 {
            assert!((banded[i] - full[i]).abs() < 1e-9 * g.max_rate());
        }
    }

    #[test]
    fn size_mismatch() {
        let (p, k) = fig2(20);
        assert!(matches!(
            build_generator(&p, &k, 30),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn shifted_solve_real_and_complex() {
        let (p, k) = fig2(25);
        let g = build_generator(&p, &k, 25).unwrap();
        let h = 3.0 / g.max_rate();
        let dense = g.to_dense() * h;
        let rhs: Vec<f64> = (0..26).map(|i| 1.0 / (1.0 + i as f64)).collect();

        let x = g.solve_shifted(h, 0.7, &rhs);
        let mut shifted = dense.clone();
        for i in 0..26 {
            shifted[(i, i)] -= 0.7;
        }
        let back = &shifted * nalgebra::DVector::from_vec(x);
        for i in 0..26 {
            assert!((back[i] - rhs[i]).abs() < 1e-12);
        }

        let z = Complex64::new(2.0, 1.5);
        let crhs: Vec<Complex64> = rhs.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        let xc = g.solve_shifted(h, z, &crhs);
        for i in 0..26 {
            let mut acc = (dense[(i, i)] - z) * xc[i];
            if i > 0 {
                acc += dense[(i, i - 1)] * xc[i - 1];
            }
            if i < 25 {
                acc += dense[(i, i + 1)] * xc[i + 1];
            }
            assert!((acc - crhs[i]).norm() < 1e-12);
        }
    }
}
