use crate::diagnostics::{Warned, Warning};
use crate::error::{Error, Result};

/// Default bound on the population allowed to sit at the top level.
pub const TAIL_TOL: f64 = 1e-12;

/// Entries in `(-NEGATIVE_CLAMP, 0)` are rounding noise and get clamped.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// Accepted deviation of the total probability from one.
pub const SUM_TOL: f64 = 1e-9;

/// Drift below this is left alone; above it the vector is renormalized.
pub const DRIFT_TOL: f64 = 1e-12;

/// Truncation level used when the caller does not pick one.
pub fn default_n_max(n_th: f64) -> usize {
    let scaled = (20.0 + 12.0 * n_th.max(0.0)).ceil() as usize;
    scaled.max(60)
}

/// Populations `p_0..=p_{n_max}` of the phonon number states.
#[derive(Debug, Clone, PartialEq)]
pub struct PhononDistribution {
    populations: Vec<f64>,
}

impl PhononDistribution {
    /// Wraps an already normalized population vector.
    ///
    /// Rounding-level negatives are clamped; genuinely negative entries and
    /// vectors that are off by more than [`SUM_TOL`] are rejected.
    pub fn from_populations(populations: Vec<f64>) -> Result<Self> {
        if populations.len() < 2 {
            return Err(Error::Domain(
                "a distribution needs at least two levels".into(),
            ));
        }
        let sum: f64 = populations.iter().sum();
        if !sum.is_finite() || (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::NotNormalized(sum));
        }
        Ok(sanitize(populations)?.value)
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::Domain(
                "a distribution needs at least two levels".into(),
            ));
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < -NEGATIVE_CLAMP)
        {
            return Err(Error::NegativePopulation { index, value });
        }
        let mut weights: Vec<f64> = weights.into_iter().map(|w| w.max(0.0)).collect();
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::NotNormalized(sum));
        }
        weights.iter_mut().for_each(|w| *w /= sum);
        Ok(Self {
            populations: weights,
        })
    }

    pub fn vacuum(n_max: usize) -> Self {
        Self::fock(0, n_max)
    }

    /// All mass on `n` phonons.
    pub fn fock(n: usize, n_max: usize) -> Self {
        let n_max = n_max.max(1).max(n);
        let mut populations = vec![0.0; n_max + 1];
        populations[n] = 1.0;
        Self { populations }
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn into_populations(self) -> Vec<f64> {
        self.populations
    }

    pub fn n_max(&self) -> usize {
        self.populations.len() - 1
    }

    pub fn len(&self) -> usize {
        self.populations.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn p(&self, n: usize) -> f64 {
        self.populations.get(n).copied().unwrap_or(0.0)
    }

    pub fn vacuum_probability(&self) -> f64 {
        self.populations[0]
    }

    pub fn tail_mass(&self) -> f64 {
        self.populations[self.n_max()]
    }

    pub fn mean(&self) -> f64 {
        self.populations
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.populations
            .iter()
            .enumerate()
            .map(|(n, p)| (n as f64 - mean).powi(2) * p)
            .sum()
    }

    /// Checks the tail against `tol`.
    pub fn check_tail(&self, tol: f64) -> Result<()> {
        let tail = self.tail_mass();
        if tail > tol {
            return Err(Error::TruncationOverflow {
                n_max: self.n_max(),
                tail,
                tol,
            });
        }
        Ok(())
    }

    /// Same distribution on a different truncation.
    ///
    /// Shrinking is only allowed when the dropped levels carry less than
    /// [`TAIL_TOL`]; their mass is folded back by renormalization.
    pub fn resized(&self, n_max: usize) -> Result<Self> {
        let n_max = n_max.max(1);
        if n_max >= self.n_max() {
            let mut populations = self.populations.clone();
            populations.resize(n_max + 1, 0.0);
            return Ok(Self { populations });
        }
        let dropped: f64 = self.populations[n_max + 1..].iter().sum();
        if dropped > TAIL_TOL {
            return Err(Error::TruncationOverflow {
                n_max,
                tail: dropped,
                tol: TAIL_TOL,
            });
        }
        Self::from_weights(self.populations[..=n_max].to_vec())
    }

    /// Largest componentwise absolute difference (shorter vector padded with zeros).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let len = self.len().max(other.len());
        (0..len)
            .map(|n| (self.p(n) - other.p(n)).abs())
            .fold(0.0, f64::max)
    }
}

/// Clamps rounding negatives and removes drift above [`DRIFT_TOL`].
pub(crate) fn sanitize(mut populations: Vec<f64>) -> Result<Warned<PhononDistribution>> {
    for (index, p) in populations.iter_mut().enumerate() {
        if !p.is_finite() || *p <= -NEGATIVE_CLAMP {
            return Err(Error::NegativePopulation { index, value: *p });
        }
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let sum: f64 = populations.iter().sum();
    let drift = sum - 1.0;
    let mut warnings = Vec::new();
    if drift.abs() > DRIFT_TOL {
        if sum <= 0.0 {
            return Err(Error::NotNormalized(sum));
        }
        populations.iter_mut().for_each(|p| *p /= sum);
        warnings.push(Warning::Renormalized { drift });
    }
    Ok(Warned::new(PhononDistribution { populations }, warnings))
}

/// Mean phonon number `sum n p_n`.
pub fn mean_phonon(dist: &PhononDistribution) -> f64 {
    dist.mean()
}

/// Geometric (thermal) occupation with mean `n_th`, truncated at `n_max`.
pub fn thermal_distribution(n_th: f64, n_max: usize) -> Result<Warned<PhononDistribution>> {
    if !(n_th >= 0.0) || !n_th.is_finite() {
        return Err(Error::Domain(format!(
            "thermal occupation must be >= 0, got {n_th}"
        )));
    }
    let n_max = n_max.max(1);
    if n_th == 0.0 {
        return Ok(Warned::clean(PhononDistribution::vacuum(n_max)));
    }
    let ratio = n_th / (n_th + 1.0);
    let mut weights = Vec::with_capacity(n_max + 1);
    let mut w = 1.0;
    for _ in 0..=n_max {
        weights.push(w);
        w *= ratio;
    }
    let dist = PhononDistribution::from_weights(weights)?;
    let mut warnings = Vec::new();
    let bound = ratio.powi(n_max as i32);
    if bound > TAIL_TOL {
        warnings.push(Warning::TruncationTail {
            n_max,
            tail: dist.tail_mass(),
        });
    }
    Ok(Warned::new(dist, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_and_fock_means() {
        assert_eq!(PhononDistribution::vacuum(10).mean(), 0.0);
        assert_eq!(PhononDistribution::fock(3, 10).mean(), 3.0);
    }

    #[test]
    fn thermal_zero_is_vacuum() {
        let d = thermal_distribution(0.0, 20).unwrap();
        assert!(d.is_clean());
        assert_eq!(d.value, PhononDistribution::vacuum(20));
    }

    #[test]
    fn thermal_one_halves() {
        let d = thermal_distribution(1.0, 200).unwrap().value;
        assert!((d.p(0) - 0.5).abs() < 1e-12);
        for n in 1..30 {
            assert!((d.p(n) / d.p(n - 1) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn thermal_mean_matches_occupation() {
        let d = thermal_distribution(1.7, 60).unwrap();
        assert!(d.is_clean());
        assert!((d.value.mean() - 1.7).abs() / 1.7 < 1e-6);
        let d = thermal_distribution(3.0, 400).unwrap().value;
        assert!((d.mean() - 3.0).abs() / 3.0 < 1e-6);
    }

    #[test]
    fn thermal_warns_on_short_truncation() {
        let d = thermal_distribution(10.0, 20).unwrap();
        assert!(matches!(
            d.warnings[0],
            Warning::TruncationTail { n_max: 20, .. }
        ));
    }

    #[test]
    fn thermal_rejects_negative_occupation() {
        assert!(thermal_distribution(-0.1, 10).is_err());
    }

    #[test]
    fn clamps_rounding_negatives() {
        let d = PhononDistribution::from_populations(vec![1.0 + 5e-13, -5e-13, 0.0]).unwrap();
        assert_eq!(d.p(1), 0.0);
        // drift below DRIFT_TOL is left alone
        assert_eq!(d.p(0), 1.0 + 5e-13);
    }

    #[test]
    fn rejects_real_negatives() {
        let err = PhononDistribution::from_populations(vec![1.1, -0.1, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NegativePopulation { index: 1, .. }));
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(
            PhononDistribution::from_populations(vec![0.5, 0.4]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn default_truncation() {
        assert_eq!(default_n_max(0.0), 60);
        assert_eq!(default_n_max(1.7), 60);
        assert_eq!(default_n_max(10.0), 140);
    }

    #[test]
    fn resize_pads_and_shrinks() {
        let d = thermal_distribution(0.5, 80).unwrap().value;
        let bigger = d.resized(120).unwrap();
        assert_eq!(bigger.n_max(), 120);
        assert_eq!(bigger.p(81), 0.0);
        assert!(d.resized(5).is_err());
        let small = bigger.resized(80).unwrap();
        assert!(small.max_abs_diff(&d) < 1e-15);
    }
}
