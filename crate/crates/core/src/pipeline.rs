//! End-to-end adaptive threshold: sorted spectrum in, threshold and retained rank out.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pseudo_noise::{SingularSpectrum, Strategy};
use crate::spectral::{self, AtomicCdf, ShapeRatio, DEFAULT_TOL};

/// Caller-supplied settings. `k` is an upper bound on the signal rank and has no default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScreenotParams {
    pub k: usize,
    pub strategy: Strategy,
    pub tol: f64,
}

impl ScreenotParams {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            strategy: Strategy::Impute,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub theta_hat: f64,
    /// Number of singular values strictly above `theta_hat`.
    pub retained_rank: usize,
    pub strategy: Strategy,
    pub k: usize,
    pub gamma_used: f64,
    pub pseudo_cdf: AtomicCdf,
    pub solver_iterations: usize,
    pub psi_at_theta: f64,
}

/// Transposes `(n, p)` if needed so that `p <= n`, returning `(n, p, p / n)`.
pub fn normalize_shape(n: usize, p: usize) -> (usize, usize, f64) {
    let (n, p) = (n.max(p), n.min(p));
    (n, p, p as f64 / n as f64)
}

/// Computes the adaptive hard threshold for an observed spectrum.
///
/// The guarantees behind the threshold assume `k >= r`; with an
/// underestimated rank the computation still runs but the result carries no
/// optimality guarantee.
pub fn screenot(spectrum: &SingularSpectrum, params: &ScreenotParams) -> Result<ThresholdResult> {
    let gamma = ShapeRatio::new(spectrum.gamma())?;
    let pseudo = params.strategy.pseudo_noise(spectrum, params.k)?;
    let solve = spectral::solve_optimal_threshold(&pseudo, gamma, params.tol)?;
    let theta = solve.root;
    let psi_at_theta = spectral::psi(theta, &pseudo, gamma)?;
    Ok(ThresholdResult {
        theta_hat: theta,
        retained_rank: retained_rank(spectrum.values(), theta),
        strategy: params.strategy,
        k: params.k,
        gamma_used: gamma.get(),
        pseudo_cdf: pseudo,
        solver_iterations: solve.iterations,
        psi_at_theta,
    })
}

/// Convenience wrapper taking raw values and the matrix shape.
pub fn screenot_values(values: &[f64], n: usize, p: usize, params: &ScreenotParams) -> Result<ThresholdResult> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("singular values must be finite".into()));
    }
    let spectrum = SingularSpectrum::new(values.to_vec(), n, p)?;
    screenot(&spectrum, params)
}

/// Count of sorted-nonincreasing `values` strictly above `theta`.
pub fn retained_rank(values: &[f64], theta: f64) -> usize {
    values.partition_point(|&v| v > theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_normalization() {
        assert_eq!(normalize_shape(500, 1000), (1000, 500, 0.5));
        assert_eq!(normalize_shape(500, 500).2, 1.0);
        assert_eq!(normalize_shape(3, 7).2, 3.0 / 7.0);
    }

    #[test]
    fn all_ones_spectrum() {
        let r = screenot_values(&[1.0; 40], 40, 40, &ScreenotParams::new(0)).unwrap();
        assert!((r.theta_hat - 3f64.sqrt()).abs() <= 1e-9);
        assert_eq!(r.retained_rank, 0);
        assert!((r.psi_at_theta + 4.0).abs() < 1e-6);
        assert!(r.theta_hat > r.pseudo_cdf.bulk_edge());
    }

    #[test]
    fn retained_rank_counts_strictly_above() {
        assert_eq!(retained_rank(&[5.0, 3.0, 3.0, 1.0], 3.0), 1);
        assert_eq!(retained_rank(&[5.0, 3.0, 3.0, 1.0], 0.5), 4);
        assert_eq!(retained_rank(&[5.0, 3.0], 9.0), 0);
    }

    #[test]
    fn errors_propagate() {
        let p = ScreenotParams::new(3);
        assert!(matches!(
            screenot_values(&[5.0, 4.0, 3.0, 2.0, 1.0], 5, 5, &p),
            Err(Error::RankBound { .. })
        ));
        assert!(screenot_values(&[1.0, f64::NAN], 2, 2, &ScreenotParams::new(0)).is_err());
        let zero = ScreenotParams::new(1).with_strategy(Strategy::Winsorize);
        assert!(matches!(screenot_values(&[2.0, 0.0], 2, 2, &zero), Err(Error::DegenerateCdf)));
    }

    #[test]
    fn deterministic() {
        let v: Vec<f64> = (0..60).map(|i| 3.0 - 0.04 * i as f64).collect();
        let p = ScreenotParams::new(5);
        let a = screenot_values(&v, 120, 60, &p).unwrap();
        let b = screenot_values(&v, 120, 60, &p).unwrap();
        assert_eq!(a.theta_hat.to_bits(), b.theta_hat.to_bits());
    }
}
