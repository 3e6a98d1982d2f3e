//! Concentration bounds for statistics with the bounded-differences property.

use statrs::function::gamma::gamma;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("moment order must be positive, got {0}")]
    InvalidOrder(f64),
}

/// Confidence radius from McDiarmid's inequality with unit differences.
///
/// One-sided, for a function of `n` independent columns:
/// `sqrt((n/2) ln(1/alpha))`. Two-sided, for a function of `n` columns and
/// `n` requests (`2n` variables): `sqrt(n ln(2/alpha))`.
pub fn mcdiarmid_radius(n: u64, alpha: f64, two_sided: bool) -> Result<f64, BoundError> {
    if alpha.is_nan() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(BoundError::InvalidAlpha(alpha));
    }
    let n = n as f64;
    Ok(if two_sided { (n * (2.0 / alpha).ln()).sqrt() } else { (n / 2.0 * (1.0 / alpha).ln()).sqrt() })
}

/// Bound on the `p`-th absolute central moment: `p (n/2)^{p/2} Γ(p/2)`.
pub fn moment_bound(n: u64, p: f64) -> Result<f64, BoundError> {
    if p.is_nan() || p <= 0.0 {
        return Err(BoundError::InvalidOrder(p));
    }
    Ok(p * (n as f64 / 2.0).powf(p / 2.0) * gamma(p / 2.0))
}

/// Sample mean and unbiased sample variance (`0` for fewer than two values).
pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_values() {
        // sqrt(100 ln 20) and sqrt(200 ln 40)
        assert!((mcdiarmid_radius(200, 0.05, false).unwrap() - 17.3082).abs() < 1e-3);
        assert!((mcdiarmid_radius(200, 0.05, true).unwrap() - 27.1620).abs() < 1e-3);
        assert!(mcdiarmid_radius(200, 1.0 - 1e-12, false).unwrap() < 1e-4);
        assert!(mcdiarmid_radius(10, 0.0, false).is_err());
        assert!(mcdiarmid_radius(10, 1.0, true).is_err());
        assert!(mcdiarmid_radius(10, f64::NAN, true).is_err());
    }

    #[test]
    fn moment_values() {
        for n in [1u64, 7, 100, 1000] {
            assert!((moment_bound(n, 2.0).unwrap() - n as f64).abs() < 1e-9);
        }
        assert!((moment_bound(2, 4.0).unwrap() - 4.0).abs() < 1e-9);
        assert!(moment_bound(2, 0.0).is_err());
    }

    #[test]
    fn sample_moments() {
        let (m, v) = mean_variance(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((v - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(mean_variance(&[3.0]), (3.0, 0.0));
        assert!(mean_variance(&[]).0.is_nan());
    }
}
