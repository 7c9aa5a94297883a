//! Ordinary least squares on raw (unstandardized) variables.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A fitted simple regression `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; `None` when there are no residual
    /// degrees of freedom (fewer than three points).
    pub stderr_slope: Option<f64>,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("regression needs at least {min} points, got {got}")]
    InsufficientPoints { min: usize, got: usize },
    #[error("regressor has zero variance")]
    DegenerateX,
}

/// Least-squares fit through centered sums. Two points determine a line;
/// a slope standard error additionally needs residual degrees of freedom.
pub fn fit_ols(points: &[(f64, f64)]) -> Result<RegressionFit, FitError> {
    let n = points.len();
    if n < 2 {
        return Err(FitError::InsufficientPoints { min: 2, got: n });
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / nf;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FitError::DegenerateX);
    }
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let stderr_slope = if n > 2 {
        let rss: f64 = points
            .iter()
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        Some((rss / (nf - 2.0) / sxx).sqrt())
    } else {
        None
    };
    Ok(RegressionFit {
        slope,
        intercept,
        stderr_slope,
        n_points: n,
    })
}

/// Fit requiring enough points for inference; used by the experiment
/// pipelines, which refuse to regress over degenerate populations.
pub fn fit_ols_checked(points: &[(f64, f64)], min_points: usize) -> Result<RegressionFit, FitError> {
    if points.len() < min_points {
        return Err(FitError::InsufficientPoints {
            min: min_points,
            got: points.len(),
        });
    }
    fit_ols(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn two_point_identity() {
        let fit = fit_ols(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_eq!(fit.slope, 1.0);
        assert_eq!(fit.intercept, 0.0);
        assert_eq!(fit.stderr_slope, None);
        assert_eq!(fit.n_points, 2);
    }

    #[test]
    fn constant_response_has_zero_slope() {
        let points: Vec<(f64, f64)> = (0..10).map(|i| (f64::from(i), 3.5)).collect();
        let fit = fit_ols(&points).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert!((fit.intercept - 3.5).abs() < 1e-12);
        assert_eq!(fit.stderr_slope, Some(0.0));
    }

    #[test]
    fn degenerate_inputs_are_refused() {
        assert_eq!(
            fit_ols(&[(1.0, 1.0)]),
            Err(FitError::InsufficientPoints { min: 2, got: 1 })
        );
        assert_eq!(
            fit_ols(&[(2.0, 1.0), (2.0, 5.0)]),
            Err(FitError::DegenerateX)
        );
        assert_eq!(
            fit_ols_checked(&[(0.0, 0.0), (1.0, 1.0)], 3),
            Err(FitError::InsufficientPoints { min: 3, got: 2 })
        );
    }

    /// Cramer-rule solution of the normal equations, as an independent
    /// oracle for the centered-sums route.
    fn normal_equations(points: &[(f64, f64)]) -> (f64, f64) {
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|(x, _)| x).sum();
        let sy: f64 = points.iter().map(|(_, y)| y).sum();
        let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
        let det = n * sxx - sx * sx;
        let intercept = (sy * sxx - sx * sxy) / det;
        let slope = (n * sxy - sx * sy) / det;
        (slope, intercept)
    }

    #[test]
    fn matches_normal_equations_oracle() {
        let mut rng = crate::seed::rng(0x015);
        for _ in 0..200 {
            let n = rng.random_range(3..40);
            let slope_true: f64 = rng.random_range(-5.0..5.0);
            let intercept_true: f64 = rng.random_range(-10.0..10.0);
            let points: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let x: f64 = rng.random_range(-20.0..20.0);
                    let noise: f64 = rng.random_range(-1.0..1.0);
                    (x, intercept_true + slope_true * x + noise)
                })
                .collect();
            let fit = fit_ols(&points).unwrap();
            let (slope_o, intercept_o) = normal_equations(&points);
            let scale = slope_o.abs().max(1.0);
            assert!((fit.slope - slope_o).abs() / scale <= 1e-9);
            let iscale = intercept_o.abs().max(1.0);
            assert!((fit.intercept - intercept_o).abs() / iscale <= 1e-9);

            // Residuals orthogonal to the regressor.
            let dot: f64 = points
                .iter()
                .map(|(x, y)| (y - fit.intercept - fit.slope * x) * x)
                .sum();
            let norm: f64 = points.iter().map(|(x, _)| x * x).sum::<f64>().max(1.0);
            assert!((dot / norm).abs() <= 1e-9, "residual leakage {dot}");
        }
    }

    #[test]
    fn stderr_matches_direct_formula() {
        let points = [
            (1.0, 2.1),
            (2.0, 3.9),
            (3.0, 6.2),
            (4.0, 7.8),
            (5.0, 10.1),
        ];
        let fit = fit_ols(&points).unwrap();
        let mean_x = 3.0;
        let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
        let rss: f64 = points
            .iter()
            .map(|(x, y)| (y - fit.intercept - fit.slope * x).powi(2))
            .sum();
        let expect = (rss / 3.0 / sxx).sqrt();
        assert!((fit.stderr_slope.unwrap() - expect).abs() < 1e-15);
    }
}
