//! Small statistics helpers: least squares, normal CDF, KS distance.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
    /// Root mean square residual.
    pub rms_residual: f64,
}

impl LinearFit {
    /// Approximate 95% interval for the slope.
    pub fn slope_ci(&self) -> (f64, f64) {
        (self.slope - 1.96 * self.slope_se, self.slope + 1.96 * self.slope_se)
    }
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let f = linear_fit_full(points);
    (f.slope, f.intercept)
}

pub fn linear_fit_full(points: &[(f64, f64)]) -> LinearFit {
    let n = points.len() as f64;
    if points.is_empty() {
        return LinearFit { slope: 0.0, intercept: 0.0, slope_se: f64::INFINITY, rms_residual: 0.0 };
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let slope_se = if points.len() > 2 && sxx > 0.0 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    LinearFit { slope, intercept, slope_se, rms_residual: (sse / n).sqrt() }
}

pub fn standard_normal_cdf(z: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").cdf(z)
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// the standard normal.
pub fn ks_distance_normal(samples: &[f64]) -> f64 {
    let mut s: Vec<f64> = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &z)| {
            let f = standard_normal_cdf(z);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub fn mean_and_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, v.sqrt())
}
