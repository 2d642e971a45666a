//! Small sample statistics used by the experiment harness.

use serde::{Deserialize, Serialize};

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    /// Standard error of the mean (sample standard deviation / sqrt(n)).
    pub stderr: f64,
}

impl MeanEstimate {
    /// Sample mean and its standard error, accumulated in input order.
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let (mut n, mut mean, mut m2) = (0u64, 0.0, 0.0);
        for x in values {
            n += 1;
            let delta = x - mean;
            mean += delta / n as f64;
            m2 += delta * (x - mean);
        }
        if n == 0 {
            return MeanEstimate {
                mean: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
        MeanEstimate {
            mean,
            stderr: (var / n as f64).sqrt(),
        }
    }

    pub fn ci99(&self) -> f64 {
        Z99 * self.stderr
    }

    /// `mean - k * stderr <= bound`: no significant excess over `bound`.
    pub fn consistent_with_upper(&self, bound: f64, k: f64) -> bool {
        self.mean - k * self.stderr <= bound
    }

    /// `mean + k * stderr >= bound`.
    pub fn consistent_with_lower(&self, bound: f64, k: f64) -> bool {
        self.mean + k * self.stderr >= bound
    }
}

/// Ordinary least-squares slope of `y` on `x` with its standard error.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Some((slope, (rss / (nf - 2.0) / sxx).sqrt()))
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and
/// the continuous CDF `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        // Step over ties so the empirical CDF is evaluated once per jump.
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let f = cdf(x);
        d = d.max((j as f64 / n - f).abs()).max((f - i as f64 / n).abs());
        i = j;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_stderr() {
        let m = MeanEstimate::from_values([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        // sample variance 5/3
        assert!((m.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(MeanEstimate::from_values([]).mean.is_nan());
        assert_eq!(MeanEstimate::from_values([7.0]).stderr, 0.0);
    }

    #[test]
    fn slope_of_exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let (b, se) = ols_slope(&x, &y).unwrap();
        assert!((b + 0.5).abs() < 1e-14);
        assert!(se < 1e-12);
        assert!(ols_slope(&x[..2], &y[..2]).is_none());
    }

    #[test]
    fn ks_of_uniform_grid() {
        let samples: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_distance(&samples, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
        // A point mass against a continuous CDF.
        let d = ks_distance(&[0.5; 10], |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5).abs() < 1e-12);
    }
}
