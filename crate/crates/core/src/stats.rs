//! Deterministic summary statistics and the Kolmogorov–Smirnov distance.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// Pairwise summation in index order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Mean, unbiased variance, and the standard error of that variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub variance_se: f64,
}

pub fn moments(xs: &[f64]) -> Moments {
    let m = xs.len();
    let mu = mean(xs);
    if m < 2 {
        return Moments {
            count: m,
            mean: mu,
            variance: 0.0,
            variance_se: 0.0,
        };
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mu).powi(2)).collect();
    let fourth: Vec<f64> = sq.iter().map(|s| s * s).collect();
    let var = pairwise_sum(&sq) / (m - 1) as f64;
    let m4 = pairwise_sum(&fourth) / m as f64;
    Moments {
        count: m,
        mean: mu,
        variance: var,
        variance_se: ((m4 - var * var).max(0.0) / m as f64).sqrt(),
    }
}

/// Population moments of a finite population (exact-enumeration mode).
pub fn population_moments(xs: &[f64]) -> Moments {
    let m = xs.len();
    let mu = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - mu).powi(2)).collect();
    Moments {
        count: m,
        mean: mu,
        variance: if m == 0 { 0.0 } else { pairwise_sum(&sq) / m as f64 },
        variance_se: 0.0,
    }
}

/// Sup distance between the empirical CDF of `values` and `N(0, σ²)`, or
/// the point mass at 0 when `σ = 0`.
pub fn ks_statistic(values: &[f64], sigma: f64) -> f64 {
    let m = values.len();
    if m == 0 {
        return 0.0;
    }
    if sigma == 0.0 {
        let neg = values.iter().filter(|&&v| v < 0.0).count();
        let pos = values.iter().filter(|&&v| v > 0.0).count();
        return neg.max(pos) as f64 / m as f64;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let normal = Normal::new(0.0, sigma).expect("positive σ");
    let mf = m as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            ((i + 1) as f64 / mf - f).max(f - i as f64 / mf)
        })
        .fold(0.0, f64::max)
}

/// `Φ⁻¹(p)` for the standard normal.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(p)
}
