//! Streaming mean/variance and sample cumulants.

use serde::{Deserialize, Serialize};

/// Count, mean and sum of squared deviations; merges are order-sensitive only
/// in floating-point rounding, so callers merge in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMoments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        self.m2 / (self.count - 1) as f64
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Unbiased sample cumulants (k-statistics) with asymptotic standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCumulants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub se1: f64,
    pub se2: f64,
    pub se3: f64,
    pub samples: u64,
}

/// k-statistics `k1, k2, k3` of `xs` by two passes over the data.
///
/// Standard errors come from the large-sample variances of the sample
/// central moments: `m2/n`, `(m4 - m2^2)/n`, `(m6 - m3^2 - 6 m4 m2 + 9 m2^3)/n`.
pub fn k_statistics(xs: &[f64]) -> EmpiricalCumulants {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let mut c = [0.0f64; 7];
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        c[2] += d2;
        c[3] += d2 * d;
        c[4] += d2 * d2;
        c[6] += d2 * d2 * d2;
    }
    let (m2, m3, m4, m6) = (c[2] / n, c[3] / n, c[4] / n, c[6] / n);
    let k2 = n / (n - 1.0) * m2;
    let k3 = n * n / ((n - 1.0) * (n - 2.0)) * m3;
    EmpiricalCumulants {
        k1: mean,
        k2,
        k3,
        se1: (m2 / n).sqrt(),
        se2: ((m4 - m2 * m2) / n).max(0.0).sqrt(),
        se3: ((m6 - m3 * m3 - 6.0 * m4 * m2 + 9.0 * m2.powi(3)) / n).max(0.0).sqrt(),
        samples: xs.len() as u64,
    }
}
