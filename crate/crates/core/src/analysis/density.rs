//! Per-iteration, per-edge-type LLR densities.

use serde::{Deserialize, Serialize};
use libm::erfc;

use super::jfunc::j_function;
use super::AnalysisError;

/// Histogram support used by Monte Carlo density evolution.
pub const HISTOGRAM_RANGE: f64 = 38.0;
pub const HISTOGRAM_BINS: usize = 760;

/// Density of the variable-to-check message on one edge type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EdgeDensity {
    /// Consistent Gaussian `N(mean, 2 mean)`; `mean = 0` is a point mass at 0.
    Gaussian { mean: f64 },
    /// Equal-width bins over `[-HISTOGRAM_RANGE, HISTOGRAM_RANGE]`, with the
    /// empirical sample mean and mutual information.
    Histogram { masses: Vec<f64>, mean: f64, mutual_information: f64 },
}

impl EdgeDensity {
    pub fn mean(&self) -> f64 {
        match self {
            Self::Gaussian { mean } | Self::Histogram { mean, .. } => *mean,
        }
    }

    pub fn mutual_information(&self) -> f64 {
        match self {
            Self::Gaussian { mean } => j_function(*mean),
            Self::Histogram { mutual_information, .. } => *mutual_information,
        }
    }

    /// `P(|X| <= x)`.
    pub fn abs_cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            Self::Gaussian { mean } => {
                if *mean <= 0.0 {
                    return 1.0;
                }
                let s = (4.0 * mean).sqrt(); // sqrt(2 var)
                // P(X > x) + P(X < -x), both from erfc
                1.0 - 0.5 * erfc((x - mean) / s) - 0.5 * erfc((x + mean) / s)
            }
            Self::Histogram { masses, .. } => {
                let w = 2.0 * HISTOGRAM_RANGE / masses.len() as f64;
                masses
                    .iter()
                    .enumerate()
                    .map(|(k, &p)| {
                        let lo = -HISTOGRAM_RANGE + k as f64 * w;
                        let hi = lo + w;
                        // fraction of the bin inside [-x, x], mass spread uniformly
                        let overlap = (hi.min(x) - lo.max(-x)).max(0.0);
                        p * overlap / w
                    })
                    .sum::<f64>()
                    .min(1.0)
            }
        }
    }

    /// Centres of `bins` equal-width bins over the histogram support.
    pub fn bin_centres(bins: usize) -> Vec<f64> {
        let w = 2.0 * HISTOGRAM_RANGE / bins as f64;
        (0..bins).map(|k| -HISTOGRAM_RANGE + (k as f64 + 0.5) * w).collect()
    }
}

/// VN-to-CN densities entering the check update of iterations `1..=T`.
///
/// Entry `(t, i)` lives at `(t-1)*e + (i-1)`; iteration 1 holds the channel
/// density (0 on edges from punctured variables).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDensitySchedule {
    pub iterations: usize,
    pub edge_types: usize,
    pub channel_esn0_db: f64,
    pub densities: Vec<EdgeDensity>,
}

impl EdgeDensitySchedule {
    pub fn get(&self, t: usize, edge_type: usize) -> &EdgeDensity {
        &self.densities[(t - 1) * self.edge_types + (edge_type - 1)]
    }

    pub fn mean(&self, t: usize, edge_type: usize) -> f64 {
        self.get(t, edge_type).mean()
    }

    /// Checks shape, nonnegative means and histogram normalization.
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.densities.len() != self.iterations * self.edge_types {
            return Err(AnalysisError::Schedule(format!(
                "{} densities for {} iterations x {} edge types",
                self.densities.len(),
                self.iterations,
                self.edge_types
            )));
        }
        for (k, d) in self.densities.iter().enumerate() {
            let (t, i) = (k / self.edge_types + 1, k % self.edge_types + 1);
            match d {
                EdgeDensity::Gaussian { mean } if !(*mean >= 0.0 && mean.is_finite()) => {
                    return Err(AnalysisError::Schedule(format!("mean {mean} at t={t}, type {i}")));
                }
                EdgeDensity::Histogram { masses, .. } => {
                    let total: f64 = masses.iter().sum();
                    if (total - 1.0).abs() > 1e-9 || masses.iter().any(|&p| p < 0.0) {
                        return Err(AnalysisError::Schedule(format!("histogram mass {total} at t={t}, type {i}")));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, AnalysisError> {
        serde_json::to_string_pretty(self).map_err(|e| AnalysisError::Schedule(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, AnalysisError> {
        let s: Self = serde_json::from_str(text).map_err(|e| AnalysisError::Schedule(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_abs_cdf() {
        let d = EdgeDensity::Gaussian { mean: 2.0 };
        assert_eq!(d.abs_cdf(-1.0), 0.0);
        assert_abs_diff_eq!(d.abs_cdf(0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.abs_cdf(60.0), 1.0, epsilon = 1e-15);
        // P(|X| <= 2) with X ~ N(2, 4): Phi(0) - Phi(-2)
        assert_abs_diff_eq!(d.abs_cdf(2.0), 0.5 - 0.022_750_131_948_179_2, epsilon = 1e-12);
        assert_eq!(EdgeDensity::Gaussian { mean: 0.0 }.abs_cdf(0.0), 1.0);
    }

    #[test]
    fn histogram_abs_cdf() {
        let mut masses = vec![0.0; HISTOGRAM_BINS];
        masses[HISTOGRAM_BINS / 2] = 1.0; // bin [0, 0.1)
        let d = EdgeDensity::Histogram { masses, mean: 0.05, mutual_information: 0.0 };
        assert_abs_diff_eq!(d.abs_cdf(0.05), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.abs_cdf(1.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn validation_and_json() {
        let s = EdgeDensitySchedule {
            iterations: 2,
            edge_types: 1,
            channel_esn0_db: 0.0,
            densities: vec![EdgeDensity::Gaussian { mean: 4.0 }, EdgeDensity::Gaussian { mean: 6.5 }],
        };
        s.validate().unwrap();
        let back = EdgeDensitySchedule::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        let bad = EdgeDensitySchedule { densities: vec![EdgeDensity::Gaussian { mean: -1.0 }; 2], ..s.clone() };
        assert!(bad.validate().is_err());
        let short = EdgeDensitySchedule { iterations: 3, ..s };
        assert!(short.validate().is_err());
    }
}
