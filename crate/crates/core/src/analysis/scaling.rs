//! Expected scaling coefficient of the iteration-dependent min-sum rule.
//!
//! Given the second-smallest magnitude `b` at a check, the coefficient is
//! `tanh(b/2)` times, for every residual input `l`, the expectation of
//! `tanh(|x|/2)` over the tail `|x| >= b` of that input's density. In the
//! default normalized mode the tail integral is divided by the tail mass,
//! turning it into a conditional expectation.
//!
//! Tails are evaluated in complement form, `1 - tanh(|x|/2) = 2/(1+e^|x|)`,
//! so that coefficients close to 1 keep their relative precision.

use serde::Serialize;
use libm::erfc;

use crate::lut::NormalizationMode;

use super::density::EdgeDensity;
use super::quadrature::integrate;

/// Gaussian densities are truncated at `mean +- TRUNCATION_SIGMAS * sigma`.
pub const TRUNCATION_SIGMAS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficient {
    pub value: f64,
    /// At least one residual tail had zero mass and was clamped to 1.
    pub clamped: bool,
}

/// Tail factor of one residual input: (value, clamped).
pub fn tail_factor(density: &EdgeDensity, beta: f64, mode: NormalizationMode) -> (f64, bool) {
    let (mass, comp) = match density {
        EdgeDensity::Gaussian { mean } => gaussian_tail(*mean, beta),
        EdgeDensity::Histogram { masses, .. } => {
            let centres = EdgeDensity::bin_centres(masses.len());
            let mut mass = 0.0;
            let mut comp = 0.0;
            for (&x, &p) in centres.iter().zip(masses) {
                if x.abs() >= beta {
                    mass += p;
                    comp += p * 2.0 / (1.0 + x.abs().exp());
                }
            }
            (mass, comp)
        }
    };
    match mode {
        NormalizationMode::Normalized => {
            if mass <= f64::MIN_POSITIVE {
                (1.0, true)
            } else {
                ((1.0 - comp / mass).clamp(0.0, 1.0), false)
            }
        }
        NormalizationMode::PaperLiteral => ((mass - comp).clamp(0.0, 1.0), false),
    }
}

/// `P(a <= X <= b)` for `X ~ N(mean, var)`, from whichever tail is small.
fn normal_interval(mean: f64, sigma: f64, a: f64, b: f64) -> f64 {
    let k = std::f64::consts::SQRT_2 * sigma;
    let (za, zb) = ((a - mean) / k, (b - mean) / k);
    let p = if za >= 0.0 {
        0.5 * (erfc(za) - erfc(zb))
    } else if zb <= 0.0 {
        0.5 * (erfc(-zb) - erfc(-za))
    } else {
        1.0 - 0.5 * erfc(zb) - 0.5 * erfc(-za)
    };
    p.max(0.0)
}

/// Tail mass `P(|X| >= beta)` and `E[2/(1+e^|X|); |X| >= beta]` for the
/// consistent Gaussian with the given mean, both over the truncated support.
fn gaussian_tail(mean: f64, beta: f64) -> (f64, f64) {
    if mean <= 0.0 {
        // point mass at 0
        return if beta <= 0.0 { (1.0, 1.0) } else { (0.0, 0.0) };
    }
    let var = 2.0 * mean;
    let sigma = var.sqrt();
    let lo = mean - TRUNCATION_SIGMAS * sigma;
    let hi = mean + TRUNCATION_SIGMAS * sigma;
    let mut intervals = Vec::with_capacity(2);
    if lo < -beta {
        intervals.push((lo, -beta));
    }
    if beta.max(lo) < hi {
        intervals.push((beta.max(lo), hi));
    }
    let norm = 1.0 / (2.0 * std::f64::consts::PI * var).sqrt();
    let mut mass = 0.0;
    let mut comp = 0.0;
    for &(a, b) in &intervals {
        let m = normal_interval(mean, sigma, a, b);
        mass += m;
        if m > 0.0 {
            let f = |x: f64| {
                let d = x - mean;
                let ax = x.abs();
                let u = (-ax).exp();
                norm * (-(d * d) / (2.0 * var)).exp() * 2.0 * u / (1.0 + u)
            };
            comp += integrate(f, a, b, 1e-12 * m, 1e-11);
        }
    }
    (mass, comp)
}

/// Scaling coefficient for second-smallest magnitude `beta` and the given
/// residual input densities.
pub fn scaling_coefficient(beta: f64, residual: &[&EdgeDensity], mode: NormalizationMode) -> Coefficient {
    let mut value = (beta / 2.0).tanh();
    let mut clamped = false;
    for d in residual {
        let (t, c) = tail_factor(d, beta, mode);
        value *= t;
        clamped |= c;
    }
    Coefficient { value: value.clamp(0.0, 1.0), clamped }
}

/// Slots of a check whose densities enter the residual product for output
/// slot `output`: everything except `output` and the two lowest-indexed
/// remaining slots, which stand in for the minimum and second minimum.
pub fn residual_slots(degree: usize, output: usize) -> Vec<usize> {
    (0..degree).filter(|&k| k != output).skip(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const N: NormalizationMode = NormalizationMode::Normalized;
    const P: NormalizationMode = NormalizationMode::PaperLiteral;

    #[test]
    fn empty_residual_is_tanh() {
        for b in [0.0, 0.3, 2.0, 9.0] {
            assert_eq!(scaling_coefficient(b, &[], N).value, (b / 2.0).tanh());
        }
        assert!(residual_slots(3, 1).is_empty());
        assert_eq!(residual_slots(5, 0), vec![3, 4]);
        assert_eq!(residual_slots(5, 1), vec![3, 4]);
        assert_eq!(residual_slots(5, 3), vec![2, 4]);
        assert_eq!(residual_slots(6, 5), vec![2, 3, 4]);
    }

    #[test]
    fn zero_beta_gives_zero() {
        let d = EdgeDensity::Gaussian { mean: 3.0 };
        assert_eq!(scaling_coefficient(0.0, &[&d, &d], N).value, 0.0);
        assert_eq!(scaling_coefficient(0.0, &[&d], P).value, 0.0);
    }

    #[test]
    fn large_beta_approaches_one() {
        let d = EdgeDensity::Gaussian { mean: 5.0 };
        let c = scaling_coefficient(30.0, &[&d, &d], N);
        assert!(c.value > 1.0 - 1e-11);
        assert!(!c.clamped);
        // beyond the truncation point the tail is empty
        let c = scaling_coefficient(60.0, &[&d], N);
        assert!(c.clamped);
        assert_relative_eq!(c.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn whole_line_tail_matches_unconditional_expectation() {
        // at beta = 0 both modes reduce to E[tanh(|X|/2)]
        let d = EdgeDensity::Gaussian { mean: 4.0 };
        let (n, _) = tail_factor(&d, 0.0, N);
        let (p, _) = tail_factor(&d, 0.0, P);
        assert_abs_diff_eq!(n, p, epsilon = 1e-12);
        // E[tanh(|X|/2)] for X ~ N(4, 8), 40-digit mpmath quadrature
        assert_abs_diff_eq!(n, 0.842_700_792_949_714_87, epsilon = 1e-10);
    }

    #[test]
    fn normalized_is_monotone_in_beta() {
        let d = EdgeDensity::Gaussian { mean: 2.5 };
        let mut prev = 0.0;
        for k in 0..200 {
            let b = k as f64 * 0.15;
            let c = scaling_coefficient(b, &[&d, &d], N).value;
            assert!(c >= prev, "decrease at beta = {b}");
            prev = c;
        }
    }

    #[test]
    fn point_mass_density() {
        let d = EdgeDensity::Gaussian { mean: 0.0 };
        assert_eq!(tail_factor(&d, 0.0, N), (0.0, false));
        assert_eq!(tail_factor(&d, 1.0, N), (1.0, true));
        assert_eq!(tail_factor(&d, 1.0, P), (0.0, false));
    }
}
