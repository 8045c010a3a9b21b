//! Scalar check-node kernels on log-likelihood ratios.

use std::ops::Neg;

/// A log-likelihood ratio; positive values favour bit 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Llr(pub f64);

impl Llr {
    /// Sign in `{-1, +1}`; zero counts as positive.
    pub fn alpha(self) -> f64 {
        if self.0 < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Magnitude.
    pub fn beta(self) -> f64 {
        self.0.abs()
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Neg for Llr {
    type Output = Llr;
    fn neg(self) -> Llr {
        Llr(-self.0)
    }
}

impl From<f64> for Llr {
    fn from(v: f64) -> Self {
        Llr(v)
    }
}

/// Exact correction term `s(b1, b2) = log((1 + e^-|b1+b2|) / (1 + e^-|b1-b2|))`.
#[inline]
pub fn correction_term(beta1: f64, beta2: f64) -> f64 {
    (-(beta1 + beta2).abs()).exp().ln_1p() - (-(beta1 - beta2).abs()).exp().ln_1p()
}

/// Closed-form approximation `-2 b1 / (1 + e^b2)` of the correction term,
/// valid for `0 <= b1 <= b2`.
#[inline]
pub fn correction_term_approx(beta1: f64, beta2: f64) -> f64 {
    debug_assert!(0.0 <= beta1 && beta1 <= beta2);
    // 1/(1+e^b2) written as e^-b2/(1+e^-b2) so large b2 does not overflow
    let u = (-beta2).exp();
    -2.0 * beta1 * u / (1.0 + u)
}

/// Exact box-plus `l1 ⊞ l2`.
#[inline]
pub fn box_plus(l1: Llr, l2: Llr) -> Llr {
    Llr(box_plus_raw(l1.0, l2.0))
}

#[inline]
fn box_plus_raw(a: f64, b: f64) -> f64 {
    let (ba, bb) = (a.abs(), b.abs());
    let mag = (ba.min(bb) + correction_term(ba, bb)).max(0.0);
    if (a < 0.0) != (b < 0.0) {
        -mag
    } else {
        mag
    }
}

/// Approximate box-plus `a1 a2 min(b1,b2) tanh(max(b1,b2)/2)`.
#[inline]
pub fn approx_box_plus(l1: Llr, l2: Llr) -> Llr {
    let (b1, b2) = (l1.beta(), l2.beta());
    Llr(l1.alpha() * l2.alpha() * b1.min(b2) * (b1.max(b2) / 2.0).tanh())
}

/// Tanh-scaled min-sum check-node update.
///
/// Output `i` is the sign product over the other inputs, times the smallest
/// other magnitude `b_m`, times `tanh(b_l/2)` over every remaining input
/// `l ∉ {i, m}`. Ties pick the lowest index as `m`. A degree-1 check emits 0.
pub fn cn_update_tanh_scaled(inputs: &[Llr]) -> Vec<Llr> {
    let d = inputs.len();
    if d <= 1 {
        return vec![Llr(0.0); d];
    }
    (0..d)
        .map(|i| {
            let mut sign = 1.0;
            let mut m = usize::MAX;
            for (k, l) in inputs.iter().enumerate() {
                if k == i {
                    continue;
                }
                sign *= l.alpha();
                if m == usize::MAX || l.beta() < inputs[m].beta() {
                    m = k;
                }
            }
            let scale: f64 = inputs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != m)
                .map(|(_, l)| (l.beta() / 2.0).tanh())
                .product();
            Llr(sign * inputs[m].beta() * scale)
        })
        .collect()
}

/// Saturation magnitude for every message inside the decoders.
pub const LLR_SATURATION: f64 = 38.0;

#[inline]
pub(crate) fn saturate(x: f64) -> f64 {
    x.clamp(-LLR_SATURATION, LLR_SATURATION)
}
