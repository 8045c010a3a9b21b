//! Mutual information of a consistent Gaussian LLR.
//!
//! `J(mu) = 1 - E[log2(1 + e^-X)]` with `X ~ N(mu, 2 mu)`. The expectation,
//! written `Jc(mu) = 1 - J(mu)`, is evaluated by adaptive quadrature on a
//! dense grid in `ln mu` once per process; `ln J` and `ln Jc` are then read
//! back by cubic interpolation so that neither small `J` nor small `Jc` loses
//! relative precision. Inverses solve the interpolant by Illinois iteration.

use std::f64::consts::LN_2;
use std::sync::OnceLock;

use super::quadrature::integrate;

/// Below this mean `J` is evaluated from its Taylor series.
const SERIES_LIMIT: f64 = 1e-4;
/// Means are capped here; `Jc(MU_MAX)` is about `1e-109`.
pub const MU_MAX: f64 = 1000.0;
const TABLE_POINTS: usize = 4097;

#[inline]
fn softplus_neg(x: f64) -> f64 {
    // ln(1 + e^-x)
    if x > 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

/// `Jc(mu)` by direct adaptive quadrature. Slow; the tabulated
/// [`j_complement`] agrees with it to about `1e-12` relative.
pub fn j_complement_quadrature(mu: f64) -> f64 {
    if mu.is_nan() || mu <= 0.0 {
        return 1.0;
    }
    if mu < SERIES_LIMIT {
        return 1.0 - j_series(mu);
    }
    if mu.is_infinite() {
        return 0.0;
    }
    let var = 2.0 * mu;
    let sigma = var.sqrt();
    let norm = 1.0 / (LN_2 * (2.0 * std::f64::consts::PI * var).sqrt());
    let f = |x: f64| {
        let d = x - mu;
        norm * (-(d * d) / (2.0 * var)).exp() * softplus_neg(x)
    };
    let lo = (mu - 12.0 * sigma).min(-40.0);
    let hi = (mu + 12.0 * sigma).max(40.0);
    // the integrand bends at 0 and, for large mu, its mass sits there
    integrate(f, lo, 0.0, 0.0, 1e-12) + integrate(f, 0.0, hi, 0.0, 1e-12)
}

fn j_series(mu: f64) -> f64 {
    (mu / 4.0 - mu * mu / 16.0 + mu * mu * mu / 48.0) / LN_2
}

struct Table {
    u0: f64,
    step: f64,
    ln_j: Vec<f64>,
    ln_jc: Vec<f64>,
}

impl Table {
    fn u(&self, k: usize) -> f64 {
        self.u0 + self.step * k as f64
    }

    /// Four-point Lagrange interpolation of `ys` at `u`.
    fn interp(&self, ys: &[f64], u: f64) -> f64 {
        let x = ((u - self.u0) / self.step).clamp(0.0, (TABLE_POINTS - 1) as f64);
        let k = (x.floor() as usize).clamp(1, TABLE_POINTS - 3);
        let s = x - k as f64; // offset from node k, in [-1, 2]
        let (y0, y1, y2, y3) = (ys[k - 1], ys[k], ys[k + 1], ys[k + 2]);
        let (a, b, c, d) = (s + 1.0, s, s - 1.0, s - 2.0);
        -y0 * b * c * d / 6.0 + y1 * a * c * d / 2.0 - y2 * a * b * d / 2.0 + y3 * a * b * c / 6.0
    }
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let (a, b) = (SERIES_LIMIT.ln(), MU_MAX.ln());
        let step = (b - a) / (TABLE_POINTS - 1) as f64;
        let jc: Vec<f64> =
            (0..TABLE_POINTS).map(|k| j_complement_quadrature((a + step * k as f64).exp())).collect();
        let ln_j = jc.iter().map(|c| (-c).ln_1p()).collect();
        let ln_jc = jc.iter().map(|c| c.ln()).collect();
        Table { u0: a, step, ln_j, ln_jc }
    })
}

/// `Jc(mu) = E[log2(1 + e^-X)]`, `X ~ N(mu, 2 mu)`.
pub fn j_complement(mu: f64) -> f64 {
    if mu.is_nan() || mu <= 0.0 {
        return 1.0;
    }
    if mu < SERIES_LIMIT {
        return 1.0 - j_series(mu);
    }
    if mu >= MU_MAX {
        return if mu.is_infinite() { 0.0 } else { j_complement_quadrature(mu) };
    }
    let t = table();
    t.interp(&t.ln_jc, mu.ln()).exp()
}

/// `J(mu)`; `J(0) = 0`, `J(inf) = 1`.
pub fn j_function(mu: f64) -> f64 {
    if mu.is_nan() || mu <= 0.0 {
        return 0.0;
    }
    if mu < SERIES_LIMIT {
        return j_series(mu);
    }
    if mu >= MU_MAX {
        return 1.0 - j_complement(mu);
    }
    let t = table();
    let u = mu.ln();
    let ln_jc = t.interp(&t.ln_jc, u);
    if ln_jc < -LN_2 {
        1.0 - ln_jc.exp()
    } else {
        t.interp(&t.ln_j, u).exp()
    }
}

/// Root of an increasing `g` on `[a, b]` with `g(a) <= 0 <= g(b)`.
fn illinois(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64, mut gb: f64) -> f64 {
    let mut side = 0i8;
    for _ in 0..100 {
        if gb == ga {
            break;
        }
        let c = (a * gb - b * ga) / (gb - ga);
        let gc = g(c);
        if gc == 0.0 || (b - a).abs() < 1e-15 * (1.0 + c.abs()) {
            return c;
        }
        if (gc > 0.0) == (gb > 0.0) {
            b = c;
            gb = gc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        } else {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        }
    }
    0.5 * (a + b)
}

/// Mean `mu` with `J(mu) = info`. Clamped to `[0, MU_MAX]`.
pub fn j_inverse(info: f64) -> f64 {
    if info.is_nan() || info <= 0.0 {
        return 0.0;
    }
    if info >= 1.0 {
        return MU_MAX;
    }
    if info >= 0.5 {
        return j_inverse_complement(1.0 - info);
    }
    let t = table();
    let target = info.ln();
    if target < t.ln_j[0] {
        return series_inverse(info);
    }
    let k = t.ln_j.partition_point(|&v| v < target).clamp(1, TABLE_POINTS - 1);
    let g = |u: f64| t.interp(&t.ln_j, u) - target;
    illinois(g, t.u(k - 1), t.u(k), t.ln_j[k - 1] - target, t.ln_j[k] - target).exp()
}

/// Mean `mu` with `Jc(mu) = 1 - J(mu) = c`. Clamped to `[0, MU_MAX]`.
pub fn j_inverse_complement(c: f64) -> f64 {
    if c.is_nan() || c >= 1.0 {
        return 0.0;
    }
    if c <= 0.0 {
        return MU_MAX;
    }
    if c > 0.5 {
        return j_inverse(1.0 - c);
    }
    let t = table();
    let target = c.ln();
    if target <= t.ln_jc[TABLE_POINTS - 1] {
        return MU_MAX;
    }
    // ln Jc is decreasing in ln mu; negate to search an increasing function
    let k = t.ln_jc.partition_point(|&v| v > target).clamp(1, TABLE_POINTS - 1);
    let g = |u: f64| target - t.interp(&t.ln_jc, u);
    illinois(g, t.u(k - 1), t.u(k), target - t.ln_jc[k - 1], target - t.ln_jc[k]).exp()
}

fn series_inverse(info: f64) -> f64 {
    let mut mu = 4.0 * LN_2 * info;
    for _ in 0..6 {
        let f = j_series(mu) - info;
        let df = (0.25 - mu / 8.0 + mu * mu / 16.0) / LN_2;
        mu -= f / df;
    }
    mu
}
