//! Frozen reference values computed outside this crate (mpmath at 50
//! digits, numpy Monte Carlo with 2e8 draws) and independent brute-force
//! forms of the check-node update.

use metldpc::analysis::{j_complement_quadrature, j_function, j_inverse, scaling_coefficient, EdgeDensity};
use metldpc::decoder::{approx_box_plus, box_plus, cn_update_spa, correction_term, correction_term_approx, Llr};
use metldpc::lut::NormalizationMode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `|approx_box_plus - box_plus|` at `b1 = 2^-k`, `b2 = r b1`, for
/// `k = 1..=10` (rows) and `r = 1, 2, 4, 8` (columns); mpmath, 50 digits.
const APPROX_GAP: [[f64; 4]; 10] = [
    [0.00234482424357704, 0.0037222848273591506, 0.0033206216680852302, 0.00071646346193519085],
    [0.00015844682273768056, 0.00029807936487090086, 0.00047121408452949434, 0.00041613051028123724],
    [1.0104024540811521e-5, 1.9896398778548631e-5, 3.7418663785047565e-5, 5.9089414242156684e-5],
    [6.3470815319672163e-7, 1.2644739003164669e-6, 2.4898956513224036e-6, 4.6823194822145032e-6],
    [3.97196200538831e-8, 7.9361726438327287e-8, 1.5810526864722162e-7, 3.113260154519417e-7],
    [2.4832641451943702e-9, 4.9653160081755297e-9, 9.9209413007729568e-9, 1.9764597581841958e-8],
    [1.5521632383231785e-10, 3.1041370133277906e-10, 6.2067586149378443e-10, 1.2401403364422556e-9],
    [9.7012126730348789e-12, 1.9402129292356266e-11, 3.8801890270194025e-11, 7.7584837709686444e-11],
    [6.0632879889861639e-13, 1.2126529718904627e-12, 2.4252689369767445e-12, 4.8502418339187803e-12],
    [3.7895596913179194e-14, 7.5791121546301444e-14, 1.5158166485390508e-13, 3.0315870385447522e-13],
];

/// Check output by `ln(sum of even / sum of odd elementary symmetric
/// polynomials of u_k = e^-|x_k|)`, which equals `2 atanh(prod tanh(|x|/2))`
/// without the cancellation near 1.
fn tanh_product_oracle(others: &[f64]) -> f64 {
    let mut e = vec![1.0];
    for &x in others {
        let u = (-x.abs()).exp();
        let mut next = vec![0.0; e.len() + 1];
        for (j, &v) in e.iter().enumerate() {
            next[j] += v;
            next[j + 1] += v * u;
        }
        e = next;
    }
    let even: f64 = e.iter().step_by(2).sum();
    let odd: f64 = e.iter().skip(1).step_by(2).sum();
    let sign = if others.iter().filter(|&&x| x < 0.0).count() % 2 == 1 { -1.0 } else { 1.0 };
    sign * (even / odd).ln()
}

#[test]
fn forward_backward_matches_tanh_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..5000 {
        let d = rng.random_range(2..=12);
        let x: Vec<f64> = (0..d)
            .map(|_| {
                let b: f64 = rng.random_range(0.0..20.0);
                if rng.random::<bool>() { b } else { -b }
            })
            .collect();
        let out = cn_update_spa(&x.iter().map(|&v| Llr(v)).collect::<Vec<_>>());
        for i in 0..d {
            let others: Vec<f64> = (0..d).filter(|&k| k != i).map(|k| x[k]).collect();
            worst = worst.max((out[i].0 - tanh_product_oracle(&others)).abs());
        }
    }
    assert!(worst < 1e-9, "worst deviation {worst:e}");
}

#[test]
fn box_plus_reference_values() {
    // 2 atanh(tanh(1)^2)
    assert!((box_plus(Llr(2.0), Llr(2.0)).0 - 1.325_002_747_357_864_3).abs() < 1e-12);
    // 2 tanh(1)
    assert!((approx_box_plus(Llr(2.0), Llr(2.0)).0 - 1.523_188_311_911_529_7).abs() < 1e-12);
    let r = box_plus(Llr(-3.0), Llr(5.0));
    assert!(r.0 < 0.0);
    assert!((r.0 + 3.0 + correction_term(3.0, 5.0)).abs() < 1e-15);
    // s(0.1, 0.2) = -0.090041415605043776, approximation -0.090033200537504418
    assert!((correction_term(0.1, 0.2) + 0.090_041_415_605_043_776).abs() < 1e-15);
    assert!((correction_term_approx(0.1, 0.2) + 0.090_033_200_537_504_418).abs() < 1e-15);
}

#[test]
fn approximation_gap_matches_frozen_grid() {
    for (k, row) in APPROX_GAP.iter().enumerate() {
        let b1 = 0.5f64.powi(k as i32 + 1);
        for (j, &frozen) in row.iter().enumerate() {
            let b2 = b1 * [1.0, 2.0, 4.0, 8.0][j];
            // the f64 correction term cancels two ~0.69 logs, so ~1e-16 absolute noise
            let gap = (approx_box_plus(Llr(b1), Llr(b2)).0 - box_plus(Llr(b1), Llr(b2)).0).abs();
            assert!((gap - frozen).abs() <= 1e-6 * frozen + 5e-16, "k={} r={}: {gap:e} vs {frozen:e}", k + 1, j);
            let corr = (correction_term_approx(b1, b2) - correction_term(b1, b2)).abs();
            assert!((corr - frozen).abs() <= 1e-6 * frozen + 5e-16);
        }
    }
}

#[test]
fn j_function_reference_values() {
    // mpmath quadrature, 40 digits
    assert!((j_function(2.0) - 0.485_944_154_132_935_32).abs() < 1e-12);
    assert!((j_function(10.0) - 0.950_352_824_867_200_65).abs() < 1e-12);
    assert!((j_complement_quadrature(2.0) - (1.0 - 0.485_944_154_132_935_32)).abs() < 1e-12);
    assert!((j_inverse(0.485_944_154_132_935_32) - 2.0).abs() < 1e-9);
}

#[test]
fn conditional_tail_expectation_matches_monte_carlo() {
    // numpy: 2e8 draws of N(4, 8), 178820312 accepted with |x| >= 1,
    // mean tanh(|x|/2) = 0.9137483152625493, standard error 9.447e-6
    let (mc, se) = (0.913_748_315_262_549_3, 9.447_261_796_893_283e-6);
    // mpmath quadrature of the same conditional expectation
    let exact = 0.913_770_854_879_685_85;
    let d = EdgeDensity::Gaussian { mean: 4.0 };
    let c = scaling_coefficient(1.0, &[&d], NormalizationMode::Normalized);
    let tail = c.value / 0.5f64.tanh();
    assert!((tail - mc).abs() < 3.0 * se, "{tail} vs {mc}");
    assert!((tail - exact).abs() < 1e-9, "{tail} vs {exact}");
    assert!(!c.clamped);
}
