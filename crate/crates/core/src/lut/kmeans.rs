//! Seeded K-means (k-means++ seeding, Lloyd iterations, Euclidean metric).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lloyd iterations stop once no centroid moves by more than this.
const MOVEMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// `k x dim`, row major.
    pub centroids: Vec<f64>,
    /// Cluster of every input row.
    pub assignment: Vec<u32>,
    pub iterations: usize,
    /// Sum of squared distances to the assigned centroids.
    pub inertia: f64,
}

#[inline]
fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid (lowest index on ties) and its squared distance.
fn nearest(row: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.chunks(dim).enumerate() {
        let d = dist2(row, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Clusters the rows of `data` (each `dim` long) into `k` groups.
///
/// Panics if `k` is zero or exceeds the row count.
pub fn kmeans(data: &[f64], dim: usize, k: usize, seed: u64, max_iterations: usize) -> KMeansResult {
    let n = data.len() / dim;
    assert!(k >= 1 && k <= n, "k = {k} outside 1..={n}");
    let row = |i: usize| &data[i * dim..(i + 1) * dim];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = row(first).to_vec();
    let mut d2: Vec<f64> = (0..n).map(|i| dist2(row(i), row(first))).collect();
    while centroids.len() < k * dim {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 {
                    target -= d;
                    pick = Some(i);
                    if target < 0.0 {
                        break;
                    }
                }
            }
            pick.expect("positive total")
        } else {
            // every row coincides with a centroid; take an unused duplicate
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        let c = row(pick).to_vec();
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(dist2(row(i), &c));
        }
        centroids.extend_from_slice(&c);
    }

    let mut assignment = vec![0u32; n];
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        for (i, a) in assignment.iter_mut().enumerate() {
            *a = nearest(row(i), &centroids, dim).0 as u32;
        }
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (i, &a) in assignment.iter().enumerate() {
            let a = a as usize;
            counts[a] += 1;
            for (s, x) in sums[a * dim..(a + 1) * dim].iter_mut().zip(row(i)) {
                *s += x;
            }
        }
        let mut movement = 0.0f64;
        for j in 0..k {
            if counts[j] == 0 {
                continue;
            }
            let c = &mut centroids[j * dim..(j + 1) * dim];
            let mut moved = 0.0;
            for (cv, s) in c.iter_mut().zip(&sums[j * dim..(j + 1) * dim]) {
                let new = s / counts[j] as f64;
                moved += (new - *cv) * (new - *cv);
                *cv = new;
            }
            movement = movement.max(moved.sqrt());
        }
        if movement < MOVEMENT_TOL {
            break;
        }
    }

    let mut inertia = 0.0;
    for (i, a) in assignment.iter_mut().enumerate() {
        let (j, d) = nearest(row(i), &centroids, dim);
        *a = j as u32;
        inertia += d;
    }
    KMeansResult { centroids, assignment, iterations, inertia }
}
