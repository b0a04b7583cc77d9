#![allow(dead_code)]

use mcgap::linalg::SquareMatrix;
use mcgap::StochasticMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Strictly positive random transition matrix.
pub fn random_ergodic(d: usize, seed: u64) -> StochasticMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = SquareMatrix::from_fn(d, |_, _| rng.gen_range(0.05..1.0));
    for i in 0..d {
        let s: f64 = m.row(i).iter().sum();
        for j in 0..d {
            m[(i, j)] /= s;
        }
    }
    StochasticMatrix::new(m).unwrap()
}

/// Random symmetric weights with a connected support (a spanning path plus extra edges).
pub fn random_weights(d: usize, seed: u64) -> SquareMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = SquareMatrix::zeros(d);
    for i in 0..d {
        for j in i..d {
            let keep = j == i + 1 || rng.gen_bool(0.4);
            let v = if keep { rng.gen_range(0.1..2.0) } else { 0.0 };
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    w
}

pub fn random_rates(d: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let up = (0..d - 1).map(|_| rng.gen_range(0.05..0.5)).collect();
    let down = (0..d - 1).map(|_| rng.gen_range(0.05..0.5)).collect();
    (up, down)
}

/// Number of eigenvalues of symmetric `s` strictly below `sigma`, from the
/// signs of the pivots of `s - sigma I` (Sylvester's law of inertia).
pub fn count_below(s: &SquareMatrix, sigma: f64) -> usize {
    let d = s.dim();
    let mut a = SquareMatrix::from_fn(d, |i, j| s[(i, j)] - if i == j { sigma } else { 0.0 });
    let mut negatives = 0;
    for k in 0..d {
        let mut pivot = a[(k, k)];
        if pivot == 0.0 {
            pivot = -1e-300;
        }
        if pivot < 0.0 {
            negatives += 1;
        }
        for i in (k + 1)..d {
            let f = a[(i, k)] / pivot;
            for j in (k + 1)..d {
                a[(i, j)] -= f * a[(k, j)];
            }
        }
    }
    negatives
}

/// Eigenvalues by bisection on the inertia count, descending.
pub fn bisection_eigenvalues(s: &SquareMatrix) -> Vec<f64> {
    let d = s.dim();
    let radius = (0..d)
        .map(|i| s.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let mut out = Vec::with_capacity(d);
    // k-th smallest eigenvalue: least x with count_below(x) > k.
    for k in 0..d {
        let (mut lo, mut hi) = (-radius, radius);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if count_below(s, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out.reverse();
    out
}
