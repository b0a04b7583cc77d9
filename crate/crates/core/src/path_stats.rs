//! Visit counts, transition-pair counts and smoothed transition estimates.

use crate::chain::{SamplePath, StochasticMatrix};
use crate::linalg::SquareMatrix;

/// Counts over the first `n - 1` positions of a path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionCounts {
    visits: Vec<u64>,
    pairs: Vec<u64>,
    path_len: usize,
}

impl TransitionCounts {
    pub fn num_states(&self) -> usize {
        self.visits.len()
    }

    /// `N_i`: visits to `i` at times `t <= n - 1`.
    pub fn visits(&self) -> &[u64] {
        &self.visits
    }

    /// `N_ij`: transitions `i -> j`.
    pub fn pair(&self, i: usize, j: usize) -> u64 {
        self.pairs[i * self.visits.len() + j]
    }

    pub fn pair_row(&self, i: usize) -> &[u64] {
        let d = self.visits.len();
        &self.pairs[i * d..(i + 1) * d]
    }

    pub fn path_len(&self) -> usize {
        self.path_len
    }
}

pub fn count_transitions(path: &SamplePath) -> TransitionCounts {
    let d = path.num_states();
    let mut visits = vec![0u64; d];
    let mut pairs = vec![0u64; d * d];
    for w in path.states().windows(2) {
        visits[w[0]] += 1;
        pairs[w[0] * d + w[1]] += 1;
    }
    TransitionCounts {
        visits,
        pairs,
        path_len: path.len(),
    }
}

/// `P_ij = (N_ij + 1/d) / (N_i + 1)`. Unvisited states get uniform rows.
pub fn smoothed_matrix(counts: &TransitionCounts) -> StochasticMatrix {
    let d = counts.num_states();
    let prior = 1.0 / d as f64;
    let mut p = SquareMatrix::zeros(d);
    for i in 0..d {
        let denom = counts.visits[i] as f64 + 1.0;
        for j in 0..d {
            p[(i, j)] = (counts.pair(i, j) as f64 + prior) / denom;
        }
    }
    StochasticMatrix::new(p).expect("smoothed estimates are row-stochastic")
}
