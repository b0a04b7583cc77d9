//! Empirical error bounds and confidence intervals built on top of the
//! smoothed transition estimates.
//!
//! The chain of quantities is: spectral gap estimate, tail threshold `tau`,
//! entrywise bounds `B`, sensitivity `kappa`, the stationary-probability
//! bound `b` with its relative form `rho`, and the gap half-width `w`.

pub mod combined;

use serde::{Deserialize, Serialize};

use crate::chain::{ProbabilityVector, StochasticMatrix};
use crate::error::{Error, Result};
use crate::linalg::{EigenvalueList, SquareMatrix};
use crate::path_stats::TransitionCounts;

pub use combined::{combined_intervals, CombinedInputs, CombinedIntervals, CombinedStatus};

/// Base `c` of the logarithm in the tail function.
pub const TAIL_BASE: f64 = 1.1;

/// Absolute accuracy of [`tail_threshold`].
pub const TAIL_TOL: f64 = 1e-9;

/// `1 - max(lambda_2, |lambda_d|)`. Not clipped.
pub fn spectral_gap_estimate(eigs: &EigenvalueList) -> Result<f64> {
    let v = eigs.values();
    if v.len() < 2 {
        return Err(Error::TooFewEigenvalues(v.len()));
    }
    Ok(1.0 - v[1].max(v[v.len() - 1].abs()))
}

/// Parameters of the martingale tail bound used for the entrywise bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailParams {
    pub c: f64,
    pub tau: f64,
    pub n: usize,
    pub d: usize,
    pub delta: f64,
}

/// `f(t) = 2 d^2 (1 + ceil(log_c(2n / t))_+) e^{-t}`.
///
/// The ceiling term is zero for `t >= 2n` and `f(0) = +inf`.
pub fn tail_function(t: f64, n: usize, d: usize, c: f64) -> f64 {
    if t <= 0.0 {
        return f64::INFINITY;
    }
    let ratio = 2.0 * n as f64 / t;
    let steps = if ratio <= 1.0 {
        0.0
    } else {
        (ratio.ln() / c.ln()).ceil().max(0.0)
    };
    2.0 * (d * d) as f64 * (1.0 + steps) * (-t).exp()
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}

/// Smallest `t >= 0` with `f(t) <= delta`, to within [`TAIL_TOL`].
///
/// The returned value always satisfies `f(tau) <= delta`.
pub fn tail_threshold(n: usize, d: usize, delta: f64) -> Result<TailParams> {
    check_delta(delta)?;
    if n < 2 {
        return Err(Error::PathTooShort { len: n });
    }
    if d < 2 {
        return Err(Error::TooFewStates(d));
    }
    let c = TAIL_BASE;
    let f = |t: f64| tail_function(t, n, d, c);
    // f(lo) > delta and f(hi) <= delta throughout.
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while f(hi) > delta {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > TAIL_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(TailParams {
        c,
        tau: hi,
        n,
        d,
        delta,
    })
}

/// Bound on `|P_hat_ij - P_ij|` for one entry, given `N_i` visits, before capping.
pub fn entry_bound(p_hat: f64, visits: f64, tail: &TailParams) -> f64 {
    let (c, tau) = (tail.c, tail.tau);
    let half = c * tau / (2.0 * visits);
    let inner = half
        + (2.0 * c * p_hat * (1.0 - p_hat) * tau / visits).sqrt()
        + ((4.0 / 3.0) * tau + (p_hat - 1.0 / tail.d as f64).abs()) / visits;
    let root = half.sqrt() + inner.sqrt();
    root * root
}

/// Entrywise bounds `B_ij` on `|P_hat_ij - P_ij|`, capped at 1.
/// Rows of unvisited states are all ones.
pub fn entrywise_bounds(
    p_hat: &StochasticMatrix,
    counts: &TransitionCounts,
    tail: &TailParams,
) -> SquareMatrix {
    let d = p_hat.dim();
    SquareMatrix::from_fn(d, |i, j| match counts.visits()[i] {
        0 => 1.0,
        visits => entry_bound(p_hat.get(i, j), visits as f64, tail).min(1.0),
    })
}

/// `kappa = 1/2 max_j (A#_jj - min_i A#_ij)`.
pub fn sensitivity(group_inverse: &SquareMatrix) -> f64 {
    let d = group_inverse.dim();
    let worst = (0..d)
        .map(|j| {
            let col_min = (0..d)
                .map(|i| group_inverse[(i, j)])
                .fold(f64::INFINITY, f64::min);
            group_inverse[(j, j)] - col_min
        })
        .fold(0.0, f64::max);
    0.5 * worst
}

/// Bound `b` on `max_i |pi_hat_i - pi_i|` and the relative bound `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiBounds {
    pub b: f64,
    /// `+inf` once `b >= pi_hat_i` for some state.
    pub rho: f64,
}

/// `x / y` with `x / 0 = +inf` for `x > 0`.
fn ratio_or_inf(x: f64, y: f64) -> f64 {
    if y > 0.0 {
        x / y
    } else {
        f64::INFINITY
    }
}

pub fn pi_bounds(kappa: f64, bounds: &SquareMatrix, pi_hat: &ProbabilityVector) -> PiBounds {
    let b = kappa * bounds.max_abs();
    if b == 0.0 {
        return PiBounds { b, rho: 0.0 };
    }
    let worst = pi_hat
        .values()
        .iter()
        .map(|&p| ratio_or_inf(b, p).max(ratio_or_inf(b, (p - b).max(0.0))))
        .fold(0.0, f64::max);
    PiBounds {
        b,
        rho: 0.5 * worst,
    }
}

/// Half-width `w` of the spectral gap interval; `+inf` when `rho` is.
pub fn gap_width(rho: f64, pi_hat: &ProbabilityVector, bounds: &SquareMatrix) -> f64 {
    if rho.is_infinite() {
        return f64::INFINITY;
    }
    let d = pi_hat.len();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            let bij = bounds[(i, j)];
            sum += ratio_or_inf(pi_hat[i], pi_hat[j]) * bij * bij;
        }
    }
    let scale = 1.0 + 2.0 * rho + rho * rho;
    2.0 * rho + rho * rho + scale * sum.sqrt()
}

/// A closed interval; `hi` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    /// `[center - radius, center + radius]` intersected with `[0, 1]`.
    pub fn unit_clipped(center: f64, radius: f64) -> Self {
        let lo = (center - radius).clamp(0.0, 1.0);
        let hi = (center + radius).clamp(0.0, 1.0);
        Self::new(lo, hi.max(lo))
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

/// All confidence intervals reported for one sample path.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    pub pi: Vec<Interval>,
    pub gap: Interval,
    pub pimin: Interval,
    /// `1/gap` mapped through the gap interval; a derived quantity.
    pub relaxation_time: Interval,
    pub combined: Option<CombinedIntervals>,
}

/// Intervals `pi_hat_i +- b`, `gap_hat +- w`, `min(pi_hat) +- b`, and the
/// relaxation-time interval `[1/(gap_hat + w), 1/(gap_hat - w)_+]`.
pub fn empirical_intervals(
    pi_hat: &ProbabilityVector,
    gap_hat: f64,
    b: f64,
    w: f64,
) -> IntervalSet {
    let pi = pi_hat
        .values()
        .iter()
        .map(|&p| Interval::unit_clipped(p, b))
        .collect();
    let upper_gap = gap_hat + w;
    let lower_gap = gap_hat - w;
    let relaxation_time = Interval::new(
        ratio_or_inf(1.0, upper_gap),
        ratio_or_inf(1.0, lower_gap.max(0.0)),
    );
    IntervalSet {
        pi,
        gap: Interval::unit_clipped(gap_hat, w),
        pimin: Interval::unit_clipped(pi_hat.min(), b),
        relaxation_time,
        combined: None,
    }
}
