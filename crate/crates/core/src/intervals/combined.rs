//! Intervals that combine the empirical bounds with the deviation bounds of
//! the plain frequency estimators.
//!
//! The frequency estimators (visit frequencies for `pi`, doublet frequencies
//! for `Sym(L)`) come with deviation bounds that depend on the unknown
//! `pi_min` and spectral gap. Replacing those unknowns by the empirical lower
//! bounds `min_i (pi_hat_i - b)_+` and `(gap_hat - w)_+` yields observable
//! intervals, which are then intersected with the empirical ones.
//!
//! The deviation bounds hold up to an unspecified absolute constant; it is an
//! explicit parameter here (`err_constant`).

use serde::{Deserialize, Serialize};

use super::{Interval, IntervalSet};

/// Default absolute constant in the frequency-estimator deviation bounds.
pub const DEFAULT_ERR_CONSTANT: f64 = 20.0;

/// Why the combined intervals did or did not use the frequency bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombinedStatus {
    /// Intersection of both constructions.
    Intersected,
    /// A plug-in lower bound on `pi_min` or the gap was zero.
    DegenerateLowerBound,
    /// Some state never appears in the path, so the frequency gap estimate is undefined.
    UnvisitedState,
    /// The two intervals were disjoint; the empirical interval is reported.
    EmptyIntersection,
}

/// Quantities from the empirical construction and the frequency estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedInputs {
    pub n: usize,
    pub d: usize,
    pub delta: f64,
    /// `min_i (pi_hat_i - b)_+`.
    pub pi_lower: f64,
    pub gap_hat: f64,
    pub w: f64,
    /// Frequency estimate of `pi_min`.
    pub freq_pimin: f64,
    /// Frequency estimate of the gap; `None` if some state is unvisited.
    pub freq_gap: Option<f64>,
    pub err_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedIntervals {
    /// `U`, the interval for `pi_min`.
    pub pimin: Interval,
    /// `V`, the interval for the spectral gap.
    pub gap: Interval,
    pub pimin_lower_bound: f64,
    pub gap_lower_bound: f64,
    pub freq_pimin: f64,
    pub freq_gap: Option<f64>,
    pub err_constant: f64,
    pub status: CombinedStatus,
}

/// Deviation bound for the frequency gap estimate:
///
/// `C (sqrt(ln(d/delta) ln(n/(pimin delta)) / (pimin gap n)) + ln(1/gap)/(gap n))`.
pub fn gap_deviation_bound(
    pimin: f64,
    gap: f64,
    n: usize,
    d: usize,
    delta: f64,
    err_constant: f64,
) -> f64 {
    let n = n as f64;
    let log_d = (d as f64 / delta).ln();
    let log_n = (n / (pimin * delta)).ln().max(0.0);
    let lead = (log_d * log_n / (pimin * gap * n)).sqrt();
    let tail = (1.0 / gap).ln().max(0.0) / (gap * n);
    err_constant * (lead + tail)
}

/// Coefficients `(a, e)` of the frequency `pi_min` deviation bound
/// `|pimin_freq - pimin| <= a sqrt(pimin) + e`, obtained from
///
/// `C (sqrt(pimin ln(d/(pimin delta)) / (gap n)) + ln(d/(pimin delta))/(gap n))`
///
/// with `pimin_lo` substituted inside the logarithm and `gap_lo` for the gap.
/// The `sqrt(pimin)` factor stays symbolic.
pub fn pimin_deviation_terms(
    pimin_lo: f64,
    gap_lo: f64,
    n: usize,
    d: usize,
    delta: f64,
    err_constant: f64,
) -> (f64, f64) {
    let scale = gap_lo * n as f64;
    let log_term = (d as f64 / (pimin_lo * delta)).ln().max(0.0);
    (
        err_constant * (log_term / scale).sqrt(),
        err_constant * log_term / scale,
    )
}

/// All `x >= 0` with `|x - center| <= a sqrt(x) + e`.
pub fn solve_sqrt_deviation(center: f64, a: f64, e: f64) -> Interval {
    let root_hi = 0.5 * (a + (a * a + 4.0 * (center + e)).sqrt());
    let lo = if center - e <= 0.0 {
        0.0
    } else {
        let root_lo = 0.5 * (-a + (a * a + 4.0 * (center - e)).sqrt());
        root_lo * root_lo
    };
    Interval::new(lo, root_hi * root_hi)
}

/// `U` and `V`. Falls back to the empirical `pi_min` and gap intervals,
/// with a non-`Intersected` status, when the plug-in is degenerate.
pub fn combined_intervals(empirical: &IntervalSet, inputs: &CombinedInputs) -> CombinedIntervals {
    let pimin_lo = (inputs.pi_lower).max(0.0);
    let gap_lo = (inputs.gap_hat - inputs.w).max(0.0);
    let fallback = |status| CombinedIntervals {
        pimin: empirical.pimin,
        gap: empirical.gap,
        pimin_lower_bound: pimin_lo,
        gap_lower_bound: gap_lo,
        freq_pimin: inputs.freq_pimin,
        freq_gap: inputs.freq_gap,
        err_constant: inputs.err_constant,
        status,
    };
    if pimin_lo <= 0.0 || gap_lo <= 0.0 || !gap_lo.is_finite() {
        return fallback(CombinedStatus::DegenerateLowerBound);
    }
    let Some(freq_gap) = inputs.freq_gap else {
        return fallback(CombinedStatus::UnvisitedState);
    };

    let gap_radius = gap_deviation_bound(
        pimin_lo,
        gap_lo,
        inputs.n,
        inputs.d,
        inputs.delta,
        inputs.err_constant,
    );
    let gap_freq = Interval::unit_clipped(freq_gap, gap_radius);

    let (a, e) = pimin_deviation_terms(
        pimin_lo,
        gap_lo,
        inputs.n,
        inputs.d,
        inputs.delta,
        inputs.err_constant,
    );
    let solved = solve_sqrt_deviation(inputs.freq_pimin, a, e);
    let pimin_freq = Interval::new(solved.lo.min(1.0), solved.hi.min(1.0));

    match (
        pimin_freq.intersect(&empirical.pimin),
        gap_freq.intersect(&empirical.gap),
    ) {
        (Some(pimin), Some(gap)) => CombinedIntervals {
            pimin,
            gap,
            status: CombinedStatus::Intersected,
            ..fallback(CombinedStatus::Intersected)
        },
        _ => fallback(CombinedStatus::EmptyIntersection),
    }
}
