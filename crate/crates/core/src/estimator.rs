//! End-to-end estimation from one sample path.

use crate::chain::{ProbabilityVector, SamplePath, StochasticMatrix};
use crate::error::Result;
use crate::intervals::{
    self, combined::DEFAULT_ERR_CONSTANT, CombinedInputs, IntervalSet, TailParams,
};
use crate::linalg::{self, EigenvalueList, SquareMatrix};
use crate::path_stats::{self, TransitionCounts};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    /// Also compute the combined intervals for `pi_min` and the gap.
    pub combined: bool,
    /// Absolute constant of the frequency-estimator deviation bounds.
    pub err_constant: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            combined: true,
            err_constant: DEFAULT_ERR_CONSTANT,
        }
    }
}

/// Every intermediate and final quantity of the empirical procedure.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub n: usize,
    pub d: usize,
    pub delta: f64,
    pub counts: TransitionCounts,
    pub p_hat: StochasticMatrix,
    pub group_inverse: SquareMatrix,
    pub pi_hat: ProbabilityVector,
    pub sym_l: SquareMatrix,
    pub eigenvalues: EigenvalueList,
    pub gap_hat: f64,
    pub tail: TailParams,
    pub bounds: SquareMatrix,
    pub kappa: f64,
    pub b: f64,
    pub rho: f64,
    pub w: f64,
    pub intervals: IntervalSet,
}

impl Estimate {
    pub fn relaxation_time_hat(&self) -> f64 {
        1.0 / self.gap_hat
    }

    /// `max_ij B_ij`.
    pub fn max_bound(&self) -> f64 {
        self.bounds.max_abs()
    }
}

pub fn estimate(path: &SamplePath, delta: f64, opts: &EstimateOptions) -> Result<Estimate> {
    let n = path.len();
    let d = path.num_states();
    let tail = intervals::tail_threshold(n, d, delta)?;

    let counts = path_stats::count_transitions(path);
    let p_hat = path_stats::smoothed_matrix(&counts);
    let pi_hat = linalg::stationary_distribution(&p_hat)?;
    let group_inverse = linalg::group_inverse(&p_hat.laplacian(), &pi_hat)?;
    let sym_l = linalg::build_sym_l(&p_hat, &pi_hat)?;
    let eigenvalues = linalg::symmetric_eigenvalues(&sym_l)?;
    let gap_hat = intervals::spectral_gap_estimate(&eigenvalues)?;

    let bounds = intervals::entrywise_bounds(&p_hat, &counts, &tail);
    let kappa = intervals::sensitivity(&group_inverse);
    let pi_bounds = intervals::pi_bounds(kappa, &bounds, &pi_hat);
    let w = intervals::gap_width(pi_bounds.rho, &pi_hat, &bounds);

    let mut set = intervals::empirical_intervals(&pi_hat, gap_hat, pi_bounds.b, w);
    if opts.combined {
        let freq = frequency_estimates(path)?;
        let pi_lower = pi_hat
            .values()
            .iter()
            .map(|p| (p - pi_bounds.b).max(0.0))
            .fold(f64::INFINITY, f64::min);
        let inputs = CombinedInputs {
            n,
            d,
            delta,
            pi_lower,
            gap_hat,
            w,
            freq_pimin: freq.pimin,
            freq_gap: freq.gap,
            err_constant: opts.err_constant,
        };
        set.combined = Some(intervals::combined_intervals(&set, &inputs));
    }

    Ok(Estimate {
        n,
        d,
        delta,
        counts,
        p_hat,
        group_inverse,
        pi_hat,
        sym_l,
        eigenvalues,
        gap_hat,
        tail,
        bounds,
        kappa,
        b: pi_bounds.b,
        rho: pi_bounds.rho,
        w,
        intervals: set,
    })
}

/// Plain frequency estimators of `pi` and the spectral gap.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyEstimates {
    /// Visit frequencies over all `n` positions.
    pub pi: Vec<f64>,
    pub pimin: f64,
    /// Gap of `Sym(Diag(pi)^{-1/2} M Diag(pi)^{-1/2})` with `M` the doublet
    /// frequencies; `None` if a state was never visited.
    pub gap: Option<f64>,
}

pub fn frequency_estimates(path: &SamplePath) -> Result<FrequencyEstimates> {
    let n = path.len();
    let d = path.num_states();
    let mut visits = vec![0u64; d];
    for &s in path.states() {
        visits[s] += 1;
    }
    let pi: Vec<f64> = visits.iter().map(|&v| v as f64 / n as f64).collect();
    let pimin = pi.iter().copied().fold(f64::INFINITY, f64::min);
    if pimin == 0.0 {
        return Ok(FrequencyEstimates {
            pi,
            pimin,
            gap: None,
        });
    }

    let counts = path_stats::count_transitions(path);
    let pairs = (n - 1) as f64;
    let root: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
    let mut sym = SquareMatrix::zeros(d);
    for i in 0..d {
        for j in i..d {
            let m = 0.5 * (counts.pair(i, j) + counts.pair(j, i)) as f64 / pairs;
            let v = m / (root[i] * root[j]);
            sym[(i, j)] = v;
            sym[(j, i)] = v;
        }
    }
    let eigs = linalg::symmetric_eigenvalues(&sym)?;
    let gap = intervals::spectral_gap_estimate(&eigs)?;
    Ok(FrequencyEstimates {
        pi,
        pimin,
        gap: Some(gap),
    })
}
