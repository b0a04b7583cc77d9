//! Ground-truth chains, seeded path sampling and the Monte-Carlo coverage
//! harness.
//!
//! Paths are drawn with `ChaCha8Rng::seed_from_u64(seed)`. Each step draws
//! `u = 1 - U[0, 1)` in `(0, 1]` and moves to the first state whose
//! cumulative row probability is `>= u`. Trial `t` of a coverage run uses
//! the seed [`trial_seed`]`(master_seed, t)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chain::{self, ProbabilityVector, SamplePath, StochasticMatrix};
use crate::error::{Error, Result};
use crate::estimator::{estimate, EstimateOptions};
use crate::intervals::{self, CombinedIntervals, CombinedStatus, IntervalSet};
use crate::linalg::{self, SquareMatrix};

/// Detailed-balance and stationarity tolerance for generated chains.
pub const MODEL_TOL: f64 = 1e-12;

/// A chain with its exact stationary distribution and spectral gap.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainModel {
    pub p: StochasticMatrix,
    pub pi: ProbabilityVector,
    /// `1 - max(lambda_2, |lambda_d|)` of `Sym(L)` built from the true chain.
    pub gap: f64,
    pub reversible: bool,
}

impl ChainModel {
    /// Build from a transition matrix. The stationary distribution comes from a
    /// linear solve; reversibility is checked at `tol`.
    pub fn from_matrix(p: StochasticMatrix, require_reversible: bool, tol: f64) -> Result<Self> {
        let pi = linalg::stationary_distribution(&p)?;
        Self::with_stationary(p, pi, require_reversible, tol)
    }

    fn with_stationary(
        p: StochasticMatrix,
        pi: ProbabilityVector,
        require_reversible: bool,
        tol: f64,
    ) -> Result<Self> {
        let residual = chain::detailed_balance_residual(&p, &pi);
        let reversible = residual <= tol;
        if require_reversible && !reversible {
            return Err(Error::NotReversible(residual));
        }
        let sym = linalg::build_sym_l(&p, &pi)?;
        let gap = intervals::spectral_gap_estimate(&linalg::symmetric_eigenvalues(&sym)?)?;
        Ok(Self {
            p,
            pi,
            gap,
            reversible,
        })
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn pimin(&self) -> f64 {
        self.pi.min()
    }

    /// Group inverse of `I - P` for the true chain.
    pub fn group_inverse(&self) -> Result<SquareMatrix> {
        linalg::group_inverse(&self.p.laplacian(), &self.pi)
    }

    /// Sensitivity `kappa` of the true chain.
    pub fn kappa(&self) -> Result<f64> {
        Ok(intervals::sensitivity(&self.group_inverse()?))
    }
}

/// Birth-death chain on `0..d` with `P(i, i+1) = up[i]` and `P(i+1, i) = down[i]`.
pub fn birth_death_chain(d: usize, up: &[f64], down: &[f64]) -> Result<ChainModel> {
    if d < 2 {
        return Err(Error::TooFewStates(d));
    }
    if up.len() != d - 1 || down.len() != d - 1 {
        return Err(Error::InvalidRates(format!(
            "need {} up and down rates, got {} and {}",
            d - 1,
            up.len(),
            down.len()
        )));
    }
    if let Some(r) = up.iter().chain(down).find(|r| !(**r > 0.0 && **r <= 1.0)) {
        return Err(Error::InvalidRates(format!("rate {r} outside (0, 1]")));
    }
    let mut p = SquareMatrix::zeros(d);
    for i in 0..d {
        let right = if i + 1 < d { up[i] } else { 0.0 };
        let left = if i > 0 { down[i - 1] } else { 0.0 };
        let hold = 1.0 - right - left;
        if hold < -1e-12 {
            return Err(Error::InvalidRates(format!(
                "state {i}: leaving probability {} exceeds 1",
                right + left
            )));
        }
        p[(i, i)] = hold.max(0.0);
        if i + 1 < d {
            p[(i, i + 1)] = right;
        }
        if i > 0 {
            p[(i, i - 1)] = left;
        }
    }
    let p = StochasticMatrix::new(p)?;

    // pi_{i+1} / pi_i = up_i / down_i.
    let mut weights = vec![1.0; d];
    for i in 0..d - 1 {
        weights[i + 1] = weights[i] * up[i] / down[i];
    }
    let pi = ProbabilityVector::normalized(weights)?;
    let solved = linalg::stationary_distribution(&p)?;
    let mismatch = pi
        .values()
        .iter()
        .zip(solved.values())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    if mismatch > 1e-10 {
        return Err(Error::InvalidRates(format!(
            "product-form stationary distribution disagrees with the linear solve by {mismatch:e}"
        )));
    }
    ChainModel::with_stationary(p, pi, true, MODEL_TOL)
}

/// Random walk with `P_ij = w_ij / sum_k w_ik`; `pi_i` is proportional to the
/// weighted degree.
pub fn random_walk_on_weighted_graph(weights: &SquareMatrix) -> Result<ChainModel> {
    let d = weights.dim();
    if d < 2 {
        return Err(Error::TooFewStates(d));
    }
    if weights.asymmetry() > 0.0 {
        return Err(Error::DisconnectedGraph("weights are not symmetric".into()));
    }
    if weights.row(0).len() != d
        || (0..d).any(|i| weights.row(i).iter().any(|w| w.is_nan() || *w < 0.0))
    {
        return Err(Error::DisconnectedGraph(
            "weights must be non-negative".into(),
        ));
    }
    let degree: Vec<f64> = (0..d).map(|i| weights.row(i).iter().sum()).collect();
    if let Some(i) = degree.iter().position(|&s| s <= 0.0) {
        return Err(Error::DisconnectedGraph(format!("state {i} has no edges")));
    }
    let mut seen = vec![false; d];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..d {
            if weights[(i, j)] > 0.0 && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::DisconnectedGraph(format!(
            "state {i} is unreachable from state 0"
        )));
    }
    let p = StochasticMatrix::new(SquareMatrix::from_fn(d, |i, j| weights[(i, j)] / degree[i]))?;
    let pi = ProbabilityVector::normalized(degree)?;
    ChainModel::with_stationary(p, pi, true, MODEL_TOL)
}

/// Initial state of a simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    Stationary,
    State(usize),
}

fn cumulative(row: &[f64]) -> Vec<f64> {
    row.iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// First index whose cumulative probability reaches `u`; if roundoff leaves
/// the total below `u`, the last index with positive mass.
fn invert_cdf(cum: &[f64], probs: &[f64], u: f64) -> usize {
    let k = cum.partition_point(|&c| c < u);
    if k < cum.len() {
        k
    } else {
        probs
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(cum.len() - 1)
    }
}

pub fn sample_path(model: &ChainModel, n: usize, seed: u64, start: Start) -> Result<SamplePath> {
    let d = model.dim();
    if n < 2 {
        return Err(Error::PathTooShort { len: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || 1.0 - rng.gen::<f64>();
    let mut state = match start {
        Start::State(s) if s < d => s,
        Start::State(s) => {
            return Err(Error::IndexOutOfRange {
                state: s as i64,
                position: 0,
                num_states: d,
            })
        }
        Start::Stationary => {
            let pi = model.pi.values();
            invert_cdf(&cumulative(pi), pi, draw())
        }
    };
    let rows: Vec<Vec<f64>> = (0..d).map(|i| cumulative(model.p.row(i))).collect();
    let mut states = Vec::with_capacity(n);
    states.push(state);
    for _ in 1..n {
        state = invert_cdf(&rows[state], model.p.row(state), draw());
        states.push(state);
    }
    SamplePath::new(states, d)
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `t`: `splitmix64(splitmix64(master_seed) ^ t)`.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ trial)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageConfig {
    pub n: usize,
    pub delta: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub start: Start,
    /// Worker threads; `0` uses the rayon default.
    pub jobs: usize,
    pub options: EstimateOptions,
}

/// Outcome of one simulated path.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub pi_hat: Vec<f64>,
    pub gap_hat: f64,
    pub kappa: f64,
    pub b: f64,
    pub rho: f64,
    pub w: f64,
    pub intervals: IntervalSet,
    /// Every `pi_i` inside its interval simultaneously.
    pub covered_pi: bool,
    pub covered_gap: bool,
    pub covered_pimin: bool,
    pub combined: Option<CombinedCoverage>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedCoverage {
    pub covered_pimin: bool,
    pub covered_gap: bool,
    /// `V` lies inside the empirical gap interval.
    pub gap_subset: bool,
    pub pimin_subset: bool,
    pub status: CombinedStatus,
}

impl CombinedCoverage {
    fn new(c: &CombinedIntervals, set: &IntervalSet, model: &ChainModel) -> Self {
        Self {
            covered_pimin: c.pimin.contains(model.pimin()),
            covered_gap: c.gap.contains(model.gap),
            gap_subset: c.gap.is_subset_of(&set.gap),
            pimin_subset: c.pimin.is_subset_of(&set.pimin),
            status: c.status,
        }
    }
}

pub fn run_trial(model: &ChainModel, cfg: &CoverageConfig, trial: usize) -> Result<TrialResult> {
    let seed = trial_seed(cfg.master_seed, trial as u64);
    let path = sample_path(model, cfg.n, seed, cfg.start)?;
    let est = estimate(&path, cfg.delta, &cfg.options)?;
    let set = est.intervals;
    let covered_pi = set
        .pi
        .iter()
        .zip(model.pi.values())
        .all(|(iv, &p)| iv.contains(p));
    let combined = set
        .combined
        .as_ref()
        .map(|c| CombinedCoverage::new(c, &set, model));
    Ok(TrialResult {
        trial,
        seed,
        n: cfg.n,
        pi_hat: est.pi_hat.values().to_vec(),
        gap_hat: est.gap_hat,
        kappa: est.kappa,
        b: est.b,
        rho: est.rho,
        w: est.w,
        covered_pi,
        covered_gap: set.gap.contains(model.gap),
        covered_pimin: set.pimin.contains(model.pimin()),
        combined,
        intervals: set,
    })
}

/// Fraction of successes with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    pub successes: usize,
    pub trials: usize,
}

impl Proportion {
    pub fn from_flags(flags: impl Iterator<Item = bool>) -> Self {
        let (successes, trials) = flags.fold((0, 0), |(s, t), f| (s + f as usize, t + 1));
        Self { successes, trials }
    }

    pub fn fraction(&self) -> f64 {
        if self.trials == 0 {
            f64::NAN
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    pub fn standard_error(&self) -> f64 {
        let p = self.fraction();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Quantile with linear interpolation between order statistics; `+inf`
/// values sort last and propagate.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    if lo == hi || v[lo] == v[hi] {
        v[lo]
    } else if v[hi].is_infinite() {
        v[hi]
    } else {
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    }
}

/// Median, 10% and 90% quantiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantiles {
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Self {
        Self {
            q10: quantile(values, 0.1),
            median: quantile(values, 0.5),
            q90: quantile(values, 0.9),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageSummary {
    pub config: CoverageConfig,
    pub true_pi: Vec<f64>,
    pub true_gap: f64,
    pub pi: Proportion,
    pub gap: Proportion,
    pub pimin: Proportion,
    pub combined_pimin: Option<Proportion>,
    pub combined_gap: Option<Proportion>,
    pub combined_gap_subset: Option<Proportion>,
    pub combined_intersected: Option<Proportion>,
    pub b: Quantiles,
    pub w: Quantiles,
    pub gap_width: Quantiles,
    pub combined_gap_width: Option<Quantiles>,
    pub results: Vec<TrialResult>,
}

/// Run `cfg.trials` independent estimations and aggregate coverage.
/// The result depends only on `(model, cfg)` minus `cfg.jobs`.
pub fn run_coverage(model: &ChainModel, cfg: &CoverageConfig) -> Result<CoverageSummary> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let run = || -> Result<Vec<TrialResult>> {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(model, cfg, t))
            .collect()
    };
    let results = if cfg.jobs == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(run)?
    };
    Ok(summarize(model, cfg, results))
}

fn summarize(
    model: &ChainModel,
    cfg: &CoverageConfig,
    results: Vec<TrialResult>,
) -> CoverageSummary {
    let combined: Vec<CombinedCoverage> = results.iter().filter_map(|r| r.combined).collect();
    let has_combined = combined.len() == results.len();
    let combined_prop = |f: fn(&CombinedCoverage) -> bool| {
        has_combined.then(|| Proportion::from_flags(combined.iter().map(f)))
    };
    let collect = |f: fn(&TrialResult) -> f64| results.iter().map(f).collect::<Vec<_>>();
    CoverageSummary {
        config: *cfg,
        true_pi: model.pi.values().to_vec(),
        true_gap: model.gap,
        pi: Proportion::from_flags(results.iter().map(|r| r.covered_pi)),
        gap: Proportion::from_flags(results.iter().map(|r| r.covered_gap)),
        pimin: Proportion::from_flags(results.iter().map(|r| r.covered_pimin)),
        combined_pimin: combined_prop(|c| c.covered_pimin),
        combined_gap: combined_prop(|c| c.covered_gap),
        combined_gap_subset: combined_prop(|c| c.gap_subset),
        combined_intersected: combined_prop(|c| c.status == CombinedStatus::Intersected),
        b: Quantiles::of(&collect(|r| r.b)),
        w: Quantiles::of(&collect(|r| r.w)),
        gap_width: Quantiles::of(&collect(|r| r.intervals.gap.width())),
        combined_gap_width: has_combined.then(|| {
            Quantiles::of(
                &results
                    .iter()
                    .filter_map(|r| r.intervals.combined.map(|c| c.gap.width()))
                    .collect::<Vec<_>>(),
            )
        }),
        results,
    }
}
