//! Confidence intervals for the stationary distribution, spectral gap and
//! relaxation time of an ergodic reversible Markov chain, computed from a
//! single sample path.
//!
//! The pipeline is: count transitions ([`path_stats`]), form smoothed
//! transition estimates, compute the stationary distribution, the group
//! inverse of `I - P` and the spectrum of the symmetrized chain
//! ([`linalg`]), then turn entrywise martingale bounds into intervals
//! ([`intervals`]). [`estimator::estimate`] runs all of it.

pub mod chain;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod intervals;
pub mod linalg;
pub mod path_stats;
pub mod report;
pub mod simulator;

pub use chain::{check_reversible, validate_path, ProbabilityVector, SamplePath, StochasticMatrix};
pub use error::{Error, Result};
pub use estimator::{estimate, Estimate, EstimateOptions};
pub use intervals::{Interval, IntervalSet};
pub use linalg::{EigenvalueList, SquareMatrix};
