//! Validated containers for sample paths, transition matrices and
//! probability vectors.
//!
//! States are 0-based everywhere inside the crate.

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

/// Tolerance for row sums and total mass of library-built objects.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// An observed trajectory `X_1, ..., X_n` over the states `0..num_states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePath {
    states: Vec<usize>,
    num_states: usize,
}

impl SamplePath {
    pub fn new(states: Vec<usize>, num_states: usize) -> Result<Self> {
        if num_states < 2 {
            return Err(Error::TooFewStates(num_states));
        }
        if let Some((position, &state)) = states.iter().enumerate().find(|(_, &s)| s >= num_states)
        {
            return Err(Error::IndexOutOfRange {
                state: state as i64,
                position,
                num_states,
            });
        }
        if states.len() < 2 {
            return Err(Error::PathTooShort { len: states.len() });
        }
        Ok(Self { states, num_states })
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    /// Path length `n`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Always false; a valid path has at least two states.
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn into_states(self) -> Vec<usize> {
        self.states
    }
}

/// Validate raw integer states into a [`SamplePath`].
///
/// When `num_states` is `None` the state count is inferred as `1 + max`,
/// which undercounts if the highest-numbered states were never visited.
pub fn validate_path(raw: &[i64], num_states: Option<usize>) -> Result<SamplePath> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some((position, &state)) = raw.iter().enumerate().find(|(_, &s)| s < 0) {
        return Err(Error::IndexOutOfRange {
            state,
            position,
            num_states: num_states.unwrap_or(0),
        });
    }
    let d = match num_states {
        Some(d) => d,
        None => raw.iter().copied().max().map_or(0, |m| m as usize + 1),
    };
    if let Some((position, &state)) = raw.iter().enumerate().find(|(_, &s)| s as usize >= d) {
        return Err(Error::IndexOutOfRange {
            state,
            position,
            num_states: d,
        });
    }
    if raw.len() < 2 {
        return Err(Error::PathTooShort { len: raw.len() });
    }
    SamplePath::new(raw.iter().map(|&s| s as usize).collect(), d)
}

/// A row-stochastic `d x d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix(SquareMatrix);

impl StochasticMatrix {
    /// Wrap `m`, requiring non-negative entries and unit row sums within 1e-12.
    pub fn new(m: SquareMatrix) -> Result<Self> {
        Self::check(&m, STOCHASTIC_TOL)?;
        Ok(Self(m))
    }

    /// Validate at a looser tolerance (e.g. for matrices read from text),
    /// then rescale every row to sum to one.
    pub fn with_tolerance(mut m: SquareMatrix, tol: f64) -> Result<Self> {
        Self::check(&m, tol)?;
        let d = m.dim();
        for i in 0..d {
            let s: f64 = m.row(i).iter().sum();
            for j in 0..d {
                m[(i, j)] /= s;
            }
        }
        Self::new(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    fn check(m: &SquareMatrix, tol: f64) -> Result<()> {
        let d = m.dim();
        if d < 2 {
            return Err(Error::TooFewStates(d));
        }
        for i in 0..d {
            let row = m.row(i);
            if let Some(j) = row.iter().position(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::NotStochastic(format!(
                    "entry ({i}, {j}) = {} is negative or not finite",
                    row[j]
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::NotStochastic(format!("row {i} sums to {s}")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.0.row(i)
    }

    /// `I - P`.
    pub fn laplacian(&self) -> SquareMatrix {
        let d = self.dim();
        let mut a = SquareMatrix::identity(d);
        for i in 0..d {
            for j in 0..d {
                a[(i, j)] -= self.0[(i, j)];
            }
        }
        a
    }
}

/// A distribution over `0..d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::NotProbability(format!(
                "entry {i} = {} is negative or not finite",
                values[i]
            )));
        }
        let s: f64 = values.iter().sum();
        if (s - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::NotProbability(format!("entries sum to {s}")));
        }
        Ok(Self(values))
    }

    /// Divide by the total mass. Fails if any entry is negative or the mass is zero.
    pub fn normalized(mut values: Vec<f64>) -> Result<Self> {
        let s: f64 = values.iter().sum();
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::NotProbability(format!("total mass {s}")));
        }
        values.iter_mut().for_each(|x| *x /= s);
        Self::new(values)
    }

    pub fn uniform(d: usize) -> Self {
        Self(vec![1.0 / d as f64; d])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Smallest entry, `pi_min`.
    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Detailed balance: `|pi_i P_ij - pi_j P_ji| <= tol` for every pair.
pub fn check_reversible(p: &StochasticMatrix, pi: &ProbabilityVector, tol: f64) -> bool {
    detailed_balance_residual(p, pi) <= tol
}

/// Largest violation of detailed balance.
pub fn detailed_balance_residual(p: &StochasticMatrix, pi: &ProbabilityVector) -> f64 {
    let d = p.dim();
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in (i + 1)..d {
            worst = worst.max((pi[i] * p.get(i, j) - pi[j] * p.get(j, i)).abs());
        }
    }
    worst
}

/// `max_j |(pi^T P)_j - pi_j|`.
pub fn stationarity_residual(p: &StochasticMatrix, pi: &ProbabilityVector) -> f64 {
    let d = p.dim();
    (0..d)
        .map(|j| {
            let flow: f64 = (0..d).map(|i| pi[i] * p.get(i, j)).sum();
            (flow - pi[j]).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        let p = validate_path(&[0, 1, 0, 1], Some(2)).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.num_states(), 2);

        assert!(matches!(
            validate_path(&[0, 1, 2], Some(2)),
            Err(Error::IndexOutOfRange {
                state: 2,
                position: 2,
                num_states: 2
            })
        ));
        assert_eq!(
            validate_path(&[0], None),
            Err(Error::PathTooShort { len: 1 })
        );
        assert_eq!(validate_path(&[], Some(3)), Err(Error::EmptyInput));
        assert!(matches!(
            validate_path(&[0, -1], Some(3)),
            Err(Error::IndexOutOfRange { state: -1, .. })
        ));
    }

    #[test]
    fn inferred_state_count() {
        let p = validate_path(&[0, 3, 1], None).unwrap();
        assert_eq!(p.num_states(), 4);
        assert_eq!(validate_path(&[0, 0, 0], None), Err(Error::TooFewStates(1)));
    }

    #[test]
    fn validation_is_idempotent() {
        let p = validate_path(&[2, 0, 1, 1], Some(5)).unwrap();
        let raw: Vec<i64> = p.states().iter().map(|&s| s as i64).collect();
        assert_eq!(validate_path(&raw, Some(p.num_states())).unwrap(), p);
    }

    #[test]
    fn reversibility_examples() {
        let sym = StochasticMatrix::from_rows(&[
            vec![0.5, 0.3, 0.2],
            vec![0.3, 0.4, 0.3],
            vec![0.2, 0.3, 0.5],
        ])
        .unwrap();
        assert!(check_reversible(
            &sym,
            &ProbabilityVector::uniform(3),
            1e-12
        ));

        let cycle = StochasticMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(!check_reversible(
            &cycle,
            &ProbabilityVector::uniform(3),
            1e-12
        ));

        // pi P = pi gives pi = (1/3, 2/3); both flows equal 2/15.
        let two = StochasticMatrix::from_rows(&[vec![0.6, 0.4], vec![0.2, 0.8]]).unwrap();
        let pi = ProbabilityVector::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert!((pi[0] * two.get(0, 1) - 2.0 / 15.0).abs() < 1e-15);
        assert!(check_reversible(&two, &pi, 1e-12));
    }

    #[test]
    fn stochastic_validation() {
        assert!(matches!(
            StochasticMatrix::from_rows(&[vec![0.5, 0.6], vec![0.5, 0.5]]),
            Err(Error::NotStochastic(_))
        ));
        assert!(matches!(
            StochasticMatrix::from_rows(&[vec![1.1, -0.1], vec![0.5, 0.5]]),
            Err(Error::NotStochastic(_))
        ));
        let loose = SquareMatrix::from_rows(&[vec![0.5, 0.5 + 1e-10], vec![0.25, 0.75]]).unwrap();
        assert!(StochasticMatrix::new(loose.clone()).is_err());
        let p = StochasticMatrix::with_tolerance(loose, 1e-9).unwrap();
        assert!((p.row(0).iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn probability_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![-0.1, 1.1]).is_err());
        let p = ProbabilityVector::normalized(vec![1.0, 3.0]).unwrap();
        assert_eq!(p.values(), &[0.25, 0.75]);
        assert_eq!(p.min(), 0.25);
    }
}
