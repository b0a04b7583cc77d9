//! Dense linear algebra for small chains: LU solves, the group inverse of
//! `I - P`, stationary distributions, the symmetrized similarity transform
//! and a symmetric eigenvalue solver.

use std::ops::{Index, IndexMut};

use crate::chain::{ProbabilityVector, StochasticMatrix};
use crate::error::{Error, Result};

/// Dense row-major `d x d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        if let Some(x) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite matrix entry {x}"
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max |S_ij - S_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

/// LU factorization with partial pivoting, `PA = LU` stored in place.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: SquareMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(mut a: SquareMatrix) -> Result<Self> {
        let d = a.dim();
        let tiny = f64::EPSILON * d as f64 * a.max_abs().max(f64::MIN_POSITIVE);
        let mut perm: Vec<usize> = (0..d).collect();
        for k in 0..d {
            let (p, pivot) = (k..d)
                .map(|i| (i, a[(i, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if pivot <= tiny {
                return Err(Error::SingularSystem { column: k, pivot });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..d {
                    let tmp = a[(p, j)];
                    a[(p, j)] = a[(k, j)];
                    a[(k, j)] = tmp;
                }
            }
            let akk = a[(k, k)];
            for i in (k + 1)..d {
                let f = a[(i, k)] / akk;
                a[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..d {
                        a[(i, j)] -= f * a[(k, j)];
                    }
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let d = self.lu.dim();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..d {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..d).rev() {
            let s: f64 = ((i + 1)..d).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> SquareMatrix {
        let d = self.lu.dim();
        let mut inv = SquareMatrix::zeros(d);
        let mut e = vec![0.0; d];
        for j in 0..d {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }
}

/// Unique stationary distribution of an irreducible `P`.
///
/// Solves `(P^T - I) x = 0` with the last equation replaced by `sum(x) = 1`.
pub fn stationary_distribution(p: &StochasticMatrix) -> Result<ProbabilityVector> {
    let d = p.dim();
    let mut system = SquareMatrix::from_fn(d, |i, j| p.get(j, i) - if i == j { 1.0 } else { 0.0 });
    for j in 0..d {
        system[(d - 1, j)] = 1.0;
    }
    let mut rhs = vec![0.0; d];
    rhs[d - 1] = 1.0;
    let mut x = Lu::factor(system)?.solve(&rhs);
    // Roundoff can leave entries at -1e-17 for near-zero mass.
    for (i, v) in x.iter_mut().enumerate() {
        if *v < 0.0 {
            if *v < -1e-10 {
                return Err(Error::SingularSystem {
                    column: i,
                    pivot: *v,
                });
            }
            *v = 0.0;
        }
    }
    ProbabilityVector::normalized(x)
}

/// Group inverse `A#` of `A = I - P` via the fundamental matrix
/// `Z = (A + 1 pi^T)^{-1}`, `A# = Z - 1 pi^T`.
pub fn group_inverse(a: &SquareMatrix, pi: &ProbabilityVector) -> Result<SquareMatrix> {
    let d = a.dim();
    if pi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: pi.len(),
        });
    }
    if a.max_abs() == 0.0 {
        return Ok(SquareMatrix::zeros(d));
    }
    let shifted = SquareMatrix::from_fn(d, |i, j| a[(i, j)] + pi[j]);
    let mut z = Lu::factor(shifted)?.inverse();
    for i in 0..d {
        for j in 0..d {
            z[(i, j)] -= pi[j];
        }
    }
    Ok(z)
}

/// Max-norm residuals of `A X A = A`, `X A X = X`, `A X = X A`.
pub fn group_inverse_residuals(a: &SquareMatrix, x: &SquareMatrix) -> [f64; 3] {
    let ax = a.matmul(x);
    let xa = x.matmul(a);
    [
        ax.matmul(a).max_abs_diff(a),
        xa.matmul(x).max_abs_diff(x),
        ax.max_abs_diff(&xa),
    ]
}

/// `Sym(L)` with `L = Diag(pi)^{1/2} P Diag(pi)^{-1/2}`. The result is exactly symmetric.
pub fn build_sym_l(p: &StochasticMatrix, pi: &ProbabilityVector) -> Result<SquareMatrix> {
    let d = p.dim();
    if pi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: pi.len(),
        });
    }
    if let Some(i) = pi.values().iter().position(|&x| x <= 0.0) {
        return Err(Error::ZeroStationaryEntry(i));
    }
    let root: Vec<f64> = pi.values().iter().map(|x| x.sqrt()).collect();
    let mut s = SquareMatrix::zeros(d);
    for i in 0..d {
        for j in i..d {
            let lij = root[i] / root[j] * p.get(i, j);
            let lji = root[j] / root[i] * p.get(j, i);
            let v = 0.5 * (lij + lji);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    Ok(s)
}

/// Eigenvalues sorted in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueList(Vec<f64>);

impl EigenvalueList {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self(values)
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

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// All eigenvalues of a symmetric matrix, descending.
///
/// Householder reduction to tridiagonal form followed by implicit QL with
/// Wilkinson-style shifts.
pub fn symmetric_eigenvalues(s: &SquareMatrix) -> Result<EigenvalueList> {
    let n = s.dim();
    let asym = s.asymmetry();
    if asym > 1e-12 * s.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    if n == 0 {
        return Ok(EigenvalueList(Vec::new()));
    }
    let (mut diag, mut off) = tridiagonalize(s.clone());
    tridiagonal_ql(&mut diag, &mut off)?;
    Ok(EigenvalueList::new(diag))
}

/// Householder reduction. Returns the diagonal and the sub-diagonal, with the
/// sub-diagonal stored in `off[1..]`.
fn tridiagonalize(mut a: SquareMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut off = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[(i, k)].abs()).sum();
            if scale == 0.0 {
                off[i] = a[(i, l)];
            } else {
                for k in 0..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                off[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    off[j] = g / h;
                    f += off[j] * a[(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[(i, j)];
                    let g = off[j] - hh * f;
                    off[j] = g;
                    for k in 0..=j {
                        a[(j, k)] -= f * off[k] + g * a[(i, k)];
                    }
                }
            }
        } else {
            off[i] = a[(i, l)];
        }
    }
    let diag = (0..n).map(|i| a[(i, i)]).collect();
    (diag, off)
}

fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::SingularSystem {
                    column: l,
                    pivot: e[l],
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(p: f64, q: f64) -> StochasticMatrix {
        StochasticMatrix::from_rows(&[vec![1.0 - p, p], vec![q, 1.0 - q]]).unwrap()
    }

    #[test]
    fn lu_solves_small_system() {
        let a = SquareMatrix::from_rows(&[vec![0.0, 2.0], vec![3.0, 1.0]]).unwrap();
        let x = Lu::factor(a).unwrap().solve(&[4.0, 5.0]);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        let singular = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(
            Lu::factor(singular),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn zero_matrix_group_inverse() {
        let a = SquareMatrix::zeros(3);
        let x = group_inverse(&a, &ProbabilityVector::uniform(3)).unwrap();
        assert_eq!(x, SquareMatrix::zeros(3));
    }

    #[test]
    fn uniform_chain_is_its_own_group_inverse() {
        for d in [2, 3, 7] {
            let p = StochasticMatrix::new(SquareMatrix::from_fn(d, |_, _| 1.0 / d as f64)).unwrap();
            let a = p.laplacian();
            let x = group_inverse(&a, &ProbabilityVector::uniform(d)).unwrap();
            assert!(x.max_abs_diff(&a) < 1e-14);
        }
    }

    #[test]
    fn two_state_group_inverse_closed_form() {
        let (p, q) = (0.3, 0.2);
        let chain = two_state(p, q);
        let a = chain.laplacian();
        let pi = stationary_distribution(&chain).unwrap();
        let x = group_inverse(&a, &pi).unwrap();
        let expected = SquareMatrix::from_fn(2, |i, j| a[(i, j)] / ((p + q) * (p + q)));
        assert!(x.max_abs_diff(&expected) < 1e-14);
        for r in group_inverse_residuals(&a, &x) {
            assert!(r < 1e-14);
        }
    }

    #[test]
    fn stationary_examples() {
        let sym = StochasticMatrix::from_rows(&[
            vec![0.2, 0.5, 0.3],
            vec![0.5, 0.1, 0.4],
            vec![0.3, 0.4, 0.3],
        ])
        .unwrap();
        let pi = stationary_distribution(&sym).unwrap();
        assert!(pi.values().iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));

        let pi = stationary_distribution(&two_state(0.3, 0.6)).unwrap();
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((pi[1] - 1.0 / 3.0).abs() < 1e-15);

        let pi = stationary_distribution(&two_state(0.25, 0.25)).unwrap();
        assert_eq!(pi.values(), &[0.5, 0.5]);
    }

    #[test]
    fn reducible_chain_is_singular() {
        let p = StochasticMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.5],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap();
        assert!(matches!(
            stationary_distribution(&p),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn sym_l_examples() {
        let sym = StochasticMatrix::from_rows(&[vec![0.4, 0.6], vec![0.6, 0.4]]).unwrap();
        let s = build_sym_l(&sym, &ProbabilityVector::uniform(2)).unwrap();
        assert!(s.max_abs_diff(sym.matrix()) < 1e-16);

        let cycle = StochasticMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let s = build_sym_l(&cycle, &ProbabilityVector::uniform(3)).unwrap();
        let expected = SquareMatrix::from_fn(3, |i, j| if i == j { 0.0 } else { 0.5 });
        assert!(s.max_abs_diff(&expected) < 1e-15);

        let zero = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(build_sym_l(&sym, &zero), Err(Error::ZeroStationaryEntry(1)));
    }

    #[test]
    fn reversible_chain_gives_symmetric_l() {
        let chain = two_state(0.3, 0.2);
        let pi = stationary_distribution(&chain).unwrap();
        let s = build_sym_l(&chain, &pi).unwrap();
        let l = SquareMatrix::from_fn(2, |i, j| (pi[i] / pi[j]).sqrt() * chain.get(i, j));
        assert!(s.max_abs_diff(&l) < 1e-15);
        let eig = symmetric_eigenvalues(&s).unwrap();
        assert!((eig.values()[0] - 1.0).abs() < 1e-14);
        assert!((eig.values()[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn eigen_examples() {
        let s = SquareMatrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        assert_eq!(
            symmetric_eigenvalues(&s).unwrap().values(),
            &[3.0, 2.0, 1.0]
        );

        let s = SquareMatrix::from_rows(&[vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap();
        let e = symmetric_eigenvalues(&s).unwrap();
        assert!((e.values()[0] - 0.75).abs() < 1e-15);
        assert!((e.values()[1] - 0.25).abs() < 1e-15);

        let bad = SquareMatrix::from_rows(&[vec![0.5, 0.25], vec![0.2, 0.5]]).unwrap();
        assert!(matches!(
            symmetric_eigenvalues(&bad),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn one_by_one_and_repeated_eigenvalues() {
        let s = SquareMatrix::from_rows(&[vec![4.0]]).unwrap();
        assert_eq!(symmetric_eigenvalues(&s).unwrap().values(), &[4.0]);
        let s = SquareMatrix::identity(5);
        assert!(symmetric_eigenvalues(&s)
            .unwrap()
            .values()
            .iter()
            .all(|x| (x - 1.0).abs() < 1e-15));
    }
}
