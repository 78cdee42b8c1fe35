//! Small exact linear algebra over Z and Q: fraction-free determinants,
//! Gaussian elimination, integer kernels via unimodular row reduction, and
//! saturated lattice bases of rational spans. Matrices here are tiny (desk
//! scale), so clarity wins over asymptotics.

use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Determinant by the Bareiss fraction-free algorithm.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(m.iter().all(|r| r.len() == n), "square matrix required");
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i][k].is_zero());
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev; // exact division (Bareiss invariant)
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Reduced row echelon form over Q. Returns the echelon matrix and the pivot
/// column of each nonzero row.
pub fn rref_rat(mut m: Vec<Vec<Rat>>) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].clone().recip();
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank_rat(m: &[Vec<Rat>]) -> usize {
    let (_, pivots) = rref_rat(m.to_vec());
    pivots.len()
}

/// Solve the square system `M x = rhs` over Q; `None` when singular or
/// inconsistent.
pub fn solve_rat(m: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = m.len();
    assert_eq!(rhs.len(), n);
    let mut aug: Vec<Vec<Rat>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let cols = n + 1;
    let (ech, pivots) = {
        let m = std::mem::take(&mut aug);
        rref_rat(m)
    };
    if pivots.iter().any(|&c| c == cols - 1) {
        return None; // inconsistent
    }
    if pivots.len() < n {
        return None; // singular (we only need unique solutions)
    }
    let mut x = vec![Rat::zero(); n];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = ech[row][cols - 1].clone();
    }
    Some(x)
}

/// Basis of the rational kernel `{x : M x = 0}`.
pub fn kernel_rat(m: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let (ech, pivots) = rref_rat(m.to_vec());
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_set.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Rat::zero(); cols];
        v[f] = Rat::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -ech[row][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Row Hermite-style reduction of `[A^T | I]`, returning a basis of the
/// integer kernel `{x in Z^n : A x = 0}`. The basis is saturated: every
/// integer kernel vector is an integer combination of the returned rows.
pub fn integer_kernel(a: &[Vec<BigInt>], n_cols: usize) -> Vec<Vec<BigInt>> {
    let r = a.len();
    // rows of work = n_cols; columns = r (A^T part) + n_cols (identity part)
    let mut work: Vec<Vec<BigInt>> = (0..n_cols)
        .map(|i| {
            let mut row: Vec<BigInt> = (0..r).map(|j| a[j][i].clone()).collect();
            for k in 0..n_cols {
                row.push(if k == i { BigInt::one() } else { BigInt::zero() });
            }
            row
        })
        .collect();
    let mut top = 0;
    for c in 0..r {
        loop {
            // find the row with smallest nonzero |entry| in column c at or below top
            let mut best: Option<usize> = None;
            for i in top..n_cols {
                if work[i][c].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(i),
                    Some(b) => {
                        if work[i][c].abs() < work[b][c].abs() {
                            Some(i)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            let Some(b) = best else { break };
            work.swap(top, b);
            let mut done = true;
            for i in top + 1..n_cols {
                if work[i][c].is_zero() {
                    continue;
                }
                let q = div_round(&work[i][c], &work[top][c]);
                if !q.is_zero() {
                    for j in 0..r + n_cols {
                        let sub = &q * &work[top][j];
                        work[i][j] = &work[i][j] - &sub;
                    }
                }
                if !work[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                top += 1;
                break;
            }
        }
    }
    work[top..]
        .iter()
        .map(|row| row[r..].to_vec())
        .collect()
}

/// Nearest-integer division used during Hermite reduction.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, rem) = a.div_rem(b);
    let two_rem = &rem * BigInt::from(2);
    if two_rem.abs() > b.abs() {
        if (rem.is_negative()) == (b.is_negative()) {
            q + BigInt::one()
        } else {
            q - BigInt::one()
        }
    } else {
        q
    }
}

/// Saturated lattice basis of `span(points) n Z^dim`: rows generate exactly the
/// integer points of the rational span. Points are rational vectors of length
/// `dim`; the result has `rank(points)` rows.
pub fn span_lattice_basis(points: &[Vec<Rat>], dim: usize) -> Vec<Vec<BigInt>> {
    let m: Vec<Vec<Rat>> = points.to_vec();
    // orthogonal-complement constraints: rational kernel of the point rows
    let kern = kernel_rat(&m);
    if kern.is_empty() {
        // full span
        return (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
    }
    let constraints: Vec<Vec<BigInt>> = kern
        .iter()
        .map(|v| {
            let lcm = crate::rat::denominator_lcm(v);
            v.iter()
                .map(|x| (x * Rat::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect();
    integer_kernel(&constraints, dim)
}

/// Coordinates of `v` with respect to independent basis rows, or `None` when
/// `v` lies outside their span.
pub fn coords_in_rowspace(basis: &[Vec<BigInt>], v: &[Rat]) -> Option<Vec<Rat>> {
    let k = basis.len();
    if k == 0 {
        return if v.iter().all(|x| x.is_zero()) {
            Some(Vec::new())
        } else {
            None
        };
    }
    let dim = basis[0].len();
    // solve y * basis = v via the normal-free approach: pick independent columns
    let mut aug: Vec<Vec<Rat>> = (0..dim)
        .map(|j| {
            let mut row: Vec<Rat> = (0..k)
                .map(|i| Rat::from_integer(basis[i][j].clone()))
                .collect();
            row.push(v[j].clone());
            row
        })
        .collect();
    let cols = k + 1;
    let (ech, pivots) = {
        let m = std::mem::take(&mut aug);
        rref_rat(m)
    };
    if pivots.iter().any(|&c| c == cols - 1) {
        return None;
    }
    let mut y = vec![Rat::zero(); k];
    for (row, &c) in pivots.iter().enumerate() {
        y[c] = ech[row][cols - 1].clone();
    }
    Some(y)
}
