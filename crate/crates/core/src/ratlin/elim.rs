use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::{RatMatrix, RatVector};
use super::scalar::Rational;
use crate::error::{Error, Result};

/// Clears denominators row by row so elimination can run over the integers.
fn integer_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            r.iter().map(|q| q.numer() * (&l / q.denom())).collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) forward elimination; returns the rank and the
/// last pivot, whose sign-corrected value is the determinant in the square
/// full-rank case.
fn bareiss(mut a: Vec<Vec<BigInt>>) -> (usize, BigInt, bool) {
    let m = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut row = 0;
    let mut negated = false;
    for col in 0..ncols {
        if row == m {
            break;
        }
        let Some(p) = (row..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        if p != row {
            a.swap(p, row);
            negated = !negated;
        }
        for i in row + 1..m {
            for j in col + 1..ncols {
                let num = &a[row][col] * &a[i][j] - &a[i][col] * &a[row][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[row][col].clone();
        row += 1;
    }
    (row, prev, negated)
}

/// Rank over ℚ of a (possibly rectangular) matrix given by rows.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    bareiss(integer_rows(rows)).0
}

pub fn determinant(m: &RatMatrix) -> Rational {
    let rows = m.rows();
    // Row scaling by l_i multiplies det by l_i.
    let scale = rows.iter().fold(Rational::one(), |acc, r| {
        let l = r.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        acc * Rational::from_integer(l)
    });
    let (r, last, negated) = bareiss(integer_rows(&rows));
    if r < m.n() {
        return Rational::zero();
    }
    let d = Rational::from_integer(if negated { -last } else { last });
    d / scale
}

/// Reduced row-echelon form together with pivot columns.
#[derive(Debug, Clone)]
pub struct Rref {
    pub rows: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

pub fn rref(rows: &[Vec<Rational>], ncols: usize) -> Rref {
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let m = a.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m {
            break;
        }
        let Some(p) = (row..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(p, row);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut().skip(col) {
            *x *= &inv;
        }
        let pivot_row = a[row].clone();
        for (i, r) in a.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (x, y) in r.iter_mut().zip(&pivot_row).skip(col) {
                *x -= &f * y;
            }
        }
        pivots.push(col);
        row += 1;
    }
    a.truncate(row);
    Rref { rows: a, pivots, ncols }
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the echelon rows; zero iff `v` is in the row span.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (r, &c) in self.rows.iter().zip(&self.pivots) {
            if v[c].is_zero() {
                continue;
            }
            let f = v[c].clone();
            for (x, y) in v.iter_mut().zip(r).skip(c) {
                *x -= &f * y;
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }
}

/// Null-space basis, one vector per free column in ascending order, with the
/// free variable set to 1 and the other free variables to 0.
pub fn kernel_basis(rows: &[Vec<Rational>], ncols: usize) -> Vec<RatVector> {
    let r = rref(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &c in &r.pivots {
        is_pivot[c] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &c) in r.rows.iter().zip(&r.pivots) {
                v[c] = -row[f].clone();
            }
            RatVector::new(v).expect("ncols >= 1 when a free column exists")
        })
        .collect()
}

/// A particular solution of `A x = b` (free variables zero), or `None`.
pub fn solve(rows: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(rows.len(), rhs.len());
    let ncols = rows.first().map_or(0, Vec::len);
    let aug: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let red = rref(&aug, ncols + 1);
    if red.pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (row, &c) in red.rows.iter().zip(&red.pivots) {
        x[c] = row[ncols].clone();
    }
    Some(x)
}

/// Whether `v` lies in the span of `basis` (exact rank comparison).
pub fn span_contains(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    let r0 = rank(basis);
    let mut aug = basis.to_vec();
    aug.push(v.to_vec());
    rank(&aug) == r0
}

pub fn inverse(m: &RatMatrix) -> Result<RatMatrix> {
    let n = m.n();
    let aug: Vec<Vec<Rational>> = m
        .rows()
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let red = rref(&aug, 2 * n);
    if red.rank() < n || red.pivots[n - 1] != n - 1 {
        return Err(Error::Singular);
    }
    Ok(RatMatrix::from_fn(n, |i, j| red.rows[i][n + j].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::rat;

    fn rows(v: &[&[i64]]) -> Vec<Vec<Rational>> {
        v.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RatMatrix::identity(3).rows()), 3);
        assert_eq!(rank(&RatMatrix::zeros(3).rows()), 0);
        assert_eq!(rank(&rows(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&rows(&[&[0, 1, 2], &[0, 2, 4], &[1, 0, 0]])), 2);
    }

    #[test]
    fn rank_with_fractions() {
        let r = vec![vec![Rational::new(1.into(), 2.into()), rat(1)], vec![rat(1), rat(2)]];
        assert_eq!(rank(&r), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&RatMatrix::identity(3).rows(), 3).is_empty());
        let k = kernel_basis(&RatMatrix::zeros(2).rows(), 2);
        assert_eq!(k, vec![RatVector::unit(2, 0), RatVector::unit(2, 1)]);
        let k = kernel_basis(&rows(&[&[1, 1]]), 2);
        assert_eq!(k, vec![RatVector::from_ints(&[-1, 1])]);
    }

    #[test]
    fn determinant_and_inverse() {
        let m = RatMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert_eq!(determinant(&m), rat(-1));
        let m = RatMatrix::from_ints(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(determinant(&m), rat(18));
        let inv = inverse(&m).unwrap();
        assert_eq!(&inv * &m, RatMatrix::identity(3));
        assert_eq!(
            inverse(&RatMatrix::from_ints(&[&[1, 2], &[2, 4]])),
            Err(Error::Singular)
        );
        let half = RatMatrix::diag(&[Rational::new(1.into(), 2.into()), rat(3)]);
        assert_eq!(determinant(&half), Rational::new(3.into(), 2.into()));
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = rows(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&a, &[rat(3), rat(6)]), Some(vec![rat(3), rat(0)]));
        assert_eq!(solve(&a, &[rat(3), rat(5)]), None);
    }
}
