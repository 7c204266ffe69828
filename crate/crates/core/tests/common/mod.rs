//! Independent reference computations for the integration tests. Nothing
//! here calls into the library's elimination or polynomial code.
#![allow(dead_code)]

use glorbit::ratlin::{RatMatrix, RatVector, Rational};
use num_traits::{One, Zero};

pub type Rows = Vec<Vec<Rational>>;
/// Dense polynomial, lowest coefficient first, possibly with trailing zeros.
pub type Poly = Vec<Rational>;

pub fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

pub fn rows_of(m: &RatMatrix) -> Rows {
    (0..m.n())
        .map(|i| (0..m.n()).map(|j| m.get(i, j).clone()).collect())
        .collect()
}

pub fn mul(a: &Rows, b: &Rows) -> Rows {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn add(a: &Rows, b: &Rows) -> Rows {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn identity(n: usize) -> Rows {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect())
        .collect()
}

pub fn pow(a: &Rows, k: usize) -> Rows {
    (0..k).fold(identity(a.len()), |acc, _| mul(&acc, a))
}

pub fn is_zero(a: &Rows) -> bool {
    a.iter().flatten().all(Zero::is_zero)
}

pub fn apply(a: &Rows, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|r| r.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

/// Rank by plain Gauss–Jordan elimination over ℚ.
pub fn rank(rows: &Rows) -> usize {
    let mut m = rows.clone();
    if m.is_empty() {
        return 0;
    }
    let ncols = m[0].len();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &piv;
                let pivot_row = m[r].clone();
                for (dst, src) in m[i].iter_mut().zip(&pivot_row) {
                    *dst -= &f * src;
                }
            }
        }
        r += 1;
    }
    r
}

/// All permutations of `0..n` with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|p| {
            let inv = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            (p, inv % 2 == 0)
        })
        .collect()
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![q(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Leibniz expansion of a determinant whose entries are polynomials.
pub fn det_poly(n: usize, entry: impl Fn(usize, usize) -> Poly) -> Poly {
    let mut acc: Poly = vec![q(0); n + 1];
    for (p, even) in permutations(n) {
        let term = (0..n).fold(vec![q(1)], |t, i| poly_mul(&t, &entry(i, p[i])));
        for (k, c) in term.into_iter().enumerate() {
            if k >= acc.len() {
                acc.resize(k + 1, q(0));
            }
            if even {
                acc[k] += c;
            } else {
                acc[k] -= c;
            }
        }
    }
    poly_trim(acc)
}

pub fn det(a: &Rows) -> Rational {
    det_poly(a.len(), |i, j| vec![a[i][j].clone()])
        .first()
        .cloned()
        .unwrap_or_else(Rational::zero)
}

/// `det(t·1 − A)` by Leibniz expansion.
pub fn char_poly(a: &Rows) -> Poly {
    let n = a.len();
    det_poly(n, |i, j| {
        if i == j {
            vec![-a[i][j].clone(), q(1)]
        } else {
            vec![-a[i][j].clone()]
        }
    })
}

pub fn poly_derivative(p: &Poly) -> Poly {
    poly_trim(p.iter().enumerate().skip(1).map(|(k, c)| c * q(k as i64)).collect())
}

pub fn poly_divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let b = poly_trim(b.clone());
    let mut r = poly_trim(a.clone());
    assert!(!b.is_empty(), "division by zero polynomial");
    let db = b.len() - 1;
    let mut quo = vec![q(0); r.len().saturating_sub(db).max(1)];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() / b.last().unwrap();
        for (i, bc) in b.iter().enumerate() {
            r[i + k] -= &c * bc;
        }
        quo[k] = c;
        r = poly_trim(r);
    }
    (poly_trim(quo), r)
}

pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (poly_trim(a.clone()), poly_trim(b.clone()));
    while !y.is_empty() {
        let r = poly_divrem(&x, &y).1;
        x = y;
        y = r;
    }
    let lead = x.last().cloned().unwrap_or_else(Rational::one);
    x.iter().map(|c| c / &lead).collect()
}

pub fn poly_eval_mat(p: &Poly, a: &Rows) -> Rows {
    let n = a.len();
    let mut acc = vec![vec![q(0); n]; n];
    for c in p.iter().rev() {
        acc = add(
            &mul(&acc, a),
            &identity(n).iter().map(|r| r.iter().map(|x| x * c).collect()).collect(),
        );
    }
    acc
}

/// Semisimple over ℚ̄ iff the squarefree part of the characteristic
/// polynomial annihilates the matrix.
pub fn is_semisimple(a: &Rows) -> bool {
    let c = char_poly(a);
    let g = poly_gcd(&c, &poly_derivative(&c));
    let sf = poly_divrem(&c, &g).0;
    is_zero(&poly_eval_mat(&sf, a))
}

pub fn is_nilpotent(a: &Rows) -> bool {
    is_zero(&pow(a, a.len()))
}

/// dim span(v, Av, A²v, …).
pub fn krylov_rank(a: &Rows, v: &[Rational]) -> usize {
    let mut cols = vec![v.to_vec()];
    for _ in 1..a.len() {
        let next = apply(a, cols.last().unwrap());
        cols.push(next);
    }
    rank(&cols)
}

/// `det(v, Av, …, A^{n−1}v)` with the vectors as columns.
pub fn krylov_det(a: &Rows, v: &[Rational]) -> Rational {
    let n = a.len();
    let mut cols = vec![v.to_vec()];
    for _ in 1..n {
        let next = apply(a, cols.last().unwrap());
        cols.push(next);
    }
    let m: Rows = (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect();
    det(&m)
}

pub fn commutator(a: &Rows, b: &Rows) -> Rows {
    let ab = mul(a, b);
    let ba = mul(b, a);
    ab.iter()
        .zip(&ba)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn vec_of(v: &RatVector) -> Vec<Rational> {
    v.entries().to_vec()
}
