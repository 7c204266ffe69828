use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::scalar::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// Dense square matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<Rational>,
}

/// Column vector over the rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatVector {
    entries: Vec<Rational>,
}

impl RatVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        Ok(RatVector { entries })
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self::new(v.iter().map(|&x| super::rat(x)).collect()).expect("nonempty vector")
    }

    pub fn zeros(n: usize) -> Self {
        RatVector {
            entries: vec![Rational::zero(); n],
        }
    }

    /// Standard basis vector `e_i` (0-based index).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coordinate.
    pub fn pivot(&self) -> Option<usize> {
        self.entries.iter().position(|x| !x.is_zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RatVector {
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    pub fn dot(&self, other: &RatVector) -> Rational {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }
}

impl Add for &RatVector {
    type Output = RatVector;
    fn add(self, rhs: &RatVector) -> RatVector {
        assert_eq!(self.dim(), rhs.dim());
        RatVector {
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RatVector {
    type Output = RatVector;
    fn sub(self, rhs: &RatVector) -> RatVector {
        assert_eq!(self.dim(), rhs.dim());
        RatVector {
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl RatMatrix {
    pub fn new(n: usize, entries: Vec<Rational>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::NotSquare);
        }
        Ok(RatMatrix { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        Ok(RatMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| super::rat(x)).collect())
                .collect(),
        )
        .expect("square integer matrix")
    }

    /// Builds an `n × n` matrix from a closure on `(row, col)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        assert!(n >= 1);
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        RatMatrix { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| Rational::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Rational::one())
    }

    pub fn scalar(n: usize, c: Rational) -> Self {
        Self::from_fn(n, |i, j| if i == j { c.clone() } else { Rational::zero() })
    }

    /// Matrix unit `E_ij` (0-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m.set(i, j, Rational::one());
        m
    }

    pub fn diag(d: &[Rational]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i].clone() } else { Rational::zero() })
    }

    pub fn diag_ints(d: &[i64]) -> Self {
        Self::diag(&d.iter().map(|&x| super::rat(x)).collect::<Vec<_>>())
    }

    /// Nilpotent shift with `J e_1 = 0` and `J e_{k+1} = e_k`.
    pub fn shift(n: usize) -> Self {
        Self::from_fn(n, |i, j| if j == i + 1 { Rational::one() } else { Rational::zero() })
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[RatMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.n).sum();
        let mut m = Self::zeros(n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    m.set(off + i, off + j, b.get(i, j).clone());
                }
            }
            off += b.n;
        }
        m
    }

    /// Rank-one matrix `u vᵀ`.
    pub fn outer(u: &RatVector, v: &RatVector) -> Self {
        assert_eq!(u.dim(), v.dim());
        Self::from_fn(u.dim(), |i, j| u.get(i) * v.get(j))
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(cols: &[RatVector]) -> Result<Self> {
        let n = cols.len();
        if n == 0 || cols.iter().any(|c| c.dim() != n) {
            return Err(Error::NotSquare);
        }
        Ok(Self::from_fn(n, |i, j| cols[j].get(i).clone()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.n).map(<[_]>::to_vec).collect()
    }

    pub fn row(&self, i: usize) -> RatVector {
        RatVector {
            entries: self.entries[i * self.n..(i + 1) * self.n].to_vec(),
        }
    }

    pub fn column(&self, j: usize) -> RatVector {
        RatVector {
            entries: (0..self.n).map(|i| self.get(i, j).clone()).collect(),
        }
    }

    /// Row-major flattening into a vector of length `n²`.
    pub fn flatten(&self) -> Vec<Rational> {
        self.entries.clone()
    }

    pub fn from_flat(n: usize, flat: Vec<Rational>) -> Result<Self> {
        Self::new(n, flat)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_scalar(&self) -> bool {
        let c = self.get(0, 0);
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let x = self.get(i, j);
                if i == j {
                    x == c
                } else {
                    x.is_zero()
                }
            })
        })
    }

    pub fn trace(&self) -> Rational {
        (0..self.n).fold(Rational::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RatMatrix {
            n: self.n,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul_vec(&self, v: &RatVector) -> RatVector {
        assert_eq!(self.n, v.dim(), "matrix-vector dimension mismatch");
        RatVector {
            entries: (0..self.n)
                .map(|i| (0..self.n).fold(Rational::zero(), |acc, j| acc + self.get(i, j) * v.get(j)))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn check_same_dim(&self, other: &RatMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn check_vec_dim(&self, v: &RatVector) -> Result<()> {
        if self.n != v.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.dim(),
            });
        }
        Ok(())
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        RatMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        RatMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        RatMatrix {
            n: self.n,
            entries: self.entries.iter().map(|x| -x).collect(),
        }
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        let n = self.n;
        let mut out = vec![Rational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.entries[k * n + j];
                    if !b.is_zero() {
                        out[i * n + j] += a * b;
                    }
                }
            }
        }
        RatMatrix { n, entries: out }
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.n).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(format_rational).collect();
        write!(f, "({})", cells.join(", "))
    }
}

// JSON: entries are strings "num/den" (denominator omitted when 1); plain
// integers are accepted on input.
#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Str(String),
    Int(i64),
}

impl ScalarRepr {
    fn into_rational(self) -> Result<Rational> {
        match self {
            ScalarRepr::Str(s) => parse_rational(&s),
            ScalarRepr::Int(i) => Ok(super::rat(i)),
        }
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .entries
            .chunks(self.n)
            .map(|r| r.iter().map(format_rational).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<ScalarRepr>>::deserialize(d)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(ScalarRepr::into_rational).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        RatMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

impl Serialize for RatVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cells: Vec<String> = self.entries.iter().map(format_rational).collect();
        cells.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let cells = Vec::<ScalarRepr>::deserialize(d)?;
        let entries = cells
            .into_iter()
            .map(ScalarRepr::into_rational)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        RatVector::new(entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::rat;

    #[test]
    fn json_encoding() {
        let m = RatMatrix::from_rows(vec![
            vec![rat(1), Rational::new(1.into(), 2.into())],
            vec![rat(-3), rat(0)],
        ])
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1","1/2"],["-3","0"]]"#);
        let back: RatMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let ints: RatMatrix = serde_json::from_str("[[1,2],[3,\"4/2\"]]").unwrap();
        assert_eq!(ints, RatMatrix::from_ints(&[&[1, 2], &[3, 2]]));
    }

    #[test]
    fn rejects_ragged() {
        assert!(serde_json::from_str::<RatMatrix>("[[1,2],[3]]").is_err());
        assert!(serde_json::from_str::<RatMatrix>("[]").is_err());
        assert!(serde_json::from_str::<RatVector>("[]").is_err());
    }

    #[test]
    fn shift_convention() {
        let j = RatMatrix::shift(3);
        assert!(j.mul_vec(&RatVector::unit(3, 0)).is_zero());
        assert_eq!(j.mul_vec(&RatVector::unit(3, 1)), RatVector::unit(3, 0));
        assert_eq!(j.mul_vec(&RatVector::unit(3, 2)), RatVector::unit(3, 1));
        assert!(j.pow(3).is_zero());
    }
}
