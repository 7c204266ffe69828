use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::elim::solve;
use super::matrix::RatMatrix;
use super::scalar::{format_rational, parse_rational, rat, Rational};
use crate::error::{Error, Result};

/// Univariate polynomial over ℚ, coefficients lowest degree first. The zero
/// polynomial has no coefficients; otherwise the leading one is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// `t - c`.
    pub fn linear(c: Rational) -> Self {
        Self::new(vec![-c, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let inv = l.recip();
                Self::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// `p(M)` by Horner evaluation.
    pub fn eval_mat(&self, m: &RatMatrix) -> RatMatrix {
        let n = m.n();
        self.coeffs.iter().rev().fold(RatMatrix::zeros(n), |acc, c| {
            &(&acc * m) + &RatMatrix::scalar(n, c.clone())
        })
    }

    /// `p(q)` reduced modulo `modulus` at every Horner step.
    pub fn compose_mod(&self, q: &RatPoly, modulus: &RatPoly) -> RatPoly {
        self.coeffs.iter().rev().fold(RatPoly::zero(), |acc, c| {
            (&(&acc * q) + &RatPoly::constant(c.clone())).rem(modulus)
        })
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d.coeffs[dd].recip();
        let mut r = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return (RatPoly::zero(), RatPoly::zero());
        };
        if sd < dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let c = &r[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            q[k] = c;
        }
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub fn rem(&self, d: &RatPoly) -> RatPoly {
        self.div_rem(d).1
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Inverse of `self` modulo `modulus`, if they are coprime.
    pub fn inverse_mod(&self, modulus: &RatPoly) -> Option<RatPoly> {
        // Extended Euclid tracking only the coefficient of `self`.
        let (mut r0, mut r1) = (modulus.clone(), self.rem(modulus));
        let (mut s0, mut s1) = (RatPoly::zero(), RatPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let inv = r0.coeffs[0].recip();
        Some(s0.scale(&inv).rem(modulus))
    }

    /// `p / gcd(p, p')`, made monic.
    pub fn squarefree_part(&self) -> Result<RatPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative());
        Ok(self.div_rem(&g).0.monic())
    }

    /// Yun's squarefree decomposition of a nonzero polynomial: monic pairwise
    /// coprime squarefree factors `(f_i, i)` with `p = c · ∏ f_i^i`; factors
    /// equal to 1 are omitted.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(RatPoly, usize)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let p = self.monic();
        let mut out = Vec::new();
        let dp = p.derivative();
        let mut a = p.gcd(&dp);
        if a.is_zero() {
            // p constant
            return Ok(out);
        }
        let mut b = p.div_rem(&a).0;
        let mut c = dp.div_rem(&a).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.degree().is_some_and(|deg| deg > 0) {
            a = b.gcd(&d);
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = &c - &b.derivative();
            if a.degree().is_some_and(|deg| deg > 0) {
                out.push((a.clone(), i));
            }
            i += 1;
        }
        Ok(out)
    }

    /// Characteristic polynomial `det(tI − M)` by the Faddeev–LeVerrier
    /// recurrence.
    pub fn char_poly(m: &RatMatrix) -> RatPoly {
        let n = m.n();
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        let mut mk = RatMatrix::zeros(n);
        for k in 1..=n {
            mk = &(m * &mk) + &RatMatrix::scalar(n, c[n - k + 1].clone());
            c[n - k] = -(m * &mk).trace() / rat(k as i64);
        }
        RatPoly::new(c)
    }

    /// Least-degree monic `p` with `p(M) = 0`, found as the first linear
    /// dependence among `I, M, M², …`.
    pub fn minimal_poly(m: &RatMatrix) -> RatPoly {
        let n = m.n();
        let mut powers = vec![RatMatrix::identity(n)];
        loop {
            let next = &powers[powers.len() - 1] * m;
            // columns are flattened powers; solve Σ c_i M^i = M^k
            let rows: Vec<Vec<Rational>> = (0..n * n)
                .map(|e| powers.iter().map(|p| p.entries()[e].clone()).collect())
                .collect();
            if let Some(c) = solve(&rows, next.entries()) {
                let mut coeffs: Vec<Rational> = c.into_iter().map(|x| -x).collect();
                coeffs.push(Rational::one());
                return RatPoly::new(coeffs);
            }
            powers.push(next);
        }
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rational::zero();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let coef = format_rational(&mag);
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{coef}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{coef}*t")?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{coef}*t^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// JSON: coefficient list, lowest degree first, as rational strings.
impl Serialize for RatPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let c: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        c.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let c = Vec::<String>::deserialize(d)?;
        let c = c
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(RatPoly::new(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_poly_examples() {
        assert_eq!(
            RatPoly::char_poly(&RatMatrix::from_ints(&[&[0, 1], &[0, 0]])),
            RatPoly::from_ints(&[0, 0, 1])
        );
        assert_eq!(
            RatPoly::char_poly(&RatMatrix::diag_ints(&[1, 2])),
            RatPoly::from_ints(&[2, -3, 1])
        );
        assert_eq!(
            RatPoly::char_poly(&RatMatrix::from_ints(&[&[0, 1], &[1, 0]])),
            RatPoly::from_ints(&[-1, 0, 1])
        );
    }

    #[test]
    fn minimal_poly_examples() {
        assert_eq!(
            RatPoly::minimal_poly(&RatMatrix::identity(3)),
            RatPoly::from_ints(&[-1, 1])
        );
        assert_eq!(
            RatPoly::minimal_poly(&RatMatrix::shift(2)),
            RatPoly::from_ints(&[0, 0, 1])
        );
        assert_eq!(
            RatPoly::minimal_poly(&RatMatrix::diag_ints(&[1, 1, 2])),
            RatPoly::from_ints(&[2, -3, 1])
        );
    }

    #[test]
    fn squarefree_examples() {
        let t2 = RatPoly::from_ints(&[0, 0, 1]);
        assert_eq!(t2.squarefree_part().unwrap(), RatPoly::t());
        // (t-1)^2 (t-2) = t^3 - 4t^2 + 5t - 2
        let p = RatPoly::from_ints(&[-2, 5, -4, 1]);
        assert_eq!(p.squarefree_part().unwrap(), RatPoly::from_ints(&[2, -3, 1]));
        let q = RatPoly::from_ints(&[-1, 0, 1]);
        assert_eq!(q.squarefree_part().unwrap(), q);
        assert_eq!(RatPoly::zero().squarefree_part(), Err(Error::ZeroPolynomial));
        // non-monic input still yields a monic result
        assert_eq!(RatPoly::from_ints(&[0, 0, 3]).squarefree_part().unwrap(), RatPoly::t());
    }

    #[test]
    fn yun_decomposition() {
        // (t-1)^2 (t-2)
        let p = RatPoly::from_ints(&[-2, 5, -4, 1]);
        let d = p.squarefree_decomposition().unwrap();
        assert_eq!(
            d,
            vec![(RatPoly::from_ints(&[-2, 1]), 1), (RatPoly::from_ints(&[-1, 1]), 2)]
        );
        let t3 = RatPoly::from_ints(&[0, 0, 0, 1]);
        assert_eq!(t3.squarefree_decomposition().unwrap(), vec![(RatPoly::t(), 3)]);
        assert!(RatPoly::one().squarefree_decomposition().unwrap().is_empty());
    }

    #[test]
    fn cayley_hamilton_example() {
        let p = RatPoly::from_ints(&[2, -3, 1]);
        assert!(p.eval_mat(&RatMatrix::diag_ints(&[1, 2])).is_zero());
        let t2 = RatPoly::from_ints(&[0, 0, 1]);
        assert!(t2.eval_mat(&RatMatrix::shift(2)).is_zero());
        assert!(RatPoly::from_ints(&[-1, 1]).eval_mat(&RatMatrix::identity(2)).is_zero());
    }

    #[test]
    fn inverse_mod_and_display() {
        let m = RatPoly::from_ints(&[-1, 0, 1]);
        let a = RatPoly::from_ints(&[1, 1]);
        assert!(a.inverse_mod(&m).is_none());
        let b = RatPoly::from_ints(&[2, 1]);
        let inv = b.inverse_mod(&m).unwrap();
        assert_eq!((&inv * &b).rem(&m), RatPoly::one());
        assert_eq!(RatPoly::from_ints(&[2, -3, 1]).to_string(), "t^2 - 3*t + 2");
    }
}
