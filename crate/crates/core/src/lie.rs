//! `gl_n` structure: bracket, trace form, the fields `τ(Z)`, the stabilizer
//! algebra `p` of a vector and its trace-form orthogonal `p⊥`, centralizers.
//!
//! The trace form `(A, B) ↦ tr(AB)` stands in for the Killing form throughout.
//! With `[A, B] = AB − BA` it satisfies `tr([X,Y] Z) = −tr(Y [X,Z])`; only
//! vanishing statements are used, so the sign never matters.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratlin::{kernel_basis, rank, rref, span_contains, RatMatrix, RatVector, Rational, Rref};

pub fn bracket(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    a.check_same_dim(b)?;
    Ok(&(a * b) - &(b * a))
}

/// `tr(AB)`.
pub fn trace_form(a: &RatMatrix, b: &RatMatrix) -> Result<Rational> {
    a.check_same_dim(b)?;
    let n = a.n();
    let mut acc = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    Ok(acc)
}

/// Value at `X` of the vector field `τ(Z)` generated by the adjoint action,
/// `d/dt exp(−tZ)·X = [X, Z]`.
pub fn tau_at(z: &RatMatrix, x: &RatMatrix) -> Result<RatMatrix> {
    bracket(x, z)
}

fn flat_rows(mats: &[RatMatrix]) -> Vec<Vec<Rational>> {
    mats.iter().map(RatMatrix::flatten).collect()
}

fn unflatten(n: usize, v: RatVector) -> RatMatrix {
    RatMatrix::from_flat(n, v.into_entries()).expect("length n²")
}

/// Dimension of the linear span of the given matrices.
pub fn span_dim(mats: &[RatMatrix]) -> usize {
    rank(&flat_rows(mats))
}

/// Whether `m` lies in the span of `basis`, by rank comparison.
pub fn in_span(basis: &[RatMatrix], m: &RatMatrix) -> bool {
    span_contains(&flat_rows(basis), &m.flatten())
}

/// Basis of `{ Y : tr(Y M) = 0 for every M in mats }`.
pub fn trace_orthogonal(n: usize, mats: &[RatMatrix]) -> Vec<RatMatrix> {
    // tr(Y M) = Σ_ij Y_ij M_ji, so each constraint row is vec(Mᵀ).
    let rows: Vec<Vec<Rational>> = mats.iter().map(|m| m.transpose().flatten()).collect();
    kernel_basis(&rows, n * n)
        .into_iter()
        .map(|v| unflatten(n, v))
        .collect()
}

/// A linear subspace of `gl_n` closed under the bracket.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    n: usize,
    basis: Vec<RatMatrix>,
    echelon: Rref,
}

impl Subalgebra {
    /// Validates linear independence and closure under the bracket.
    pub fn new(n: usize, basis: Vec<RatMatrix>) -> Result<Self> {
        for b in &basis {
            if b.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: b.n(),
                });
            }
        }
        let echelon = rref(&flat_rows(&basis), n * n);
        if echelon.rank() != basis.len() {
            return Err(Error::DependentBasis);
        }
        let s = Subalgebra { n, basis, echelon };
        for (i, a) in s.basis.iter().enumerate() {
            for b in &s.basis[i + 1..] {
                if !s.contains(&bracket(a, b)?) {
                    return Err(Error::NotClosed);
                }
            }
        }
        Ok(s)
    }

    /// All of `gl_n`, with the matrix units as basis.
    pub fn gl(n: usize) -> Self {
        let basis = (0..n)
            .flat_map(|i| (0..n).map(move |j| RatMatrix::unit(n, i, j)))
            .collect();
        Self::new(n, basis).expect("matrix units span gl_n")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RatMatrix] {
        &self.basis
    }

    pub fn contains(&self, m: &RatMatrix) -> bool {
        m.n() == self.n && self.echelon.contains(m.entries())
    }
}

impl PartialEq for Subalgebra {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.basis == other.basis
    }
}

impl Serialize for Subalgebra {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subalgebra {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let basis = Vec::<RatMatrix>::deserialize(d)?;
        let n = basis
            .first()
            .map(RatMatrix::n)
            .ok_or_else(|| serde::de::Error::custom("empty subalgebra basis carries no dimension"))?;
        Subalgebra::new(n, basis).map_err(serde::de::Error::custom)
    }
}

/// The stabilizer algebra `p = { A : A v0 = 0 }` of a nonzero vector and its
/// trace-form orthogonal `p⊥ = { v0 wᵀ }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StabilizerRepr", into = "StabilizerRepr")]
pub struct StabilizerData {
    v0: RatVector,
    p: Subalgebra,
    p_perp: Vec<RatMatrix>,
}

#[derive(Serialize, Deserialize)]
struct StabilizerRepr {
    v0: RatVector,
    p_basis: Subalgebra,
    p_perp_basis: Vec<RatMatrix>,
}

impl From<StabilizerData> for StabilizerRepr {
    fn from(s: StabilizerData) -> Self {
        StabilizerRepr {
            v0: s.v0,
            p_basis: s.p,
            p_perp_basis: s.p_perp,
        }
    }
}

impl TryFrom<StabilizerRepr> for StabilizerData {
    type Error = Error;
    fn try_from(r: StabilizerRepr) -> Result<Self> {
        let fresh = stabilizer(&r.v0)?;
        let n = r.v0.dim();
        let same_span = |a: &[RatMatrix], b: &[RatMatrix]| a.len() == b.len() && span_dim(&[a, b].concat()) == a.len();
        if r.p_basis.n() != n
            || !same_span(r.p_basis.basis(), fresh.p.basis())
            || !same_span(&r.p_perp_basis, &fresh.p_perp)
        {
            return Err(Error::Check("stabilizer data does not match v0".into()));
        }
        Ok(StabilizerData {
            v0: r.v0,
            p: r.p_basis,
            p_perp: r.p_perp_basis,
        })
    }
}

impl StabilizerData {
    pub fn n(&self) -> usize {
        self.v0.dim()
    }

    pub fn v0(&self) -> &RatVector {
        &self.v0
    }

    pub fn p(&self) -> &Subalgebra {
        &self.p
    }

    pub fn p_perp(&self) -> &[RatMatrix] {
        &self.p_perp
    }

    /// Membership of `m` in `span(p⊥)` by exact rank comparison.
    pub fn in_p_perp(&self, m: &RatMatrix) -> bool {
        in_span(&self.p_perp, m)
    }

    /// For `m` in `span(p⊥)`, the vector `w` with `m = v0 wᵀ`.
    pub fn perp_factor(&self, m: &RatMatrix) -> Option<RatVector> {
        if !self.in_p_perp(m) {
            return None;
        }
        let i0 = self.v0.pivot().expect("v0 nonzero");
        let w = m.row(i0).scale(&self.v0.get(i0).recip());
        debug_assert_eq!(&RatMatrix::outer(&self.v0, &w), m);
        Some(w)
    }

    /// `tr([X,Y] Z) = 0` for every `Z` in the basis of `p`; equivalent to
    /// `[X,Y] ∈ span(p⊥)`.
    pub fn orthogonal_to_p(&self, m: &RatMatrix) -> bool {
        self.p
            .basis()
            .iter()
            .all(|z| trace_form(m, z).map(|t| t.is_zero()).unwrap_or(false))
    }
}

/// Stabilizer data of `v0 ≠ 0`. `p` is computed as the kernel of `A ↦ A v0`,
/// `p⊥` is stored as `{ v0 e_jᵀ }` and cross-checked against the trace-form
/// orthogonal complement of `p`.
pub fn stabilizer(v0: &RatVector) -> Result<StabilizerData> {
    if v0.is_zero() {
        return Err(Error::ZeroVector);
    }
    let n = v0.dim();
    // (A v0)_i = Σ_j A_ij v0_j; flat index of A_ij is i*n + j.
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r = vec![Rational::zero(); n * n];
            for j in 0..n {
                r[i * n + j] = v0.get(j).clone();
            }
            r
        })
        .collect();
    let p_basis: Vec<RatMatrix> = kernel_basis(&rows, n * n)
        .into_iter()
        .map(|v| unflatten(n, v))
        .collect();
    let p = Subalgebra::new(n, p_basis)?;
    let p_perp: Vec<RatMatrix> = (0..n).map(|j| RatMatrix::outer(v0, &RatVector::unit(n, j))).collect();

    if p.dim() != n * n - n {
        return Err(Error::Check(format!("dim p = {} != n² − n", p.dim())));
    }
    for a in p.basis() {
        if !a.mul_vec(v0).is_zero() {
            return Err(Error::Check("element of p moves v0".into()));
        }
        for m in &p_perp {
            if !trace_form(a, m)?.is_zero() {
                return Err(Error::Check("p⊥ not orthogonal to p".into()));
            }
        }
    }
    let complement = trace_orthogonal(n, p.basis());
    if complement.len() != n || span_dim(&[complement.as_slice(), p_perp.as_slice()].concat()) != n {
        return Err(Error::Check("p⊥ differs from the orthogonal complement of p".into()));
    }
    Ok(StabilizerData {
        v0: v0.clone(),
        p,
        p_perp,
    })
}

/// Rows of the `n² × n²` matrix of `ad X = [X, ·]` on row-major flattenings.
pub fn ad_rows(x: &RatMatrix) -> Vec<Vec<Rational>> {
    let n = x.n();
    let cols: Vec<Vec<Rational>> = (0..n * n)
        .map(|e| bracket(x, &RatMatrix::unit(n, e / n, e % n)).expect("same n").flatten())
        .collect();
    (0..n * n)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect()
}

/// `{ Y : [X, Y] = 0 }`.
pub fn centralizer(x: &RatMatrix) -> Subalgebra {
    let n = x.n();
    let basis = kernel_basis(&ad_rows(x), n * n)
        .into_iter()
        .map(|v| unflatten(n, v))
        .collect();
    Subalgebra::new(n, basis).expect("centralizers are subalgebras")
}

/// `dim [X, a]`, the rank of `Z ↦ [X, Z]` on `a`.
pub fn orbit_tangent_dim(x: &RatMatrix, a: &Subalgebra) -> Result<usize> {
    if x.n() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: x.n(),
        });
    }
    let images = a.basis().iter().map(|z| bracket(x, z)).collect::<Result<Vec<_>>>()?;
    Ok(span_dim(&images))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::rat;

    fn e(n: usize, i: usize, j: usize) -> RatMatrix {
        RatMatrix::unit(n, i - 1, j - 1)
    }

    fn sl2() -> (RatMatrix, RatMatrix, RatMatrix) {
        (
            RatMatrix::diag_ints(&[1, -1]),
            RatMatrix::from_ints(&[&[0, 1], &[0, 0]]),
            RatMatrix::from_ints(&[&[0, 0], &[1, 0]]),
        )
    }

    #[test]
    fn bracket_examples() {
        let a = RatMatrix::from_ints(&[&[1, 2], &[3, 4]]);
        assert!(bracket(&a, &a).unwrap().is_zero());
        assert_eq!(
            bracket(&e(2, 1, 2), &e(2, 2, 1)).unwrap(),
            RatMatrix::diag_ints(&[1, -1])
        );
        let (h, x, y) = sl2();
        assert_eq!(bracket(&h, &x).unwrap(), x.scale(&rat(2)));
        assert_eq!(bracket(&h, &y).unwrap(), y.scale(&rat(-2)));
        assert_eq!(bracket(&x, &y).unwrap(), h);
        assert!(matches!(
            bracket(&a, &RatMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn trace_form_examples() {
        assert_eq!(
            trace_form(&RatMatrix::identity(3), &RatMatrix::identity(3)).unwrap(),
            rat(3)
        );
        assert_eq!(trace_form(&e(2, 1, 2), &e(2, 2, 1)).unwrap(), rat(1));
        assert_eq!(trace_form(&e(2, 1, 2), &e(2, 1, 2)).unwrap(), rat(0));
        assert!(trace_form(&e(2, 1, 2), &e(3, 1, 2)).is_err());
    }

    #[test]
    fn tau_examples() {
        let z = RatMatrix::from_ints(&[&[1, 2], &[3, 4]]);
        assert!(tau_at(&z, &RatMatrix::zeros(2)).unwrap().is_zero());
        assert!(tau_at(&z, &z).unwrap().is_zero());
        assert_eq!(
            tau_at(&e(2, 2, 1), &e(2, 1, 2)).unwrap(),
            RatMatrix::diag_ints(&[1, -1])
        );
    }

    /// p⊥ computed independently as the trace-form complement of the
    /// matrices killing v0, by brute force over matrix units.
    fn brute_perp(v0: &RatVector) -> Vec<RatMatrix> {
        let n = v0.dim();
        let p: Vec<RatMatrix> = (0..n * n)
            .map(|k| RatMatrix::unit(n, k / n, k % n))
            .filter(|m| m.mul_vec(v0).is_zero())
            .collect();
        trace_orthogonal(n, &p)
    }

    #[test]
    fn stabilizer_e1_e2() {
        let s = stabilizer(&RatVector::unit(2, 0)).unwrap();
        assert_eq!(s.p().dim(), 2);
        for a in s.p().basis() {
            assert!(a.get(0, 0).is_zero() && a.get(1, 0).is_zero());
        }
        for m in s.p_perp() {
            assert!(m.get(1, 0).is_zero() && m.get(1, 1).is_zero());
        }
        let brute = brute_perp(&RatVector::unit(2, 0));
        assert_eq!(span_dim(&[brute.as_slice(), s.p_perp()].concat()), 2);

        let s = stabilizer(&RatVector::unit(2, 1)).unwrap();
        for m in s.p_perp() {
            assert!(m.get(0, 0).is_zero() && m.get(0, 1).is_zero());
        }
        assert!(matches!(stabilizer(&RatVector::zeros(2)), Err(Error::ZeroVector)));
    }

    #[test]
    fn stabilizer_dims() {
        for n in 1..=4 {
            let v0 = RatVector::new((1..=n as i64).map(rat).collect()).unwrap();
            let s = stabilizer(&v0).unwrap();
            assert_eq!(s.p_perp().len(), n);
            assert_eq!(s.p().dim(), n * n - n);
        }
    }

    #[test]
    fn stabilizer_json_roundtrip() {
        let s = stabilizer(&RatVector::from_ints(&[1, 2])).unwrap();
        let js = serde_json::to_string(&s).unwrap();
        let back: StabilizerData = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        let other = stabilizer(&RatVector::from_ints(&[0, 1])).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&js).unwrap();
        v["p_perp_basis"] = serde_json::to_value(other.p_perp()).unwrap();
        assert!(serde_json::from_value::<StabilizerData>(v).is_err());
    }

    #[test]
    fn centralizer_examples() {
        assert_eq!(centralizer(&RatMatrix::zeros(3)).dim(), 9);
        let j = RatMatrix::shift(4);
        let c = centralizer(&j);
        assert_eq!(c.dim(), 4);
        for k in 0..4 {
            assert!(c.contains(&j.pow(k)));
        }
        let d = centralizer(&RatMatrix::diag_ints(&[1, 2]));
        assert_eq!(d.dim(), 2);
        assert!(d.contains(&e(2, 1, 1)) && d.contains(&e(2, 2, 2)));
    }

    #[test]
    fn tangent_dims() {
        let gl2 = Subalgebra::gl(2);
        assert_eq!(orbit_tangent_dim(&RatMatrix::zeros(2), &gl2).unwrap(), 0);
        let j = RatMatrix::shift(2);
        assert_eq!(orbit_tangent_dim(&j, &gl2).unwrap(), 2);
        let p = stabilizer(&RatVector::unit(2, 1)).unwrap();
        assert_eq!(orbit_tangent_dim(&j, p.p()).unwrap(), 2);
        let p = stabilizer(&RatVector::unit(2, 0)).unwrap();
        assert_eq!(orbit_tangent_dim(&j, p.p()).unwrap(), 1);
    }

    #[test]
    fn subalgebra_validation() {
        let a = RatMatrix::unit(2, 0, 1);
        let b = RatMatrix::unit(2, 1, 0);
        assert_eq!(Subalgebra::new(2, vec![a.clone(), b]).unwrap_err(), Error::NotClosed);
        assert_eq!(
            Subalgebra::new(2, vec![a.clone(), a.scale(&rat(2))]).unwrap_err(),
            Error::DependentBasis
        );
        let sub = Subalgebra::new(2, vec![a.clone()]).unwrap();
        let js = serde_json::to_string(&sub).unwrap();
        assert_eq!(serde_json::from_str::<Subalgebra>(&js).unwrap(), sub);
    }
}
