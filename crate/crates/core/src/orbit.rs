//! `P`-orbit invariants inside `G`-orbits of `gl_n`, where `P` fixes `v0`.
//!
//! The central invariant is the Krylov dimension
//! `d(X, v) = dim span(v, Xv, …, X^{n−1}v)`. It is `GL_n`-equivariant,
//! `d(gXg⁻¹, gv) = d(X, v)`, so `d(·, v0)` is constant on `P`-orbits. Its
//! failure to be maximal is the hypersurface `Σ = { det[v0 | Xv0 | …] = 0 }`.
//!
//! Matrices act on columns, so Krylov matrices have `X^k v` as columns. The
//! row convention gives the same `Σ` after `X ↦ Xᵀ`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan::{chevalley, is_regular_nilpotent, is_semisimple, jordan_type, JordanType};
use crate::lie::{bracket, centralizer, orbit_tangent_dim, stabilizer, trace_orthogonal, StabilizerData, Subalgebra};
use crate::ratlin::{determinant, inverse, kernel_basis, rank, solve, MPoly, RatMatrix, RatPoly, RatVector, Rational};

/// `d(X, v)` with the Krylov vectors that realize it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KrylovData {
    pub d: usize,
    pub basis: Vec<RatVector>,
}

fn krylov_single(x: &RatMatrix, v: &RatVector) -> KrylovData {
    let n = x.n();
    let mut basis: Vec<RatVector> = Vec::new();
    let mut cur = v.clone();
    for _ in 0..n {
        let mut rows: Vec<Vec<Rational>> = basis.iter().map(|b| b.entries().to_vec()).collect();
        rows.push(cur.entries().to_vec());
        if rank(&rows) == basis.len() {
            // once X^k v depends on its predecessors so do all later powers
            break;
        }
        basis.push(cur.clone());
        cur = x.mul_vec(&cur);
    }
    KrylovData { d: basis.len(), basis }
}

/// Krylov matrix with columns `v, Xv, …, X^{n−1}v`.
pub fn krylov_matrix(x: &RatMatrix, v: &RatVector) -> Result<RatMatrix> {
    x.check_vec_dim(v)?;
    let mut cols = Vec::with_capacity(x.n());
    let mut cur = v.clone();
    for _ in 0..x.n() {
        let next = x.mul_vec(&cur);
        cols.push(cur);
        cur = next;
    }
    RatMatrix::from_columns(&cols)
}

/// `d(X, v)`. With `blocks` (sizes of a block-diagonal decomposition of
/// `X`), the invariant of the product group is returned: the sum of the
/// per-block dimensions, with the per-block bases embedded.
pub fn krylov_dim(x: &RatMatrix, v: &RatVector, blocks: Option<&[usize]>) -> Result<KrylovData> {
    x.check_vec_dim(v)?;
    let Some(blocks) = blocks else {
        let k = krylov_single(x, v);
        debug_assert_eq!(k.d, rank(&krylov_matrix(x, v)?.rows()));
        return Ok(k);
    };
    let n = x.n();
    if blocks.contains(&0) || blocks.iter().sum::<usize>() != n {
        return Err(Error::BlockStructure);
    }
    let mut owner = Vec::with_capacity(n);
    for (bi, &b) in blocks.iter().enumerate() {
        owner.extend(std::iter::repeat_n(bi, b));
    }
    for i in 0..n {
        for j in 0..n {
            if owner[i] != owner[j] && !x.get(i, j).is_zero() {
                return Err(Error::BlockStructure);
            }
        }
    }
    let mut d = 0;
    let mut basis = Vec::new();
    let mut off = 0;
    for &b in blocks {
        let xb = RatMatrix::from_fn(b, |i, j| x.get(off + i, off + j).clone());
        let vb = RatVector::new((0..b).map(|i| v.get(off + i).clone()).collect())?;
        let kb = krylov_single(&xb, &vb);
        d += kb.d;
        for u in kb.basis {
            let mut full = vec![Rational::zero(); n];
            for (i, c) in u.into_entries().into_iter().enumerate() {
                full[off + i] = c;
            }
            basis.push(RatVector::new(full)?);
        }
        off += b;
    }
    Ok(KrylovData { d, basis })
}

/// `det[v0 | Xv0 | … | X^{n−1}v0]`; zero exactly on `Σ`.
pub fn sigma_eval(x: &RatMatrix, v0: &RatVector) -> Result<Rational> {
    if v0.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(determinant(&krylov_matrix(x, v0)?))
}

/// Largest `n` for which [`sigma_poly`] expands the determinant symbolically.
pub const SIGMA_SYMBOLIC_MAX: usize = 4;

/// Names `x11, x12, …` of the entry variables used by [`sigma_poly`]; the
/// variable of entry `(i, j)` has index `i·n + j`.
pub fn sigma_var_names(n: usize) -> Vec<String> {
    (0..n * n).map(|k| format!("x{}{}", k / n + 1, k % n + 1)).collect()
}

fn poly_det(m: &[Vec<MPoly>], nvars: usize) -> MPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MPoly::zero(nvars);
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<MPoly>> = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = entry * &poly_det(&minor, nvars);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// `Σ` as a polynomial in the entries of a generic `X`, for fixed `v0`.
pub fn sigma_poly(n: usize, v0: &RatVector) -> Result<MPoly> {
    if v0.is_zero() {
        return Err(Error::ZeroVector);
    }
    if v0.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v0.dim(),
        });
    }
    if n > SIGMA_SYMBOLIC_MAX {
        return Err(Error::SymbolicTooLarge(n));
    }
    let nv = n * n;
    let mut cols: Vec<Vec<MPoly>> = Vec::with_capacity(n);
    let mut cur: Vec<MPoly> = v0.entries().iter().map(|c| MPoly::constant(nv, c.clone())).collect();
    for _ in 0..n {
        let next: Vec<MPoly> = (0..n)
            .map(|i| (0..n).fold(MPoly::zero(nv), |acc, j| &acc + &(&MPoly::var(nv, i * n + j) * &cur[j])))
            .collect();
        cols.push(cur);
        cur = next;
    }
    let rows: Vec<Vec<MPoly>> = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    Ok(poly_det(&rows, nv))
}

/// Flattened `X` as a point for evaluating [`sigma_poly`].
pub fn entry_point(x: &RatMatrix) -> Vec<Rational> {
    x.flatten()
}

/// Position of a regular nilpotent `X` relative to `v0`: `v0 = X^p w` with
/// `p` maximal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularNilpotentPClass {
    pub p_index: usize,
    pub witness_w: RatVector,
}

fn check_v0(x: &RatMatrix, v0: &RatVector) -> Result<()> {
    x.check_vec_dim(v0)?;
    if v0.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

pub fn p_index(x: &RatMatrix, v0: &RatVector) -> Result<RegularNilpotentPClass> {
    check_v0(x, v0)?;
    if !is_regular_nilpotent(x) {
        return Err(Error::NotRegularNilpotent);
    }
    let n = x.n();
    for k in (0..n).rev() {
        let xk = x.pow(k as u32);
        if let Some(w) = solve(&xk.rows(), v0.entries()) {
            let w = RatVector::new(w)?;
            let d = krylov_single(x, v0).d;
            if k + d != n {
                return Err(Error::Check(format!("p = {k} but d(X, v0) = {d} (n = {n})")));
            }
            if x.pow(n as u32 - 1).mul_vec(&w).is_zero() {
                return Err(Error::Check("witness lies in ker X^(n-1)".into()));
            }
            return Ok(RegularNilpotentPClass {
                p_index: k,
                witness_w: w,
            });
        }
    }
    unreachable!("v0 = X^0 v0 always solves the k = 0 system")
}

/// Basis `(w, Xw, …, X^{n−1}w)` as columns.
fn chain(x: &RatMatrix, w: &RatVector) -> RatMatrix {
    krylov_matrix(x, w).expect("dimensions checked")
}

/// Element `g` of `P` with `g X g⁻¹ = X2`, mapping the chain of `X` through
/// `v0` onto the chain of `X2` through `v0`.
pub fn conjugator_in_p(x: &RatMatrix, x2: &RatMatrix, v0: &RatVector) -> Result<RatMatrix> {
    x.check_same_dim(x2)?;
    let c1 = p_index(x, v0)?;
    let c2 = p_index(x2, v0)?;
    if c1.p_index != c2.p_index {
        return Err(Error::PIndexMismatch(c1.p_index, c2.p_index));
    }
    let b1 = chain(x, &c1.witness_w);
    let b2 = chain(x2, &c2.witness_w);
    let g = &b2 * &inverse(&b1)?;
    let gi = inverse(&g)?;
    if &g.mul_vec(v0) != v0 || &(&g * x) * &gi != *x2 {
        return Err(Error::Check("conjugator fails re-multiplication".into()));
    }
    Ok(g)
}

/// Semisimple non-scalar `Φ` with `[Φ, X] ∈ p⊥`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub phi: RatMatrix,
    pub bracket_value: RatMatrix,
}

impl WitnessPair {
    pub fn checks(&self, x: &RatMatrix, stab: &StabilizerData) -> Vec<(&'static str, bool)> {
        let v0 = stab.v0();
        let bracket_ok = bracket(&self.phi, x).map(|b| b == self.bracket_value).unwrap_or(false);
        let cols_in_line = (0..x.n()).all(|j| {
            let c = self.bracket_value.column(j);
            rank(&[v0.entries().to_vec(), c.entries().to_vec()]) == 1
        });
        vec![
            ("phi_semisimple", is_semisimple(&self.phi)),
            ("phi_not_scalar", !self.phi.is_scalar()),
            ("bracket_matches", bracket_ok),
            ("bracket_in_p_perp", stab.in_p_perp(&self.bracket_value)),
            ("bracket_rank_le_one", rank(&self.bracket_value.rows()) <= 1),
            ("bracket_columns_in_line_v0", cols_in_line),
            ("bracket_orthogonal_to_p", stab.orthogonal_to_p(&self.bracket_value)),
        ]
    }
}

/// `Φ_ab = a·1_{V1} + b·1_{V2}` for `V1 = span(w, …, X^{p−1}w)` and
/// `V2 = span(v0, …, X^{n−p−1}v0)`. Then `[Φ_ab, X]` sends `X^{p−1}w` to
/// `(b − a) v0` and kills the rest of the chain.
pub fn semisimple_witness(x: &RatMatrix, v0: &RatVector, a: &Rational, b: &Rational) -> Result<WitnessPair> {
    let class = p_index(x, v0)?;
    if class.p_index == 0 {
        return Err(Error::DenseOrbit);
    }
    if a == b {
        return Err(Error::ScalarWitness);
    }
    let n = x.n();
    let basis = chain(x, &class.witness_w);
    let d: Vec<Rational> = (0..n)
        .map(|k| if k < class.p_index { a.clone() } else { b.clone() })
        .collect();
    let phi = &(&basis * &RatMatrix::diag(&d)) * &inverse(&basis)?;
    let bracket_value = bracket(&phi, x)?;
    let pair = WitnessPair { phi, bracket_value };
    let stab = stabilizer(v0)?;
    if let Some((name, _)) = pair.checks(x, &stab).into_iter().find(|(_, ok)| !ok) {
        return Err(Error::Check(format!("witness invariant {name} failed")));
    }
    Ok(pair)
}

/// Whether `[X, p] = [X, gl_n]`, i.e. the `P`-orbit of `X` is open in its
/// `G`-orbit.
pub fn orbit_dense_check(x: &RatMatrix, v0: &RatVector) -> Result<bool> {
    check_v0(x, v0)?;
    let stab = stabilizer(v0)?;
    let dense = orbit_tangent_dim(x, stab.p())? == orbit_tangent_dim(x, &Subalgebra::gl(x.n()))?;
    if is_regular_nilpotent(x) {
        let p = p_index(x, v0)?.p_index;
        if dense != (p == 0) {
            return Err(Error::Check(format!("dense = {dense} but p = {p}")));
        }
    }
    Ok(dense)
}

/// Degree and multiplicity of one factor in the squarefree decomposition of
/// the characteristic polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FactorShape {
    pub degree: usize,
    pub multiplicity: usize,
}

/// Conjugation-invariant data of `X` together with `d(X, v0)`.
///
/// `semisimple_part[i]` is the shape of the factor `f_i` of
/// `χ_X = ∏ f_i^{m_i}`; `nilpotent_partitions[i]` is the Jordan type of the
/// nilpotent part restricted to `ker f_i(S)`. Factors are not split further
/// over ℚ, so a factor of degree `k` bundles `k` conjugate eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StratumSignature {
    pub semisimple_part: Vec<FactorShape>,
    pub nilpotent_partitions: Vec<JordanType>,
    pub krylov_d: usize,
}

impl StratumSignature {
    /// The signature without `krylov_d`, an invariant of the `G`-orbit.
    pub fn g_part(&self) -> (&[FactorShape], &[JordanType]) {
        (&self.semisimple_part, &self.nilpotent_partitions)
    }
}

/// Matrix of `N` restricted to the invariant subspace spanned by `basis`.
fn restrict(nil: &RatMatrix, basis: &[RatVector]) -> Result<RatMatrix> {
    let n = nil.n();
    let k = basis.len();
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| basis.iter().map(|b| b.get(i).clone()).collect())
        .collect();
    let mut cols = Vec::with_capacity(k);
    for b in basis {
        let image = nil.mul_vec(b);
        let c = solve(&rows, image.entries()).ok_or_else(|| Error::Check("subspace not invariant under N".into()))?;
        cols.push(c);
    }
    Ok(RatMatrix::from_fn(k, |i, j| cols[j][i].clone()))
}

pub fn stratum_signature(x: &RatMatrix, v0: &RatVector) -> Result<StratumSignature> {
    check_v0(x, v0)?;
    let dec = chevalley(x);
    let chi = RatPoly::char_poly(&dec.s);
    let mut semisimple_part = Vec::new();
    let mut nilpotent_partitions = Vec::new();
    let mut total = 0;
    for (f, m) in chi.squarefree_decomposition()? {
        let degree = f.degree().expect("nonconstant factor");
        let comp = kernel_basis(&f.eval_mat(&dec.s).rows(), x.n());
        if comp.len() != degree * m {
            return Err(Error::Check("primary component has the wrong dimension".into()));
        }
        let restricted = restrict(&dec.n, &comp)?;
        nilpotent_partitions.push(jordan_type(&restricted)?);
        semisimple_part.push(FactorShape {
            degree,
            multiplicity: m,
        });
        total += degree * m;
    }
    if total != x.n() {
        return Err(Error::Check("factor shapes do not cover n".into()));
    }
    Ok(StratumSignature {
        semisimple_part,
        nilpotent_partitions,
        krylov_d: krylov_single(x, v0).d,
    })
}

/// Columns `u, e_j (j ≠ i0)` where `i0` is the first nonzero coordinate of `u`.
fn completion(u: &RatVector) -> RatMatrix {
    let n = u.dim();
    let i0 = u.pivot().expect("nonzero");
    let mut cols = vec![u.clone()];
    cols.extend((0..n).filter(|&j| j != i0).map(|j| RatVector::unit(n, j)));
    RatMatrix::from_columns(&cols).expect("n columns of length n")
}

/// Invertible `g` with `g v0 = v`, sending the smallest-pivot completion of
/// `v0` to that of `v`. Returns the identity when `v = v0`.
pub fn section(v: &RatVector, v0: &RatVector) -> Result<RatMatrix> {
    if v.is_zero() || v0.is_zero() {
        return Err(Error::ZeroVector);
    }
    if v.dim() != v0.dim() {
        return Err(Error::DimensionMismatch {
            expected: v0.dim(),
            found: v.dim(),
        });
    }
    let g = &completion(v) * &inverse(&completion(v0))?;
    debug_assert_eq!(&g.mul_vec(v0), v);
    Ok(g)
}

/// `φ(v)⁻¹ X φ(v)`; moves the pair `(X, v)` to `(Φ(X, v), v0)` without
/// changing `d`.
pub fn phi_map(x: &RatMatrix, v: &RatVector, v0: &RatVector) -> Result<RatMatrix> {
    x.check_vec_dim(v)?;
    let g = section(v, v0)?;
    let out = &(&inverse(&g)? * x) * &g;
    let (d_in, d_out) = (krylov_single(x, v).d, krylov_single(&out, v0).d);
    if d_in != d_out {
        return Err(Error::Check(format!("d changed from {d_in} to {d_out}")));
    }
    Ok(out)
}

/// For semisimple `S` and `Y` in `m = g^S`: whether `ad Y` is invertible on
/// the trace-form complement `q` of `m`.
pub fn m_genericity(s: &RatMatrix, y: &RatMatrix) -> Result<bool> {
    Ok(!ad_det_on_complement(s, y)?.is_zero())
}

/// `det(ad Y)|_q` as used by [`m_genericity`]; 1 when `q = 0`.
pub fn ad_det_on_complement(s: &RatMatrix, y: &RatMatrix) -> Result<Rational> {
    s.check_same_dim(y)?;
    if !is_semisimple(s) {
        return Err(Error::NotSemisimple);
    }
    if !bracket(s, y)?.is_zero() {
        return Err(Error::NotInCentralizer);
    }
    let n = s.n();
    let m = centralizer(s);
    let q = trace_orthogonal(n, m.basis());
    if q.is_empty() {
        return Ok(Rational::from_integer(1.into()));
    }
    let r = q.len();
    // columns of the n² × r system are the flattened basis of q
    let rows: Vec<Vec<Rational>> = (0..n * n)
        .map(|e| q.iter().map(|b| b.entries()[e].clone()).collect())
        .collect();
    let mut cols = Vec::with_capacity(r);
    for b in &q {
        let image = bracket(y, b)?;
        let c = solve(&rows, image.entries()).ok_or_else(|| Error::Check("ad Y does not preserve q".into()))?;
        cols.push(c);
    }
    let ad_q = RatMatrix::from_fn(r, |i, j| cols[j][i].clone());
    Ok(determinant(&ad_q))
}

/// `X − (tr X / n) I`.
pub fn project_traceless(x: &RatMatrix) -> RatMatrix {
    let n = x.n();
    let c = x.trace() / Rational::from_integer((n as i64).into());
    x - &RatMatrix::scalar(n, c)
}

/// Standard regular nilpotent `J_n` with a `v0` of prescribed `p` index:
/// `v0 = e_{n−p}` so that `v0 = J^p e_n`.
pub fn regular_nilpotent_representative(n: usize, p: usize) -> (RatMatrix, RatVector) {
    assert!(p < n);
    (RatMatrix::shift(n), RatVector::unit(n, n - 1 - p))
}
