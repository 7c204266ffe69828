//! Nilpotency and semisimplicity tests, the additive Jordan (Chevalley)
//! decomposition over ℚ, and Jordan types of nilpotent matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::bracket;
use crate::ratlin::{rank, RatMatrix, RatPoly};

/// `X = S + N` with `S` semisimple, `N` nilpotent, `[S, N] = 0` and
/// `S = certificate(X)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChevalleyDecomp {
    pub s: RatMatrix,
    pub n: RatMatrix,
    pub certificate: RatPoly,
}

impl ChevalleyDecomp {
    /// Re-verifies every defining property against `x`.
    pub fn checks(&self, x: &RatMatrix) -> Vec<(&'static str, bool)> {
        let dim = x.n();
        vec![
            ("sum_equals_x", &self.s + &self.n == *x),
            (
                "s_n_commute",
                bracket(&self.s, &self.n).map(|b| b.is_zero()).unwrap_or(false),
            ),
            ("s_semisimple", is_semisimple(&self.s)),
            ("n_nilpotent", self.n.pow(dim as u32).is_zero()),
            ("s_is_poly_in_x", self.certificate.eval_mat(x) == self.s),
        ]
    }

    pub fn verify(&self, x: &RatMatrix) -> bool {
        self.checks(x).iter().all(|(_, ok)| *ok)
    }
}

/// Partition of `n` given by the Jordan block sizes of a nilpotent matrix,
/// weakly decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JordanType {
    pub partition: Vec<usize>,
}

impl JordanType {
    pub fn size(&self) -> usize {
        self.partition.iter().sum()
    }
}

fn is_power_of_t(p: &RatPoly, n: usize) -> bool {
    p.degree() == Some(n) && p.is_monic() && p.coeffs()[..n].iter().all(num_traits::Zero::is_zero)
}

pub fn is_nilpotent(x: &RatMatrix) -> bool {
    let n = x.n();
    let by_char = is_power_of_t(&RatPoly::char_poly(x), n);
    let by_power = x.pow(n as u32).is_zero();
    assert_eq!(by_char, by_power, "nilpotency tests disagree on {x:?}");
    by_char
}

/// Diagonalizable over the algebraic closure: squarefree minimal polynomial.
pub fn is_semisimple(x: &RatMatrix) -> bool {
    let m = RatPoly::minimal_poly(x);
    m.gcd(&m.derivative()).degree() == Some(0)
}

/// Squarefree characteristic polynomial (n distinct eigenvalues).
pub fn is_regular_semisimple(x: &RatMatrix) -> bool {
    let c = RatPoly::char_poly(x);
    c.gcd(&c.derivative()).degree() == Some(0)
}

fn newton_steps(n: usize) -> usize {
    // ⌈log₂ n⌉ + 1
    (usize::BITS - (n.max(1) - 1).leading_zeros()) as usize + 1
}

/// Additive Jordan decomposition by Newton lifting in `ℚ[t]/(χ_X)` against
/// the squarefree part `f` of the characteristic polynomial: starting from
/// `z = t`, iterate `z ← z − f(z)·f′(z)⁻¹`. Each step squares the power of
/// `f` dividing `f(z)`, so `⌈log₂ n⌉ + 1` steps reach `f(z) ≡ 0`.
pub fn chevalley(x: &RatMatrix) -> ChevalleyDecomp {
    let n = x.n();
    let chi = RatPoly::char_poly(x);
    let f = chi.squarefree_part().expect("characteristic polynomial is monic");
    let df = f.derivative();
    let mut z = RatPoly::t().rem(&chi);
    for _ in 0..newton_steps(n) {
        let fz = f.compose_mod(&z, &chi);
        if fz.is_zero() {
            break;
        }
        let inv = df
            .compose_mod(&z, &chi)
            .inverse_mod(&chi)
            .expect("f'(z) is a unit modulo the characteristic polynomial");
        z = (&z - &(&fz * &inv)).rem(&chi);
    }
    assert!(f.compose_mod(&z, &chi).is_zero(), "Newton lifting did not converge");
    let s = z.eval_mat(x);
    let nil = x - &s;
    ChevalleyDecomp {
        s,
        n: nil,
        certificate: z,
    }
}

/// Partition from the rank sequence `r_k = rank(N^k)`: there are
/// `r_{k−1} − r_k` blocks of size at least `k`.
pub fn jordan_type(nil: &RatMatrix) -> Result<JordanType> {
    if !is_nilpotent(nil) {
        return Err(Error::NotNilpotent);
    }
    let n = nil.n();
    let mut ranks = vec![n];
    let mut power = RatMatrix::identity(n);
    while *ranks.last().unwrap() > 0 {
        power = &power * nil;
        ranks.push(rank(&power.rows()));
    }
    // at_least[k-1] = number of blocks of size >= k
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    let mut partition = Vec::new();
    for k in (1..=at_least.len()).rev() {
        let exactly = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
        partition.extend(std::iter::repeat_n(k, exactly));
    }
    Ok(JordanType { partition })
}

/// Nilpotent with a single Jordan block, i.e. `rank(X^{n−1}) = 1`.
pub fn is_regular_nilpotent(x: &RatMatrix) -> bool {
    if !is_nilpotent(x) {
        return false;
    }
    let n = x.n();
    let top = x.pow(n as u32 - 1);
    let by_rank = rank(&top.rows()) == 1;
    // ker X^{n−1} is a hyperplane exactly when X^{n−1} has rank one.
    let by_type = jordan_type(x).map(|t| t.partition == vec![n]).unwrap_or(false);
    assert_eq!(by_rank, by_type, "regular nilpotency tests disagree on {x:?}");
    by_rank
}
