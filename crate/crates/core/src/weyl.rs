//! The Weyl algebra over ℚ: normal-ordered differential operators with
//! polynomial coefficients, their action on polynomials, principal symbols,
//! Poisson brackets, V-filtration degrees and the root condition on
//! b-function candidates.
//!
//! Conventions:
//! * operators are stored normal-ordered, `x^α D^β`, with `D_i x_i = x_i D_i + 1`;
//! * the symbol of `D_i` is the cotangent coordinate `ξ_i`, printed `xi_<var>`;
//! * `{f, g} = Σ_i (∂f/∂ξ_i · ∂g/∂x_i − ∂f/∂x_i · ∂g/∂ξ_i)`, so that
//!   `σ([P, Q]) = {σ(P), σ(Q)}` whenever the orders add up, and `{ξ, x} = 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratlin::{format_rational, parse_rational, rat, MPoly, Rational};

/// Largest total degree (in variables and derivations) an operator may reach.
pub const DEGREE_CAP: u32 = 16;

type Key = (Vec<u32>, Vec<u32>);

#[derive(Clone, PartialEq, Eq)]
pub struct WeylOperator {
    vars: Vec<String>,
    terms: BTreeMap<Key, Rational>,
}

fn names(vars: &[&str]) -> Vec<String> {
    vars.iter().map(|s| s.to_string()).collect()
}

fn binomial(n: u32, k: u32) -> Rational {
    (0..k).fold(Rational::one(), |acc, i| {
        acc * rat(i64::from(n - i)) / rat(i64::from(i + 1))
    })
}

fn falling(n: u32, k: u32) -> Rational {
    (0..k).fold(Rational::one(), |acc, i| acc * rat(i64::from(n - i)))
}

impl WeylOperator {
    pub fn zero(vars: Vec<String>) -> Self {
        WeylOperator {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(vars: Vec<String>, alpha: Vec<u32>, beta: Vec<u32>, c: Rational) -> Result<Self> {
        let k = vars.len();
        if alpha.len() != k || beta.len() != k {
            return Err(Error::VariableMismatch);
        }
        let mut p = Self::zero(vars);
        p.add_term(alpha, beta, c)?;
        Ok(p)
    }

    pub fn constant(vars: Vec<String>, c: Rational) -> Self {
        let k = vars.len();
        Self::monomial(vars, vec![0; k], vec![0; k], c).expect("degree 0")
    }

    /// Multiplication by the `i`-th variable.
    pub fn var(vars: Vec<String>, i: usize) -> Self {
        let k = vars.len();
        let mut a = vec![0; k];
        a[i] = 1;
        Self::monomial(vars, a, vec![0; k], Rational::one()).expect("degree 1")
    }

    /// The derivation `D_i`.
    pub fn deriv(vars: Vec<String>, i: usize) -> Self {
        let k = vars.len();
        let mut b = vec![0; k];
        b[i] = 1;
        Self::monomial(vars, vec![0; k], b, Rational::one()).expect("degree 1")
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &BTreeMap<Key, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, alpha: Vec<u32>, beta: Vec<u32>, c: Rational) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        let deg: u32 = alpha.iter().chain(&beta).sum();
        if deg > DEGREE_CAP {
            return Err(Error::DegreeCap(deg));
        }
        let key = (alpha, beta);
        let slot = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    fn same_vars(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_vars(other)?;
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(a.clone(), b.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.vars.clone());
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        out
    }

    /// Order: the largest total derivation degree; `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|(_, b)| b.iter().sum()).max()
    }

    /// Acts on a polynomial in the same variables.
    pub fn apply(&self, f: &MPoly) -> Result<MPoly> {
        if f.nvars() != self.num_vars() {
            return Err(Error::VariableMismatch);
        }
        let k = self.num_vars();
        let mut out = MPoly::zero(k);
        for ((alpha, beta), c) in &self.terms {
            let mut g = f.clone();
            for (i, &b) in beta.iter().enumerate() {
                for _ in 0..b {
                    g = g.partial(i);
                }
            }
            let xa = MPoly::monomial(alpha.clone(), c.clone());
            out = &out + &(&xa * &g);
        }
        Ok(out)
    }
}

/// Normal-ordered product, commuting each `D_i^b` past `x_i^c` with
/// `D^b x^c = Σ_k C(b, k) c!/(c−k)! x^{c−k} D^{b−k}`.
pub fn weyl_mul(p: &WeylOperator, q: &WeylOperator) -> Result<WeylOperator> {
    p.same_vars(q)?;
    let k = p.num_vars();
    let mut out = WeylOperator::zero(p.vars.clone());
    for ((a, b), c1) in &p.terms {
        for ((cc, d), c2) in &q.terms {
            let mut partial: Vec<(Vec<u32>, Vec<u32>, Rational)> = vec![(a.clone(), d.clone(), c1 * c2)];
            for i in 0..k {
                let mut next = Vec::with_capacity(partial.len());
                for (al, be, coef) in &partial {
                    for j in 0..=b[i].min(cc[i]) {
                        let mut al2 = al.clone();
                        let mut be2 = be.clone();
                        al2[i] += cc[i] - j;
                        be2[i] += b[i] - j;
                        let f = binomial(b[i], j) * falling(cc[i], j);
                        next.push((al2, be2, coef * f));
                    }
                }
                partial = next;
            }
            for (al, be, coef) in partial {
                out.add_term(al, be, coef)?;
            }
        }
    }
    Ok(out)
}

pub fn weyl_commutator(p: &WeylOperator, q: &WeylOperator) -> Result<WeylOperator> {
    weyl_mul(p, q)?.sub(&weyl_mul(q, p)?)
}

/// A commutative polynomial on the cotangent space: variables `x_1..x_k`
/// followed by `ξ_1..ξ_k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Symbol {
    vars: Vec<String>,
    poly: MPoly,
}

impl Symbol {
    pub fn new(vars: Vec<String>, poly: MPoly) -> Result<Self> {
        if poly.nvars() != 2 * vars.len() {
            return Err(Error::VariableMismatch);
        }
        Ok(Symbol { vars, poly })
    }

    /// The base coordinate `x_i`.
    pub fn x(vars: Vec<String>, i: usize) -> Self {
        let k = vars.len();
        Symbol {
            poly: MPoly::var(2 * k, i),
            vars,
        }
    }

    /// The fiber coordinate `ξ_i`.
    pub fn xi(vars: Vec<String>, i: usize) -> Self {
        let k = vars.len();
        Symbol {
            poly: MPoly::var(2 * k, k + i),
            vars,
        }
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn all_names(&self) -> Vec<String> {
        let mut v = self.vars.clone();
        v.extend(self.vars.iter().map(|x| format!("xi_{x}")));
        v
    }

    pub fn eval(&self, x: &[Rational], xi: &[Rational]) -> Rational {
        let point: Vec<Rational> = x.iter().chain(xi).cloned().collect();
        self.poly.eval(&point)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Symbol {
            vars: self.vars.clone(),
            poly: self.poly.scale(c),
        }
    }

    pub fn mul(&self, other: &Symbol) -> Result<Symbol> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch);
        }
        Symbol::new(self.vars.clone(), &self.poly * &other.poly)
    }

    pub fn add(&self, other: &Symbol) -> Result<Symbol> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch);
        }
        Symbol::new(self.vars.clone(), &self.poly + &other.poly)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly.format_with(&self.all_names()))
    }
}

/// Top-order part with `D_i ↦ ξ_i`.
pub fn principal_symbol(p: &WeylOperator) -> Result<Symbol> {
    let ord = p.order().ok_or(Error::ZeroOperator)?;
    let k = p.num_vars();
    let mut poly = MPoly::zero(2 * k);
    for ((a, b), c) in &p.terms {
        if b.iter().sum::<u32>() == ord {
            let e: Vec<u32> = a.iter().chain(b).copied().collect();
            poly.add_term(e, c.clone());
        }
    }
    Symbol::new(p.vars.clone(), poly)
}

pub fn poisson(f: &Symbol, g: &Symbol) -> Result<Symbol> {
    if f.vars != g.vars {
        return Err(Error::VariableMismatch);
    }
    let k = f.vars.len();
    let mut acc = MPoly::zero(2 * k);
    for i in 0..k {
        let a = &f.poly.partial(k + i) * &g.poly.partial(i);
        let b = &f.poly.partial(i) * &g.poly.partial(k + i);
        acc = &(&acc + &a) - &b;
    }
    Symbol::new(f.vars.clone(), acc)
}

/// Degree for the V-filtration along `{t = 0}`: the maximum over terms of
/// `Σ w_j (β_{t_j} − α_{t_j})`. An operator has degree `≤ −1` iff it can be
/// written `Σ t_j Q_j` with every `Q_j` of degree `≤ 0`. `None` for zero.
pub fn v_degree(p: &WeylOperator, t_indices: &[usize], weights: Option<&[u32]>) -> Result<Option<i64>> {
    if let Some(w) = weights {
        if w.len() != t_indices.len() {
            return Err(Error::DimensionMismatch {
                expected: t_indices.len(),
                found: w.len(),
            });
        }
    }
    if t_indices.iter().any(|&i| i >= p.num_vars()) {
        return Err(Error::VariableMismatch);
    }
    Ok(p.terms
        .keys()
        .map(|(a, b)| {
            t_indices
                .iter()
                .enumerate()
                .map(|(j, &i)| {
                    let w = weights.map_or(1, |w| i64::from(w[j]));
                    w * (i64::from(b[i]) - i64::from(a[i]))
                })
                .sum::<i64>()
        })
        .max())
}

/// `θ = Σ w_j t_j D_{t_j}`.
pub fn euler_operator(vars: Vec<String>, t_indices: &[usize], weights: Option<&[u32]>) -> Result<WeylOperator> {
    let k = vars.len();
    let mut out = WeylOperator::zero(vars.clone());
    for (j, &i) in t_indices.iter().enumerate() {
        if i >= k {
            return Err(Error::VariableMismatch);
        }
        let mut e = vec![0; k];
        e[i] = 1;
        let w = weights.map_or(1, |w| i64::from(w[j]));
        out.add_term(e.clone(), e, rat(w))?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BFunctionCandidate {
    #[serde(with = "rational_list")]
    pub roots: Vec<Rational>,
    pub weights: Vec<u32>,
}

mod rational_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)
    }
}

/// Tame iff every root is strictly greater than `−Σ n_i`.
pub fn tame_check(c: &BFunctionCandidate) -> Result<bool> {
    if c.weights.is_empty() || c.weights.contains(&0) {
        return Err(Error::Parse(
            "weights must be a nonempty list of positive integers".into(),
        ));
    }
    let bound = -rat(c.weights.iter().map(|&w| i64::from(w)).sum());
    Ok(c.roots.iter().all(|r| r > &bound))
}

/// Variables `(x, y, z)` of `Z = xH + yX + zY` in `sl_2`.
pub fn sl2_vars() -> Vec<String> {
    names(&["x", "y", "z"])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sl2Element {
    H,
    X,
    Y,
}

/// The vector fields of the adjoint action of `sl_2` in the coordinates
/// `(x, y, z)`:
/// `τ(H) = 2(z D_z − y D_y)`, `τ(X) = −z D_x + 2x D_y`, `τ(Y) = y D_x − 2x D_z`.
pub fn tau_sl2(which: Sl2Element) -> WeylOperator {
    let src = match which {
        Sl2Element::H => "2*z*Dz - 2*y*Dy",
        Sl2Element::X => "-z*Dx + 2*x*Dy",
        Sl2Element::Y => "y*Dx - 2*x*Dz",
    };
    parse_operator(&sl2_vars(), src).expect("literal operator")
}

/// `D_x² + 4 D_y D_z − λ`.
pub fn sl2_casimir(lambda: &Rational) -> WeylOperator {
    let q = parse_operator(&sl2_vars(), "Dx^2 + 4*Dy*Dz").expect("literal operator");
    q.sub(&WeylOperator::constant(sl2_vars(), lambda.clone()))
        .expect("same vars")
}

/// Values of λ used for the affine-in-λ identity `[Q_λ, τ(Y)] = 0`.
pub const CASIMIR_LAMBDAS: [i64; 3] = [0, 7, -3];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sl2Report {
    pub identities: BTreeMap<String, bool>,
}

impl Sl2Report {
    pub fn all_pass(&self) -> bool {
        self.identities.values().all(|ok| *ok)
    }
}

pub fn verify_sl2() -> Sl2Report {
    verify_sl2_with(&tau_sl2(Sl2Element::Y))
}

/// The `sl_2` relations with a caller-supplied `τ(Y)`, so that a corrupted
/// field can be fed in as a negative control.
pub fn verify_sl2_with(tau_y: &WeylOperator) -> Sl2Report {
    let v = sl2_vars();
    let th = tau_sl2(Sl2Element::H);
    let tx = tau_sl2(Sl2Element::X);
    let ty = tau_y.clone();
    let x = WeylOperator::var(v.clone(), 0);
    let y = WeylOperator::var(v.clone(), 1);
    let z = WeylOperator::var(v.clone(), 2);
    let mul = |a: &WeylOperator, b: &WeylOperator| weyl_mul(a, b).expect("small degrees");
    let comm = |a: &WeylOperator, b: &WeylOperator| weyl_commutator(a, b).expect("small degrees");
    let sum = |a: WeylOperator, b: WeylOperator| a.add(&b).expect("same vars");

    let mut ids = BTreeMap::new();
    let euler = sum(sum(mul(&x, &th), mul(&y, &tx)), mul(&z, &ty));
    ids.insert("i_x_tauH_plus_y_tauX_plus_z_tauY_zero".to_string(), euler.is_zero());
    ids.insert("ii_tauX_tauY_bracket_is_tauH".to_string(), comm(&tx, &ty) == th);
    ids.insert(
        "iii_tauH_tauY_bracket_is_minus_2_tauY".to_string(),
        comm(&th, &ty) == ty.scale(&rat(-2)),
    );
    let rhs = sum(mul(&x, &th), mul(&y, &tx)).scale(&rat(-1));
    ids.insert(
        "iv_z_tauY_equals_minus_x_tauH_minus_y_tauX".to_string(),
        mul(&z, &ty) == rhs,
    );
    let casimir_ok = CASIMIR_LAMBDAS
        .iter()
        .all(|&l| comm(&sl2_casimir(&rat(l)), &ty).is_zero());
    ids.insert("v_casimir_commutes_with_tauY".to_string(), casimir_ok);
    // consequences: τ(X) and τ(H) + 2 lie in the annihilator ideal of τ(Y)
    ids.insert(
        "tauX_tauY_equals_tauY_tauX_plus_tauH".to_string(),
        mul(&tx, &ty) == sum(mul(&ty, &tx), th.clone()),
    );
    let th2 = sum(th.clone(), WeylOperator::constant(v, rat(2)));
    ids.insert(
        "tauH_plus_2_tauY_equals_tauY_tauH".to_string(),
        mul(&th2, &ty) == mul(&ty, &th),
    );
    Sl2Report { identities: ids }
}

/// `{z, ξ² + 4ηζ}` in the `sl_2` coordinates.
pub fn sl2_poisson_example() -> Symbol {
    let v = sl2_vars();
    let z = Symbol::x(v.clone(), 2);
    let q = principal_symbol(&sl2_casimir(&rat(0))).expect("nonzero");
    poisson(&z, &q).expect("same vars")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalCrossingPoint {
    #[serde(with = "rational_list")]
    pub y: Vec<Rational>,
    #[serde(with = "rational_list")]
    pub eta: Vec<Rational>,
    /// All symbols `y_i η_i` vanish.
    pub in_variety: bool,
    /// Indices `i` with `y_i = 0`, naming the stratum of the base point.
    pub stratum: Vec<usize>,
    /// Membership in the conormal of that stratum.
    pub in_conormal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalCrossingReport {
    pub n: usize,
    pub points: Vec<NormalCrossingPoint>,
    pub routes_agree: bool,
}

/// Evaluates the symbols of `y_1 D_{y_1}, …, y_n D_{y_n}` on the given
/// cotangent points and compares with membership in the conormal of the
/// coordinate stratum through the base point.
pub fn normal_crossing_charvar_check(
    n: usize,
    sample_points: &[(Vec<Rational>, Vec<Rational>)],
) -> Result<NormalCrossingReport> {
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let vars: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let symbols = (0..n)
        .map(|i| principal_symbol(&euler_operator(vars.clone(), &[i], None)?))
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::with_capacity(sample_points.len());
    for (y, eta) in sample_points {
        if y.len() != n || eta.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: y.len().max(eta.len()),
            });
        }
        let in_variety = symbols.iter().all(|s| s.eval(y, eta).is_zero());
        let stratum: Vec<usize> = (0..n).filter(|&i| y[i].is_zero()).collect();
        let in_conormal = (0..n).all(|i| y[i].is_zero() || eta[i].is_zero());
        points.push(NormalCrossingPoint {
            y: y.clone(),
            eta: eta.clone(),
            in_variety,
            stratum,
            in_conormal,
        });
    }
    let routes_agree = points.iter().all(|p| p.in_variety == p.in_conormal);
    Ok(NormalCrossingReport {
        n,
        points,
        routes_agree,
    })
}

// ---- text syntax ----------------------------------------------------------

impl fmt::Display for WeylOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, ((a, b), c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c } else { c.clone() };
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            let bare = a.iter().chain(b).all(|&e| e == 0);
            if !mag.is_one() || bare {
                factors.push(format_rational(&mag));
            }
            for (prefix, exps) in [("", a), ("D", b)] {
                for (name, &e) in self.vars.iter().zip(exps) {
                    match e {
                        0 => {}
                        1 => factors.push(format!("{prefix}{name}")),
                        _ => factors.push(format!("{prefix}{name}^{e}")),
                    }
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for WeylOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    vars: Vec<String>,
    expr: String,
}

impl Serialize for WeylOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorRepr {
            vars: self.vars.clone(),
            expr: self.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeylOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = OperatorRepr::deserialize(d)?;
        parse_operator(&r.vars, &r.expr).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut num = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                num.push(d);
                chars.next();
            }
            out.push(Tok::Num(num));
        } else if c.is_alphabetic() || c == '_' {
            let mut id = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric() || **d == '_') {
                id.push(d);
                chars.next();
            }
            out.push(Tok::Ident(id));
        } else if "+-*/^".contains(c) {
            out.push(Tok::Op(c));
            chars.next();
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn number(&mut self) -> Result<u32> {
        match self.next() {
            Some(Tok::Num(s)) => s.parse().map_err(|_| Error::Parse(format!("bad exponent {s}"))),
            t => Err(Error::Parse(format!("expected integer, found {t:?}"))),
        }
    }

    fn factor(&mut self) -> Result<WeylOperator> {
        let vars = self.vars.to_vec();
        match self.next() {
            Some(Tok::Num(n)) => {
                let mut text = n;
                if self.peek() == Some(&Tok::Op('/')) {
                    self.next();
                    text = format!("{text}/{}", self.number()?);
                }
                Ok(WeylOperator::constant(vars, parse_rational(&text)?))
            }
            Some(Tok::Ident(id)) => {
                let exp = if self.peek() == Some(&Tok::Op('^')) {
                    self.next();
                    self.number()?
                } else {
                    1
                };
                let k = vars.len();
                let mut a = vec![0; k];
                let mut b = vec![0; k];
                if let Some(i) = vars.iter().position(|v| *v == id) {
                    a[i] = exp;
                } else if let Some(i) = id.strip_prefix('D').and_then(|r| vars.iter().position(|v| v == r)) {
                    b[i] = exp;
                } else {
                    return Err(Error::Parse(format!("unknown symbol {id}")));
                }
                WeylOperator::monomial(vars, a, b, Rational::one())
            }
            t => Err(Error::Parse(format!("unexpected token {t:?}"))),
        }
    }

    fn term(&mut self) -> Result<WeylOperator> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Op('*')) {
            self.next();
            let f = self.factor()?;
            acc = weyl_mul(&acc, &f)?;
        }
        Ok(acc)
    }

    fn expr(&mut self) -> Result<WeylOperator> {
        let mut acc = WeylOperator::zero(self.vars.to_vec());
        let mut sign = rat(1);
        if let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.next();
            if c == '-' {
                sign = rat(-1);
            }
        }
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(&sign))?;
            match self.next() {
                None => return Ok(acc),
                Some(Tok::Op('+')) => sign = rat(1),
                Some(Tok::Op('-')) => sign = rat(-1),
                Some(t) => return Err(Error::Parse(format!("unexpected token {t:?}"))),
            }
        }
    }
}

/// Parses sums of products such as `"2*z*Dz - 2*y*Dy"` or `"Dx*x + 1/2"`.
/// Factors multiply in the written order, so `Dx*x` is `x Dx + 1`.
pub fn parse_operator(vars: &[String], text: &str) -> Result<WeylOperator> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty operator".into()));
    }
    Parser { toks, pos: 0, vars }.expr()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v1() -> Vec<String> {
        names(&["x"])
    }

    fn op(vars: &[String], s: &str) -> WeylOperator {
        parse_operator(vars, s).unwrap()
    }

    #[test]
    fn mul_examples() {
        let x = WeylOperator::var(v1(), 0);
        let d = WeylOperator::deriv(v1(), 0);
        assert_eq!(weyl_mul(&d, &x).unwrap(), op(&v1(), "x*Dx + 1"));
        assert_eq!(weyl_mul(&x, &d).unwrap(), op(&v1(), "x*Dx"));
        let e = op(&v1(), "x*Dx");
        assert_eq!(weyl_mul(&e, &e).unwrap(), op(&v1(), "x^2*Dx^2 + x*Dx"));
        // D² x² = x² D² + 4 x D + 2
        assert_eq!(op(&v1(), "Dx^2*x^2"), op(&v1(), "x^2*Dx^2 + 4*x*Dx + 2"));
    }

    #[test]
    fn commutator_examples() {
        let tx = tau_sl2(Sl2Element::X);
        let ty = tau_sl2(Sl2Element::Y);
        let th = tau_sl2(Sl2Element::H);
        assert_eq!(weyl_commutator(&tx, &ty).unwrap(), th);
        assert_eq!(weyl_commutator(&th, &ty).unwrap(), ty.scale(&rat(-2)));
        assert!(weyl_commutator(&tx, &tx).unwrap().is_zero());
        assert_eq!(
            weyl_commutator(&tx, &WeylOperator::var(v1(), 0)),
            Err(Error::VariableMismatch)
        );
    }

    #[test]
    fn apply_examples() {
        let x2 = MPoly::monomial(vec![2], rat(1));
        let d = WeylOperator::deriv(v1(), 0);
        assert_eq!(d.apply(&x2).unwrap(), MPoly::monomial(vec![1], rat(2)));
        let z = MPoly::var(3, 2);
        assert_eq!(tau_sl2(Sl2Element::H).apply(&z).unwrap(), z.scale(&rat(2)));
        assert!(tau_sl2(Sl2Element::X).apply(&MPoly::zero(3)).unwrap().is_zero());
    }

    #[test]
    fn tau_literals() {
        let v = sl2_vars();
        assert_eq!(tau_sl2(Sl2Element::H).to_string(), "-2*y*Dy + 2*z*Dz");
        assert_eq!(tau_sl2(Sl2Element::H), op(&v, "2*z*Dz").sub(&op(&v, "2*y*Dy")).unwrap());
        assert_eq!(tau_sl2(Sl2Element::X), op(&v, "2*x*Dy - z*Dx"));
        assert_eq!(tau_sl2(Sl2Element::Y), op(&v, "-2*x*Dz + y*Dx"));
    }

    #[test]
    fn sl2_identities_hold() {
        let r = verify_sl2();
        for (name, ok) in &r.identities {
            assert!(ok, "{name}");
        }
        assert_eq!(r.identities.len(), 7);
    }

    #[test]
    fn sl2_negative_control() {
        let flipped = tau_sl2(Sl2Element::Y).scale(&rat(-1));
        let r = verify_sl2_with(&flipped);
        assert!(!r.identities["ii_tauX_tauY_bracket_is_tauH"]);
        assert!(!r.all_pass());
    }

    #[test]
    fn symbol_examples() {
        let v = sl2_vars();
        let s = principal_symbol(&tau_sl2(Sl2Element::Y)).unwrap();
        assert_eq!(s.to_string(), "-2*x*xi_z + y*xi_x");
        let q = principal_symbol(&sl2_casimir(&rat(5))).unwrap();
        let expect = Symbol::xi(v.clone(), 0)
            .mul(&Symbol::xi(v.clone(), 0))
            .unwrap()
            .add(
                &Symbol::xi(v.clone(), 1)
                    .mul(&Symbol::xi(v.clone(), 2))
                    .unwrap()
                    .scale(&rat(4)),
            )
            .unwrap();
        assert_eq!(q, expect);
        let x = principal_symbol(&WeylOperator::var(v.clone(), 0)).unwrap();
        assert_eq!(x, Symbol::x(v.clone(), 0));
        assert_eq!(principal_symbol(&WeylOperator::zero(v)), Err(Error::ZeroOperator));
    }

    #[test]
    fn poisson_examples() {
        let v = sl2_vars();
        assert_eq!(sl2_poisson_example(), Symbol::xi(v.clone(), 1).scale(&rat(-4)));
        let q = principal_symbol(&sl2_casimir(&rat(0))).unwrap();
        assert!(poisson(&q, &q).unwrap().poly().is_zero());
        let one = poisson(&Symbol::xi(v1(), 0), &Symbol::x(v1(), 0)).unwrap();
        assert_eq!(one.poly(), &MPoly::constant(2, rat(1)));
    }

    #[test]
    fn commutator_symbol_matches_poisson_on_casimir() {
        let v = sl2_vars();
        let z = WeylOperator::var(v.clone(), 2);
        let q = sl2_casimir(&rat(0));
        let c = weyl_commutator(&z, &q).unwrap();
        assert_eq!(c, op(&v, "-4*Dy"));
        assert_eq!(principal_symbol(&c).unwrap(), sl2_poisson_example());
    }

    #[test]
    fn v_degree_examples() {
        let v = names(&["t1", "t2", "x"]);
        let theta = euler_operator(v.clone(), &[0, 1], None).unwrap();
        assert_eq!(v_degree(&theta, &[0, 1], None).unwrap(), Some(0));
        assert_eq!(v_degree(&op(&v, "Dt1"), &[0, 1], None).unwrap(), Some(1));
        assert_eq!(v_degree(&op(&v, "t1^2*Dt1"), &[0, 1], None).unwrap(), Some(-1));
        assert_eq!(v_degree(&op(&v, "t1*Dx + t2*x"), &[0, 1], None).unwrap(), Some(-1));
        assert_eq!(v_degree(&op(&v, "Dt2"), &[0, 1], Some(&[1, 3])).unwrap(), Some(3));
        assert_eq!(v_degree(&WeylOperator::zero(v.clone()), &[0], None).unwrap(), None);
        assert!(v_degree(&theta, &[0, 1], Some(&[1])).is_err());
    }

    #[test]
    fn tame_examples() {
        let c = |roots: &[i64], weights: &[u32]| BFunctionCandidate {
            roots: roots.iter().map(|&r| rat(r)).collect(),
            weights: weights.to_vec(),
        };
        assert!(tame_check(&c(&[0], &[1, 1])).unwrap());
        assert!(!tame_check(&c(&[-3], &[1, 1])).unwrap());
        assert!(!tame_check(&c(&[-2], &[1, 1])).unwrap());
        assert!(tame_check(&c(&[], &[1, 1])).unwrap());
        let half = BFunctionCandidate {
            roots: vec![Rational::new((-1).into(), 2.into())],
            weights: vec![1],
        };
        assert!(tame_check(&half).unwrap());
        assert!(tame_check(&c(&[0], &[])).is_err());
    }

    #[test]
    fn normal_crossing_examples() {
        let pts = vec![
            (vec![rat(1), rat(1)], vec![rat(0), rat(0)]),
            (vec![rat(0), rat(1)], vec![rat(5), rat(0)]),
            (vec![rat(1), rat(1)], vec![rat(1), rat(0)]),
        ];
        let r = normal_crossing_charvar_check(2, &pts).unwrap();
        assert!(r.routes_agree);
        let verdicts: Vec<bool> = r.points.iter().map(|p| p.in_variety).collect();
        assert_eq!(verdicts, vec![true, true, false]);
        assert_eq!(r.points[1].stratum, vec![0]);
    }

    #[test]
    fn degree_cap_errors() {
        let big = op(&v1(), "x^9");
        assert_eq!(weyl_mul(&big, &big), Err(Error::DegreeCap(18)));
    }

    #[test]
    fn parse_print_roundtrip_examples() {
        let v = sl2_vars();
        for s in ["2*z*Dz - 2*y*Dy", "Dx*x", "-1/2*x^2*Dy + 3", "0*x + Dz"] {
            let p = op(&v, s);
            assert_eq!(op(&v, &p.to_string()), p);
        }
        assert!(parse_operator(&v, "w*Dx").is_err());
        assert!(parse_operator(&v, "").is_err());
        assert!(parse_operator(&v, "x +").is_err());
        let js = serde_json::to_string(&tau_sl2(Sl2Element::Y)).unwrap();
        assert_eq!(
            serde_json::from_str::<WeylOperator>(&js).unwrap(),
            tau_sl2(Sl2Element::Y)
        );
    }
}
