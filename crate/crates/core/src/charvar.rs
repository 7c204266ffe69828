//! Membership in the varieties that bound the characteristic varieties of
//! the invariant systems on `gl_n`, with covectors identified to matrices
//! through the trace form:
//!
//! * `Ch_g = { (X, Y) : Y nilpotent, [X, Y] = 0 }`
//! * `Ch_p = { (X, Y) : Y nilpotent, [X, Y] ∈ p⊥ }`
//! * `Ch_N = { (X, u, Y, v) : Y nilpotent, [X, Y] = u vᵀ }`
//!
//! plus the conormal fiber of a `P`-orbit and the regular-nilpotent
//! dichotomy between dense `P`-orbits and semisimple witnesses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan::{chevalley, is_nilpotent, is_regular_nilpotent};
use crate::lie::{bracket, centralizer, orbit_tangent_dim, stabilizer, trace_orthogonal};
use crate::orbit::{p_index, project_traceless, semisimple_witness, WitnessPair};
use crate::ratlin::{rat, RatMatrix, RatVector};
use crate::sample::Sampler;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CotangentPoint {
    pub x: RatMatrix,
    pub y: RatMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedCotangentPoint {
    pub x: RatMatrix,
    pub u: RatVector,
    pub y: RatMatrix,
    pub v: RatVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub verdict: bool,
    pub checks: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<RatVector>,
}

impl MembershipReport {
    fn from_checks(checks: &[(&str, bool)], witness: Option<RatVector>) -> Self {
        MembershipReport {
            verdict: checks.iter().all(|(_, ok)| *ok),
            checks: checks.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            witness,
        }
    }
}

pub fn in_char_g(pt: &CotangentPoint) -> Result<MembershipReport> {
    let b = bracket(&pt.x, &pt.y)?;
    Ok(MembershipReport::from_checks(
        &[("y_nilpotent", is_nilpotent(&pt.y)), ("bracket_zero", b.is_zero())],
        None,
    ))
}

/// Witness: `w` with `[X, Y] = v0 wᵀ` when the bracket lies in `p⊥`.
pub fn in_char_p(pt: &CotangentPoint, v0: &RatVector) -> Result<MembershipReport> {
    let b = bracket(&pt.x, &pt.y)?;
    pt.x.check_vec_dim(v0)?;
    let stab = stabilizer(v0)?;
    let w = stab.perp_factor(&b);
    Ok(MembershipReport::from_checks(
        &[("y_nilpotent", is_nilpotent(&pt.y)), ("bracket_in_p_perp", w.is_some())],
        w,
    ))
}

/// `[X, Y] = u vᵀ`; the conjugation in the complex formulation is dropped.
pub fn in_char_n(pt: &ExtendedCotangentPoint) -> Result<MembershipReport> {
    let b = bracket(&pt.x, &pt.y)?;
    pt.x.check_vec_dim(&pt.u)?;
    pt.x.check_vec_dim(&pt.v)?;
    Ok(MembershipReport::from_checks(
        &[
            ("y_nilpotent", is_nilpotent(&pt.y)),
            ("bracket_is_u_vt", b == RatMatrix::outer(&pt.u, &pt.v)),
        ],
        None,
    ))
}

/// Basis of `{ Y : [X, Y] ∈ p⊥ }`, computed as the trace-form orthogonal of
/// `[X, p]`.
pub fn conormal_fiber_p(x: &RatMatrix, v0: &RatVector) -> Result<Vec<RatMatrix>> {
    x.check_vec_dim(v0)?;
    let stab = stabilizer(v0)?;
    let tangent = stab
        .p()
        .basis()
        .iter()
        .map(|z| bracket(x, z))
        .collect::<Result<Vec<_>>>()?;
    let fiber = trace_orthogonal(x.n(), &tangent);
    let expected = x.n() * x.n() - orbit_tangent_dim(x, stab.p())?;
    if fiber.len() != expected {
        return Err(Error::Check(format!("fiber dimension {} != {expected}", fiber.len())));
    }
    Ok(fiber)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DichotomyOutcome {
    /// Every sampled fiber element is scalar plus nilpotent.
    DenseContained {
        sampled_elements: usize,
    },
    WitnessFound {
        witness: WitnessPair,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub p_index: usize,
    pub fiber_dim: usize,
    pub outcome: DichotomyOutcome,
    pub checks: BTreeMap<String, bool>,
    /// The dense branch samples the fiber instead of deciding a statement
    /// quantified over a linear space.
    pub sampled_evidence: bool,
}

impl DichotomyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|ok| *ok)
    }

    pub fn label(&self) -> &'static str {
        match self.outcome {
            DichotomyOutcome::DenseContained { .. } => "dense/contained",
            DichotomyOutcome::WitnessFound { .. } => "witness found",
        }
    }
}

pub const DICHOTOMY_DEFAULT_SEED: u64 = 0x5eed;
pub const DICHOTOMY_DEFAULT_SAMPLES: usize = 16;

pub fn fiber_dichotomy(x: &RatMatrix, v0: &RatVector) -> Result<DichotomyReport> {
    fiber_dichotomy_sampled(x, v0, DICHOTOMY_DEFAULT_SEED, DICHOTOMY_DEFAULT_SAMPLES)
}

/// For regular nilpotent `X`: when `p = 0` the conormal fiber to the
/// `P`-orbit equals the centralizer and all its elements are scalar plus
/// nilpotent (checked on the basis and `samples` random combinations); when
/// `p ≥ 1` a semisimple non-central element of the fiber is produced.
pub fn fiber_dichotomy_sampled(x: &RatMatrix, v0: &RatVector, seed: u64, samples: usize) -> Result<DichotomyReport> {
    if !is_regular_nilpotent(x) {
        return Err(Error::NotRegularNilpotent);
    }
    let class = p_index(x, v0)?;
    let fiber = conormal_fiber_p(x, v0)?;
    let stab = stabilizer(v0)?;
    let mut checks = BTreeMap::new();
    let outcome = if class.p_index == 0 {
        let cent = centralizer(x);
        checks.insert("fiber_dim_equals_centralizer_dim".into(), fiber.len() == cent.dim());
        checks.insert(
            "centralizer_in_fiber".into(),
            cent.basis()
                .iter()
                .all(|c| bracket(x, c).map(|b| stab.in_p_perp(&b)).unwrap_or(false)),
        );
        let mut elements = fiber.clone();
        let mut rng = Sampler::new(seed, 10);
        for _ in 0..samples {
            let mut acc = RatMatrix::zeros(x.n());
            for b in &fiber {
                acc = &acc + &b.scale(&rng.rational());
            }
            elements.push(acc);
        }
        let nilpotent_mod_scalars = elements.iter().all(|y| is_nilpotent(&project_traceless(y)));
        let semisimple_parts_scalar = elements.iter().all(|y| chevalley(y).s.is_scalar());
        checks.insert("nilpotent_mod_scalars".into(), nilpotent_mod_scalars);
        checks.insert("semisimple_parts_scalar".into(), semisimple_parts_scalar);
        DichotomyOutcome::DenseContained {
            sampled_elements: elements.len(),
        }
    } else {
        let witness = semisimple_witness(x, v0, &rat(0), &rat(1))?;
        for (name, ok) in witness.checks(x, &stab) {
            checks.insert(name.to_string(), ok);
        }
        let in_fiber = bracket(x, &witness.phi).map(|b| stab.in_p_perp(&b)).unwrap_or(false);
        checks.insert("phi_in_fiber".into(), in_fiber);
        DichotomyOutcome::WitnessFound { witness }
    };
    Ok(DichotomyReport {
        p_index: class.p_index,
        fiber_dim: fiber.len(),
        sampled_evidence: matches!(outcome, DichotomyOutcome::DenseContained { .. }),
        outcome,
        checks,
    })
}
