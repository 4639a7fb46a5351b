//! Uncertainty relations between two observables in one state: the Robertson
//! baseline and its refinements by skew information.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infogeo::{f_variance, skew_information, u_quantity, variance};
use crate::linops::{commutator, DensityMatrix, HermitianOperator, C64};
use crate::monotone::{check_cond_y, MonotoneFunction};

/// Both sides of one inequality `lhs ≥ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationVerdict {
    pub relation: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

impl RelationVerdict {
    pub fn new(relation: &str, lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        Self { relation: relation.to_string(), lhs, rhs, slack, holds: slack >= -Self::tolerance(lhs, rhs) }
    }

    /// `1e-9 · max(1, |lhs|, |rhs|)`.
    pub fn tolerance(lhs: f64, rhs: f64) -> f64 {
        1e-9 * 1f64.max(lhs.abs()).max(rhs.abs())
    }
}

/// `Tr[ρ(AB - BA)]`, purely imaginary for Hermitian `A`, `B`.
pub fn commutator_expectation(rho: &DensityMatrix, a: &HermitianOperator, b: &HermitianOperator) -> Result<C64> {
    if a.dim() != rho.dim() || b.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: a.dim().max(b.dim()) });
    }
    let k = commutator(a.matrix(), b.matrix())?;
    let e = rho.expect(&k);
    let scale = 1f64.max(a.matrix().norm() * b.matrix().norm());
    if e.re.abs() > 1e-10 * scale {
        return Err(Error::Numerical(format!("commutator expectation has real part {:.3e}", e.re)));
    }
    Ok(e)
}

fn comm_sq(rho: &DensityMatrix, a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    Ok(commutator_expectation(rho, a, b)?.norm_sqr())
}

/// `V(A) V(B) ≥ |⟨[A,B]⟩|² / 4`.
pub fn robertson(rho: &DensityMatrix, a: &HermitianOperator, b: &HermitianOperator) -> Result<RelationVerdict> {
    let lhs = variance(rho, a)? * variance(rho, b)?;
    Ok(RelationVerdict::new("robertson", lhs, comm_sq(rho, a, b)? / 4.0))
}

/// `I^f(A) V^f(B) ≥ f(0)/2 · |⟨[A,B]⟩|²`.
pub fn lemma1(rho: &DensityMatrix, a: &HermitianOperator, b: &HermitianOperator, f: &MonotoneFunction) -> Result<RelationVerdict> {
    let lhs = skew_information(rho, a, f)? * f_variance(rho, b, f)?;
    Ok(RelationVerdict::new("lemma1", lhs, 0.5 * f.f0() * comm_sq(rho, a, b)?))
}

/// `U^f(A) U^f(B) ≥ f(0)² |⟨[A,B]⟩|²`.
pub fn type1(rho: &DensityMatrix, a: &HermitianOperator, b: &HermitianOperator, f: &MonotoneFunction) -> Result<RelationVerdict> {
    let lhs = u_quantity(rho, a, f)? * u_quantity(rho, b, f)?;
    Ok(RelationVerdict::new("type1", lhs, f.f0() * f.f0() * comm_sq(rho, a, b)?))
}

/// `U^f(A) U^f(B) ≥ f(0) |⟨[A,B]⟩|²`, only for functions satisfying
/// [`check_cond_y`].
pub fn type2(rho: &DensityMatrix, a: &HermitianOperator, b: &HermitianOperator, f: &MonotoneFunction) -> Result<RelationVerdict> {
    if !check_cond_y(f) {
        return Err(Error::ConditionNotMet { name: f.name().to_string() });
    }
    let lhs = u_quantity(rho, a, f)? * u_quantity(rho, b, f)?;
    Ok(RelationVerdict::new("type2", lhs, f.f0() * comm_sq(rho, a, b)?))
}

/// `I^f(A) V(B) ≥ f(0)/2 · |⟨[A,B]⟩|²`.
pub fn type3(rho: &DensityMatrix, a: &HermitianOperator, b: &HermitianOperator, f: &MonotoneFunction) -> Result<RelationVerdict> {
    let lhs = skew_information(rho, a, f)? * variance(rho, b)?;
    Ok(RelationVerdict::new("type3", lhs, 0.5 * f.f0() * comm_sq(rho, a, b)?))
}

/// Lemma 1, Type 3 and Robertson side by side for a function with
/// `f(0) = 1/2`, where all three share the same right-hand side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessChain {
    pub lemma1: RelationVerdict,
    pub type3: RelationVerdict,
    pub robertson: RelationVerdict,
    /// `lemma1.lhs ≤ type3.lhs ≤ robertson.lhs` and equal right-hand sides,
    /// each within `1e-10`.
    pub ordered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ChainOutcome {
    Chain(TightnessChain),
    NotApplicable { f_name: String, f0: f64 },
}

pub fn tightness_chain(rho: &DensityMatrix, a: &HermitianOperator, b: &HermitianOperator, f: &MonotoneFunction) -> Result<ChainOutcome> {
    if (f.f0() - 0.5).abs() > 1e-12 {
        return Ok(ChainOutcome::NotApplicable { f_name: f.name().to_string(), f0: f.f0() });
    }
    let l1 = lemma1(rho, a, b, f)?;
    let t3 = type3(rho, a, b, f)?;
    let rb = robertson(rho, a, b)?;
    let tol = |x: f64, y: f64| 1e-10 * 1f64.max(x.abs()).max(y.abs());
    let ordered = l1.lhs <= t3.lhs + tol(l1.lhs, t3.lhs)
        && t3.lhs <= rb.lhs + tol(t3.lhs, rb.lhs)
        && (l1.rhs - t3.rhs).abs() <= tol(l1.rhs, t3.rhs)
        && (t3.rhs - rb.rhs).abs() <= tol(t3.rhs, rb.rhs);
    Ok(ChainOutcome::Chain(TightnessChain { lemma1: l1, type3: t3, robertson: rb, ordered }))
}

/// Every relation applicable to `f`: Robertson, Lemma 1, Type 1, Type 3 and,
/// when the condition holds, Type 2.
pub fn all_relations(rho: &DensityMatrix, a: &HermitianOperator, b: &HermitianOperator, f: &MonotoneFunction) -> Result<Vec<RelationVerdict>> {
    let mut out = vec![robertson(rho, a, b)?, lemma1(rho, a, b, f)?, type1(rho, a, b, f)?, type3(rho, a, b, f)?];
    if check_cond_y(f) {
        out.push(type2(rho, a, b, f)?);
    }
    Ok(out)
}
