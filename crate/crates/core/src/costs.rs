//! Two-sided bounds on the environment coherence needed to measure `B_S`
//! with worst error `ε`, written for `√I`.

use serde::{Deserialize, Serialize};

use crate::construct::{exact_worst_error, xi_for_epsilon, ConstructionSpec};
use crate::error::{Error, Result};
use crate::monotone::MonotoneFunction;

/// `√(f(0)/2) · ‖[A,B]‖/ε - ‖A‖/2`. May be negative (vacuous) for large `ε`.
pub fn cost_lower_sqrt(norm_comm: f64, norm_a: f64, eps: f64, f: &MonotoneFunction) -> Result<f64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    Ok((0.5 * f.f0()).sqrt() * norm_comm / eps - 0.5 * norm_a)
}

/// `‖[A,B]‖/2ε + ‖A‖`, attained by the Gaussian-pointer construction for
/// `0 < ε ≤ ‖[A,B]‖/8‖A‖`; outside that window this is an
/// [`Error::OutOfRegime`].
pub fn cost_upper_sqrt(norm_comm: f64, norm_a: f64, eps: f64) -> Result<f64> {
    xi_for_epsilon(norm_comm, norm_a, eps)
}

pub fn in_window(norm_comm: f64, norm_a: f64, eps: f64) -> bool {
    xi_for_epsilon(norm_comm, norm_a, eps).is_ok()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub eps: f64,
    pub f_name: String,
    pub lower_sqrt: f64,
    /// `None` outside the validity window.
    pub upper_sqrt: Option<f64>,
    /// `ξ_ε` of the construction, the square root of the coherence it uses.
    pub achieved_sqrt: Option<f64>,
    pub norm_a: f64,
    pub norm_comm: f64,
    pub in_window: bool,
}

impl CostReport {
    pub fn eps_times_lower(&self) -> f64 {
        self.eps * self.lower_sqrt
    }

    pub fn eps_times_upper(&self) -> Option<f64> {
        self.upper_sqrt.map(|u| self.eps * u)
    }

    /// `lower ≤ achieved ≤ upper` within `1e-10`; vacuously true outside the
    /// window. Only implied by the theory when `f(0) = 1/2`.
    pub fn sandwiched(&self) -> bool {
        match (self.achieved_sqrt, self.upper_sqrt) {
            (Some(a), Some(u)) => self.lower_sqrt <= a + 1e-10 && a <= u + 1e-10,
            _ => true,
        }
    }
}

pub fn cost_report(norm_comm: f64, norm_a: f64, eps: f64, f: &MonotoneFunction) -> Result<CostReport> {
    let lower_sqrt = cost_lower_sqrt(norm_comm, norm_a, eps, f)?;
    let upper = cost_upper_sqrt(norm_comm, norm_a, eps);
    let in_window = upper.is_ok();
    let upper_sqrt = upper.ok();
    Ok(CostReport {
        eps,
        f_name: f.name().to_string(),
        lower_sqrt,
        upper_sqrt,
        achieved_sqrt: upper_sqrt,
        norm_a,
        norm_comm,
        in_window,
    })
}

/// Checks on a concrete spec that the width `ξ_ε` derived from its norms
/// gives worst error at most `eps`. Returns `(ξ_ε, worst error)`.
pub fn certify_achievability(spec: &ConstructionSpec, eps: f64) -> Result<(f64, f64)> {
    let xi = xi_for_epsilon(spec.norm_comm(), spec.norm_a(), eps)?;
    let worst = exact_worst_error(&spec.with_xi(xi)?);
    if worst > eps {
        return Err(Error::InvariantViolation { invariant: "worst error ≤ eps at ξ_ε".into(), residual: worst - eps });
    }
    Ok((xi, worst))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticTable {
    pub rows: Vec<CostReport>,
    /// `√(f(0)/2) ‖[A,B]‖`, the limit of `ε · lower`.
    pub limit_lower: f64,
    /// `‖[A,B]‖/2`, the limit of `ε · upper`.
    pub limit_upper: f64,
    /// Whether `f(0) = 1/2`, the only case where the two limits coincide.
    pub equality_claimed: bool,
    /// `(limit_upper - limit_lower) / limit_upper`.
    pub relative_gap: f64,
    /// Every in-window row has `|ε·achieved - ‖[A,B]‖/2| ≤ ε‖A‖`.
    pub within_order_a: bool,
}

pub fn asymptotic_table(norm_comm: f64, norm_a: f64, eps_list: &[f64], f: &MonotoneFunction) -> Result<AsymptoticTable> {
    if eps_list.is_empty() {
        return Err(Error::InvalidInput("empty eps list".into()));
    }
    let rows = eps_list.iter().map(|&e| cost_report(norm_comm, norm_a, e, f)).collect::<Result<Vec<_>>>()?;
    let limit_lower = (0.5 * f.f0()).sqrt() * norm_comm;
    let limit_upper = 0.5 * norm_comm;
    let within_order_a = rows.iter().all(|r| match r.achieved_sqrt {
        Some(a) => (r.eps * a - limit_upper).abs() <= r.eps * norm_a * (1.0 + 1e-12),
        None => true,
    });
    Ok(AsymptoticTable {
        rows,
        limit_lower,
        limit_upper,
        equality_claimed: (f.f0() - 0.5).abs() < 1e-12,
        relative_gap: if limit_upper > 0.0 { (limit_upper - limit_lower) / limit_upper } else { 0.0 },
        within_order_a,
    })
}

/// The same two bounds restated for the asymmetry cost under covariant
/// operations. Documentation only: no group action is computed, and the
/// numbers come from [`cost_lower_sqrt`] and [`cost_upper_sqrt`] unchanged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcovNote {
    pub documentation_only: bool,
    pub lower: String,
    pub upper: String,
    pub reason: String,
}

pub fn gcov_transfer_note() -> GcovNote {
    GcovNote {
        documentation_only: true,
        lower: "√I'^f_ε ≥ √(f(0)/2)·‖[A_S,B_S]‖/ε − ‖A_S‖/2".into(),
        upper: "√I'^f_ε ≤ ‖[A_S,B_S]‖/2ε + ‖A_S‖ for 0 < ε ≤ ‖[A_S,B_S]‖/8‖A_S‖".into(),
        reason: "skew information is additive on products and vanishes on invariant states, so both proofs carry over".into(),
    }
}
