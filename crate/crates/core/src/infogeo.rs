//! Variance-type quantities of an observable in a state, computed in the
//! eigenbasis `{p_i, |i⟩}` of the state.
//!
//! All double sums run over every ordered pair `(i, j)`, diagonal included.
//! Pairs with `m_f(p_i, p_j) = 0` (both eigenvalues zero) contribute nothing
//! to the skew information because `(p_i - p_j)²` vanishes with them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::{CMat, DensityMatrix, HermitianOperator, C64};
use crate::monotone::{f_tilde, MonotoneFunction};

fn check_dims(rho: &DensityMatrix, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: dim });
    }
    Ok(())
}

/// `A - Tr[ρA]·1`.
pub fn centered(rho: &DensityMatrix, a: &HermitianOperator) -> Result<CMat> {
    check_dims(rho, a.dim())?;
    let mean = rho.expect(a.matrix()).re;
    Ok(a.shifted(mean).into_matrix())
}

/// `Tr[ρA²] - Tr[ρA]²`.
pub fn variance(rho: &DensityMatrix, a: &HermitianOperator) -> Result<f64> {
    check_dims(rho, a.dim())?;
    let m = a.matrix();
    let mean = rho.expect(m).re;
    let second = rho.expect(&(m * m)).re;
    Ok(second - mean * mean)
}

/// Metric adjusted skew information
/// `I^f = f(0)/2 · Σ_ij (p_i - p_j)² / m_f(p_i, p_j) · |A_ij|²`.
pub fn skew_information(rho: &DensityMatrix, a: &HermitianOperator, f: &MonotoneFunction) -> Result<f64> {
    check_dims(rho, a.dim())?;
    let p = rho.eigenvalues();
    let ae = rho.in_eigenbasis(a.matrix());
    let mut sum = 0.0;
    for i in 0..p.len() {
        for j in 0..p.len() {
            let m = f.mean_unchecked(p[i], p[j]);
            if m > 0.0 {
                let d = p[i] - p[j];
                sum += d * d / m * ae[(i, j)].norm_sqr();
            }
        }
    }
    Ok(0.5 * f.f0() * sum)
}

/// `V^f = Σ_ij m_f(p_i, p_j) |⟨i|A_0|j⟩|²` with `A_0 = A - ⟨A⟩`.
pub fn f_variance(rho: &DensityMatrix, a: &HermitianOperator, f: &MonotoneFunction) -> Result<f64> {
    let a0 = centered(rho, a)?;
    let p = rho.eigenvalues();
    let ae = rho.in_eigenbasis(&a0);
    let mut sum = 0.0;
    for i in 0..p.len() {
        for j in 0..p.len() {
            sum += f.mean_unchecked(p[i], p[j]) * ae[(i, j)].norm_sqr();
        }
    }
    Ok(sum)
}

/// `U^f = √(V² - (V - I^f)²)`.
pub fn u_quantity(rho: &DensityMatrix, a: &HermitianOperator, f: &MonotoneFunction) -> Result<f64> {
    let v = variance(rho, a)?;
    let i = skew_information(rho, a, f)?;
    let radicand = v * v - (v - i) * (v - i);
    if radicand < -1e-10 * v.max(1.0).powi(2) {
        return Err(Error::Numerical(format!("U^f radicand {radicand:.3e} is negative")));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// `U^f` through the identity `U^f = √(I^f (V + V^{f̃}))`.
pub fn u_quantity_via_tilde(rho: &DensityMatrix, a: &HermitianOperator, f: &MonotoneFunction) -> Result<f64> {
    let i = skew_information(rho, a, f)?;
    let v = variance(rho, a)?;
    let vt = f_variance(rho, a, &f_tilde(f))?;
    Ok((i * (v + vt)).max(0.0).sqrt())
}

/// Solves `m_f(L_ρ, R_ρ)(L) = -i[A, ρ]` for the unitary family
/// `ρ_t = e^{-iAt} ρ e^{iAt}` at `t = 0`. Returned in the computational
/// basis.
pub fn l_operator(rho: &DensityMatrix, a: &HermitianOperator, f: &MonotoneFunction) -> Result<CMat> {
    check_dims(rho, a.dim())?;
    let p = rho.eigenvalues();
    let ae = rho.in_eigenbasis(a.matrix());
    let n = p.len();
    let scale = ae.norm().max(1.0);
    let mut l = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if p[i] == p[j] {
                continue;
            }
            let m = f.mean_unchecked(p[i], p[j]);
            if m > 0.0 {
                l[(i, j)] = C64::new(0.0, -(p[j] - p[i])) * ae[(i, j)] / m;
            } else if ae[(i, j)].norm() > 1e-14 * scale {
                return Err(Error::SingularMetric { row: i, col: j, p_row: p[i], p_col: p[j] });
            }
        }
    }
    let v = rho.eigenvectors();
    Ok(v * l * v.adjoint())
}

/// `⟨X, Y⟩^f_ρ = Tr[X† m_f(L_ρ, R_ρ)(Y)] = Σ_ij m_f(p_i, p_j) conj(X_ij) Y_ij`
/// in the eigenbasis of `ρ`.
pub fn fisher_inner(rho: &DensityMatrix, x: &CMat, y: &CMat, f: &MonotoneFunction) -> Result<C64> {
    let n = rho.dim();
    for m in [x, y] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
        }
    }
    let p = rho.eigenvalues();
    let (xe, ye) = (rho.in_eigenbasis(x), rho.in_eigenbasis(y));
    let mut sum = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            sum += xe[(i, j)].conj() * ye[(i, j)] * f.mean_unchecked(p[i], p[j]);
        }
    }
    Ok(sum)
}

/// `m_f(L_ρ, R_ρ)(X)`, the metric superoperator applied to `X`.
pub fn metric_apply(rho: &DensityMatrix, x: &CMat, f: &MonotoneFunction) -> CMat {
    let p = rho.eigenvalues();
    let xe = rho.in_eigenbasis(x);
    let n = p.len();
    let ye = CMat::from_fn(n, n, |i, j| xe[(i, j)] * f.mean_unchecked(p[i], p[j]));
    let v = rho.eigenvectors();
    v * ye * v.adjoint()
}

/// Quantum Fisher information `⟨L, L⟩^f_ρ` of the unitary family generated
/// by `A`.
pub fn fisher_information(rho: &DensityMatrix, a: &HermitianOperator, f: &MonotoneFunction) -> Result<f64> {
    let l = l_operator(rho, a, f)?;
    Ok(fisher_inner(rho, &l, &l, f)?.re)
}

/// The four measures of one observable under one function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub v: f64,
    pub vf: f64,
    pub skew: f64,
    pub u: f64,
    pub f_name: String,
}

pub fn measure_report(rho: &DensityMatrix, a: &HermitianOperator, f: &MonotoneFunction) -> Result<MeasureReport> {
    Ok(MeasureReport {
        v: variance(rho, a)?,
        vf: f_variance(rho, a, f)?,
        skew: skew_information(rho, a, f)?,
        u: u_quantity(rho, a, f)?,
        f_name: f.name().to_string(),
    })
}
