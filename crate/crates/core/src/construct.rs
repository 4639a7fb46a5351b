//! The Gaussian-pointer implementation that measures `B_S` with error of
//! order `‖[A_S, B_S]‖ / 2ξ`: closed-form error, analytic bounds, the width
//! `ξ_ε` needed for a target error, and a finite-grid realization of the
//! model for cross-checking.
//!
//! Everything is expressed in the eigenbasis `{|k⟩}` of `A_S = diag(a)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::io::MatrixJson;
use crate::linops::random::SeededRng;
use crate::linops::{commutator, hermitian, op_norm, CMat, CVec, HermitianOperator, SparseMatrix, C64};
use crate::measure::{EnvState, ImplementationSet};

/// Largest series order accepted by [`series_partial`].
pub const MAX_SERIES_ORDER: usize = 150;

#[derive(Clone, Debug)]
pub struct ConstructionSpec {
    levels: Vec<f64>,
    lattice: Option<(f64, Vec<i64>)>,
    b: HermitianOperator,
    xi: f64,
}

impl ConstructionSpec {
    /// `levels` must be nondecreasing; they are shifted so the first is 0.
    pub fn new(levels: Vec<f64>, b: HermitianOperator, xi: f64) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidSpec("no levels".into()));
        }
        if levels.windows(2).any(|w| w[1] < w[0]) || levels.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidSpec("levels must be finite and ascending".into()));
        }
        if b.dim() != levels.len() {
            return Err(Error::DimensionMismatch { expected: levels.len(), got: b.dim() });
        }
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::InvalidSpec(format!("xi must be positive, got {xi}")));
        }
        let base = levels[0];
        let levels = levels.into_iter().map(|l| l - base).collect();
        Ok(Self { levels, lattice: None, b, xi })
    }

    /// Spectrum `a_k = unit · (n_k - n_0)`, which the grid model requires.
    pub fn lattice(unit: f64, levels: Vec<i64>, b: HermitianOperator, xi: f64) -> Result<Self> {
        if !(unit > 0.0 && unit.is_finite()) {
            return Err(Error::InvalidSpec(format!("unit must be positive, got {unit}")));
        }
        let reals = levels.iter().map(|&n| unit * n as f64).collect();
        let mut spec = Self::new(reals, b, xi)?;
        let n0 = levels[0];
        spec.lattice = Some((unit, levels.iter().map(|n| n - n0).collect()));
        Ok(spec)
    }

    pub fn with_xi(&self, xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::InvalidSpec(format!("xi must be positive, got {xi}")));
        }
        Ok(Self { xi, ..self.clone() })
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// Shifted spectrum, first entry 0.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn b(&self) -> &HermitianOperator {
        &self.b
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn lattice_levels(&self) -> Option<(f64, &[i64])> {
        self.lattice.as_ref().map(|(u, n)| (*u, n.as_slice()))
    }

    pub fn a(&self) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(&self.levels)
    }

    /// `‖A_S‖` of the shifted spectrum.
    pub fn norm_a(&self) -> f64 {
        self.levels.iter().cloned().fold(0.0, f64::max)
    }

    /// `‖[A_S, B_S]‖`.
    pub fn norm_comm(&self) -> f64 {
        op_norm(&commutator(self.a().matrix(), self.b.matrix()).expect("same dimension"))
    }
}

/// `{"unit": u, "levels": [n_0, ...], "B": matrix, "xi": ξ}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructionJson {
    pub unit: f64,
    pub levels: Vec<i64>,
    #[serde(rename = "B")]
    pub b: MatrixJson,
    pub xi: f64,
}

impl ConstructionJson {
    pub fn parse(json: &str) -> Result<ConstructionSpec> {
        let raw: Self = serde_json::from_str(json)?;
        raw.to_spec()
    }

    pub fn to_spec(&self) -> Result<ConstructionSpec> {
        ConstructionSpec::lattice(self.unit, self.levels.clone(), self.b.to_hermitian()?, self.xi)
    }
}

/// `W` with `ε(ρ_S)² = Tr[ρ_S W]`:
/// `W_{k,k''} = Σ_{k'} B_{kk'} B_{k'k''} g(k, k', k'')`, where `g` combines
/// the pointer overlaps `⟨ψ_ξ|γ_y|ψ_ξ⟩ = e^{-y²/8ξ²}`.
pub fn exact_error_matrix(spec: &ConstructionSpec) -> HermitianOperator {
    let (a, b, xi) = (spec.levels(), spec.b().matrix(), spec.xi());
    let d = spec.dim();
    let w = CMat::from_fn(d, d, |k, k2| {
        (0..d)
            .map(|k1| {
                // 1 - e^{..} written as -expm1 to keep precision at large ξ
                let g = -(-(a[k] - a[k1]).powi(2) / (8.0 * xi * xi)).exp_m1()
                    - (-(a[k1] - a[k2]).powi(2) / (8.0 * xi * xi)).exp_m1()
                    + (-(a[k] - a[k2]).powi(2) / (8.0 * xi * xi)).exp_m1();
                b[(k, k1)] * b[(k1, k2)] * g
            })
            .sum()
    });
    hermitian(w)
}

/// `√λ_max(W)`.
pub fn exact_worst_error(spec: &ConstructionSpec) -> f64 {
    let e = exact_error_matrix(spec).eigh();
    e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// `(‖[B,A]‖²/4ξ²)(1 + ‖A‖²/ξ²) e^{‖A‖²/2ξ²}`.
pub fn error_bound(spec: &ConstructionSpec) -> f64 {
    let (c, a, xi2) = (spec.norm_comm(), spec.norm_a(), spec.xi() * spec.xi());
    c * c / (4.0 * xi2) * (1.0 + a * a / xi2) * (a * a / (2.0 * xi2)).exp()
}

/// `ξ_ε = ‖[A,B]‖/2ε + ‖A‖`, valid for `0 < ε ≤ ‖[A,B]‖ / 8‖A‖`.
pub fn xi_for_epsilon(norm_comm: f64, norm_a: f64, eps: f64) -> Result<f64> {
    if !(norm_comm > 0.0 && norm_a > 0.0) {
        return Err(Error::InvalidInput(format!("norms must be positive, got {norm_comm} and {norm_a}")));
    }
    let max = norm_comm / (8.0 * norm_a);
    if eps.is_nan() || eps <= 0.0 || eps > max * (1.0 + 1e-15) {
        return Err(Error::OutOfRegime { eps, max });
    }
    Ok(norm_comm / (2.0 * eps) + norm_a)
}

/// `I^f(ρ_E, A_E) = ξ²` for every `f`: the pointer is a pure product state
/// whose only fluctuation is the Gaussian position spread.
pub fn pointer_coherence(spec: &ConstructionSpec) -> f64 {
    spec.xi() * spec.xi()
}

/// `‖Ŷ_k‖ = ‖[B, Â^k]‖` for `k = 0..=max_k` with `Â = A/‖A‖`.
fn normalized_y_norms(spec: &ConstructionSpec, max_k: usize) -> Vec<f64> {
    let na = spec.norm_a();
    if na == 0.0 {
        return vec![0.0; max_k + 1];
    }
    let scaled: Vec<f64> = spec.levels().iter().map(|a| a / na).collect();
    let b = spec.b().matrix();
    let d = spec.dim();
    (0..=max_k)
        .map(|k| {
            let y = CMat::from_fn(d, d, |i, j| b[(i, j)] * (scaled[j].powi(k as i32) - scaled[i].powi(k as i32)));
            op_norm(&y)
        })
        .collect()
}

fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for l in 1..n {
        row[l] = row[l - 1] * (n + 1 - l) as f64 / l as f64;
    }
    row
}

/// `Σ_{m=1}^{order} 1/(m!(8ξ²)^m) Σ_l C(2m,l) ‖Y_{2m-l}‖‖Y_l‖` with
/// `Y_k = [B, A^k]`: the first `order` terms of the norm majorant of the
/// error series.
pub fn series_partial(spec: &ConstructionSpec, order: usize) -> Result<f64> {
    if order > MAX_SERIES_ORDER {
        return Err(Error::InvalidInput(format!("series order {order} exceeds {MAX_SERIES_ORDER}")));
    }
    let y = normalized_y_norms(spec, 2 * order);
    let r = spec.norm_a().powi(2) / (8.0 * spec.xi().powi(2));
    let mut coeff = 1.0;
    let mut sum = 0.0;
    for m in 1..=order {
        coeff *= r / m as f64;
        let binom = binomial_row(2 * m);
        let inner: f64 = (1..2 * m).map(|l| binom[l] * y[2 * m - l] * y[l]).sum();
        sum += coeff * inner;
    }
    Ok(sum)
}

/// [`series_partial`] plus the analytic majorant of the remaining terms,
/// `(‖[A,B]‖²/4ξ²) Σ_{n≥order} (2n+1) xⁿ/n!` with `x = ‖A‖²/2ξ²`. Never
/// exceeds [`error_bound`] and dominates `exact_worst_error²`.
pub fn series_tail_bound(spec: &ConstructionSpec, order: usize) -> Result<f64> {
    let partial = series_partial(spec, order)?;
    let c = spec.norm_comm();
    let x = spec.norm_a().powi(2) / (2.0 * spec.xi().powi(2));
    let lead = c * c / (4.0 * spec.xi().powi(2));
    let mut pow = 1.0;
    for n in 1..=order {
        pow *= x / n as f64;
    }
    let mut tail = 0.0;
    let mut n = order;
    loop {
        let term = (2 * n + 1) as f64 * pow;
        tail += term;
        n += 1;
        pow *= x / n as f64;
        if n > order + 10 && term <= 1e-17 * tail.max(f64::MIN_POSITIVE) {
            break;
        }
        if n > order + 10_000 {
            break;
        }
    }
    Ok(partial + lead * tail)
}

/// Order-`order` truncation of the signed operator series
/// `W = Σ_m (-1)^{m+1}/(m!(8ξ²)^m) Σ_l C(2m,l)(-1)^l Y_{2m-l} Y_l`.
/// Converges to [`exact_error_matrix`]; intended as an independent check.
pub fn series_error_matrix(spec: &ConstructionSpec, order: usize) -> CMat {
    let d = spec.dim();
    let na = spec.norm_a();
    let mut w = CMat::zeros(d, d);
    if na == 0.0 {
        return w;
    }
    let scaled: Vec<f64> = spec.levels().iter().map(|a| a / na).collect();
    let b = spec.b().matrix();
    let y: Vec<CMat> = (0..=2 * order)
        .map(|k| CMat::from_fn(d, d, |i, j| b[(i, j)] * (scaled[j].powi(k as i32) - scaled[i].powi(k as i32))))
        .collect();
    let r = na * na / (8.0 * spec.xi().powi(2));
    let mut coeff = 1.0;
    for m in 1..=order {
        coeff *= r / m as f64;
        let binom = binomial_row(2 * m);
        let sign_m = if m % 2 == 1 { 1.0 } else { -1.0 };
        for l in 1..2 * m {
            let sign_l = if l % 2 == 0 { 1.0 } else { -1.0 };
            w += (&y[2 * m - l] * &y[l]).scale(sign_m * sign_l * binom[l] * coeff);
        }
    }
    w
}

/// Discretization of the continuous pointer line: spacing `unit/subdivision`
/// on `[-half_extent, half_extent]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub subdivision: u32,
    pub half_extent: f64,
}

/// Amplitude mass of the pointer that may be translated past the grid edge
/// must stay below this.
pub const TAIL_MASS_TOL: f64 = 1e-12;

/// Pointer wavefunction `e^{-x²/4ξ²}` sampled on the grid, normalized.
pub fn grid_pointer(xs: &[f64], xi: f64) -> CVec {
    let v = CVec::from_iterator(xs.len(), xs.iter().map(|x| C64::new((-x * x / (4.0 * xi * xi)).exp(), 0.0)));
    let n = v.norm();
    v.unscale(n)
}

/// Builds the implementation on `S ⊗ (S' ⊗ E')` with `E'` the grid.
///
/// The translation `γ` maps `|j, x⟩ ↦ |j, x + a_k - a_j⟩` for the
/// transition `k → j`, which keeps `A_{S'} + x` fixed. States of a conserved
/// sector that would leave the grid make the whole sector act as the
/// identity, so the unitary and the conservation law stay exact.
pub fn discretize(spec: &ConstructionSpec, grid: GridSpec) -> Result<ImplementationSet> {
    let e = spec.b().eigh();
    // u_{jk} = ⟨j_B|k_A⟩
    let u = e.vectors.adjoint();
    discretize_with(spec, grid, &u, &e.values)
}

pub(crate) fn discretize_with(spec: &ConstructionSpec, grid: GridSpec, u: &CMat, b_values: &[f64]) -> Result<ImplementationSet> {
    let Some((unit, levels)) = spec.lattice_levels() else {
        return Err(Error::InvalidGrid("the grid model needs integer levels times a unit".into()));
    };
    if grid.subdivision == 0 {
        return Err(Error::InvalidGrid("subdivision must be at least 1".into()));
    }
    let h = unit / grid.subdivision as f64;
    let shifts: Vec<i64> = levels.iter().map(|n| n * grid.subdivision as i64).collect();
    let max_shift = *shifts.iter().max().expect("nonempty");
    let max_gap = spec.norm_a();
    if grid.half_extent < max_gap + 8.0 * spec.xi() {
        return Err(Error::InvalidGrid(format!(
            "half extent {} is below max gap + 8ξ = {}",
            grid.half_extent,
            max_gap + 8.0 * spec.xi()
        )));
    }
    let half = (grid.half_extent / h + 1e-9).floor() as i64;
    let g = (2 * half + 1) as usize;
    let xs: Vec<f64> = (-half..=half).map(|n| n as f64 * h).collect();
    let psi = grid_pointer(&xs, spec.xi());
    let edge = (half - max_shift) as f64 * h;
    let tail: f64 = xs.iter().zip(psi.iter()).filter(|(x, _)| x.abs() > edge).map(|(_, p)| p.norm_sqr()).sum();
    if tail >= TAIL_MASS_TOL {
        return Err(Error::InvalidGrid(format!("pointer mass {tail:.3e} beyond the translatable extent")));
    }

    let d = spec.dim();
    let dim_e = d * g;
    let env = |k: usize, n: i64| k * g + (n + half) as usize;
    let on_grid = |n: i64| (-half..=half).contains(&n);

    // V on S' ⊗ E': the sector with conserved value t (in units of h)
    // contains |j, t - shift_j⟩ for every j.
    let mut v_trip = Vec::with_capacity(d * dim_e);
    for k in 0..d {
        for n in -half..=half {
            let t = n + shifts[k];
            let inside = shifts.iter().all(|s| on_grid(t - s));
            if inside {
                for j in 0..d {
                    v_trip.push((env(j, t - shifts[j]), env(k, n), u[(j, k)]));
                }
            } else {
                v_trip.push((env(k, n), env(k, n), C64::new(1.0, 0.0)));
            }
        }
    }
    // stored transposed-conjugated so columns of V are rows here
    let v_adj = SparseMatrix::from_triplets(dim_e, dim_e, v_trip).adjoint();

    // (1_S ⊗ V)(SWAP_{SS'} ⊗ 1): |s, k, n⟩ ↦ |k⟩ ⊗ V|s, n⟩
    let total = d * dim_e;
    let mut u_trip = Vec::with_capacity(d * total);
    for s in 0..d {
        for k in 0..d {
            for n in 0..g {
                let col = s * dim_e + k * g + n;
                for (row_e, val) in v_adj.row(s * g + n) {
                    u_trip.push((k * dim_e + row_e, col, val.conj()));
                }
            }
        }
    }
    let u_se = SparseMatrix::from_triplets(total, total, u_trip);

    let a_e = SparseMatrix::from_real_diagonal(
        &(0..dim_e).map(|i| spec.levels()[i / g] + xs[i % g]).collect::<Vec<_>>(),
    );
    let m_e = SparseMatrix::from_real_diagonal(&(0..dim_e).map(|i| b_values[i / g]).collect::<Vec<_>>());
    let mut pointer = CVec::zeros(dim_e);
    for n in 0..g {
        pointer[n] = psi[n];
    }
    ImplementationSet::new(spec.a(), a_e, m_e, EnvState::pure(pointer)?, u_se)
}

/// Position variance `Σ |ψ(x)|² x² - (Σ |ψ(x)|² x)²` of the grid pointer.
pub fn grid_pointer_variance(xs: &[f64], xi: f64) -> f64 {
    let psi = grid_pointer(xs, xi);
    let (m1, m2) = xs.iter().zip(psi.iter()).fold((0.0, 0.0), |(m1, m2), (x, p)| {
        let w = p.norm_sqr();
        (m1 + w * x, m2 + w * x * x)
    });
    m2 - m1 * m1
}

/// Random lattice spec: `dim` sorted integer levels in `0..=max_level`
/// starting at 0 and a random Hermitian `B` in that basis.
pub fn random_lattice_spec(dim: usize, max_level: i64, xi: f64, rng: &mut SeededRng) -> ConstructionSpec {
    use rand::Rng;
    let mut levels: Vec<i64> = (0..dim).map(|_| rng.random_range(0..=max_level)).collect();
    levels.sort_unstable();
    let b = crate::linops::random::random_hermitian_with(dim, 1.0, rng);
    ConstructionSpec::lattice(1.0, levels, b, xi).expect("valid by construction")
}

/// The qubit instance `a = (0, 1)`, `B = σ_x`.
pub fn qubit_spec(xi: f64) -> Result<ConstructionSpec> {
    ConstructionSpec::lattice(1.0, vec![0, 1], hermitian(crate::linops::pauli_x()), xi)
}
