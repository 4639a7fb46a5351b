//! Indirect measurement of a system observable `B_S` through an environment
//! probe `M_E` under a unitary that conserves `A_S + A_E`.
//!
//! Environment-side operators and the joint unitary are stored sparse so the
//! discretized pointer models (thousands of dimensions) stay cheap. Joint
//! vectors are S-major: index `s·dim_e + e`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infogeo::{skew_information, variance};
use crate::linops::io::MatrixJson;
use crate::linops::random::{self, SeededRng};
use crate::linops::{
    hermitian, op_norm, CMat, CVec, DensityMatrix, HermitianOperator, SparseMatrix, UnitaryOperator, C64,
    HERMITIAN_TOL, UNITARY_TOL,
};
use crate::monotone::MonotoneFunction;
use crate::uncertainty::commutator_expectation;

/// Tolerance on `‖[M_E, A_E]‖` and `‖[U, A_S + A_E]‖`.
pub const CONSERVATION_TOL: f64 = 1e-9;

/// Joint dimension up to which residual norms are spectral; above it the
/// Frobenius norm (an upper bound) is used.
const DENSE_LIMIT: usize = 64;

fn residual_norm(m: &SparseMatrix) -> f64 {
    if m.nrows() <= DENSE_LIMIT {
        op_norm(&m.to_dense())
    } else {
        m.frobenius_norm()
    }
}

fn sparse_commutator(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    a.mul(b)?.add_scaled(&b.mul(a)?, -1.0)
}

/// Environment state: a general density matrix, or a pure state kept as a
/// vector so large pointer spaces never need a dense matrix.
#[derive(Clone, Debug)]
pub enum EnvState {
    Mixed(DensityMatrix),
    Pure(CVec),
}

impl EnvState {
    pub fn pure(psi: CVec) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::NotDensity("zero state vector".into()));
        }
        Ok(Self::Pure(psi.unscale(n)))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Mixed(r) => r.dim(),
            Self::Pure(v) => v.len(),
        }
    }

    pub fn components(&self) -> Vec<(f64, CVec)> {
        match self {
            Self::Mixed(r) => r.components(),
            Self::Pure(v) => vec![(1.0, v.clone())],
        }
    }

    fn moments(&self, a: &SparseMatrix) -> (f64, f64) {
        self.components().iter().fold((0.0, 0.0), |(m1, m2), (q, v)| {
            let av = a.mul_vec(v);
            (m1 + q * v.dotc(&av).re, m2 + q * av.norm_squared())
        })
    }

    pub fn variance(&self, a: &SparseMatrix) -> f64 {
        let (m1, m2) = self.moments(a);
        m2 - m1 * m1
    }

    /// `I^f(ρ_E, A_E)`; a pure state's skew information is its variance for
    /// every `f`.
    pub fn skew_information(&self, a: &SparseMatrix, f: &MonotoneFunction) -> Result<f64> {
        match self {
            Self::Mixed(r) => skew_information(r, &HermitianOperator::new(a.to_dense())?, f),
            Self::Pure(_) => Ok(self.variance(a)),
        }
    }
}

/// `(A_S, A_E, M_E, ρ_E, U_SE)` with `A_S` shifted so its minimum
/// eigenvalue is zero.
#[derive(Clone, Debug)]
pub struct ImplementationSet {
    dim_s: usize,
    dim_e: usize,
    a_s: HermitianOperator,
    shift: f64,
    a_e: SparseMatrix,
    m_e: SparseMatrix,
    rho_e: EnvState,
    u: SparseMatrix,
    u_adj: SparseMatrix,
}

/// Residual norms of the three operator invariants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantResiduals {
    pub probe_commutator: f64,
    pub unitarity: f64,
    pub conservation: f64,
}

impl ImplementationSet {
    /// Builds and validates; `A_S` is shifted to minimum eigenvalue zero.
    pub fn new(a_s: HermitianOperator, a_e: SparseMatrix, m_e: SparseMatrix, rho_e: EnvState, u: SparseMatrix) -> Result<Self> {
        let set = Self::new_unchecked(a_s, a_e, m_e, rho_e, u)?;
        set.validate()?;
        Ok(set)
    }

    /// Shape and Hermiticity checks only; the invariants are left to
    /// [`Self::validate`]. Used for negative controls.
    pub fn new_unchecked(a_s: HermitianOperator, a_e: SparseMatrix, m_e: SparseMatrix, rho_e: EnvState, u: SparseMatrix) -> Result<Self> {
        let dim_s = a_s.dim();
        let dim_e = rho_e.dim();
        for (m, expected) in [(&a_e, dim_e), (&m_e, dim_e), (&u, dim_s * dim_e)] {
            if !m.is_square() {
                return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
            }
            if m.nrows() != expected {
                return Err(Error::DimensionMismatch { expected, got: m.nrows() });
            }
        }
        for m in [&a_e, &m_e] {
            let r = m.hermiticity_residual();
            if r > HERMITIAN_TOL {
                return Err(Error::NotHermitian { row: 0, col: 0, residual: r });
            }
        }
        let shift = a_s.eigh().values[0];
        let a_s = a_s.shifted(shift);
        let u_adj = u.adjoint();
        Ok(Self { dim_s, dim_e, a_s, shift, a_e, m_e, rho_e, u, u_adj })
    }

    pub fn from_dense(
        a_s: HermitianOperator,
        a_e: &HermitianOperator,
        m_e: &HermitianOperator,
        rho_e: DensityMatrix,
        u: &UnitaryOperator,
    ) -> Result<Self> {
        Self::new(
            a_s,
            SparseMatrix::from_dense(a_e.matrix()),
            SparseMatrix::from_dense(m_e.matrix()),
            EnvState::Mixed(rho_e),
            SparseMatrix::from_dense(u.matrix()),
        )
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    /// The shifted system conserved quantity.
    pub fn a_s(&self) -> &HermitianOperator {
        &self.a_s
    }

    /// Amount subtracted from the supplied `A_S`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn a_e(&self) -> &SparseMatrix {
        &self.a_e
    }

    pub fn m_e(&self) -> &SparseMatrix {
        &self.m_e
    }

    pub fn rho_e(&self) -> &EnvState {
        &self.rho_e
    }

    pub fn unitary(&self) -> &SparseMatrix {
        &self.u
    }

    /// `A_S ⊗ 1 + 1 ⊗ A_E`.
    pub fn a_total(&self) -> SparseMatrix {
        let s = SparseMatrix::from_dense(self.a_s.matrix()).kron(&SparseMatrix::identity(self.dim_e));
        let e = SparseMatrix::identity(self.dim_s).kron(&self.a_e);
        s.add_scaled(&e, 1.0).expect("matching shapes")
    }

    pub fn invariant_residuals(&self) -> Result<InvariantResiduals> {
        let n = self.dim_s * self.dim_e;
        Ok(InvariantResiduals {
            probe_commutator: residual_norm(&sparse_commutator(&self.m_e, &self.a_e)?),
            unitarity: residual_norm(&self.u_adj.mul(&self.u)?.add_scaled(&SparseMatrix::identity(n), -1.0)?),
            conservation: residual_norm(&sparse_commutator(&self.u, &self.a_total())?),
        })
    }

    /// Fails with the first violated invariant and its residual.
    pub fn validate(&self) -> Result<()> {
        let r = self.invariant_residuals()?;
        let checks = [
            ("[M_E, A_E] = 0", r.probe_commutator, CONSERVATION_TOL),
            ("U unitary", r.unitarity, UNITARY_TOL),
            ("[U, A_S + A_E] = 0", r.conservation, CONSERVATION_TOL),
        ];
        for (invariant, residual, tol) in checks {
            if residual > tol {
                return Err(Error::InvariantViolation { invariant: invariant.to_string(), residual });
            }
        }
        Ok(())
    }

    fn check_system_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim_s {
            return Err(Error::DimensionMismatch { expected: self.dim_s, got: dim });
        }
        Ok(())
    }

    /// `N = B_S ⊗ 1 - U† (1 ⊗ M_E) U`, sparse.
    pub fn noise_sparse(&self, b_s: &HermitianOperator) -> Result<SparseMatrix> {
        self.check_system_dim(b_s.dim())?;
        let b = SparseMatrix::from_dense(b_s.matrix()).kron(&SparseMatrix::identity(self.dim_e));
        let m = SparseMatrix::identity(self.dim_s).kron(&self.m_e);
        let heis = self.u_adj.mul(&m.mul(&self.u)?)?;
        b.add_scaled(&heis, -1.0)
    }

    /// Dense noise operator; limited to joint dimensions where a dense
    /// matrix is reasonable.
    pub fn noise_operator(&self, b_s: &HermitianOperator) -> Result<HermitianOperator> {
        let n = self.dim_s * self.dim_e;
        if n > 1024 {
            return Err(Error::InvalidInput(format!("dense noise operator of dimension {n} requested")));
        }
        let dense = self.noise_sparse(b_s)?.to_dense();
        let residual = crate::linops::hermiticity_residual(&dense).0;
        if residual > 1e-10 {
            return Err(Error::NotHermitian { row: 0, col: 0, residual });
        }
        Ok(hermitian(dense))
    }

    fn product(&self, phi: &CVec, chi: &CVec) -> CVec {
        CVec::from_fn(self.dim_s * self.dim_e, |i, _| phi[i / self.dim_e] * chi[i % self.dim_e])
    }

    /// `ε(ρ_S)² = Tr[(ρ_S ⊗ ρ_E) N²]`.
    pub fn error_sq(&self, b_s: &HermitianOperator, rho_s: &DensityMatrix) -> Result<f64> {
        self.check_system_dim(rho_s.dim())?;
        let n = self.noise_sparse(b_s)?;
        Ok(self.error_sq_with(&n, rho_s))
    }

    fn error_sq_with(&self, n: &SparseMatrix, rho_s: &DensityMatrix) -> f64 {
        let env = self.rho_e.components();
        let mut sum = 0.0;
        for (p, phi) in rho_s.components() {
            for (q, chi) in &env {
                sum += p * q * n.mul_vec(&self.product(&phi, chi)).norm_squared();
            }
        }
        sum
    }

    pub fn error(&self, b_s: &HermitianOperator, rho_s: &DensityMatrix) -> Result<f64> {
        Ok(self.error_sq(b_s, rho_s)?.max(0.0).sqrt())
    }

    /// Conditional error operator `K = Tr_E[(1 ⊗ √ρ_E) N² (1 ⊗ √ρ_E)]` on S,
    /// so that `ε(ρ_S)² = Tr[ρ_S K]`.
    pub fn conditional_error(&self, b_s: &HermitianOperator) -> Result<HermitianOperator> {
        let n = self.noise_sparse(b_s)?;
        let ds = self.dim_s;
        let mut k = CMat::zeros(ds, ds);
        for (q, chi) in self.rho_e.components() {
            let cols: Vec<CVec> = (0..ds)
                .map(|a| {
                    let mut e = CVec::zeros(ds);
                    e[a] = C64::new(1.0, 0.0);
                    n.mul_vec(&self.product(&e, &chi))
                })
                .collect();
            for a in 0..ds {
                for b in 0..ds {
                    k[(a, b)] += cols[a].dotc(&cols[b]) * q;
                }
            }
        }
        Ok(hermitian(k))
    }

    /// `max_ρ ε(ρ)`, the square root of the largest eigenvalue of `K`.
    pub fn worst_error(&self, b_s: &HermitianOperator) -> Result<f64> {
        Ok(self.worst_case(b_s)?.0)
    }

    /// Worst error together with the pure system state attaining it.
    pub fn worst_case(&self, b_s: &HermitianOperator) -> Result<(f64, DensityMatrix)> {
        let e = self.conditional_error(b_s)?.eigh();
        let top = e.values.len() - 1;
        let state = DensityMatrix::pure(&e.vectors.column(top).into_owned())?;
        Ok((e.values[top].max(0.0).sqrt(), state))
    }

    /// `I^f(ρ_E, A_E)`.
    pub fn env_skew(&self, f: &MonotoneFunction) -> Result<f64> {
        self.rho_e.skew_information(&self.a_e, f)
    }

    /// `f(0)/2 · |⟨[A_S, B_S]⟩|² / (I^f(ρ_S, A_S) + I^f(ρ_E, A_E))`.
    /// A vanishing denominator gives `+∞` for a nonzero numerator and `0`
    /// otherwise.
    pub fn way_ozawa_bound(&self, b_s: &HermitianOperator, rho_s: &DensityMatrix, f: &MonotoneFunction) -> Result<f64> {
        self.check_system_dim(rho_s.dim())?;
        let num = commutator_expectation(rho_s, &self.a_s, b_s)?.norm_sqr();
        let den = skew_information(rho_s, &self.a_s, f)? + self.env_skew(f)?;
        Ok(ratio(0.5 * f.f0() * num, den))
    }

    /// Checks `⟨[N, A_S + A_E]⟩_{ρ_S⊗ρ_E} = ⟨[B_S, A_S]⟩_{ρ_S}`. An
    /// implementation that breaks its invariants is reported as an
    /// [`Error::InvariantViolation`], never as a failed identity.
    pub fn commutator_transfer_check(&self, b_s: &HermitianOperator, rho_s: &DensityMatrix) -> Result<TransferReport> {
        self.validate()?;
        self.check_system_dim(rho_s.dim())?;
        let n = self.noise_sparse(b_s)?;
        let a = self.a_total();
        let mut joint = C64::new(0.0, 0.0);
        for (p, phi) in rho_s.components() {
            for (q, chi) in self.rho_e.components() {
                let v = self.product(&phi, &chi);
                // ⟨v|[N, A]|v⟩ = 2i Im⟨Nv, Av⟩ for Hermitian N, A
                let im = n.mul_vec(&v).dotc(&a.mul_vec(&v)).im;
                joint += C64::new(0.0, 2.0 * im) * (p * q);
            }
        }
        let system = commutator_expectation(rho_s, b_s, &self.a_s)?;
        let scale = 1f64.max(op_norm(b_s.matrix()) * op_norm(self.a_s.matrix()));
        let residual = (joint - system).norm();
        Ok(TransferReport { joint, system, residual, holds: residual <= 1e-9 * scale })
    }

    /// The skew-information bound with SLD, Korzekwa's Wigner-Yanase form
    /// and the original variance form.
    pub fn korzekwa_comparison(&self, b_s: &HermitianOperator, rho_s: &DensityMatrix) -> Result<BoundComparison> {
        let num = commutator_expectation(rho_s, &self.a_s, b_s)?.norm_sqr();
        let (sld, wy) = (MonotoneFunction::sld(), MonotoneFunction::wy());
        let i_sld = skew_information(rho_s, &self.a_s, &sld)? + self.env_skew(&sld)?;
        let i_wy = skew_information(rho_s, &self.a_s, &wy)? + self.env_skew(&wy)?;
        let v = variance(rho_s, &self.a_s)? + self.rho_e.variance(&self.a_e);
        let bound_sld = ratio(num, 4.0 * i_sld);
        let bound_korzekwa = ratio(num, 8.0 * i_wy);
        let bound_original = ratio(num, 4.0 * v);
        let tol = 1e-10 * 1f64.max(bound_sld.abs());
        Ok(BoundComparison {
            bound_sld,
            bound_korzekwa,
            bound_original,
            ordered: bound_sld >= bound_korzekwa - tol && bound_sld >= bound_original - tol,
        })
    }

    /// `ε(ρ_S)`, its square, the bounds for each function and the commutator
    /// expectation `⟨[A_S, B_S]⟩`.
    pub fn error_report(&self, b_s: &HermitianOperator, rho_s: &DensityMatrix, fs: &[MonotoneFunction]) -> Result<ErrorReport> {
        let epsilon_sq = self.error_sq(b_s, rho_s)?;
        let mut bound_f = BTreeMap::new();
        for f in fs {
            bound_f.insert(f.name().to_string(), self.way_ozawa_bound(b_s, rho_s, f)?);
        }
        Ok(ErrorReport {
            epsilon: epsilon_sq.max(0.0).sqrt(),
            epsilon_sq,
            bound_sld: self.way_ozawa_bound(b_s, rho_s, &MonotoneFunction::sld())?,
            bound_f,
            commutator_expect: commutator_expectation(rho_s, &self.a_s, b_s)?,
        })
    }

    /// `(ε², V(N), V^f(N))` in the product state; each should dominate the
    /// next. Needs a mixed environment and a small joint dimension.
    pub fn noise_chain(&self, b_s: &HermitianOperator, rho_s: &DensityMatrix, f: &MonotoneFunction) -> Result<(f64, f64, f64)> {
        let EnvState::Mixed(rho_e) = &self.rho_e else {
            return Err(Error::InvalidInput("noise chain needs a density-matrix environment".into()));
        };
        let joint = rho_s.tensor(rho_e)?;
        let n = self.noise_operator(b_s)?;
        Ok((
            self.error_sq(b_s, rho_s)?,
            variance(&joint, &n)?,
            crate::infogeo::f_variance(&joint, &n, f)?,
        ))
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub joint: C64,
    pub system: C64,
    pub residual: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub bound_sld: f64,
    pub bound_korzekwa: f64,
    pub bound_original: f64,
    pub ordered: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub epsilon: f64,
    pub epsilon_sq: f64,
    pub bound_sld: f64,
    pub bound_f: BTreeMap<String, f64>,
    pub commutator_expect: C64,
}

/// JSON bundle of an implementation set in the matrix exchange format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ImplementationJson {
    pub a_s: MatrixJson,
    pub a_e: MatrixJson,
    pub m_e: MatrixJson,
    pub rho_e: MatrixJson,
    pub u: MatrixJson,
}

impl ImplementationJson {
    pub fn parse(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn from_set(set: &ImplementationSet) -> Result<Self> {
        let EnvState::Mixed(rho_e) = set.rho_e() else {
            return Err(Error::InvalidInput("only density-matrix environments serialize".into()));
        };
        Ok(Self {
            a_s: MatrixJson::from_matrix(set.a_s().matrix()),
            a_e: MatrixJson::from_matrix(&set.a_e().to_dense()),
            m_e: MatrixJson::from_matrix(&set.m_e().to_dense()),
            rho_e: MatrixJson::from_matrix(rho_e.matrix()),
            u: MatrixJson::from_matrix(&set.unitary().to_dense()),
        })
    }

    pub fn to_set(&self) -> Result<ImplementationSet> {
        ImplementationSet::from_dense(
            self.a_s.to_hermitian()?,
            &self.a_e.to_hermitian()?,
            &self.m_e.to_hermitian()?,
            self.rho_e.to_density()?,
            &self.u.to_unitary()?,
        )
    }
}

/// Random valid implementation: integer spectra in random bases, a probe in
/// the commutant of `A_E`, a random mixed environment and a random unitary
/// conserving `A_S + A_E`.
pub fn random_conserving_set(dim_s: usize, dim_e: usize, rng: &mut SeededRng) -> ImplementationSet {
    let a_s = random::random_integer_spectrum_with(dim_s, 2, rng);
    let a_e = random::random_integer_spectrum_with(dim_e, 2, rng);
    let m_e = random::project_commutant(&random::random_hermitian_with(dim_e, 1.0, rng), &a_e);
    let rho_e = random::random_density_with(dim_e, rng);
    let total = hermitian(
        crate::linops::tensor(a_s.matrix(), &CMat::identity(dim_e, dim_e))
            + crate::linops::tensor(&CMat::identity(dim_s, dim_s), a_e.matrix()),
    );
    let u = random::random_conserving_unitary_with(&total, rng);
    ImplementationSet::from_dense(a_s, &a_e, &m_e, rho_e, &u).expect("conserving by construction")
}

/// Like [`random_conserving_set`] but with an unconstrained unitary, built
/// without validation; a negative control.
pub fn random_nonconserving_set(dim_s: usize, dim_e: usize, rng: &mut SeededRng) -> ImplementationSet {
    let a_s = random::random_integer_spectrum_with(dim_s, 2, rng);
    let a_e = random::random_integer_spectrum_with(dim_e, 2, rng);
    let m_e = random::project_commutant(&random::random_hermitian_with(dim_e, 1.0, rng), &a_e);
    let rho_e = random::random_density_with(dim_e, rng);
    let u = random::random_unitary_with(dim_s * dim_e, rng);
    ImplementationSet::new_unchecked(
        a_s,
        SparseMatrix::from_dense(a_e.matrix()),
        SparseMatrix::from_dense(m_e.matrix()),
        EnvState::Mixed(rho_e),
        SparseMatrix::from_dense(u.matrix()),
    )
    .expect("shapes match")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{pauli_x, swap_gate};
    use crate::monotone::registry;

    fn trivial_set(a_s: HermitianOperator, dim_e: usize) -> ImplementationSet {
        let n = a_s.dim() * dim_e;
        ImplementationSet::from_dense(
            a_s,
            &HermitianOperator::zeros(dim_e),
            &HermitianOperator::zeros(dim_e),
            DensityMatrix::maximally_mixed(dim_e),
            &UnitaryOperator::identity(n),
        )
        .unwrap()
    }

    fn swap_set(b: &[f64]) -> ImplementationSet {
        let a = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
        ImplementationSet::from_dense(
            a.clone(),
            &a,
            &HermitianOperator::from_real_diagonal(b),
            DensityMatrix::from_real_diagonal(&[1.0, 0.0]).unwrap(),
            &swap_gate(2),
        )
        .unwrap()
    }

    #[test]
    fn identity_interaction_noise_is_b() {
        let set = trivial_set(HermitianOperator::from_real_diagonal(&[0.0, 1.0]), 3);
        let b = hermitian(pauli_x());
        let n = set.noise_operator(&b).unwrap();
        assert!((n.matrix() - crate::linops::tensor(&pauli_x(), &CMat::identity(3, 3))).norm() < 1e-15);
        let rho = random::random_density(2, 1);
        assert!((set.error_sq(&b, &rho).unwrap() - 1.0).abs() < 1e-12);
        assert!((set.worst_error(&b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swap_copy_is_perfect() {
        let set = swap_set(&[0.3, -1.2]);
        let b = HermitianOperator::from_real_diagonal(&[0.3, -1.2]);
        for seed in 0..10 {
            let rho = random::random_density(2, seed);
            assert!(set.error(&b, &rho).unwrap() < 1e-12);
        }
        assert!(set.worst_error(&b).unwrap() < 1e-12);
    }

    #[test]
    fn spectrum_is_shifted() {
        let set = trivial_set(HermitianOperator::from_real_diagonal(&[2.0, 5.0]), 2);
        assert!((set.shift() - 2.0).abs() < 1e-14);
        assert!(set.a_s().eigh().values[0].abs() < 1e-14);
    }

    #[test]
    fn random_sets_satisfy_invariants_and_bounds() {
        let mut r = random::rng(31);
        for _ in 0..20 {
            let set = random_conserving_set(2, 3, &mut r);
            let b = random::random_hermitian_with(2, 1.0, &mut r);
            let rho = random::random_density_with(2, &mut r);
            let n = set.noise_operator(&b).unwrap();
            assert!(crate::linops::hermiticity_residual(n.matrix()).0 <= 1e-10);
            let e2 = set.error_sq(&b, &rho).unwrap();
            for f in registry() {
                assert!(e2 >= set.way_ozawa_bound(&b, &rho, &f).unwrap() - 1e-9);
                let (eps2, v, vf) = set.noise_chain(&b, &rho, &f).unwrap();
                assert!(eps2 >= v - 1e-10 && v >= vf - 1e-10);
            }
            assert!(set.commutator_transfer_check(&b, &rho).unwrap().holds);
            assert!(set.korzekwa_comparison(&b, &rho).unwrap().ordered);
            let k = set.conditional_error(&b).unwrap();
            assert!(k.eigh().values[0] >= -1e-10);
            assert!(set.worst_error(&b).unwrap() >= set.error(&b, &rho).unwrap() - 1e-12);
            // ε² is linear in ρ_S
            assert!((rho.expect(k.matrix()).re - e2).abs() < 1e-10);
        }
    }

    #[test]
    fn worst_error_against_sampled_states() {
        let mut r = random::rng(9);
        let set = random_conserving_set(3, 3, &mut r);
        let b = random::random_hermitian_with(3, 1.0, &mut r);
        let (worst, arg) = set.worst_case(&b).unwrap();
        let mut best = set.error(&b, &arg).unwrap();
        for _ in 0..500 {
            let psi = random::random_pure_with(3, &mut r);
            let e = set.error(&b, &psi).unwrap();
            assert!(e <= worst + 1e-12);
            best = best.max(e);
        }
        assert!(worst <= best + 1e-6);
    }

    #[test]
    fn nonconserving_control_is_an_invariant_violation() {
        let mut r = random::rng(4);
        let set = random_nonconserving_set(2, 3, &mut r);
        let b = random::random_hermitian_with(2, 1.0, &mut r);
        let rho = random::random_density_with(2, &mut r);
        let err = set.commutator_transfer_check(&b, &rho).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { ref invariant, .. } if invariant.contains("U, A_S")));
        assert!(set.validate().is_err());
    }

    #[test]
    fn commuting_bounds_vanish() {
        let set = trivial_set(HermitianOperator::from_real_diagonal(&[0.0, 1.0]), 2);
        let b = HermitianOperator::from_real_diagonal(&[1.0, -1.0]);
        let rho = random::random_density(2, 3);
        for f in registry() {
            assert_eq!(set.way_ozawa_bound(&b, &rho, &f).unwrap(), 0.0);
        }
        let c = set.korzekwa_comparison(&b, &rho).unwrap();
        assert_eq!((c.bound_sld, c.bound_korzekwa, c.bound_original), (0.0, 0.0, 0.0));
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(set.way_ozawa_bound(&hermitian(pauli_x()), &mixed, &MonotoneFunction::sld()).unwrap(), 0.0);
    }

    #[test]
    fn pure_states_make_sld_equal_original() {
        let a = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
        let set = ImplementationSet::from_dense(
            a.clone(),
            &a,
            &HermitianOperator::zeros(2),
            DensityMatrix::pure(&CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)])).unwrap(),
            &swap_gate(2),
        )
        .unwrap();
        let rho = random::random_pure_with(2, &mut random::rng(2));
        let c = set.korzekwa_comparison(&hermitian(pauli_x()), &rho).unwrap();
        assert!((c.bound_sld - c.bound_original).abs() < 1e-10 * c.bound_sld.max(1.0));
    }

    #[test]
    fn vanishing_denominator_convention() {
        assert_eq!(ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(ratio(0.0, 0.0), 0.0);
        let set = trivial_set(HermitianOperator::from_real_diagonal(&[0.0, 1.0]), 2);
        assert!(set.env_skew(&MonotoneFunction::sld()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let mut r = random::rng(5);
        let set = random_conserving_set(2, 2, &mut r);
        let text = serde_json::to_string(&ImplementationJson::from_set(&set).unwrap()).unwrap();
        let back = ImplementationJson::parse(&text).unwrap().to_set().unwrap();
        let b = hermitian(pauli_x());
        let rho = random::random_density(2, 0);
        assert!((back.error_sq(&b, &rho).unwrap() - set.error_sq(&b, &rho).unwrap()).abs() < 1e-12);
        let report = set.error_report(&b, &rho, &registry()).unwrap();
        assert!((report.epsilon * report.epsilon - report.epsilon_sq).abs() < 1e-12);
        assert_eq!(report.bound_f.len(), 3);
    }
}
