//! Dense complex operators on finite-dimensional Hilbert spaces.
//!
//! Tensor products follow one convention throughout the crate: the system
//! factor is the major index, so `tensor(X_S, Y_E)[(s*dE + e, s'*dE + e')]
//! = X_S[(s, s')] * Y_E[(e, e')]`.

mod eigh;
pub mod io;
pub mod random;
pub mod sparse;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use eigh::Eigen;
pub use sparse::SparseMatrix;

pub type C64 = num_complex::Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Per-entry tolerance for Hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `|Tr ρ - 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Frobenius tolerance on `U†U - 1`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Negative eigenvalues of a density matrix down to `-CLAMP_LIMIT` are
/// treated as roundoff and clamped to zero.
pub const CLAMP_LIMIT: f64 = 1e-8;

/// Eigenvalues of a density matrix in `[0, ZERO_EIGENVALUE_TOL]` are roundoff
/// from diagonalizing a rank-deficient state and are snapped to zero.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-14;

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn ensure_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    Ok(m.nrows())
}

/// Largest `|m[(i,j)] - conj(m[(j,i)])|` and where it occurs.
pub fn hermiticity_residual(m: &CMat) -> (f64, usize, usize) {
    let n = m.nrows();
    let mut worst = (0.0, 0, 0);
    for i in 0..n {
        for j in i..n {
            let r = (m[(i, j)] - m[(j, i)].conj()).norm();
            if r > worst.0 {
                worst = (r, i, j);
            }
        }
    }
    worst
}

/// A complex square matrix that equals its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    entries: CMat,
}

impl HermitianOperator {
    /// Validates Hermiticity within [`HERMITIAN_TOL`] per entry; the stored
    /// matrix is the exact Hermitian part of the input.
    pub fn new(entries: CMat) -> Result<Self> {
        ensure_square(&entries)?;
        let (residual, row, col) = hermiticity_residual(&entries);
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { row, col, residual });
        }
        let entries = (&entries + entries.adjoint()).scale(0.5);
        Ok(Self { entries })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x)));
        Self { entries: CMat::from_diagonal(&d) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: CMat::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: CMat::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat {
        self.entries
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { entries: self.entries.scale(s) }
    }

    /// `self - shift * 1`.
    pub fn shifted(&self, shift: f64) -> Self {
        let n = self.dim();
        Self { entries: &self.entries - CMat::identity(n, n).scale(shift) }
    }

    pub fn eigh(&self) -> Eigen {
        eigh::jacobi(&self.entries)
    }
}

/// Eigendecomposition of a Hermitian operator, ascending eigenvalues.
pub fn eigh(h: &HermitianOperator) -> Eigen {
    h.eigh()
}

/// Validates Hermiticity of `m` and diagonalizes it.
pub fn eigh_matrix(m: &CMat) -> Result<Eigen> {
    Ok(HermitianOperator::new(m.clone())?.eigh())
}

/// Hermitian, positive semidefinite, unit-trace operator with its spectral
/// data cached.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    entries: CMat,
    eigen: Eigen,
}

impl DensityMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        let h = HermitianOperator::new(entries)?;
        let tr = h.matrix().trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::NotDensity(format!("trace is {tr}, expected 1")));
        }
        let mut eigen = h.eigh();
        let min = eigen.values.first().copied().unwrap_or(0.0);
        if min < -CLAMP_LIMIT {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:.3e}")));
        }
        let noisy = eigen.values.iter().any(|&p| p != 0.0 && p <= ZERO_EIGENVALUE_TOL);
        if noisy {
            for p in eigen.values.iter_mut() {
                if *p <= ZERO_EIGENVALUE_TOL {
                    *p = 0.0;
                }
            }
            let total: f64 = eigen.values.iter().sum();
            for p in eigen.values.iter_mut() {
                *p /= total;
            }
            let entries = eigen.reconstruct();
            let entries = (&entries + entries.adjoint()).scale(0.5);
            return Ok(Self { entries, eigen });
        }
        Ok(Self { entries: h.into_matrix(), eigen })
    }

    /// The pure state `|ψ⟩⟨ψ|`, with `ψ` normalized here.
    pub fn pure(psi: &CVec) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::NotDensity("zero state vector".into()));
        }
        let psi = psi.unscale(n);
        Self::new(&psi * psi.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0 / dim as f64; dim]).expect("valid by construction")
    }

    pub fn from_real_diagonal(p: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(p).into_matrix())
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    /// Eigenvalues `p_i`, ascending, clamped nonnegative.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    /// Orthonormal eigenvectors as columns, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMat {
        &self.eigen.vectors
    }

    /// Matrix elements of `x` in the eigenbasis of `self`.
    pub fn in_eigenbasis(&self, x: &CMat) -> CMat {
        self.eigen.vectors.adjoint() * x * &self.eigen.vectors
    }

    /// `(p_i, |i⟩)` for every eigenvalue strictly above zero.
    pub fn components(&self) -> Vec<(f64, CVec)> {
        self.eigen
            .values
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (p, self.eigen.vectors.column(i).into_owned()))
            .collect()
    }

    /// `Tr[ρ X]`.
    pub fn expect(&self, x: &CMat) -> C64 {
        (&self.entries * x).trace()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        let purity = (&self.entries * &self.entries).trace().re;
        (purity - 1.0).abs() <= tol
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(tensor(&self.entries, &other.entries))
    }
}

/// Dense unitary operator.
#[derive(Clone, Debug)]
pub struct UnitaryOperator {
    entries: CMat,
}

impl UnitaryOperator {
    pub fn new(entries: CMat) -> Result<Self> {
        ensure_square(&entries)?;
        let residual = unitarity_residual(&entries);
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: CMat::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    /// `exp(-i H)`.
    pub fn exp_i(h: &HermitianOperator) -> Self {
        let e = h.eigh();
        Self { entries: e.map(|x| C64::new(0.0, -x).exp()) }
    }

    pub fn compose(&self, other: &UnitaryOperator) -> UnitaryOperator {
        Self { entries: &self.entries * &other.entries }
    }
}

/// `||U†U - 1||_F`.
pub fn unitarity_residual(u: &CMat) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - CMat::identity(n, n)).norm()
}

/// `AB - BA`.
pub fn commutator(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
    }
    Ok(a * b - b * a)
}

/// Largest singular value.
pub fn op_norm(x: &CMat) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let gram = x.adjoint() * x;
    let e = eigh::jacobi(&gram);
    e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Kronecker product, system-major.
pub fn tensor(x: &CMat, y: &CMat) -> CMat {
    x.kronecker(y)
}

/// `Tr_E X` for `X` acting on `S ⊗ E`.
pub fn partial_trace_env(x: &CMat, dim_s: usize, dim_e: usize) -> Result<CMat> {
    let n = dim_s * dim_e;
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.nrows() });
    }
    Ok(CMat::from_fn(dim_s, dim_s, |s, t| {
        (0..dim_e).map(|e| x[(s * dim_e + e, t * dim_e + e)]).sum()
    }))
}

/// Permutation `|a⟩⊗|b⟩ ↦ |b⟩⊗|a⟩` on `d ⊗ d`.
pub fn swap_gate(d: usize) -> UnitaryOperator {
    let n = d * d;
    let mut m = CMat::zeros(n, n);
    for a in 0..d {
        for b in 0..d {
            m[(b * d + a, a * d + b)] = c(1.0);
        }
    }
    UnitaryOperator { entries: m }
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn pauli_y() -> CMat {
    let i = C64::new(0.0, 1.0);
    CMat::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// Hermitian operator from a matrix known to be Hermitian by construction.
pub fn hermitian(m: CMat) -> HermitianOperator {
    HermitianOperator::new(m).expect("Hermitian by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_identity() {
        let e = eigh(&HermitianOperator::identity(2));
        assert_eq!(e.values, vec![1.0, 1.0]);
        assert!((e.vectors.adjoint() * &e.vectors - CMat::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn eigh_pauli_x() {
        let e = eigh(&hermitian(pauli_x()));
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_shifted_pauli() {
        // det(H - λ) = λ² - λ - 1/4 for diag(0,1) + σx/2.
        let h = CMat::from_row_slice(2, 2, &[c(0.0), c(0.5), c(0.5), c(1.0)]);
        let e = eigh_matrix(&h).unwrap();
        let r = 2f64.sqrt() / 2.0;
        assert!((e.values[0] - (0.5 - r)).abs() < 1e-14);
        assert!((e.values[1] - (0.5 + r)).abs() < 1e-14);
        assert!((e.values[0] + 0.20711).abs() < 1e-5);
    }

    #[test]
    fn eigh_rejects_non_hermitian_naming_entry() {
        let mut m = CMat::zeros(3, 3);
        m[(0, 2)] = c(1.0);
        match eigh_matrix(&m) {
            Err(Error::NotHermitian { row, col, residual }) => {
                assert_eq!((row, col), (0, 2));
                assert!((residual - 1.0).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eigh_is_deterministic() {
        let h = random::random_hermitian(5, 9, 1.0);
        let a = eigh(&h);
        let b = eigh(&h);
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn commutator_examples() {
        let x = pauli_x();
        assert_eq!(commutator(&x, &x).unwrap(), CMat::zeros(2, 2));
        let xy = commutator(&pauli_x(), &pauli_y()).unwrap();
        let expected = pauli_z() * C64::new(0.0, 2.0);
        assert!((xy - expected).norm() < 1e-15);

        let d = HermitianOperator::from_real_diagonal(&[0.0, 1.0]).into_matrix();
        let k = commutator(&d, &x).unwrap();
        assert_eq!(k[(1, 0)], c(1.0));
        assert_eq!(k[(0, 1)], c(-1.0));
        assert!((&k + k.adjoint()).norm() == 0.0);
        assert!((op_norm(&k) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn commutator_dimension_mismatch() {
        assert!(matches!(
            commutator(&CMat::zeros(2, 2), &CMat::zeros(3, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn op_norm_examples() {
        assert_eq!(op_norm(&CMat::zeros(3, 3)), 0.0);
        assert!((op_norm(&pauli_x()) - 1.0).abs() < 1e-14);
        // non-normal: [[0, 2], [0, 0]] has singular values 2, 0
        let m = CMat::from_row_slice(2, 2, &[c(0.0), c(2.0), c(0.0), c(0.0)]);
        assert!((op_norm(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tensor_and_partial_trace() {
        assert_eq!(tensor(&CMat::identity(2, 2), &CMat::identity(3, 3)), CMat::identity(6, 6));
        let rho_e = random::random_density(3, 4);
        let x = tensor(&pauli_z(), rho_e.matrix());
        let back = partial_trace_env(&x, 2, 3).unwrap();
        assert!((back - pauli_z()).norm() < 1e-12);

        let swap = swap_gate(2);
        let tr = partial_trace_env(swap.matrix(), 2, 2).unwrap();
        assert_eq!(tr, CMat::identity(2, 2));
        assert!(partial_trace_env(&CMat::zeros(5, 5), 2, 3).is_err());
    }

    #[test]
    fn swap_gate_examples() {
        assert_eq!(swap_gate(1).matrix(), &CMat::identity(1, 1));
        let s = swap_gate(2);
        let m = s.matrix();
        assert_eq!(m[(1, 2)], c(1.0));
        assert_eq!(m[(2, 1)], c(1.0));
        assert_eq!(m[(0, 0)], c(1.0));
        assert_eq!(m[(3, 3)], c(1.0));
        for d in 1..5 {
            let s = swap_gate(d);
            assert_eq!(s.matrix() * s.matrix(), CMat::identity(d * d, d * d));
        }
        // |a⟩⊗|b⟩ ↦ |b⟩⊗|a⟩
        let d = 3;
        let s = swap_gate(d);
        for a in 0..d {
            for b in 0..d {
                let mut v = CVec::zeros(d * d);
                v[a * d + b] = c(1.0);
                let w = s.matrix() * v;
                assert_eq!(w[b * d + a], c(1.0));
            }
        }
    }

    #[test]
    fn density_clamps_small_negative_eigenvalues() {
        let eps = 1e-10;
        let rho = DensityMatrix::from_real_diagonal(&[1.0 + eps, -eps]).unwrap();
        assert_eq!(rho.eigenvalues()[0], 0.0);
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!(DensityMatrix::from_real_diagonal(&[1.0 + 1e-6, -1e-6]).is_err());
        assert!(DensityMatrix::from_real_diagonal(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn unitary_validation() {
        assert!(UnitaryOperator::new(pauli_x()).is_ok());
        assert!(matches!(UnitaryOperator::new(pauli_x().scale(1.1)), Err(Error::NotUnitary { .. })));
    }
}
