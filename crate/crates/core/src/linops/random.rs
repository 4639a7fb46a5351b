//! Seeded random ensembles. Every generator has a `*_with` form taking an
//! RNG and a convenience form taking a `u64` seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{hermitian, CMat, DensityMatrix, HermitianOperator, UnitaryOperator, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; derives independent per-instance seeds from a base
/// seed and an instance key.
pub fn derive_seed(base: u64, key: u64) -> u64 {
    let mut z = base ^ key.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Complex Ginibre matrix with independent standard normal real and
/// imaginary parts.
pub fn ginibre_with<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

pub fn random_density_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre_with(dim, dim, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.unscale(tr)).expect("G G†/Tr is a density matrix")
}

/// `G G† / Tr` for a complex Gaussian `G`; full rank almost surely.
pub fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    random_density_with(dim, &mut rng(seed))
}

/// Random pure state `|ψ⟩⟨ψ|` with Gaussian amplitudes.
pub fn random_pure_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let psi = ginibre_with(dim, 1, rng).column(0).into_owned();
    DensityMatrix::pure(&psi).expect("nonzero Gaussian vector")
}

/// Mixture of `rank` random pure states with random weights.
pub fn random_low_rank_with<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre_with(dim, rank, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.unscale(tr)).expect("G G†/Tr is a density matrix")
}

/// `scale · (G + G†)/2`.
pub fn random_hermitian_with<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> HermitianOperator {
    let g = ginibre_with(dim, dim, rng);
    hermitian((&g + g.adjoint()).scale(0.5 * scale))
}

pub fn random_hermitian(dim: usize, seed: u64, scale: f64) -> HermitianOperator {
    random_hermitian_with(dim, scale, &mut rng(seed))
}

/// `exp(-iH)` for a random Hermitian `H` of unit scale; Haar-like but not
/// exactly Haar distributed.
pub fn random_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryOperator {
    UnitaryOperator::exp_i(&random_hermitian_with(dim, 2.0, rng))
}

/// Projects `h` onto the commutant of `a`: keeps only the blocks connecting
/// eigenvectors of `a` with equal eigenvalues.
pub fn project_commutant(h: &HermitianOperator, a: &HermitianOperator) -> HermitianOperator {
    let e = a.eigh();
    let scale = e.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-8 * scale;
    let hv = e.vectors.adjoint() * h.matrix() * &e.vectors;
    let n = h.dim();
    let projected = CMat::from_fn(n, n, |i, j| {
        if (e.values[i] - e.values[j]).abs() <= tol {
            hv[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    hermitian(&e.vectors * projected * e.vectors.adjoint())
}

pub fn random_conserving_unitary_with<R: Rng + ?Sized>(a_total: &HermitianOperator, rng: &mut R) -> UnitaryOperator {
    let h = random_hermitian_with(a_total.dim(), 2.0, rng);
    UnitaryOperator::exp_i(&project_commutant(&h, a_total))
}

/// `exp(-iH)` with `H` a random Hermitian projected onto the commutant of
/// `a_total`, so that `[U, a_total] = 0`.
pub fn random_conserving_unitary(a_total: &HermitianOperator, seed: u64) -> UnitaryOperator {
    random_conserving_unitary_with(a_total, &mut rng(seed))
}

/// Hermitian operator with integer spectrum drawn from `0..=max_level`
/// (minimum shifted to zero) in a random eigenbasis.
pub fn random_integer_spectrum_with<R: Rng + ?Sized>(dim: usize, max_level: u32, rng: &mut R) -> HermitianOperator {
    let mut levels: Vec<f64> = (0..dim).map(|_| rng.random_range(0..=max_level) as f64).collect();
    let min = levels.iter().cloned().fold(f64::INFINITY, f64::min);
    for l in levels.iter_mut() {
        *l -= min;
    }
    let w = random_unitary_with(dim, rng);
    let d = HermitianOperator::from_real_diagonal(&levels);
    hermitian(w.matrix() * d.matrix() * w.matrix().adjoint())
}
