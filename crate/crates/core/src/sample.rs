//! Random test instances: Ginibre matrices, Haar unitaries, isometries,
//! density matrices and channel differences.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matkernel::{c64, CMatrix, CVector, HermMatrix};
use crate::superop::{stinespring_of_isometry_difference, StinespringPair};

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let v = random_vector(n, rng);
    let norm = v.norm();
    v.unscale(norm)
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermMatrix {
    HermMatrix::symmetrized(ginibre(n, n, rng))
}

/// `rows × cols` matrix with orthonormal columns (`rows ≥ cols`), Haar
/// distributed via QR with the phase of `R`'s diagonal fixed.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols);
    let g = ginibre(rows, cols, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q.columns(0, cols).into_owned();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..rows {
            out[(i, j)] *= phase;
        }
    }
    out
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    random_isometry(n, n, rng)
}

/// Full-rank density matrix `GG†/Tr(GG†)`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermMatrix {
    let g = ginibre(n, n, rng);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    HermMatrix::symmetrized(m.unscale(t))
}

pub fn random_pure_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermMatrix {
    HermMatrix::outer(&random_unit_vector(n, rng))
}

/// Difference `Φ₁ − Φ₂` of two random channels on `C^n`, each given by a
/// Haar isometry `C^n → C^n ⊗ C^{dim_env}`.
pub fn random_channel_difference<R: Rng + ?Sized>(
    n: usize,
    dim_env: usize,
    rng: &mut R,
) -> StinespringPair {
    let w1 = random_isometry(n * dim_env, n, rng);
    let w2 = random_isometry(n * dim_env, n, rng);
    stinespring_of_isometry_difference(&w1, &w2, dim_env)
        .expect("Haar isometries are valid Stinespring branches")
}

/// A generic (not necessarily Hermitian-preserving) super-operator.
pub fn random_stinespring<R: Rng + ?Sized>(n: usize, dim_a: usize, rng: &mut R) -> StinespringPair {
    let b = ginibre(n * dim_a, n, rng).unscale((n * dim_a) as f64);
    let c = ginibre(n * dim_a, n, rng).unscale((n * dim_a) as f64);
    StinespringPair::new(n, dim_a, b, c).expect("well-formed random pair")
}

/// A random completely positive pair (B = C).
pub fn random_cp<R: Rng + ?Sized>(n: usize, dim_a: usize, rng: &mut R) -> StinespringPair {
    let b = ginibre(n * dim_a, n, rng).unscale(((n * dim_a) as f64).sqrt());
    StinespringPair::new(n, dim_a, b.clone(), b).expect("well-formed random pair")
}
