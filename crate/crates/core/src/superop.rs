//! Super-operator representations and conversions.
//!
//! A map `T: L(V) → L(V)` in Stinespring form is a pair `(B, C)` of
//! `(N·dim_a) × N` matrices with `T(X) = Tr_A(B X C†)`. Row `v·dim_a + a` of
//! `B` belongs to the output basis vector `|v⟩ ⊗ |a⟩`, so `B` splits into
//! `dim_a` branches `B_a` (each `N × N`) and `T(X) = Σ_a B_a X C_a†`.
//!
//! The derived maps `T₁(X) = Tr_V(B X B†)` and `T₂(X) = Tr_V(C X C†)` send
//! `L(V)` to `L(A)`; both are completely positive.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matkernel::{
    c64, identity, is_unitary, kron, partial_trace, singular_values, svd, unvec_row_major, CMatrix,
    CVector, HermMatrix, Subsystem,
};

/// Relative cutoff below which Choi singular values are dropped when
/// building a minimal Stinespring pair.
pub const RANK_CUTOFF: f64 = 1e-12;

const UNITARY_TOL: f64 = 1e-10;

pub(crate) fn check_power_of_two(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return invalid(format!(
            "dimension {n} is not a power of two (>= 2); the Pauli-coordinate chart \
             requires a qubit register, and padding would change the diamond norm"
        ));
    }
    Ok(())
}

/// The pair `(B, C)` with `T(X) = Tr_A(B X C†)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StinespringPair {
    dim_v: usize,
    dim_a: usize,
    b: CMatrix,
    c: CMatrix,
}

impl StinespringPair {
    pub fn new(dim_v: usize, dim_a: usize, b: CMatrix, c: CMatrix) -> Result<Self> {
        check_power_of_two(dim_v)?;
        if dim_a == 0 || dim_a > dim_v * dim_v {
            return invalid(format!(
                "ancilla dimension {dim_a} must lie in 1..={}",
                dim_v * dim_v
            ));
        }
        for (name, m) in [("B", &b), ("C", &c)] {
            if m.shape() != (dim_v * dim_a, dim_v) {
                return invalid(format!(
                    "{name} has shape {:?}, expected ({}, {dim_v})",
                    m.shape(),
                    dim_v * dim_a
                ));
            }
        }
        Ok(Self { dim_v, dim_a, b, c })
    }

    /// Builds a pair from its branches `B_a`, `C_a` (each `N × N`).
    pub fn from_branches(b_branches: &[CMatrix], c_branches: &[CMatrix]) -> Result<Self> {
        if b_branches.is_empty() || b_branches.len() != c_branches.len() {
            return invalid("B and C need the same non-zero number of branches");
        }
        let n = b_branches[0].nrows();
        let dim_a = b_branches.len();
        let mut b = CMatrix::zeros(n * dim_a, n);
        let mut c = CMatrix::zeros(n * dim_a, n);
        for (a, (bb, cc)) in b_branches.iter().zip(c_branches).enumerate() {
            if bb.shape() != (n, n) || cc.shape() != (n, n) {
                return invalid("every branch must be N x N");
            }
            for v in 0..n {
                for i in 0..n {
                    b[(v * dim_a + a, i)] = bb[(v, i)];
                    c[(v * dim_a + a, i)] = cc[(v, i)];
                }
            }
        }
        Self::new(n, dim_a, b, c)
    }

    /// The identity channel, `B = C = I`, `dim_a = 1`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 1, identity(n), identity(n))
    }

    /// The zero map, `B = I`, `C = 0`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, 1, identity(n), CMatrix::zeros(n, n))
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    fn branch(m: &CMatrix, n: usize, dim_a: usize, a: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |v, i| m[(v * dim_a + a, i)])
    }

    pub fn b_branch(&self, a: usize) -> CMatrix {
        Self::branch(&self.b, self.dim_v, self.dim_a, a)
    }

    pub fn c_branch(&self, a: usize) -> CMatrix {
        Self::branch(&self.c, self.dim_v, self.dim_a, a)
    }

    pub fn scaled(&self, sb: f64, sc: f64) -> Self {
        Self {
            b: self.b.scale(sb),
            c: self.c.scale(sc),
            ..self.clone()
        }
    }

    pub fn derived(&self) -> DerivedPair {
        DerivedPair {
            dim_v: self.dim_v,
            dim_a: self.dim_a,
            b: self.b.clone(),
            c: self.c.clone(),
        }
    }
}

/// `T(X) = Tr_A(B X C†)`.
pub fn apply_stinespring(p: &StinespringPair, x: &CMatrix) -> Result<CMatrix> {
    let n = p.dim_v;
    if x.shape() != (n, n) {
        return invalid(format!("input has shape {:?}, expected ({n}, {n})", x.shape()));
    }
    let full = &p.b * x * p.c.adjoint();
    partial_trace(&full, n, p.dim_a, Subsystem::Second)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivedMap {
    T1,
    T2,
}

/// The completely positive maps `T₁(X) = Tr_V(BXB†)` and `T₂(X) = Tr_V(CXC†)`
/// from `L(V)` to `L(A)`, stored through their generators.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedPair {
    dim_v: usize,
    dim_a: usize,
    b: CMatrix,
    c: CMatrix,
}

impl DerivedPair {
    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn generator(&self, which: DerivedMap) -> &CMatrix {
        match which {
            DerivedMap::T1 => &self.b,
            DerivedMap::T2 => &self.c,
        }
    }

    /// Linear extension to arbitrary `N × N` input.
    pub fn apply_matrix(&self, which: DerivedMap, x: &CMatrix) -> Result<CMatrix> {
        let n = self.dim_v;
        if x.shape() != (n, n) {
            return invalid(format!("input has shape {:?}, expected ({n}, {n})", x.shape()));
        }
        let g = self.generator(which);
        let full = g * x * g.adjoint();
        partial_trace(&full, n, self.dim_a, Subsystem::First)
    }

    /// Natural (`dim_a² × N²`) matrix of the chosen map under row-major
    /// vectorization.
    pub fn natural_matrix(&self, which: DerivedMap) -> CMatrix {
        let (n, da) = (self.dim_v, self.dim_a);
        let g = self.generator(which);
        CMatrix::from_fn(da * da, n * n, |row, col| {
            let (a, a2) = (row / da, row % da);
            let (i, j) = (col / n, col % n);
            (0..n)
                .map(|v| g[(v * da + a, i)] * g[(v * da + a2, j)].conj())
                .sum()
        })
    }
}

/// `T₁(ρ)` or `T₂(ρ)` for Hermitian `ρ`.
pub fn apply_derived(d: &DerivedPair, which: DerivedMap, rho: &HermMatrix) -> Result<HermMatrix> {
    Ok(HermMatrix::symmetrized(d.apply_matrix(which, rho.as_matrix())?))
}

/// Spectral norm of the chosen derived map viewed as a linear operator
/// `L(V) → L(A)` (largest singular value of its natural matrix).
pub fn superop_spectral_norm(d: &DerivedPair, which: DerivedMap) -> f64 {
    singular_values(&d.natural_matrix(which))
        .into_iter()
        .fold(0.0, f64::max)
}

/// Natural representation: `vec(T(X)) = matrix · vec(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NaturalRep {
    dim_v: usize,
    matrix: CMatrix,
}

/// Choi matrix `J(T) = Σ_ij T(|i⟩⟨j|) ⊗ |i⟩⟨j|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim_v: usize,
    matrix: CMatrix,
}

fn check_square_rep(dim_v: usize, m: &CMatrix) -> Result<()> {
    check_power_of_two(dim_v)?;
    let nn = dim_v * dim_v;
    if m.shape() != (nn, nn) {
        return invalid(format!(
            "representation has shape {:?}, expected ({nn}, {nn})",
            m.shape()
        ));
    }
    Ok(())
}

/// `J[(v,i),(w,j)] = K[(v,w),(i,j)]`; the same shuffle maps back.
fn reshuffle(n: usize, m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(n * n, n * n, |r, c| {
        let (v, i) = (r / n, r % n);
        let (w, j) = (c / n, c % n);
        m[(v * n + w, i * n + j)]
    })
}

impl NaturalRep {
    pub fn new(dim_v: usize, matrix: CMatrix) -> Result<Self> {
        check_square_rep(dim_v, &matrix)?;
        Ok(Self { dim_v, matrix })
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn to_choi(&self) -> ChoiMatrix {
        ChoiMatrix {
            dim_v: self.dim_v,
            matrix: reshuffle(self.dim_v, &self.matrix),
        }
    }
}

impl ChoiMatrix {
    pub fn new(dim_v: usize, matrix: CMatrix) -> Result<Self> {
        check_square_rep(dim_v, &matrix)?;
        Ok(Self { dim_v, matrix })
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn to_natural(&self) -> NaturalRep {
        NaturalRep {
            dim_v: self.dim_v,
            matrix: reshuffle(self.dim_v, &self.matrix),
        }
    }
}

/// `K = Σ_a B_a ⊗ conj(C_a)`.
pub fn natural_from_stinespring(p: &StinespringPair) -> NaturalRep {
    let n = p.dim_v;
    let mut k = CMatrix::zeros(n * n, n * n);
    for a in 0..p.dim_a {
        k += kron(&p.b_branch(a), &p.c_branch(a).map(|z| z.conj()));
    }
    NaturalRep { dim_v: n, matrix: k }
}

pub fn choi_from_stinespring(p: &StinespringPair) -> ChoiMatrix {
    natural_from_stinespring(p).to_choi()
}

/// Minimal Stinespring pair from the singular value decomposition of the
/// Choi matrix, `J = Σ_k s_k vec(A_k) vec(B_k)†`: branch `k` of `B` is
/// `√s_k·A_k` and of `C` is `√s_k·B_k`. Singular values below
/// `RANK_CUTOFF·s_max` are dropped; the zero map yields `B = C = 0` with one
/// branch.
pub fn stinespring_from_natural(nat: &NaturalRep) -> StinespringPair {
    let n = nat.dim_v;
    let choi = nat.to_choi().matrix;
    let dec = svd(&choi);
    let s_max = dec.singular_values.first().copied().unwrap_or(0.0);

    let mut bs = Vec::new();
    let mut cs = Vec::new();
    for k in 0..dec.rank() {
        let s = dec.singular_values[k];
        if s <= RANK_CUTOFF * s_max {
            break;
        }
        let root = s.sqrt();
        let left: CVector = dec.u.column(k).into_owned();
        let right: CVector = dec.v.column(k).into_owned();
        bs.push(unvec_row_major(&left, n, n).scale(root));
        cs.push(unvec_row_major(&right, n, n).scale(root));
    }
    if bs.is_empty() {
        bs.push(CMatrix::zeros(n, n));
        cs.push(CMatrix::zeros(n, n));
    }
    StinespringPair::from_branches(&bs, &cs).expect("branches are N x N with rank <= N^2")
}

/// Stinespring pair of `X ↦ UXU† − VXV†`: `B|ψ⟩ = U|ψ⟩|0⟩ + V|ψ⟩|1⟩` and
/// `C|ψ⟩ = U|ψ⟩|0⟩ − V|ψ⟩|1⟩`.
pub fn stinespring_of_difference(u: &CMatrix, v: &CMatrix) -> Result<StinespringPair> {
    if u.shape() != v.shape() {
        return invalid("U and V must have the same shape");
    }
    if !is_unitary(u, UNITARY_TOL) || !is_unitary(v, UNITARY_TOL) {
        return invalid("U and V must be unitary");
    }
    StinespringPair::from_branches(&[u.clone(), v.clone()], &[u.clone(), -v.clone()])
}

/// Stinespring pair of `Φ₁ − Φ₂` where `Φᵢ(X) = Tr_E(Wᵢ X Wᵢ†)` for
/// isometries `Wᵢ: V → V ⊗ E`. The ancilla is `C² ⊗ E`.
pub fn stinespring_of_isometry_difference(
    w1: &CMatrix,
    w2: &CMatrix,
    dim_env: usize,
) -> Result<StinespringPair> {
    let n = w1.ncols();
    if w1.shape() != (n * dim_env, n) || w2.shape() != w1.shape() {
        return invalid("isometries must both be (N*dim_env) x N");
    }
    for w in [w1, w2] {
        let gram = w.adjoint() * w;
        if crate::matkernel::spectral_norm(&(gram - identity(n))) > UNITARY_TOL {
            return invalid("W must satisfy W†W = I");
        }
    }
    let branch = |w: &CMatrix, e: usize| CMatrix::from_fn(n, n, |v, i| w[(v * dim_env + e, i)]);
    let mut bs = Vec::with_capacity(2 * dim_env);
    let mut cs = Vec::with_capacity(2 * dim_env);
    for e in 0..dim_env {
        bs.push(branch(w1, e));
        cs.push(branch(w1, e));
    }
    for e in 0..dim_env {
        bs.push(branch(w2, e));
        cs.push(-branch(w2, e));
    }
    StinespringPair::from_branches(&bs, &cs)
}

/// Stinespring pair of `T_p ⊗ T_q` on `V_p ⊗ V_q`, with ancilla
/// `A_p ⊗ A_q`.
pub fn tensor_superop(p: &StinespringPair, q: &StinespringPair) -> StinespringPair {
    let mut bs = Vec::with_capacity(p.dim_a * q.dim_a);
    let mut cs = Vec::with_capacity(p.dim_a * q.dim_a);
    for a in 0..p.dim_a {
        let (pb, pc) = (p.b_branch(a), p.c_branch(a));
        for a2 in 0..q.dim_a {
            bs.push(kron(&pb, &q.b_branch(a2)));
            cs.push(kron(&pc, &q.c_branch(a2)));
        }
    }
    StinespringPair::from_branches(&bs, &cs).expect("tensor product of valid pairs is valid")
}

/// The Pauli Z as a convenience for examples and tests.
pub fn pauli_z() -> CMatrix {
    DMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{eig_hermitian, hs_norm, psd_sqrt, spectral_norm, vec_row_major};
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus_state() -> HermMatrix {
        HermMatrix::symmetrized(CMatrix::from_element(2, 2, c64(0.5, 0.0)))
    }

    #[test]
    fn rejects_non_power_of_two_and_bad_shapes() {
        assert!(StinespringPair::new(3, 1, identity(3), identity(3)).is_err());
        assert!(StinespringPair::new(2, 1, identity(2), CMatrix::zeros(4, 2)).is_err());
        assert!(StinespringPair::new(2, 5, CMatrix::zeros(10, 2), CMatrix::zeros(10, 2)).is_err());
    }

    #[test]
    fn identity_and_zero_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = sample::ginibre(2, 2, &mut rng);
        let id = StinespringPair::identity(2).unwrap();
        assert!(hs_norm(&(apply_stinespring(&id, &x).unwrap() - &x)) < 1e-14);
        let zero = StinespringPair::zero(2).unwrap();
        assert_eq!(apply_stinespring(&zero, &x).unwrap(), CMatrix::zeros(2, 2));
        assert!(apply_stinespring(&id, &CMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn difference_pair_applies_unitary_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [2, 4] {
            let u = sample::random_unitary(n, &mut rng);
            let v = sample::random_unitary(n, &mut rng);
            let p = stinespring_of_difference(&u, &v).unwrap();
            assert_eq!(p.dim_a(), 2);
            for _ in 0..5 {
                let x = sample::ginibre(n, n, &mut rng);
                let expected = &u * &x * u.adjoint() - &v * &x * v.adjoint();
                assert!(hs_norm(&(apply_stinespring(&p, &x).unwrap() - expected)) < 1e-10);
            }
        }
        let u = sample::random_unitary(2, &mut rng);
        let same = stinespring_of_difference(&u, &u).unwrap();
        let x = sample::ginibre(2, 2, &mut rng);
        assert!(hs_norm(&apply_stinespring(&same, &x).unwrap()) < 1e-12);
        assert!(stinespring_of_difference(&u, &u.scale(2.0)).is_err());
    }

    #[test]
    fn identity_vs_z_difference() {
        let p = stinespring_of_difference(&identity(2), &pauli_z()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = sample::ginibre(2, 2, &mut rng);
        let z = pauli_z();
        let expected = &x - &z * &x * &z;
        assert!(hs_norm(&(apply_stinespring(&p, &x).unwrap() - expected)) < 1e-14);
        // B|+⟩ is maximally entangled, so T₁(|+⟩⟨+|) = I₂.
        let t1 = apply_derived(&p.derived(), DerivedMap::T1, &plus_state()).unwrap();
        assert!(hs_norm(&(t1.into_matrix() - identity(2))) < 1e-14);
    }

    #[test]
    fn derived_map_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = sample::random_density(2, &mut rng);
        let id = StinespringPair::identity(2).unwrap().derived();
        let out = apply_derived(&id, DerivedMap::T1, &rho).unwrap();
        assert_eq!(out.dim(), 1);
        assert!((out.as_matrix()[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-14);

        let w = sample::random_isometry(8, 2, &mut rng);
        let iso = StinespringPair::new(2, 4, w.clone(), w).unwrap().derived();
        let out = apply_derived(&iso, DerivedMap::T1, &rho).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn derived_outputs_are_psd_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let p = sample::random_stinespring(2, 3, &mut rng).scaled(3.0, 0.7);
            let d = p.derived();
            let rho = sample::random_density(2, &mut rng);
            for (which, gen) in [(DerivedMap::T1, p.b()), (DerivedMap::T2, p.c())] {
                let out = apply_derived(&d, which, &rho).unwrap();
                assert!(out.min_eigenvalue() >= -1e-10);
                let root = psd_sqrt(&out, true).unwrap();
                assert!(spectral_norm(root.as_matrix()) <= spectral_norm(gen) + 1e-12);
            }
        }
    }

    #[test]
    fn spectral_norm_of_identity_channel_derived_map() {
        let d = StinespringPair::identity(2).unwrap().derived();
        assert!((superop_spectral_norm(&d, DerivedMap::T1) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_is_quadratic_in_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = sample::random_stinespring(2, 2, &mut rng);
        let base = superop_spectral_norm(&p.derived(), DerivedMap::T1);
        let scaled = superop_spectral_norm(&p.scaled(3.0, 1.0).derived(), DerivedMap::T1);
        assert!((scaled - 9.0 * base).abs() < 1e-12 * scaled.max(1.0));
    }

    /// Power iteration on K†K, independent of the SVD route.
    fn power_norm(k: &CMatrix) -> f64 {
        let gram = k.adjoint() * k;
        let mut x = CVector::from_element(gram.nrows(), c64(1.0, 0.3));
        let mut lam = 0.0;
        for _ in 0..5000 {
            let y = &gram * &x;
            let nrm = y.norm();
            if nrm == 0.0 {
                return 0.0;
            }
            let next = y.unscale(nrm);
            if (nrm - lam).abs() < 1e-15 * nrm {
                lam = nrm;
                break;
            }
            lam = nrm;
            x = next;
        }
        lam.sqrt()
    }

    #[test]
    fn spectral_norm_matches_power_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let p = sample::random_stinespring(2, 3, &mut rng);
            let d = p.derived();
            for which in [DerivedMap::T1, DerivedMap::T2] {
                let exact = superop_spectral_norm(&d, which);
                let power = power_norm(&d.natural_matrix(which));
                assert!((exact - power).abs() < 1e-8 * exact.max(1.0));
            }
        }
    }

    #[test]
    fn natural_matrix_of_derived_map_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = sample::random_stinespring(2, 3, &mut rng);
        let d = p.derived();
        let x = sample::ginibre(2, 2, &mut rng);
        for which in [DerivedMap::T1, DerivedMap::T2] {
            let lhs = d.natural_matrix(which) * vec_row_major(&x);
            let rhs = vec_row_major(&d.apply_matrix(which, &x).unwrap());
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn natural_rep_examples() {
        let id = natural_from_stinespring(&StinespringPair::identity(4).unwrap());
        assert!(hs_norm(&(id.matrix() - identity(16))) < 1e-14);
        let zero = natural_from_stinespring(&StinespringPair::zero(2).unwrap());
        assert_eq!(zero.matrix(), &CMatrix::zeros(4, 4));
    }

    #[test]
    fn natural_rep_matches_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (n, da) in [(2, 3), (4, 2)] {
            let p = sample::random_stinespring(n, da, &mut rng);
            let nat = natural_from_stinespring(&p);
            for _ in 0..20 {
                let x = sample::ginibre(n, n, &mut rng);
                let lhs = nat.matrix() * vec_row_major(&x);
                let rhs = vec_row_major(&apply_stinespring(&p, &x).unwrap());
                assert!((lhs - rhs).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn choi_of_cp_map_is_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = sample::random_cp(2, 3, &mut rng);
        let j = choi_from_stinespring(&p);
        let h = HermMatrix::new(j.matrix().clone()).unwrap();
        assert!(eig_hermitian(&h).min_eigenvalue() >= -1e-10);
        // Definition: J = Σ_ij T(|i⟩⟨j|) ⊗ |i⟩⟨j|.
        let mut direct = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for k in 0..2 {
                let mut e = CMatrix::zeros(2, 2);
                e[(i, k)] = c64(1.0, 0.0);
                direct += kron(&apply_stinespring(&p, &e).unwrap(), &e);
            }
        }
        assert!(hs_norm(&(direct - j.matrix())) < 1e-12);
        assert_eq!(j.to_natural(), natural_from_stinespring(&p));
    }

    #[test]
    fn stinespring_from_identity_natural_is_single_branch() {
        let nat = NaturalRep::new(2, identity(4)).unwrap();
        let p = stinespring_from_natural(&nat);
        assert_eq!(p.dim_a(), 1);
        // B = C = e^{iφ}·I.
        let phase = p.b()[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(hs_norm(&(p.b() - identity(2).map(|z| z * phase))) < 1e-12);
        assert!(hs_norm(&(p.b() - p.c())) < 1e-12);
    }

    #[test]
    fn stinespring_from_zero_natural() {
        let nat = NaturalRep::new(2, CMatrix::zeros(4, 4)).unwrap();
        let p = stinespring_from_natural(&nat);
        assert_eq!(p.dim_a(), 1);
        assert_eq!(p.b(), &CMatrix::zeros(2, 2));
        assert_eq!(p.c(), &CMatrix::zeros(2, 2));
    }

    #[test]
    fn natural_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [2, 4] {
            let k = sample::ginibre(n * n, n * n, &mut rng);
            let nat = NaturalRep::new(n, k).unwrap();
            let p = stinespring_from_natural(&nat);
            assert!(p.dim_a() <= n * n);
            let back = natural_from_stinespring(&p);
            assert!(spectral_norm(&(back.matrix() - nat.matrix())) < 1e-9);
        }
    }

    #[test]
    fn rank_is_minimized() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let u = sample::random_unitary(2, &mut rng);
        let v = sample::random_unitary(2, &mut rng);
        let p = stinespring_of_difference(&u, &v).unwrap();
        let q = stinespring_from_natural(&natural_from_stinespring(&p));
        assert_eq!(q.dim_a(), 2);
    }

    #[test]
    fn tensor_examples() {
        let id = tensor_superop(
            &StinespringPair::identity(2).unwrap(),
            &StinespringPair::identity(2).unwrap(),
        );
        let nat = natural_from_stinespring(&id);
        assert!(hs_norm(&(nat.matrix() - identity(16))) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p = sample::random_stinespring(2, 2, &mut rng);
        let z = tensor_superop(&p, &StinespringPair::zero(2).unwrap());
        let x = sample::ginibre(4, 4, &mut rng);
        assert!(hs_norm(&apply_stinespring(&z, &x).unwrap()) < 1e-14);
    }

    #[test]
    fn tensor_acts_on_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..5 {
            let p = sample::random_stinespring(2, 3, &mut rng);
            let q = sample::random_channel_difference(2, 2, &mut rng);
            let pq = tensor_superop(&p, &q);
            assert_eq!(pq.dim_v(), 4);
            let x = sample::ginibre(2, 2, &mut rng);
            let y = sample::ginibre(2, 2, &mut rng);
            let lhs = apply_stinespring(&pq, &kron(&x, &y)).unwrap();
            let rhs = kron(
                &apply_stinespring(&p, &x).unwrap(),
                &apply_stinespring(&q, &y).unwrap(),
            );
            assert!(hs_norm(&(lhs - rhs)) < 1e-10);
        }
    }

    #[test]
    fn isometry_difference_applies_channel_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let w1 = sample::random_isometry(4, 2, &mut rng);
        let w2 = sample::random_isometry(4, 2, &mut rng);
        let p = stinespring_of_isometry_difference(&w1, &w2, 2).unwrap();
        let x = sample::ginibre(2, 2, &mut rng);
        let chan = |w: &CMatrix| partial_trace(&(w * &x * w.adjoint()), 2, 2, Subsystem::Second).unwrap();
        let expected = chan(&w1) - chan(&w2);
        assert!(hs_norm(&(apply_stinespring(&p, &x).unwrap() - expected)) < 1e-12);
    }

    #[test]
    fn application_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = sample::random_stinespring(4, 3, &mut rng);
        let x = sample::ginibre(4, 4, &mut rng);
        let y = sample::ginibre(4, 4, &mut rng);
        let (a, b) = (c64(0.7, -0.2), c64(-1.5, 2.0));
        let lhs = apply_stinespring(&p, &(x.map(|z| z * a) + y.map(|z| z * b))).unwrap();
        let rhs = apply_stinespring(&p, &x).unwrap().map(|z| z * a)
            + apply_stinespring(&p, &y).unwrap().map(|z| z * b);
        assert!(hs_norm(&(lhs - rhs)) < 1e-12);
    }
}
