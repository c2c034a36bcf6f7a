//! Independent estimates of `‖T‖◇` for small systems, used to cross-check
//! the convex solver.
//!
//! * `bruteforce_diamond` maximizes `‖(T⊗I)(|ψ⟩⟨ψ|)‖₁` over unit `ψ` by
//!   alternating between the polar factor of the output and the top
//!   eigenvector of the induced Hermitian form, from many random starts.
//! * `unitary_diamond` is the closed form for differences of unitary
//!   channels.
//! * `fidelity_seesaw` maximizes `√F(T₁(ρ), T₂(ξ))` by projected gradient
//!   ascent over pairs of density matrices.
//!
//! None of these is a certified bound.

use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coords::{project_to_states, PauliBasis};
use crate::error::{invalid, Result};
use crate::matkernel::{
    eig_hermitian, identity, is_unitary, kron, psd_sqrt_from_eig, svd, trace_norm, CMatrix, CVector,
    HermMatrix,
};
use crate::objective::sqrt_fidelity;
use crate::sample::{random_density, random_unit_vector};
use crate::superop::{apply_derived, DerivedMap, DerivedPair, StinespringPair};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForceConfig {
    /// Independent random starts, at least 8.
    pub restarts: usize,
    /// Ascent iterations per start.
    pub ascent_steps: usize,
    pub seed: u64,
    /// Intended agreement between oracles; ascents stop once a step gains
    /// less than `tol·1e-6`.
    pub tol: f64,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            ascent_steps: 400,
            seed: 0,
            tol: 1e-3,
        }
    }
}

impl BruteForceConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts < 8 {
            return invalid(format!("restarts must be at least 8, got {}", self.restarts));
        }
        if !(self.tol > 0.0) {
            return invalid(format!("tol must be positive, got {}", self.tol));
        }
        if self.ascent_steps == 0 {
            return invalid("ascent_steps must be at least 1");
        }
        Ok(())
    }

    fn restart_rng(&self, k: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64 + 1);
        rng
    }

    fn stall(&self) -> f64 {
        self.tol * 1e-6
    }
}

/// Polar factor `Q = UV†` of `Y = UΣV†`, so that `‖Y‖₁ = Re Tr(Q†Y)`.
fn polar_factor(y: &CMatrix) -> CMatrix {
    svd(y).polar_factor()
}

/// Branches of `T ⊗ I_N` acting on `C^N ⊗ C^N`.
fn lifted_branches(p: &StinespringPair) -> (Vec<CMatrix>, Vec<CMatrix>) {
    let id = identity(p.dim_v());
    let lift = |m: CMatrix| kron(&m, &id);
    (
        (0..p.dim_a()).map(|a| lift(p.b_branch(a))).collect(),
        (0..p.dim_a()).map(|a| lift(p.c_branch(a))).collect(),
    )
}

fn lifted_output(bs: &[CMatrix], cs: &[CMatrix], psi: &CVector) -> CMatrix {
    let n = psi.len();
    let mut y = CMatrix::zeros(n, n);
    for (b, c) in bs.iter().zip(cs) {
        y += (b * psi) * (c * psi).adjoint();
    }
    y
}

/// One ascent from `psi`. Both half-steps are exact maximizations of
/// `Re Tr(Q† (T⊗I)(ψψ†))`, so the trace norm never decreases.
fn ascend(bs: &[CMatrix], cs: &[CMatrix], mut psi: CVector, cfg: &BruteForceConfig) -> f64 {
    let n = psi.len();
    let mut best = trace_norm(&lifted_output(bs, cs, &psi));
    for _ in 0..cfg.ascent_steps {
        let q = polar_factor(&lifted_output(bs, cs, &psi));
        let mut w = CMatrix::zeros(n, n);
        for (b, c) in bs.iter().zip(cs) {
            let t = b.adjoint() * &q * c;
            w += &t + t.adjoint();
        }
        let eig = eig_hermitian(&HermMatrix::symmetrized(w));
        psi = eig.eigenvectors.column(0).into_owned();
        let value = trace_norm(&lifted_output(bs, cs, &psi));
        let gain = value - best;
        best = best.max(value);
        if gain < cfg.stall() {
            break;
        }
    }
    best
}

/// Lower bound on `‖T‖◇ = max ‖(T⊗I)(|ψ⟩⟨ψ|)‖₁` for Hermitian-preserving `T`,
/// using an `N`-dimensional reference system.
pub fn bruteforce_diamond(p: &StinespringPair, cfg: &BruteForceConfig) -> Result<f64> {
    cfg.validate()?;
    let (bs, cs) = lifted_branches(p);
    let dim = p.dim_v() * p.dim_v();
    let best = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = cfg.restart_rng(k);
            ascend(&bs, &cs, random_unit_vector(dim, &mut rng), cfg)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

type Point = (f64, f64);

/// Distance from the origin to the convex hull of `pts`.
///
/// Uses `d = max(0, max_{‖n‖=1} min_k n·p_k)`; the outer maximum is attained
/// at a direction pointing at a hull vertex or normal to a hull edge, so the
/// finitely many candidates below give it exactly.
fn hull_distance(pts: &[Point]) -> f64 {
    let mut dirs: Vec<Point> = Vec::new();
    for &(x, y) in pts {
        let r = x.hypot(y);
        if r > 0.0 {
            dirs.push((x / r, y / r));
        }
    }
    for (i, &(x1, y1)) in pts.iter().enumerate() {
        for &(x2, y2) in &pts[i + 1..] {
            let (dx, dy) = (x2 - x1, y2 - y1);
            let r = dx.hypot(dy);
            if r > 0.0 {
                dirs.push((-dy / r, dx / r));
                dirs.push((dy / r, -dx / r));
            }
        }
    }
    dirs.iter()
        .map(|&(nx, ny)| {
            pts.iter()
                .map(|&(x, y)| nx * x + ny * y)
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

const UNITARY_TOL: f64 = 1e-9;

/// Eigenvalues of a normal matrix `W = H + iK` from the eigenvectors of the
/// Hermitian `H + cK`, which are shared with `W` unless `c` makes two
/// distinct eigenvalues collide; a residual check rejects such `c`.
fn normal_eigenvalues(w: &CMatrix) -> Result<Vec<Complex<f64>>> {
    let half = Complex::new(0.5, 0.0);
    let h = (w + w.adjoint()) * half;
    let k = (w - w.adjoint()) * Complex::new(0.0, -0.5);
    let tol = 1e-8 * w.norm().max(1.0);
    for c in [std::f64::consts::SQRT_2, 0.37, 2.9] {
        let a = HermMatrix::symmetrized(&h + k.scale(c));
        let eig = eig_hermitian(&a);
        let vals: Vec<Complex<f64>> = (0..w.ncols())
            .map(|j| {
                let x = eig.eigenvectors.column(j);
                (x.adjoint() * w * x)[(0, 0)]
            })
            .collect();
        let ok = vals.iter().enumerate().all(|(j, &l)| {
            let x = eig.eigenvectors.column(j);
            (w * x - x * l).norm() <= tol
        });
        if ok {
            return Ok(vals);
        }
    }
    Err(crate::Error::Numerical("matrix is not normal to working precision".into()))
}

/// `‖Φ_U − Φ_V‖◇ = 2√(1 − d²)`, where `d` is the distance from 0 to the
/// convex hull of the eigenvalues of `U†V`.
pub fn unitary_diamond(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    if u.shape() != v.shape() {
        return invalid(format!(
            "unitaries of shapes {:?} and {:?}",
            u.shape(),
            v.shape()
        ));
    }
    if !is_unitary(u, UNITARY_TOL) || !is_unitary(v, UNITARY_TOL) {
        return invalid("unitary_diamond needs unitary inputs");
    }
    let pts: Vec<Point> = normal_eigenvalues(&(u.adjoint() * v))?
        .iter()
        .map(|z| (z.re, z.im))
        .collect();
    let d = hull_distance(&pts).min(1.0);
    Ok(2.0 * (1.0 - d * d).max(0.0).sqrt())
}

/// Adjoint of `Tᵢ`: `Tᵢ†(G) = X†(I_V ⊗ G)X` with `X = B` or `C`.
fn derived_adjoint(gen: &CMatrix, dim_v: usize, g: &CMatrix) -> CMatrix {
    gen.adjoint() * kron(&identity(dim_v), g) * gen
}

/// Gradient of `P ↦ Tr√(R P R)` with `R = √Q`: `½R(RPR)^{−1/2}R`, with the
/// inverse root taken on the support.
fn root_fidelity_gradient(p: &HermMatrix, q: &HermMatrix) -> Result<CMatrix> {
    let r = psd_sqrt_from_eig(&eig_hermitian(q), true)?;
    let r = r.as_matrix();
    let inner = HermMatrix::symmetrized(r * p.as_matrix() * r);
    let eig = eig_hermitian(&inner);
    let cutoff = 1e-14 * eig.max_eigenvalue().max(1.0);
    let inv_root = eig.map_spectrum(|l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 });
    Ok(r * inv_root.as_matrix() * r * Complex::new(0.5, 0.0))
}

/// Largest ascent step; beyond it the projection only loses precision.
const MAX_STEP: f64 = 1e3;

struct Seesaw<'a> {
    d: &'a DerivedPair,
    basis: &'a PauliBasis,
    delta: f64,
}

impl Seesaw<'_> {
    fn images(&self, x: &[f64], y: &[f64]) -> Result<(HermMatrix, HermMatrix)> {
        let rho = self.basis.decode(x)?;
        let xi = self.basis.decode(y)?;
        Ok((
            apply_derived(self.d, DerivedMap::T1, &rho)?,
            apply_derived(self.d, DerivedMap::T2, &xi)?,
        ))
    }

    fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let (p, q) = self.images(x, y)?;
        sqrt_fidelity(&p.shifted(self.delta), &q.shifted(self.delta))
    }

    /// Coordinate gradients of the regularized root fidelity.
    fn gradient(&self, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (p, q) = self.images(x, y)?;
        let (p, q) = (p.shifted(self.delta), q.shifted(self.delta));
        let n = self.d.dim_v();
        let gp = root_fidelity_gradient(&p, &q)?;
        let gq = root_fidelity_gradient(&q, &p)?;
        let pull = |which, g: &CMatrix| -> Vec<f64> {
            let h = derived_adjoint(self.d.generator(which), n, g);
            self.basis
                .coordinates_of(&h)
                .into_iter()
                .map(|v| v / n as f64)
                .collect()
        };
        Ok((pull(DerivedMap::T1, &gp), pull(DerivedMap::T2, &gq)))
    }

    fn step(&self, x: &[f64], g: &[f64], t: f64) -> Result<Vec<f64>> {
        let moved: Vec<f64> = x.iter().zip(g).map(|(a, b)| a + t * b).collect();
        project_to_states(self.d.dim_v(), &moved)
    }

    /// Projected gradient ascent with backtracking from `(x, y)`.
    fn ascend(&self, mut x: Vec<f64>, mut y: Vec<f64>, cfg: &BruteForceConfig) -> Result<f64> {
        let mut f = self.value(&x, &y)?;
        let mut t = 1.0;
        for _ in 0..cfg.ascent_steps {
            let (gx, gy) = self.gradient(&x, &y)?;
            let mut improved = false;
            while t > 1e-12 {
                let nx = self.step(&x, &gx, t)?;
                let ny = self.step(&y, &gy, t)?;
                let nf = self.value(&nx, &ny)?;
                if nf > f {
                    let gain = nf - f;
                    x = nx;
                    y = ny;
                    f = nf;
                    t = (2.0 * t).min(MAX_STEP);
                    improved = gain >= cfg.stall();
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        let (p, q) = self.images(&x, &y)?;
        sqrt_fidelity(&p, &q)
    }
}

/// Lower bound on `max √F(T₁(ρ), T₂(ξ))` over density matrices, which equals
/// `‖T‖◇`.
pub fn fidelity_seesaw(d: &DerivedPair, cfg: &BruteForceConfig) -> Result<f64> {
    cfg.validate()?;
    let n = d.dim_v();
    let basis = PauliBasis::shared(n)?;
    let scale = 1.0 + d.generator(DerivedMap::T1).norm() + d.generator(DerivedMap::T2).norm();
    let seesaw = Seesaw {
        d,
        basis: &basis,
        delta: 1e-13 * scale,
    };
    // The problem is concave, so a few starts are enough; the rest guard
    // against stalls at rank-deficient points.
    let starts = cfg.restarts.min(8);
    let results: Vec<Result<f64>> = (0..starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = cfg.restart_rng(k);
            let x = basis.coordinates_of(random_density(n, &mut rng).as_matrix());
            let y = basis.coordinates_of(random_density(n, &mut rng).as_matrix());
            seesaw.ascend(x, y, cfg)
        })
        .collect();
    let mut best = 0.0f64;
    for r in results {
        best = best.max(r?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::c64;
    use crate::sample;
    use crate::superop::{pauli_z, stinespring_of_difference, tensor_superop};

    fn quick() -> BruteForceConfig {
        BruteForceConfig {
            restarts: 16,
            ..Default::default()
        }
    }

    fn phase(theta: f64) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_vec(vec![
            c64(1.0, 0.0),
            Complex::from_polar(1.0, theta),
        ]))
    }

    #[test]
    fn identity_and_zero() {
        let cfg = quick();
        for n in [2, 4] {
            let id = StinespringPair::identity(n).unwrap();
            assert!((bruteforce_diamond(&id, &cfg).unwrap() - 1.0).abs() < 1e-9);
            assert!((fidelity_seesaw(&id.derived(), &cfg).unwrap() - 1.0).abs() < 1e-6);
            let zero = StinespringPair::zero(n).unwrap();
            assert_eq!(bruteforce_diamond(&zero, &cfg).unwrap(), 0.0);
            assert_eq!(fidelity_seesaw(&zero.derived(), &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn identity_versus_z() {
        let p = stinespring_of_difference(&identity(2), &pauli_z()).unwrap();
        let cfg = quick();
        assert!((bruteforce_diamond(&p, &cfg).unwrap() - 2.0).abs() < 1e-9);
        assert!((fidelity_seesaw(&p.derived(), &cfg).unwrap() - 2.0).abs() < 1e-6);
        assert!((unitary_diamond(&identity(2), &pauli_z()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_closed_form() {
        let u = identity(2);
        assert!(unitary_diamond(&u, &u).unwrap().abs() < 1e-7);
        for theta in [0.1, 0.5, std::f64::consts::FRAC_PI_3, 2.0] {
            let got = unitary_diamond(&u, &phase(theta)).unwrap();
            assert!((got - 2.0 * (theta / 2.0).sin().abs()).abs() < 1e-12, "{theta}");
        }
        let v = phase(std::f64::consts::FRAC_PI_3);
        let p = stinespring_of_difference(&u, &v).unwrap();
        let bf = bruteforce_diamond(&p, &quick()).unwrap();
        assert!((bf - 1.0).abs() < 1e-9, "{bf}");
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let m = CMatrix::from_element(2, 2, c64(1.0, 0.0));
        assert!(unitary_diamond(&m, &identity(2)).is_err());
        assert!(unitary_diamond(&identity(2), &identity(4)).is_err());
    }

    #[test]
    fn hull_distance_cases() {
        assert!((hull_distance(&[(1.0, 0.0), (-1.0, 0.0)])).abs() < 1e-15);
        assert!((hull_distance(&[(1.0, 0.0), (0.0, 1.0)]) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(hull_distance(&[(0.6, 0.8)]), 1.0);
        let tri = [(1.0, 0.0), (-0.5, 0.9), (-0.5, -0.9)];
        assert_eq!(hull_distance(&tri), 0.0);
    }

    #[test]
    fn unitary_concordance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cfg = quick();
        for _ in 0..20 {
            let u = sample::random_unitary(2, &mut rng);
            let v = sample::random_unitary(2, &mut rng);
            let exact = unitary_diamond(&u, &v).unwrap();
            let p = stinespring_of_difference(&u, &v).unwrap();
            let bf = bruteforce_diamond(&p, &cfg).unwrap();
            let fs = fidelity_seesaw(&p.derived(), &cfg).unwrap();
            assert!((bf - exact).abs() <= 1e-3, "{bf} vs {exact}");
            assert!(bf <= exact + 1e-9 && fs <= exact + 1e-9);
        }
    }

    #[test]
    fn oracle_concordance_on_channel_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let cfg = quick();
        for _ in 0..20 {
            let p = sample::random_channel_difference(2, 2, &mut rng);
            let bf = bruteforce_diamond(&p, &cfg).unwrap();
            let fs = fidelity_seesaw(&p.derived(), &cfg).unwrap();
            assert!((bf - fs).abs() <= 1e-3, "{bf} vs {fs}");
            assert!(bf <= 2.0 + 1e-9 && fs <= 2.0 + 1e-9);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p = sample::random_channel_difference(2, 2, &mut rng);
        let cfg = quick();
        assert_eq!(
            bruteforce_diamond(&p, &cfg).unwrap(),
            bruteforce_diamond(&p, &cfg).unwrap()
        );
    }

    #[test]
    fn multiplicative_on_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let cfg = quick();
        for _ in 0..2 {
            let p = sample::random_channel_difference(2, 2, &mut rng);
            let q = sample::random_channel_difference(2, 2, &mut rng);
            let joint = bruteforce_diamond(&tensor_superop(&p, &q), &cfg).unwrap();
            let prod = bruteforce_diamond(&p, &cfg).unwrap() * bruteforce_diamond(&q, &cfg).unwrap();
            assert!((joint - prod).abs() <= 5e-3, "{joint} vs {prod}");
        }
    }

    #[test]
    fn config_validation() {
        let p = StinespringPair::identity(2).unwrap();
        let bad = BruteForceConfig {
            restarts: 4,
            ..Default::default()
        };
        assert!(bruteforce_diamond(&p, &bad).is_err());
        let bad = BruteForceConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(fidelity_seesaw(&p.derived(), &bad).is_err());
    }
}
