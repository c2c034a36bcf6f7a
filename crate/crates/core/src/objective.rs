//! Root fidelity and the convex target `g(x, y) = −√F(T₁(Φ(x)), T₂(Φ(y)))`.
//!
//! `√F(ρ, σ) = ‖√ρ √σ‖₁` is jointly concave on PSD pairs, and `Φ`, `T₁`, `T₂`
//! are affine, so `g` is convex on `K = K⁽¹⁾ × K⁽¹⁾`. Its minimum over `K` is
//! `−‖T‖◇`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coords::PauliBasis;
use crate::error::{invalid, Error, Result};
use crate::matkernel::{
    c64, eig_hermitian, psd_sqrt_from_eig, singular_values, spectral_norm, svd, CMatrix,
    EigenDecomposition, HermMatrix,
};
use crate::superop::{apply_derived, superop_spectral_norm, DerivedMap, DerivedPair, StinespringPair};

/// Eigenvalues below this are a genuinely indefinite fidelity argument.
pub const FIDELITY_DOMAIN_TOL: f64 = 1e-6;

fn check_psd(eig: &EigenDecomposition, name: &str) -> Result<()> {
    let lmin = eig.min_eigenvalue();
    if lmin < -FIDELITY_DOMAIN_TOL {
        return Err(Error::Domain(format!(
            "{name} has eigenvalue {lmin:.3e}; fidelity needs PSD arguments"
        )));
    }
    Ok(())
}

/// `√F(ρ, σ) = ‖√ρ √σ‖₁`. Arguments need not have unit trace; slightly
/// negative eigenvalues (roundoff) are clipped.
pub fn sqrt_fidelity(rho: &HermMatrix, sigma: &HermMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return invalid(format!(
            "fidelity of a {0}x{0} and a {1}x{1} matrix",
            rho.dim(),
            sigma.dim()
        ));
    }
    let (er, es) = (eig_hermitian(rho), eig_hermitian(sigma));
    check_psd(&er, "first argument")?;
    check_psd(&es, "second argument")?;
    let a = psd_sqrt_from_eig(&er, true)?;
    let b = psd_sqrt_from_eig(&es, true)?;
    Ok(singular_values(&(a.as_matrix() * b.as_matrix())).iter().sum())
}

/// Error bound on the clipped square root computed from `eig`, using
/// `‖√A − √B‖ ≤ √‖A − B‖` in general and the sharper
/// `‖A − B‖ / (√λ_min(A) + √λ_min(B))` when the spectrum is bounded away
/// from zero.
fn sqrt_error_bound(eig: &EigenDecomposition) -> f64 {
    let e = eig.error_bound();
    let floor = eig.min_eigenvalue() - e;
    if floor > 0.0 {
        (e / (2.0 * floor.sqrt())).min(e.sqrt())
    } else {
        e.sqrt()
    }
}

/// Value and gradient of `(P, Q) ↦ ‖√P √Q‖₁` at positive definite `P`, `Q`.
///
/// With the polar factor `U` of `X = √P √Q`, `d‖X‖₁ = Re Tr(U† dX)`, and the
/// derivative of the square root in the eigenbasis of `H` divides entry
/// `(k, l)` by `√h_k + √h_l`. Returns Hermitian `G_P`, `G_Q` with
/// `d√F = Tr(G_P dP) + Tr(G_Q dQ)`.
pub fn sqrt_fidelity_gradient(p: &HermMatrix, q: &HermMatrix) -> Result<(f64, HermMatrix, HermMatrix)> {
    let (ep, eq) = (eig_hermitian(p), eig_hermitian(q));
    let rp = psd_sqrt_from_eig(&ep, true)?;
    let rq = psd_sqrt_from_eig(&eq, true)?;
    let x = rp.as_matrix() * rq.as_matrix();
    let dec = svd(&x);
    let value: f64 = dec.singular_values.iter().sum();
    let polar = dec.polar_factor();
    let polar_adj = polar.adjoint();

    let grad = |eig: &EigenDecomposition, a: CMatrix| -> Result<HermMatrix> {
        let e = &eig.eigenvectors;
        let roots: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        let mut g = e.adjoint() * a * e;
        let n = roots.len();
        for l in 0..n {
            for k in 0..n {
                let denom = roots[k] + roots[l];
                if denom <= 0.0 {
                    return Err(Error::Numerical(
                        "fidelity gradient at a singular argument; regularize first".into(),
                    ));
                }
                g[(l, k)] /= c64(denom, 0.0);
            }
        }
        Ok(HermMatrix::symmetrized(e * g * e.adjoint()))
    };
    let g_q = grad(&eq, &polar_adj * rp.as_matrix())?;
    let g_p = grad(&ep, rq.as_matrix() * &polar_adj)?;
    Ok((value, g_p, g_q))
}

/// The convex target `g` for a fixed super-operator, with everything that
/// depends only on `(B, C)` precomputed.
#[derive(Clone, Debug)]
pub struct Objective {
    derived: DerivedPair,
    basis: Arc<PauliBasis>,
    norm_b: f64,
    norm_c: f64,
    t1_norm: f64,
    t2_norm: f64,
    /// `T₁(P_k)` and `T₂(P_k)` for every Pauli operator, identity first.
    images1: Vec<CMatrix>,
    images2: Vec<CMatrix>,
}

/// Value of the regularized target plus its gradient in both coordinate
/// blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueAndGradient {
    pub value: f64,
    pub grad_x: Vec<f64>,
    pub grad_y: Vec<f64>,
}

impl Objective {
    pub fn new(pair: &StinespringPair) -> Result<Self> {
        let derived = pair.derived();
        let basis = PauliBasis::shared(pair.dim_v())?;
        let images = |which| -> Result<Vec<CMatrix>> {
            basis
                .operators()
                .iter()
                .map(|p| derived.apply_matrix(which, &p.to_matrix()))
                .collect()
        };
        let images1 = images(DerivedMap::T1)?;
        let images2 = images(DerivedMap::T2)?;
        Ok(Self {
            norm_b: spectral_norm(pair.b()),
            norm_c: spectral_norm(pair.c()),
            t1_norm: superop_spectral_norm(&derived, DerivedMap::T1),
            t2_norm: superop_spectral_norm(&derived, DerivedMap::T2),
            derived,
            basis,
            images1,
            images2,
        })
    }

    pub fn dim_v(&self) -> usize {
        self.derived.dim_v()
    }

    pub fn dim_a(&self) -> usize {
        self.derived.dim_a()
    }

    pub fn n_coords(&self) -> usize {
        self.basis.n_coords()
    }

    pub fn derived(&self) -> &DerivedPair {
        &self.derived
    }

    /// Spectral norm of `B`.
    pub fn norm_b(&self) -> f64 {
        self.norm_b
    }

    /// Spectral norm of `C`.
    pub fn norm_c(&self) -> f64 {
        self.norm_c
    }

    /// Spectral norms of `T₁` and `T₂` as linear maps.
    pub fn derived_norms(&self) -> (f64, f64) {
        (self.t1_norm, self.t2_norm)
    }

    /// `N·√(‖T₁‖‖T₂‖)`, an upper bound on `−g` over `K`.
    pub fn range_bound(&self) -> f64 {
        self.dim_v() as f64 * (self.t1_norm * self.t2_norm).sqrt()
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_coords() {
            return invalid(format!(
                "expected {} coordinates, got {}",
                self.n_coords(),
                x.len()
            ));
        }
        Ok(())
    }

    /// `T(Φ(x))` assembled from the precomputed Pauli images.
    fn image_at(&self, which: DerivedMap, x: &[f64]) -> HermMatrix {
        let images = match which {
            DerivedMap::T1 => &self.images1,
            DerivedMap::T2 => &self.images2,
        };
        let mut m = images[0].clone();
        for (xi, img) in x.iter().zip(&images[1..]) {
            if *xi != 0.0 {
                m += img.scale(*xi);
            }
        }
        HermMatrix::symmetrized(m.unscale(self.dim_v() as f64))
    }

    /// `g(x, y)` at kernel precision, computed along the definitional path
    /// (decode, partial trace, fidelity).
    pub fn g_exact(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        self.check_len(y)?;
        let rho = self.basis.decode(x)?;
        let xi = self.basis.decode(y)?;
        let m1 = apply_derived(&self.derived, DerivedMap::T1, &rho)?;
        let m2 = apply_derived(&self.derived, DerivedMap::T2, &xi)?;
        Ok(-sqrt_fidelity(&m1, &m2)?)
    }

    /// Square-root accuracy the evaluation oracle must reach for tolerance
    /// `eps`: `ζ = eps / (2d(‖B‖ + ‖C‖ + 1))`, where `d` is the larger of `N`
    /// and the ancilla dimension (the size of the matrices whose trace norm
    /// is taken).
    pub fn oracle_accuracy(&self, eps: f64) -> f64 {
        let d = self.dim_v().max(self.dim_a()) as f64;
        eps / (2.0 * d * (self.norm_b + self.norm_c + 1.0))
    }

    /// Evaluation oracle: returns `g(x, y)` within `eps`.
    ///
    /// Each `√Mᵢ` is formed with clipped eigenvalues; the square-root and
    /// trace-norm errors are bounded explicitly and must fit the `ζ/2` and
    /// `eps/2` budgets, otherwise a precision error is raised.
    pub fn g_oracle(&self, x: &[f64], y: &[f64], eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return invalid(format!("oracle tolerance must be positive, got {eps}"));
        }
        self.check_len(x)?;
        self.check_len(y)?;
        let zeta = self.oracle_accuracy(eps);
        let m1 = self.image_at(DerivedMap::T1, x);
        let m2 = self.image_at(DerivedMap::T2, y);
        let (e1, e2) = (eig_hermitian(&m1), eig_hermitian(&m2));
        check_psd(&e1, "T1(Phi(x))")?;
        check_psd(&e2, "T2(Phi(y))")?;
        let err = sqrt_error_bound(&e1).max(sqrt_error_bound(&e2));
        if err > zeta / 2.0 {
            return Err(Error::Precision(format!(
                "square-root error {err:.3e} exceeds the budget {:.3e}",
                zeta / 2.0
            )));
        }
        let s1 = psd_sqrt_from_eig(&e1, true)?;
        let s2 = psd_sqrt_from_eig(&e2, true)?;
        let prod = s1.as_matrix() * s2.as_matrix();
        let sv = singular_values(&prod);
        let value: f64 = sv.iter().sum();
        let svd_err = 32.0 * f64::EPSILON * sv.len() as f64 * value.max(f64::MIN_POSITIVE);
        if svd_err > eps / 2.0 {
            return Err(Error::Precision(format!(
                "trace-norm error {svd_err:.3e} exceeds the budget {:.3e}",
                eps / 2.0
            )));
        }
        Ok(-value)
    }

    /// Regularizer used for gradients unless the caller picks one:
    /// `1e-10·(1 + ‖T₁‖ + ‖T₂‖)`.
    pub fn default_delta(&self) -> f64 {
        1e-10 * (1.0 + self.t1_norm + self.t2_norm)
    }

    /// Upper bound on `|g_δ − g|` over `K`, where `g_δ` shifts both fidelity
    /// arguments by `δI`: `dim_a·√δ·(√‖T₁‖ + √(‖T₂‖ + δ))`.
    pub fn regularization_slack(&self, delta: f64) -> f64 {
        self.dim_a() as f64 * delta.sqrt() * (self.t1_norm.sqrt() + (self.t2_norm + delta).sqrt())
    }

    /// `g_δ(x, y)` and its gradient. `g_δ` is convex, smooth on `K`, lies below
    /// `g`, and is within `regularization_slack(δ)` of it.
    pub fn regularized(&self, x: &[f64], y: &[f64], delta: f64) -> Result<ValueAndGradient> {
        if !(delta > 0.0) {
            return invalid(format!("regularizer must be positive, got {delta}"));
        }
        self.check_len(x)?;
        self.check_len(y)?;
        let p = self.image_at(DerivedMap::T1, x).shifted(delta);
        let q = self.image_at(DerivedMap::T2, y).shifted(delta);
        let (value, gp, gq) = sqrt_fidelity_gradient(&p, &q)?;
        let n = self.dim_v() as f64;
        let pull = |g: &HermMatrix, images: &[CMatrix]| -> Vec<f64> {
            images[1..]
                .iter()
                .map(|img| -(g.as_matrix().component_mul(&img.transpose())).sum().re / n)
                .collect()
        };
        Ok(ValueAndGradient {
            value: -value,
            grad_x: pull(&gp, &self.images1),
            grad_y: pull(&gq, &self.images2),
        })
    }

    /// Gradient of the `δ`-regularized target, split into the `x` and `y`
    /// blocks.
    pub fn g_subgradient(&self, x: &[f64], y: &[f64], delta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let vg = self.regularized(x, y, delta)?;
        Ok((vg.grad_x, vg.grad_y))
    }
}
