//! Dense complex matrix kernel.
//!
//! Every other module builds on the handful of primitives here: Hermitian
//! eigendecomposition, PSD square roots, trace and spectral norms, partial
//! traces and Kronecker products. Matrices are `nalgebra` dense matrices over
//! `Complex<f64>`.
//!
//! Bipartite index convention: for a space `V ⊗ A` the composite index of
//! `|v⟩ ⊗ |a⟩` is `v * dim_a + a` (first factor major). Operators are
//! vectorized row-major: `vec(X)[i * cols + j] = X[(i, j)]`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Absolute tolerance for the Hermiticity check, scaled up for matrices
/// with entries larger than one.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Negative eigenvalues down to this value are treated as roundoff when a
/// square root is requested without clipping.
pub const PSD_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Hilbert–Schmidt norm `‖A‖₂ = √Tr(A†A)`.
pub fn hs_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// A Hermitian matrix. Construction symmetrizes the input as `(M + M†)/2`
/// so that later eigensolves see an exactly Hermitian array.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMatrix(CMatrix);

impl HermMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return invalid(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            ));
        }
        let tol = HERMITIAN_TOL * max_abs(&m).max(1.0);
        let n = m.nrows();
        for i in 0..n {
            for j in i..n {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                    return invalid(format!(
                        "matrix is not Hermitian at ({i}, {j}): {} vs {}",
                        m[(i, j)],
                        m[(j, i)].conj()
                    ));
                }
            }
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without checking. For matrices that are Hermitian by
    /// construction up to roundoff.
    pub fn symmetrized(m: CMatrix) -> Self {
        debug_assert!(m.is_square());
        let h = (&m + m.adjoint()).scale(0.5);
        HermMatrix(h)
    }

    pub fn identity(n: usize) -> Self {
        HermMatrix(identity(n))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let v = CVector::from_iterator(d.len(), d.iter().map(|&x| c64(x, 0.0)));
        HermMatrix(CMatrix::from_diagonal(&v))
    }

    /// The rank-one projector `|ψ⟩⟨ψ|` (not normalized).
    pub fn outer(psi: &CVector) -> Self {
        HermMatrix::symmetrized(psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        HermMatrix(self.0.scale(s))
    }

    pub fn add(&self, other: &HermMatrix) -> Self {
        HermMatrix(&self.0 + &other.0)
    }

    /// `self + s·I`.
    pub fn shifted(&self, s: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += c64(s, 0.0);
        }
        HermMatrix(m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eig_hermitian(self).min_eigenvalue()
    }
}

/// Spectral decomposition with eigenvalues sorted in descending order;
/// column `i` of `eigenvectors` pairs with `eigenvalues[i]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Eigenvector for the smallest eigenvalue.
    pub fn min_eigenvector(&self) -> CVector {
        self.eigenvectors.column(self.eigenvalues.len() - 1).into_owned()
    }

    /// `V · diag(f(λ)) · V†`; `f` is called once per eigenvalue, in order.
    pub fn map_spectrum(&self, mut f: impl FnMut(f64) -> f64) -> HermMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        HermMatrix::symmetrized(scaled * self.eigenvectors.adjoint())
    }

    /// Rough backward-error bound of the eigensolver on this matrix.
    pub fn error_bound(&self) -> f64 {
        let n = self.eigenvalues.len() as f64;
        let scale = self
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, l| acc.max(l.abs()));
        32.0 * f64::EPSILON * n * scale.max(f64::MIN_POSITIVE)
    }
}

pub fn eig_hermitian(m: &HermMatrix) -> EigenDecomposition {
    let n = m.dim();
    let eig = SymmetricEigen::new(m.as_matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// PSD square root `V·diag(√max(λ,0))·V†`.
///
/// Without clipping, eigenvalues below `-PSD_TOL` are a domain error.
pub fn psd_sqrt(m: &HermMatrix, clip_negative: bool) -> Result<HermMatrix> {
    let eig = eig_hermitian(m);
    psd_sqrt_from_eig(&eig, clip_negative)
}

pub fn psd_sqrt_from_eig(eig: &EigenDecomposition, clip_negative: bool) -> Result<HermMatrix> {
    let lmin = eig.min_eigenvalue();
    if !clip_negative && lmin < -PSD_TOL {
        return Err(Error::Domain(format!(
            "square root of a matrix with eigenvalue {lmin:.3e}"
        )));
    }
    Ok(eig.map_spectrum(|l| l.max(0.0).sqrt()))
}

/// Thin singular value decomposition `m = U·diag(s)·V†`.
///
/// Computed from the Hermitian dilation `[[0, m], [m†, 0]]`, whose
/// eigenvalues are `±sᵢ` (plus zeros) with eigenvectors `(uᵢ, ±vᵢ)/√2`.
/// This keeps every singular value accurate to `O(ε‖m‖)` and avoids
/// `nalgebra`'s complex SVD, which returns wrong factors on some
/// rank-deficient inputs.
#[derive(Clone, Debug)]
pub struct Svd {
    /// All `min(rows, cols)` singular values, descending.
    pub singular_values: Vec<f64>,
    /// Left singular vectors for the numerically nonzero singular values.
    pub u: CMatrix,
    /// Right singular vectors, paired with the columns of `u`.
    pub v: CMatrix,
}

impl Svd {
    pub fn rank(&self) -> usize {
        self.u.ncols()
    }

    /// The partial isometry `U V†` on the numerical support. For a
    /// full-rank square matrix this is the unitary polar factor.
    pub fn polar_factor(&self) -> CMatrix {
        &self.u * self.v.adjoint()
    }
}

/// Eigendecomposition of `[[0, m], [m†, 0]]`.
fn dilation_eig(m: &CMatrix) -> EigenDecomposition {
    let (r, c) = m.shape();
    let mut h = CMatrix::zeros(r + c, r + c);
    h.view_mut((0, r), (r, c)).copy_from(m);
    h.view_mut((r, 0), (c, r)).copy_from(&m.adjoint());
    eig_hermitian(&HermMatrix::symmetrized(h))
}

pub fn svd(m: &CMatrix) -> Svd {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Svd {
            singular_values: Vec::new(),
            u: CMatrix::zeros(r, 0),
            v: CMatrix::zeros(c, 0),
        };
    }
    let eig = dilation_eig(m);
    let singular_values: Vec<f64> = eig.eigenvalues.iter().take(k).map(|l| l.max(0.0)).collect();
    let cutoff = 64.0 * f64::EPSILON * (r + c) as f64 * singular_values[0];
    let rank = singular_values
        .iter()
        .take_while(|&&s| s > cutoff && s > 0.0)
        .count();
    let mut u = CMatrix::zeros(r, rank);
    let mut v = CMatrix::zeros(c, rank);
    for j in 0..rank {
        let col = eig.eigenvectors.column(j);
        let top = col.rows(0, r).into_owned();
        let bottom = col.rows(r, c).into_owned();
        u.set_column(j, &top.unscale(top.norm()));
        v.set_column(j, &bottom.unscale(bottom.norm()));
    }
    Svd {
        singular_values,
        u,
        v,
    }
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Vec::new();
    }
    let eig = dilation_eig(m);
    eig.eigenvalues.iter().take(k).map(|l| l.max(0.0)).collect()
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Trace norm of a Hermitian matrix, `Σ|λᵢ|`.
pub fn hermitian_trace_norm(m: &HermMatrix) -> f64 {
    eig_hermitian(m).eigenvalues.iter().map(|l| l.abs()).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace of an operator on `C^{dim_first} ⊗ C^{dim_second}` over the
/// subsystem `which`; returns the reduced operator on the other factor.
pub fn partial_trace(
    m: &CMatrix,
    dim_first: usize,
    dim_second: usize,
    which: Subsystem,
) -> Result<CMatrix> {
    let d = dim_first * dim_second;
    if dim_first == 0 || dim_second == 0 || m.nrows() != d || m.ncols() != d {
        return invalid(format!(
            "partial trace of a {}x{} matrix over {dim_first}x{dim_second} factors",
            m.nrows(),
            m.ncols()
        ));
    }
    Ok(match which {
        Subsystem::First => CMatrix::from_fn(dim_second, dim_second, |a, b| {
            (0..dim_first)
                .map(|v| m[(v * dim_second + a, v * dim_second + b)])
                .sum()
        }),
        Subsystem::Second => CMatrix::from_fn(dim_first, dim_first, |v, w| {
            (0..dim_second)
                .map(|a| m[(v * dim_second + a, w * dim_second + a)])
                .sum()
        }),
    })
}

/// Tensor product `a ⊗ b`, first factor major.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Row-major vectorization.
pub fn vec_row_major(m: &CMatrix) -> CVector {
    let (r, c) = m.shape();
    CVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

pub fn unvec_row_major(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    assert_eq!(v.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && spectral_norm(&(m.adjoint() * m - identity(m.nrows()))) <= tol
}

/// `⟨u|A|u⟩`.
pub fn quadratic_form(m: &CMatrix, u: &CVector) -> Complex64 {
    (u.adjoint() * m * u)[(0, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
    }

    fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
    }

    fn diag(d: &[f64]) -> CMatrix {
        HermMatrix::from_real_diagonal(d).into_matrix()
    }

    #[test]
    fn eig_of_diagonal_is_sorted_identity() {
        let e = eig_hermitian(&HermMatrix::from_real_diagonal(&[3.0, 1.0]));
        assert_eq!(e.eigenvalues.len(), 2);
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        // Columns equal the standard basis up to a phase.
        assert!((e.eigenvectors[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((e.eigenvectors[(1, 1)].norm() - 1.0).abs() < 1e-14);
        let e = eig_hermitian(&HermMatrix::from_real_diagonal(&[1.0, 3.0]));
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((e.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_of_pauli_x() {
        let e = eig_hermitian(&HermMatrix::new(pauli_x()).unwrap());
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 4, 7] {
            let h = sample::random_hermitian(n, &mut rng);
            let e = eig_hermitian(&h);
            let rebuilt = e.map_spectrum(|l| l);
            assert!(spectral_norm(&(rebuilt.as_matrix() - h.as_matrix())) <= 1e-10);
            let v = &e.eigenvectors;
            assert!(spectral_norm(&(v.adjoint() * v - identity(n))) <= 1e-10);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = sample::random_hermitian(5, &mut rng);
        let a = eig_hermitian(&h);
        let b = eig_hermitian(&h);
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn non_hermitian_and_non_square_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(2., 0.), c64(0., 0.)]);
        assert!(matches!(HermMatrix::new(m), Err(Error::InvalidInput(_))));
        assert!(matches!(
            HermMatrix::new(CMatrix::zeros(2, 3)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn hermitian_construction_absorbs_roundoff() {
        let mut m = pauli_x();
        m[(0, 1)] += c64(1e-14, 0.0);
        let h = HermMatrix::new(m).unwrap();
        assert_eq!(h.as_matrix()[(0, 1)], h.as_matrix()[(1, 0)].conj());
    }

    #[test]
    fn psd_sqrt_examples() {
        let r = psd_sqrt(&HermMatrix::from_real_diagonal(&[4.0, 9.0]), false).unwrap();
        assert!(hs_norm(&(r.as_matrix() - diag(&[2.0, 3.0]))) < 1e-14);
        let r = psd_sqrt(&HermMatrix::identity(3), false).unwrap();
        assert!(hs_norm(&(r.as_matrix() - identity(3))) < 1e-14);
        let r = psd_sqrt(&HermMatrix::from_real_diagonal(&[1.0, -1e-15]), true).unwrap();
        assert!(hs_norm(&(r.as_matrix() - diag(&[1.0, 0.0]))) < 1e-14);
    }

    #[test]
    fn psd_sqrt_rejects_negative_without_clipping() {
        let m = HermMatrix::from_real_diagonal(&[1.0, -0.5]);
        assert!(matches!(psd_sqrt(&m, false), Err(Error::Domain(_))));
        let r = psd_sqrt(&m, true).unwrap();
        assert!(r.min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn psd_sqrt_squares_to_positive_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let h = sample::random_hermitian(4, &mut rng);
            let e = eig_hermitian(&h);
            let r = psd_sqrt(&h, true).unwrap();
            let sq = r.as_matrix() * r.as_matrix();
            let pos = e.map_spectrum(|l| l.max(0.0));
            assert!(spectral_norm(&(sq - pos.as_matrix())) <= 1e-9);
            assert!(r.min_eigenvalue() >= -1e-10);
        }
    }

    #[test]
    fn norm_examples() {
        assert!((trace_norm(&diag(&[1.0, -2.0])) - 3.0).abs() < 1e-14);
        assert!((spectral_norm(&diag(&[1.0, -2.0])) - 2.0).abs() < 1e-14);
        assert!((spectral_norm(&pauli_z()) - 1.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2, 3, 5] {
            let u = sample::random_unitary(n, &mut rng);
            assert!((trace_norm(&u) - n as f64).abs() < 1e-12);
            let a = sample::ginibre(n, n, &mut rng);
            let two_a = a.scale(2.0);
            assert!((spectral_norm(&two_a) - 2.0 * spectral_norm(&a)).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_norm_matches_hermitian_eigen_route() {
        // Independent route: for Hermitian input the singular values are |λ|.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = sample::random_hermitian(3, &mut rng);
        assert!((trace_norm(h.as_matrix()) - hermitian_trace_norm(&h)).abs() < 1e-12);
        // General input: singular values are √eig(A†A).
        let a = sample::ginibre(3, 3, &mut rng);
        let gram = HermMatrix::symmetrized(a.adjoint() * &a);
        let via_gram: f64 = eig_hermitian(&gram)
            .eigenvalues
            .iter()
            .map(|l| l.max(0.0).sqrt())
            .sum();
        assert!((trace_norm(&a) - via_gram).abs() < 1e-10);
    }

    #[test]
    fn norm_inequalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in [2, 3, 4] {
            let a = sample::ginibre(n, n, &mut rng);
            let (t, s) = (trace_norm(&a), spectral_norm(&a));
            assert!(t >= s - 1e-12);
            assert!(t <= n as f64 * s + 1e-12);
            let u = sample::ginibre(n, 1, &mut rng);
            let w = sample::ginibre(n, 1, &mut rng);
            let rank_one = &u * w.adjoint();
            assert!((trace_norm(&rank_one) - spectral_norm(&rank_one)).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rho = sample::random_density(2, &mut rng);
        let sigma = sample::random_density(3, &mut rng);
        let joint = kron(rho.as_matrix(), sigma.as_matrix());
        let reduced = partial_trace(&joint, 2, 3, Subsystem::Second).unwrap();
        assert!(hs_norm(&(reduced - rho.as_matrix())) < 1e-12);
        let reduced = partial_trace(&joint, 2, 3, Subsystem::First).unwrap();
        assert!(hs_norm(&(reduced - sigma.as_matrix())) < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_projector() {
        let s = 1.0 / 2f64.sqrt();
        let psi = CVector::from_vec(vec![c64(s, 0.), c64(0., 0.), c64(0., 0.), c64(s, 0.)]);
        let proj = HermMatrix::outer(&psi);
        let reduced = partial_trace(proj.as_matrix(), 2, 2, Subsystem::First).unwrap();
        assert!(hs_norm(&(reduced - identity(2).scale(0.5))) < 1e-14);
    }

    #[test]
    fn partial_trace_preserves_trace_and_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let m = sample::ginibre(4, 4, &mut rng);
        let n = sample::ginibre(4, 4, &mut rng);
        for which in [Subsystem::First, Subsystem::Second] {
            let r = partial_trace(&m, 2, 2, which).unwrap();
            assert!((trace(&r) - trace(&m)).norm() < 1e-12);
            let (a, b) = (c64(0.3, -1.2), c64(-2.0, 0.5));
            let combo = m.map(|z| z * a) + n.map(|z| z * b);
            let lhs = partial_trace(&combo, 2, 2, which).unwrap();
            let rhs = partial_trace(&m, 2, 2, which).unwrap().map(|z| z * a)
                + partial_trace(&n, 2, 2, which).unwrap().map(|z| z * b);
            assert!(hs_norm(&(lhs - rhs)) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = CMatrix::zeros(4, 4);
        assert!(matches!(
            partial_trace(&m, 3, 2, Subsystem::First),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        let zz = kron(&pauli_z(), &pauli_z());
        assert!(hs_norm(&(zz - diag(&[1.0, -1.0, -1.0, 1.0]))) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rho = sample::ginibre(2, 2, &mut rng);
        let sigma = sample::ginibre(3, 3, &mut rng);
        let reduced = partial_trace(&kron(&rho, &sigma), 2, 3, Subsystem::Second).unwrap();
        let expected = rho.map(|z| z * trace(&sigma));
        assert!(hs_norm(&(reduced - expected)) < 1e-12);
    }

    #[test]
    fn vectorization_is_row_major() {
        let m = CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(2., 0.), c64(3., 0.), c64(4., 0.)]);
        let v = vec_row_major(&m);
        assert_eq!(v[1], c64(2., 0.));
        assert_eq!(unvec_row_major(&v, 2, 2), m);
    }

    #[test]
    fn svd_reconstructs_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in 0..200 {
            let (r, c, k) = (2 + t % 5, 2 + (t / 5) % 4, 1 + t % 3);
            let a = sample::ginibre(r, k, &mut rng) * sample::ginibre(k, c, &mut rng);
            let d = svd(&a);
            assert!(d.rank() <= k);
            let sigma = CMatrix::from_diagonal(&CVector::from_iterator(
                d.rank(),
                d.singular_values.iter().take(d.rank()).map(|&s| c64(s, 0.0)),
            ));
            let back = &d.u * sigma * d.v.adjoint();
            assert!((back - &a).norm() <= 1e-12 * a.norm().max(1.0), "case {t}");
            let gram = d.u.adjoint() * &d.u;
            assert!((gram - identity(d.rank())).norm() < 1e-10);
        }
    }
}
