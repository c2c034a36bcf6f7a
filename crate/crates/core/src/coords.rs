//! Pauli-coordinate chart for unit-trace Hermitian matrices and the convex
//! bodies it carves out.
//!
//! For `N = 2ⁿ` the tensor-product Pauli operators `P₁ = I, P₂, …, P_{N²}`
//! (lexicographic in the single-qubit labels I, X, Y, Z, first qubit most
//! significant) are an orthogonal basis with `⟨Pᵢ, Pⱼ⟩ = N·δᵢⱼ`. A
//! unit-trace Hermitian `ρ` has coordinates `xᵢ = Tr(P_{i+1} ρ)` for
//! `i = 1..N²−1` and is recovered as `Φ(x) = (I + Σ xᵢ P_{i+1}) / N`.
//!
//! `K⁽¹⁾` is the image of the density matrices; `S⁽¹⁾ = (1−α)K⁽¹⁾` is the set
//! of `x` with `λ_min(Φ(x)) ≥ α/N`. Both have a separation oracle built on the
//! eigenvector of the smallest eigenvalue: `u†Φ(y)u ≥ α/N` is linear in `y`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matkernel::{c64, eig_hermitian, CMatrix, CVector, HermMatrix};
use crate::superop::check_power_of_two;

/// A tensor product of single-qubit Paulis, stored as a monomial matrix:
/// row `r` has its single non-zero entry `phases[r]` in column `r ^ flip`.
#[derive(Clone, Debug)]
pub struct PauliString {
    labels: Vec<u8>,
    flip: usize,
    phases: Vec<Complex64>,
}

impl PauliString {
    fn new(labels: Vec<u8>) -> Self {
        let n = labels.len();
        let dim = 1usize << n;
        let mut flip = 0;
        for (q, &l) in labels.iter().enumerate() {
            if l == 1 || l == 2 {
                flip |= 1 << (n - 1 - q);
            }
        }
        let phases = (0..dim)
            .map(|r| {
                labels.iter().enumerate().fold(c64(1.0, 0.0), |acc, (q, &l)| {
                    let bit = (r >> (n - 1 - q)) & 1;
                    acc * match (l, bit) {
                        (2, 0) => c64(0.0, -1.0),
                        (2, _) => c64(0.0, 1.0),
                        (3, 1) => c64(-1.0, 0.0),
                        _ => c64(1.0, 0.0),
                    }
                })
            })
            .collect();
        Self { labels, flip, phases }
    }

    /// Single-qubit labels, 0..=3 for I, X, Y, Z.
    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label_string(&self) -> String {
        self.labels.iter().map(|&l| ['I', 'X', 'Y', 'Z'][l as usize]).collect()
    }

    pub fn to_matrix(&self) -> CMatrix {
        let dim = self.phases.len();
        let mut m = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            m[(r, r ^ self.flip)] = self.phases[r];
        }
        m
    }

    /// `Tr(P·m)`.
    pub fn trace_with(&self, m: &CMatrix) -> Complex64 {
        (0..self.phases.len())
            .map(|r| self.phases[r] * m[(r ^ self.flip, r)])
            .sum()
    }

    /// `u†·P·u`, real since `P` is Hermitian.
    pub fn expectation(&self, u: &CVector) -> f64 {
        (0..self.phases.len())
            .map(|r| (u[r].conj() * self.phases[r] * u[r ^ self.flip]).re)
            .sum()
    }

    /// `m += s·P`.
    pub fn add_scaled_to(&self, m: &mut CMatrix, s: f64) {
        for r in 0..self.phases.len() {
            m[(r, r ^ self.flip)] += self.phases[r] * s;
        }
    }
}

/// The `N²` Pauli operators on `n` qubits, identity first.
#[derive(Debug)]
pub struct PauliBasis {
    n_qubits: usize,
    dim: usize,
    ops: Vec<PauliString>,
}

static BASIS_CACHE: OnceLock<Mutex<HashMap<usize, Arc<PauliBasis>>>> = OnceLock::new();

impl PauliBasis {
    pub fn new(dim: usize) -> Result<Self> {
        check_power_of_two(dim)?;
        let n = dim.trailing_zeros() as usize;
        let ops = (0..dim * dim)
            .map(|k| {
                let labels = (0..n).map(|q| ((k >> (2 * (n - 1 - q))) & 3) as u8).collect();
                PauliString::new(labels)
            })
            .collect();
        Ok(Self { n_qubits: n, dim, ops })
    }

    /// Process-wide basis for `dim`, built on first use.
    pub fn shared(dim: usize) -> Result<Arc<Self>> {
        let cache = BASIS_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("basis cache poisoned");
        if let Some(b) = guard.get(&dim) {
            return Ok(Arc::clone(b));
        }
        let basis = Arc::new(Self::new(dim)?);
        guard.insert(dim, Arc::clone(&basis));
        Ok(basis)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of coordinates, `N² − 1`.
    pub fn n_coords(&self) -> usize {
        self.ops.len() - 1
    }

    /// All `N²` operators, identity first.
    pub fn operators(&self) -> &[PauliString] {
        &self.ops
    }

    /// The operator paired with coordinate `i` (that is, `P_{i+2}` in 1-based
    /// numbering, skipping the identity).
    pub fn coord_op(&self, i: usize) -> &PauliString {
        &self.ops[i + 1]
    }

    /// `Φ(x) = (I + Σ xᵢ P_{i+1}) / N`.
    pub fn decode(&self, x: &[f64]) -> Result<HermMatrix> {
        if x.len() != self.n_coords() {
            return invalid(format!(
                "expected {} Pauli coordinates, got {}",
                self.n_coords(),
                x.len()
            ));
        }
        let n = self.dim;
        let mut m = CMatrix::identity(n, n);
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                self.coord_op(i).add_scaled_to(&mut m, xi);
            }
        }
        Ok(HermMatrix::symmetrized(m.unscale(n as f64)))
    }

    /// `xᵢ = Re Tr(P_{i+1} ρ)` without trace checks.
    pub fn coordinates_of(&self, rho: &CMatrix) -> Vec<f64> {
        (0..self.n_coords())
            .map(|i| self.coord_op(i).trace_with(rho).re)
            .collect()
    }
}

/// Coordinates of a unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliCoordinates {
    dim_v: usize,
    x: Vec<f64>,
}

impl PauliCoordinates {
    pub fn new(dim_v: usize, x: Vec<f64>) -> Result<Self> {
        check_power_of_two(dim_v)?;
        if x.len() != dim_v * dim_v - 1 {
            return invalid(format!(
                "expected {} Pauli coordinates, got {}",
                dim_v * dim_v - 1,
                x.len()
            ));
        }
        Ok(Self { dim_v, x })
    }

    pub fn zeros(dim_v: usize) -> Result<Self> {
        Self::new(dim_v, vec![0.0; dim_v * dim_v - 1])
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.x
    }
}

const TRACE_TOL: f64 = 1e-10;

/// `v(ρ)`, the Pauli coordinates of a trace-one Hermitian matrix.
pub fn encode(rho: &HermMatrix) -> Result<PauliCoordinates> {
    let n = rho.dim();
    let basis = PauliBasis::shared(n)?;
    let tr = rho.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return invalid(format!("trace is {tr}, expected 1"));
    }
    let m = rho.as_matrix();
    let mut x = Vec::with_capacity(basis.n_coords());
    for i in 0..basis.n_coords() {
        let z = basis.coord_op(i).trace_with(m);
        if z.im.abs() > TRACE_TOL {
            return invalid(format!("coordinate {i} has imaginary part {:.3e}", z.im));
        }
        x.push(z.re);
    }
    PauliCoordinates::new(n, x)
}

/// `Φ(x)`. Defined for every real vector, not only for points of `K⁽¹⁾`.
pub fn decode(x: &PauliCoordinates) -> HermMatrix {
    PauliBasis::shared(x.dim_v)
        .and_then(|b| b.decode(&x.x))
        .expect("validated on construction")
}

/// `K⁽¹⁾` (for `alpha = 0`) or its shrinkage `S⁽¹⁾ = (1−α)K⁽¹⁾`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSetSpec {
    dim_v: usize,
    alpha: f64,
}

impl FeasibleSetSpec {
    /// The density-matrix body `K⁽¹⁾` for dimension `dim_v`.
    pub fn states(dim_v: usize) -> Result<Self> {
        check_power_of_two(dim_v)?;
        Ok(Self { dim_v, alpha: 0.0 })
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_coords(&self) -> usize {
        self.dim_v * self.dim_v - 1
    }

    /// Minimum eigenvalue members must keep: `α/N`.
    pub fn threshold(&self) -> f64 {
        self.alpha / self.dim_v as f64
    }

    /// Radius of a ball around the origin contained in the set,
    /// `(1−α)/(2√N)`.
    pub fn inner_radius(&self) -> f64 {
        (1.0 - self.alpha) / (2.0 * (self.dim_v as f64).sqrt())
    }

    /// Radius of a ball around the origin containing the product of two
    /// copies of the set.
    pub fn outer_radius(&self) -> f64 {
        2.0 * self.dim_v as f64
    }

    pub fn center(&self) -> Vec<f64> {
        vec![0.0; self.n_coords()]
    }
}

/// `(1−α)·K⁽¹⁾`. Shrinking an already shrunken spec is not supported; the
/// factor always applies to `K⁽¹⁾`.
pub fn shrink(set: &FeasibleSetSpec, alpha: f64) -> Result<FeasibleSetSpec> {
    if !(0.0..1.0).contains(&alpha) {
        return invalid(format!("shrink factor {alpha} outside [0, 1)"));
    }
    Ok(FeasibleSetSpec {
        dim_v: set.dim_v,
        alpha,
    })
}

/// Linear inequality `normal · y ≥ offset`, satisfied by every member of
/// the set and violated at the query point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Cut {
    pub fn value(&self, y: &[f64]) -> f64 {
        self.normal.iter().zip(y).map(|(c, v)| c * v).sum()
    }

    pub fn is_satisfied_by(&self, y: &[f64]) -> bool {
        self.value(y) >= self.offset
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleAnswer {
    pub verdict: bool,
    /// Smallest eigenvalue of the decoded matrix (over both factors for
    /// product queries).
    pub min_eigenvalue: f64,
    pub cut: Option<Cut>,
}

/// Eigenvalue accuracy the membership oracle must reach for tolerance `eps`:
/// `ζ = eps / (10·N^{3/2})`.
pub fn membership_accuracy(dim_v: usize, eps: f64) -> f64 {
    eps / (10.0 * (dim_v as f64).powf(1.5))
}

/// Membership query with an eigenvector cut on rejection.
///
/// The verdict compares the computed `λ_min(Φ(x))` with the threshold; the
/// eigensolver's error is checked against `ζ` so the oracle contract (accept
/// `set_{−eps}`, reject outside `set_{+eps}`) holds.
pub fn membership(set: &FeasibleSetSpec, x: &[f64], eps: f64) -> Result<OracleAnswer> {
    if !(eps > 0.0) {
        return invalid(format!("oracle tolerance must be positive, got {eps}"));
    }
    let basis = PauliBasis::shared(set.dim_v)?;
    let rho = basis.decode(x)?;
    let eig = eig_hermitian(&rho);
    let zeta = membership_accuracy(set.dim_v, eps);
    if eig.error_bound() > zeta {
        return Err(Error::Precision(format!(
            "eigenvalue accuracy {zeta:.3e} is below the eigensolver's error {:.3e}",
            eig.error_bound()
        )));
    }
    let lam = eig.min_eigenvalue();
    let thr = set.threshold();
    let verdict = if set.alpha == 0.0 { lam > 0.0 } else { lam >= thr };
    let cut = (!verdict).then(|| {
        let u = eig.min_eigenvector();
        Cut {
            normal: (0..basis.n_coords())
                .map(|i| basis.coord_op(i).expectation(&u))
                .collect(),
            offset: set.dim_v as f64 * thr - 1.0,
        }
    });
    Ok(OracleAnswer {
        verdict,
        min_eigenvalue: lam,
        cut,
    })
}

/// Membership in `set × set`. A rejected query carries the cut of the more
/// violated factor, zero-padded on the other block.
pub fn product_membership(
    set: &FeasibleSetSpec,
    x: &[f64],
    y: &[f64],
    eps: f64,
) -> Result<OracleAnswer> {
    let ax = membership(set, x, eps)?;
    let ay = membership(set, y, eps)?;
    let min_eigenvalue = ax.min_eigenvalue.min(ay.min_eigenvalue);
    if ax.verdict && ay.verdict {
        return Ok(OracleAnswer {
            verdict: true,
            min_eigenvalue,
            cut: None,
        });
    }
    let m = x.len();
    let use_x = !ax.verdict && (ay.verdict || ax.min_eigenvalue <= ay.min_eigenvalue);
    let (factor_cut, shift) = if use_x { (ax.cut, 0) } else { (ay.cut, m) };
    let factor_cut = factor_cut.expect("rejected factor carries a cut");
    let mut normal = vec![0.0; 2 * m];
    normal[shift..shift + m].copy_from_slice(&factor_cut.normal);
    Ok(OracleAnswer {
        verdict: false,
        min_eigenvalue,
        cut: Some(Cut {
            normal,
            offset: factor_cut.offset,
        }),
    })
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&s| (s - theta).max(0.0)).collect()
}

/// Nearest point of `K⁽¹⁾` to `x` in coordinate distance. Since the chart is
/// an isometry up to `√N`, this projects the spectrum of `Φ(x)` onto the
/// simplex.
pub fn project_to_states(dim_v: usize, x: &[f64]) -> Result<Vec<f64>> {
    let basis = PauliBasis::shared(dim_v)?;
    let eig = eig_hermitian(&basis.decode(x)?);
    let proj = project_simplex(&eig.eigenvalues);
    let mut k = 0;
    let rho = eig.map_spectrum(|_| {
        let p = proj[k];
        k += 1;
        p
    });
    Ok(basis.coordinates_of(rho.as_matrix()))
}

/// Coordinate distance from `x` to `K⁽¹⁾`: `√N · ‖λ − Π_simplex(λ)‖₂`.
pub fn distance_to_states(dim_v: usize, x: &[f64]) -> Result<f64> {
    let basis = PauliBasis::shared(dim_v)?;
    let eig = eig_hermitian(&basis.decode(x)?);
    let proj = project_simplex(&eig.eigenvalues);
    let d2: f64 = eig
        .eigenvalues
        .iter()
        .zip(&proj)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((dim_v as f64).sqrt() * d2.sqrt())
}
