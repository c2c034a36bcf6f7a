//! Convex minimization with oracles, and the diamond-norm algorithm built on
//! it.
//!
//! `diamond_norm` minimizes `g` over the shrunken product body
//! `S = S⁽¹⁾ × S⁽¹⁾` with `S⁽¹⁾ = (1−α)K⁽¹⁾`, where
//! `M = N·√(‖T₁‖‖T₂‖)`, `α = ε/(4M)` and `ε′ = α/√N`. Every point of `S` has
//! `λ_min(Φ) ≥ α/N`, so the fidelity is well defined on and near `S`, and the
//! shrinkage costs at most `2αM = ε/2` in objective value.

mod ellipsoid;

use serde::{Deserialize, Serialize};

pub use ellipsoid::{default_budget, minimize};

use crate::coords::{product_membership, shrink, FeasibleSetSpec, OracleAnswer};
use crate::error::{invalid, Error, Result};
use crate::objective::Objective;
use crate::superop::{superop_spectral_norm, DerivedMap, StinespringPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMode {
    /// Eigenvector feasibility cuts and analytic objective cuts.
    SeparationCuts,
    /// Verdict-only membership queries and value-only objective queries.
    MembershipOnly,
}

/// Deliberate corruption used to check that self-tests catch broken
/// constants.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultInjection {
    /// Inflates the shrink factor fifty-fold.
    CorruptConstants,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Target additive accuracy.
    pub epsilon: f64,
    /// Iteration cap; `None` uses `default_budget`.
    pub max_iterations: Option<usize>,
    pub mode: SolverMode,
    /// Seeds the randomized finite-difference steps of `MembershipOnly`.
    pub seed: u64,
    #[doc(hidden)]
    #[serde(skip)]
    pub fault: Option<FaultInjection>,
}

impl SolverConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            max_iterations: None,
            mode: SolverMode::SeparationCuts,
            seed: 0,
            fault: None,
        }
    }

    pub fn with_mode(mut self, mode: SolverMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = Some(max_iterations);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Evaluation-oracle value at `opt_point`.
    pub opt_value: f64,
    pub opt_point: Vec<f64>,
    pub iterations: usize,
    /// Bound on `opt_value − min g`, including surrogate slack and
    /// evaluation error.
    pub certified_gap: f64,
    /// Seconds.
    pub wall_time: f64,
    pub objective_evaluations: usize,
    pub feasibility_cuts: usize,
    /// Surrogate gap after each objective evaluation.
    #[serde(skip)]
    pub gap_trace: Vec<f64>,
}

/// A convex body with `B(center, inner_radius) ⊆ K ⊆ B(0, outer_radius)`.
pub trait ConvexRegion {
    fn dim(&self) -> usize;
    fn center(&self) -> Vec<f64>;
    fn inner_radius(&self) -> f64;
    fn outer_radius(&self) -> f64;
    /// Membership with tolerance `eps`; rejected queries may carry a cut.
    fn query(&self, z: &[f64], eps: f64) -> Result<OracleAnswer>;
}

/// A convex function given by an evaluation oracle, plus a convex smooth
/// surrogate `s ≤ f ≤ s + surrogate_slack()` with gradients for cutting.
pub trait ConvexObjective {
    /// `f(z)` within `eps`.
    fn evaluate(&self, z: &[f64], eps: f64) -> Result<f64>;
    /// Surrogate value and gradient at `z`.
    fn surrogate(&self, z: &[f64]) -> Result<(f64, Vec<f64>)>;
    fn surrogate_slack(&self) -> f64 {
        0.0
    }
    /// Upper bound on `max f − min f` over the region.
    fn range_bound(&self) -> f64;
}

/// `S⁽¹⁾ × S⁽¹⁾` in stacked coordinates `(x, y)`.
#[derive(Clone, Copy, Debug)]
pub struct ProductRegion {
    set: FeasibleSetSpec,
}

impl ProductRegion {
    pub fn new(set: FeasibleSetSpec) -> Self {
        Self { set }
    }

    pub fn set(&self) -> &FeasibleSetSpec {
        &self.set
    }
}

impl ConvexRegion for ProductRegion {
    fn dim(&self) -> usize {
        2 * self.set.n_coords()
    }

    fn center(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    fn inner_radius(&self) -> f64 {
        self.set.inner_radius()
    }

    fn outer_radius(&self) -> f64 {
        self.set.outer_radius()
    }

    fn query(&self, z: &[f64], eps: f64) -> Result<OracleAnswer> {
        let m = self.set.n_coords();
        if z.len() != 2 * m {
            return invalid(format!("expected {} coordinates, got {}", 2 * m, z.len()));
        }
        let ans = product_membership(&self.set, &z[..m], &z[m..], eps)?;
        // Points handed to the objective must decode to PSD matrices.
        if ans.verdict && ans.min_eigenvalue < 0.0 {
            return Err(Error::Numerical(format!(
                "accepted point has eigenvalue {:.3e}",
                ans.min_eigenvalue
            )));
        }
        Ok(ans)
    }
}

/// The target `g` over stacked coordinates, with the `δ`-regularized
/// fidelity as cutting surrogate.
#[derive(Clone, Debug)]
pub struct FidelityTarget<'a> {
    objective: &'a Objective,
    delta: f64,
    range: f64,
}

impl<'a> FidelityTarget<'a> {
    pub fn new(objective: &'a Objective, delta: f64, range: f64) -> Self {
        Self {
            objective,
            delta,
            range,
        }
    }

    fn split<'z>(&self, z: &'z [f64]) -> (&'z [f64], &'z [f64]) {
        z.split_at(self.objective.n_coords())
    }
}

impl ConvexObjective for FidelityTarget<'_> {
    fn evaluate(&self, z: &[f64], eps: f64) -> Result<f64> {
        let (x, y) = self.split(z);
        self.objective.g_oracle(x, y, eps)
    }

    fn surrogate(&self, z: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (x, y) = self.split(z);
        let vg = self.objective.regularized(x, y, self.delta)?;
        let mut grad = vg.grad_x;
        grad.extend(vg.grad_y);
        Ok((vg.value, grad))
    }

    fn surrogate_slack(&self) -> f64 {
        self.objective.regularization_slack(self.delta)
    }

    fn range_bound(&self) -> f64 {
        self.range
    }
}

/// Relative over-approximation applied to `‖Tᵢ‖`.
pub const NORM_UPPER_SLACK: f64 = 1e-3;

/// Largest shrink factor used even when `ε/(4M)` is larger.
pub const MAX_ALPHA: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// `N·√(‖T₁‖‖T₂‖)` from upper bounds on the norms.
    #[serde(rename = "M")]
    pub m: f64,
    pub alpha: f64,
    pub eps_prime: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConstantsOutcome {
    Scaled(Constants),
    /// `M = 0`: one of `T₁`, `T₂` vanishes, hence so does `T`.
    ZeroMap,
}

/// `M`, `α = ε/(4M)` (capped at `MAX_ALPHA`) and `ε′ = α/√N`.
pub fn compute_constants(p: &StinespringPair, epsilon: f64) -> Result<ConstantsOutcome> {
    if !(epsilon > 0.0) {
        return invalid(format!("epsilon must be positive, got {epsilon}"));
    }
    let d = p.derived();
    let upper = |which| superop_spectral_norm(&d, which) * (1.0 + NORM_UPPER_SLACK);
    let n = p.dim_v() as f64;
    let m = n * (upper(DerivedMap::T1) * upper(DerivedMap::T2)).sqrt();
    if m == 0.0 {
        return Ok(ConstantsOutcome::ZeroMap);
    }
    let alpha = (epsilon / (4.0 * m)).min(MAX_ALPHA);
    Ok(ConstantsOutcome::Scaled(Constants {
        m,
        alpha,
        eps_prime: alpha / n.sqrt(),
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondResult {
    /// Estimate `c` with `|c − ‖T‖◇| ≤ epsilon`.
    pub value: f64,
    pub epsilon: f64,
    pub report: SolveReport,
    /// `None` for the zero map, which short-circuits.
    pub constants: Option<Constants>,
    /// Surrogate regularizer used for the gradient cuts.
    pub delta: f64,
}

/// Approximates `‖T‖◇` to additive accuracy `cfg.epsilon`.
pub fn diamond_norm(p: &StinespringPair, cfg: &SolverConfig) -> Result<DiamondResult> {
    let epsilon = cfg.epsilon;
    let constants = match compute_constants(p, epsilon)? {
        ConstantsOutcome::ZeroMap => {
            let m = p.dim_v() * p.dim_v() - 1;
            return Ok(DiamondResult {
                value: 0.0,
                epsilon,
                report: SolveReport {
                    opt_value: 0.0,
                    opt_point: vec![0.0; 2 * m],
                    iterations: 0,
                    certified_gap: 0.0,
                    wall_time: 0.0,
                    objective_evaluations: 0,
                    feasibility_cuts: 0,
                    gap_trace: Vec::new(),
                },
                constants: None,
                delta: 0.0,
            });
        }
        ConstantsOutcome::Scaled(c) => c,
    };
    let mut used = constants;
    if cfg.fault == Some(FaultInjection::CorruptConstants) {
        used.alpha = (used.alpha * 50.0).min(0.9);
    }

    let objective = Objective::new(p)?;
    let set = shrink(&FeasibleSetSpec::states(p.dim_v())?, used.alpha)?;
    let region = ProductRegion::new(set);

    // Regularizer small enough that the surrogate slack uses at most a
    // quarter of ε′.
    let (t1, t2) = objective.derived_norms();
    let root_sum = t1.sqrt() + t2.sqrt();
    let delta_cap = if root_sum > 0.0 {
        (used.eps_prime / (4.0 * objective.dim_a() as f64 * root_sum)).powi(2)
    } else {
        f64::INFINITY
    };
    let delta = objective.default_delta().min(0.5 * delta_cap);
    let target = FidelityTarget::new(&objective, delta, used.m);

    let inner_cfg = SolverConfig {
        epsilon: used.eps_prime,
        ..cfg.clone()
    };
    let report = minimize(&region, &target, &inner_cfg)?;

    // Tolerance ledger: solver gap (surrogate gap + slack + evaluation
    // error, at most ε′) plus the shrinkage loss 2αM must fit within ε.
    let spent = report.certified_gap.max(used.eps_prime) + 2.0 * used.alpha * constants.m;
    if spent > epsilon * (1.0 + 1e-12) {
        return Err(Error::Precision(format!(
            "tolerance ledger exceeded: {spent:.6e} > epsilon {epsilon:.6e}"
        )));
    }
    Ok(DiamondResult {
        value: (-report.opt_value).max(0.0),
        epsilon,
        report,
        constants: Some(used),
        delta,
    })
}
