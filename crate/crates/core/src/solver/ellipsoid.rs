//! Ellipsoid method over a convex body given by an oracle.
//!
//! The body must satisfy `B(a₀, r) ⊆ K ⊆ B(0, R)`. In `SeparationCuts` mode
//! infeasible centers are cut by the oracle's halfspace and feasible centers
//! by the objective's (sub)gradient, both as deep cuts. In `MembershipOnly`
//! mode the oracle's verdict is all that is used: infeasible centers are cut
//! with a finite-difference subgradient of the gauge of `K` around `a₀`, and
//! feasible ones with a finite-difference gradient of the evaluation oracle,
//! both as shallow cuts.
//!
//! Two lower bounds certify the gap:
//! * `f(c) − √(gᵀPg)`, the minimum of the linear model over the current
//!   ellipsoid, valid because the minimizer is never cut away;
//! * the volume bound `V·(vol E / vol B(a₀, r))^{1/n}` where `V` bounds the
//!   objective's range.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConvexObjective, ConvexRegion, SolveReport, SolverConfig, SolverMode};
use crate::error::{invalid, Error, Result};

struct Ellipsoid {
    center: DVector<f64>,
    shape: DMatrix<f64>,
    log_det: f64,
}

impl Ellipsoid {
    fn ball(n: usize, radius: f64) -> Self {
        Self {
            center: DVector::zeros(n),
            shape: DMatrix::identity(n, n) * (radius * radius),
            log_det: n as f64 * (radius * radius).ln(),
        }
    }

    fn dim(&self) -> usize {
        self.center.len()
    }

    /// `√(aᵀPa)`.
    fn width(&self, a: &DVector<f64>) -> f64 {
        a.dot(&(&self.shape * a)).max(0.0).sqrt()
    }

    /// Keeps `{z ∈ E : aᵀ(z − c) ≤ −depth·√(aᵀPa)}`; `depth` in `(−1/n, 1)`.
    fn cut(&mut self, a: &DVector<f64>, depth: f64) -> Result<()> {
        let n = self.dim() as f64;
        let pa = &self.shape * a;
        let s2 = a.dot(&pa);
        if !(s2 > 0.0) || !s2.is_finite() {
            return Err(Error::Numerical(format!(
                "ellipsoid lost definiteness (aᵀPa = {s2:.3e})"
            )));
        }
        if depth >= 1.0 {
            return Err(Error::Numerical(
                "cut leaves no volume; the oracle contradicts the inner ball".into(),
            ));
        }
        let alpha = depth.max(-1.0 / n + 1e-9);
        let tau = (1.0 + n * alpha) / (n + 1.0);
        let sigma = 2.0 * (1.0 + n * alpha) / ((n + 1.0) * (1.0 + alpha));
        let delta = n * n * (1.0 - alpha * alpha) / (n * n - 1.0);
        let b = pa / s2.sqrt();
        self.center -= &b * tau;
        self.shape -= &b * b.transpose() * sigma;
        self.shape *= delta;
        let sym = (&self.shape + self.shape.transpose()) * 0.5;
        self.shape = sym;
        self.log_det += n * delta.ln() + (1.0 - sigma).ln();
        Ok(())
    }

    /// `(vol E / vol B(·, r))^{1/n}`.
    fn radius_ratio(&self, r: f64) -> f64 {
        (self.log_det / (2.0 * self.dim() as f64)).exp() / r
    }
}

/// Iteration budget `50·n²·ln(R/(r·ε))`.
pub fn default_budget(n: usize, outer: f64, inner: f64, eps: f64) -> usize {
    let logs = (outer / (inner * eps)).ln().max(1.0);
    (50.0 * (n * n) as f64 * logs).ceil() as usize
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Gauge of the region around `a₀`, `inf{t > 0 : a₀ + (z − a₀)/t ∈ K}`, by
/// bisection on membership verdicts.
fn gauge<R: ConvexRegion + ?Sized>(region: &R, a0: &[f64], z: &[f64], eps: f64) -> Result<f64> {
    let d = sub(z, a0);
    let len = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if len == 0.0 {
        return Ok(0.0);
    }
    let r = region.inner_radius();
    let a0_norm = a0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut lo = len / (region.outer_radius() + a0_norm);
    let mut hi = len / r;
    let inside = |t: f64| -> Result<bool> {
        let p: Vec<f64> = a0.iter().zip(&d).map(|(a, v)| a + v / t).collect();
        Ok(region.query(&p, eps)?.verdict)
    };
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if inside(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn central_difference(
    z: &[f64],
    steps: &[f64],
    mut f: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<Vec<f64>> {
    let mut probe = z.to_vec();
    let mut grad = Vec::with_capacity(z.len());
    for (i, &h) in steps.iter().enumerate() {
        probe[i] = z[i] + h;
        let up = f(&probe)?;
        probe[i] = z[i] - h;
        let down = f(&probe)?;
        probe[i] = z[i];
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

/// Minimizes a convex objective over a convex region to additive accuracy
/// `cfg.epsilon`.
///
/// Stops as soon as the certified gap of the surrogate, plus the surrogate's
/// slack and the evaluation tolerance, fits within `cfg.epsilon`. Running out
/// of iterations is an error carrying the best point found.
pub fn minimize<R, F>(region: &R, objective: &F, cfg: &SolverConfig) -> Result<SolveReport>
where
    R: ConvexRegion + ?Sized,
    F: ConvexObjective + ?Sized,
{
    let start = Instant::now();
    let tol = cfg.epsilon;
    if !(tol > 0.0) {
        return invalid(format!("solver accuracy must be positive, got {tol}"));
    }
    let n = region.dim();
    if n < 2 {
        return invalid("the ellipsoid method needs at least two dimensions");
    }
    let eval_eps = tol / 4.0;
    let slack = objective.surrogate_slack();
    let target = tol - eval_eps - slack;
    if !(target > 0.0) {
        return Err(Error::Precision(format!(
            "surrogate slack {slack:.3e} leaves no room for accuracy {tol:.3e}"
        )));
    }
    let inner = region.inner_radius();
    let outer = region.outer_radius();
    let range = objective.range_bound() + slack;
    let budget = cfg
        .max_iterations
        .unwrap_or_else(|| default_budget(n, outer, inner, tol));
    if budget == 0 {
        return invalid("iteration budget must be at least 1");
    }
    let a0 = region.center();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shallow = 1.0 / (2.0 * n as f64);
    let fd_step = (tol / 10.0).min(1e-6);

    let mut ell = Ellipsoid::ball(n, outer);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut lower = f64::NEG_INFINITY;
    let mut gap = f64::INFINITY;
    let mut gap_trace = Vec::new();
    let mut evaluations = 0usize;
    let mut feasibility_cuts = 0usize;
    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < budget {
        iterations += 1;
        let c: Vec<f64> = ell.center.iter().copied().collect();
        let answer = region.query(&c, tol)?;
        if !answer.verdict {
            feasibility_cuts += 1;
            match cfg.mode {
                SolverMode::SeparationCuts => {
                    let cut = answer.cut.ok_or_else(|| {
                        Error::Numerical("separation oracle rejected without a cut".into())
                    })?;
                    // normal·y ≥ offset  ⇔  (−normal)ᵀ(y − c) ≤ normal·c − offset.
                    let a = -DVector::from_vec(cut.normal.clone());
                    let violation = (cut.offset - cut.value(&c)).max(0.0);
                    let depth = violation / ell.width(&a);
                    ell.cut(&a, depth)?;
                }
                SolverMode::MembershipOnly => {
                    let gc = gauge(region, &a0, &c, tol)?;
                    let steps: Vec<f64> = (0..n)
                        .map(|_| fd_step * (1.0 + 0.5 * rng.random::<f64>()))
                        .collect();
                    let w = central_difference(&c, &steps, |z| gauge(region, &a0, z, tol))?;
                    let a = DVector::from_vec(w);
                    let depth = ((gc - 1.0).max(0.0)) / ell.width(&a) - shallow;
                    ell.cut(&a, depth)?;
                }
            }
            continue;
        }

        evaluations += 1;
        let (f, grad) = match cfg.mode {
            SolverMode::SeparationCuts => objective.surrogate(&c)?,
            SolverMode::MembershipOnly => {
                let f = objective.evaluate(&c, eval_eps)?;
                let steps: Vec<f64> = (0..n)
                    .map(|_| fd_step * (1.0 + 0.5 * rng.random::<f64>()))
                    .collect();
                let g = central_difference(&c, &steps, |z| objective.evaluate(z, eval_eps))?;
                (f, g)
            }
        };
        if best.as_ref().is_none_or(|(fb, _)| f < *fb) {
            best = Some((f, c.clone()));
        }
        let fbest = best.as_ref().map(|b| b.0).expect("set above");
        let a = DVector::from_vec(grad);
        let width = ell.width(&a);
        lower = lower.max(f - width);
        let volume_gap = range * ell.radius_ratio(inner);
        gap = gap.min((fbest - lower).min(volume_gap)).max(0.0);
        gap_trace.push(gap);
        if gap <= target {
            converged = true;
            break;
        }
        if width == 0.0 {
            // Zero gradient: the center minimizes the surrogate.
            gap = 0.0;
            converged = true;
            break;
        }
        let depth = match cfg.mode {
            SolverMode::SeparationCuts => (f - fbest) / width,
            SolverMode::MembershipOnly => (f - fbest) / width - shallow,
        };
        ell.cut(&a, depth)?;
    }

    let (opt_value, opt_point) = match best {
        Some((_, point)) => (objective.evaluate(&point, eval_eps)?, point),
        None => (f64::NAN, Vec::new()),
    };
    let report = SolveReport {
        opt_value,
        opt_point,
        iterations,
        certified_gap: gap + slack + eval_eps,
        wall_time: start.elapsed().as_secs_f64(),
        objective_evaluations: evaluations,
        feasibility_cuts,
        gap_trace,
    };
    if converged {
        Ok(report)
    } else {
        Err(Error::BudgetExceeded {
            budget,
            report: Box::new(report),
        })
    }
}
