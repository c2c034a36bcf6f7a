//! The acceptance suite, runnable from the binary (`dnorm selftest`) and from
//! the `acceptance` test target.
//!
//! `Scale::Full` runs every criterion at its published sample size;
//! `Scale::Quick` runs the same checks, at the same tolerances, on fewer
//! samples.

use std::io::Write;
use std::time::Instant;

use clap::ValueEnum;
use dnorm_core::coords::{distance_to_states, membership};
use dnorm_core::matkernel::{eig_hermitian, psd_sqrt, spectral_norm, trace_norm};
use dnorm_core::objective::Objective;
use dnorm_core::sample;
use dnorm_core::solver::FaultInjection;
use dnorm_core::superop::{apply_derived, apply_stinespring};
use dnorm_core::{
    bruteforce_diamond, diamond_norm, fidelity_seesaw, natural_from_stinespring, shrink,
    sqrt_fidelity, stinespring_from_natural, stinespring_of_difference, tensor_superop,
    unitary_diamond, BruteForceConfig, DerivedMap, FeasibleSetSpec, HermMatrix, PauliBasis,
    SolverConfig, StinespringPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::{compute, render, ComputeOptions, Method, Mode, OutputFormat};
use crate::files::ChannelFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    fn pick(self, full: usize, quick: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Quick => quick,
        }
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "identity channel"),
    (2, "zero map"),
    (3, "unitary differences"),
    (4, "oracle concordance"),
    (5, "ball containments"),
    (6, "membership-oracle contract"),
    (7, "convexity and concavity"),
    (8, "perturbation bounds"),
    (9, "gradient check"),
    (10, "multiplicativity"),
    (11, "determinism"),
    (12, "conversion round-trips"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {:<28} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

type Check = std::result::Result<String, String>;

struct Ctx {
    scale: Scale,
    fault: Option<FaultInjection>,
}

impl Ctx {
    fn rng(&self, id: u8) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0x5eed_0000 + id as u64)
    }

    fn diamond(&self, p: &StinespringPair, eps: f64) -> Result<f64, String> {
        let mut cfg = SolverConfig::new(eps);
        cfg.fault = self.fault;
        diamond_norm(p, &cfg)
            .map(|r| r.value)
            .map_err(|e| e.to_string())
    }
}

fn oracle_cfg() -> BruteForceConfig {
    BruteForceConfig::default()
}

fn err(e: dnorm_core::Error) -> String {
    e.to_string()
}

fn c1_identity(cx: &Ctx) -> Check {
    let mut worst = 0.0f64;
    for (n, limit) in [(2usize, 60.0), (4, 1200.0)] {
        let start = Instant::now();
        let v = cx.diamond(&StinespringPair::identity(n).map_err(err)?, 1e-3)?;
        let secs = start.elapsed().as_secs_f64();
        if (v - 1.0).abs() > 1e-3 {
            return Err(format!("N={n}: value {v}"));
        }
        if secs > limit {
            return Err(format!("N={n}: {secs:.1}s exceeds {limit}s"));
        }
        worst = worst.max((v - 1.0).abs());
    }
    Ok(format!("max |c-1| = {worst:.2e}"))
}

fn c2_zero(cx: &Ctx) -> Check {
    for n in [2usize, 4] {
        let start = Instant::now();
        let v = cx.diamond(&StinespringPair::zero(n).map_err(err)?, 1e-3)?;
        let secs = start.elapsed().as_secs_f64();
        if v.abs() > 1e-3 || secs > 1.0 {
            return Err(format!("N={n}: value {v} in {secs:.3}s"));
        }
    }
    Ok("c = 0 via short-circuit".into())
}

fn c3_unitary(cx: &Ctx) -> Check {
    let mut rng = cx.rng(3);
    let mut worst = 0.0f64;
    for k in 0..cx.scale.pick(10, 3) {
        let u = sample::random_unitary(2, &mut rng);
        let v = sample::random_unitary(2, &mut rng);
        let exact = unitary_diamond(&u, &v).map_err(err)?;
        let c = cx.diamond(&stinespring_of_difference(&u, &v).map_err(err)?, 1e-2)?;
        let d = (c - exact).abs();
        if d > 2e-2 {
            return Err(format!("pair {k}: {c} vs closed form {exact}"));
        }
        worst = worst.max(d);
    }
    Ok(format!("max deviation {worst:.2e}"))
}

fn c4_concordance(cx: &Ctx) -> Check {
    let mut rng = cx.rng(4);
    let cfg = oracle_cfg();
    let (mut worst_solver, mut worst_oracles) = (0.0f64, 0.0f64);
    for k in 0..cx.scale.pick(20, 4) {
        let p = sample::random_channel_difference(2, 2, &mut rng);
        let bf = bruteforce_diamond(&p, &cfg).map_err(err)?;
        let fs = fidelity_seesaw(&p.derived(), &cfg).map_err(err)?;
        let c = cx.diamond(&p, 1e-2)?;
        let ds = (c - bf).abs().max((c - fs).abs());
        let dor = (bf - fs).abs();
        if ds > 2e-2 || dor > 1e-3 {
            return Err(format!("instance {k}: solver {c}, bruteforce {bf}, seesaw {fs}"));
        }
        worst_solver = worst_solver.max(ds);
        worst_oracles = worst_oracles.max(dor);
    }
    Ok(format!(
        "solver vs oracles {worst_solver:.2e}, oracle vs oracle {worst_oracles:.2e}"
    ))
}

fn random_in_ball<R: Rng>(dim: usize, radius: f64, rng: &mut R) -> Vec<f64> {
    let g: Vec<f64> = (0..dim)
        .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect();
    let len = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    g.iter().map(|v| v * r / len).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn c5_balls(cx: &Ctx) -> Check {
    let mut rng = cx.rng(5);
    let count = cx.scale.pick(1000, 200);
    let mut min_eig = f64::INFINITY;
    let mut max_norm = 0.0f64;
    for n in [2usize, 4, 8] {
        let basis = PauliBasis::shared(n).map_err(err)?;
        let r = 1.0 / (2.0 * (n as f64).sqrt());
        for _ in 0..count {
            let x = random_in_ball(basis.n_coords(), r, &mut rng);
            let lam = basis.decode(&x).map_err(err)?.min_eigenvalue();
            if lam < 0.0 {
                return Err(format!("N={n}: ball point decodes with eigenvalue {lam}"));
            }
            min_eig = min_eig.min(lam);
        }
        for k in 0..count {
            let rho = if k % 2 == 0 {
                sample::random_density(n, &mut rng)
            } else {
                sample::random_pure_density(n, &mut rng)
            };
            let x = dnorm_core::encode(&rho).map_err(err)?;
            let len = norm(x.as_slice());
            if len > n as f64 {
                return Err(format!("N={n}: state encodes with norm {len}"));
            }
            max_norm = max_norm.max(len / n as f64);
        }
    }
    Ok(format!(
        "min decoded eigenvalue {min_eig:.2e}, max |x|/N {max_norm:.3}"
    ))
}

fn c6_membership(cx: &Ctx) -> Check {
    let mut rng = cx.rng(6);
    let count = cx.scale.pick(500, 100);
    let mut summary = Vec::new();
    for eps in [1e-2, 1e-4] {
        let (mut deep, mut outside, mut tries) = (0usize, 0usize, 0usize);
        while deep + outside < count {
            tries += 1;
            if tries > 50 * count {
                return Err(format!("eps={eps}: could not classify enough points"));
            }
            let n = if tries % 2 == 0 { 2 } else { 4 };
            let alpha = if tries % 3 == 0 { 0.1 } else { 0.0 };
            let set = shrink(&FeasibleSetSpec::states(n).map_err(err)?, alpha).map_err(err)?;
            let basis = PauliBasis::shared(n).map_err(err)?;
            let rho = if rng.random::<bool>() {
                sample::random_pure_density(n, &mut rng)
            } else {
                sample::random_density(n, &mut rng)
            };
            let base = basis.coordinates_of(rho.as_matrix());
            let scale = 1.0 + eps * rng.random_range(-20.0..20.0);
            let jitter = random_in_ball(base.len(), 5.0 * eps, &mut rng);
            let x: Vec<f64> = base
                .iter()
                .zip(&jitter)
                .map(|(b, j)| (1.0 - alpha) * scale * b + j)
                .collect();

            let lam = eig_hermitian(&basis.decode(&x).map_err(err)?).min_eigenvalue();
            let is_deep = lam >= set.threshold() + eps / (n as f64).sqrt();
            let scaled: Vec<f64> = x.iter().map(|v| v / (1.0 - alpha)).collect();
            let dist = (1.0 - alpha) * distance_to_states(n, &scaled).map_err(err)?;
            let is_outside = dist > eps;
            if !is_deep && !is_outside {
                continue;
            }
            let verdict = membership(&set, &x, eps).map_err(err)?.verdict;
            if is_deep {
                deep += 1;
                if !verdict {
                    return Err(format!("eps={eps}: deep point rejected (N={n}, alpha={alpha})"));
                }
            } else {
                outside += 1;
                if verdict {
                    return Err(format!(
                        "eps={eps}: point at distance {dist:.3e} accepted (N={n}, alpha={alpha})"
                    ));
                }
            }
        }
        summary.push(format!("eps={eps:e}: {deep} deep, {outside} outside"));
    }
    Ok(summary.join("; "))
}

fn interior_point<R: Rng>(basis: &PauliBasis, rng: &mut R) -> Vec<f64> {
    let rho = sample::random_density(basis.dim(), rng);
    basis.coordinates_of(rho.as_matrix())
}

fn c7_convexity(cx: &Ctx) -> Check {
    let mut rng = cx.rng(7);
    let count = cx.scale.pick(1000, 200);
    let objectives = [
        Objective::new(&sample::random_channel_difference(2, 2, &mut rng)).map_err(err)?,
        Objective::new(&sample::random_channel_difference(4, 1, &mut rng)).map_err(err)?,
        Objective::new(&sample::random_stinespring(2, 3, &mut rng).scaled(3.0, 1.0))
            .map_err(err)?,
    ];
    let mut worst = f64::NEG_INFINITY;
    for k in 0..count {
        let obj = &objectives[k % objectives.len()];
        let basis = PauliBasis::shared(obj.dim_v()).map_err(err)?;
        let pts: Vec<Vec<f64>> = (0..4).map(|_| interior_point(&basis, &mut rng)).collect();
        let mid = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(u, v)| 0.5 * (u + v)).collect()
        };
        let lhs = obj
            .g_exact(&mid(&pts[0], &pts[2]), &mid(&pts[1], &pts[3]))
            .map_err(err)?;
        let rhs = 0.5
            * (obj.g_exact(&pts[0], &pts[1]).map_err(err)?
                + obj.g_exact(&pts[2], &pts[3]).map_err(err)?);
        worst = worst.max(lhs - rhs);
        if lhs > rhs + 1e-9 {
            return Err(format!("midpoint convexity fails by {:.3e}", lhs - rhs));
        }
    }
    let mut worst_f = f64::NEG_INFINITY;
    for _ in 0..count {
        let n = rng.random_range(2..=4);
        let mut psd = || sample::random_density(n, &mut rng).scale(rng.random_range(0.1..3.0));
        let (r1, s1, r2, s2) = (psd(), psd(), psd(), psd());
        let t: f64 = rng.random();
        let mix = |a: &HermMatrix, b: &HermMatrix| a.scale(t).add(&b.scale(1.0 - t));
        let lhs = sqrt_fidelity(&mix(&r1, &r2), &mix(&s1, &s2)).map_err(err)?;
        let rhs = t * sqrt_fidelity(&r1, &s1).map_err(err)?
            + (1.0 - t) * sqrt_fidelity(&r2, &s2).map_err(err)?;
        worst_f = worst_f.max(rhs - lhs);
        if lhs < rhs - 1e-9 {
            return Err(format!("joint concavity fails by {:.3e}", rhs - lhs));
        }
    }
    Ok(format!(
        "worst convexity excess {worst:.1e}, worst concavity excess {worst_f:.1e}"
    ))
}

fn hermitian_of_norm<R: Rng>(n: usize, size: f64, rng: &mut R) -> dnorm_core::CMatrix {
    let h = sample::random_hermitian(n, rng).into_matrix();
    let s = spectral_norm(&h);
    h.unscale(s / size)
}

fn c8_perturbation(cx: &Ctx) -> Check {
    let mut rng = cx.rng(8);
    let count = cx.scale.pick(200, 50);
    let (mut worst_trace, mut worst_root) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for k in 0..count {
        let n = if k % 2 == 0 { 2 } else { 4 };
        let p = match k % 3 {
            0 => sample::random_channel_difference(n, 2, &mut rng),
            1 => sample::random_stinespring(n, 2, &mut rng).scaled(5.0, 0.5),
            _ => sample::random_cp(n, 3, &mut rng),
        };
        let d = p.derived();
        let rho = sample::random_density(n, &mut rng);
        let xi = sample::random_density(n, &mut rng);
        let m1 = apply_derived(&d, DerivedMap::T1, &rho).map_err(err)?;
        let m2 = apply_derived(&d, DerivedMap::T2, &xi).map_err(err)?;
        let r1 = psd_sqrt(&m1, true).map_err(err)?.into_matrix();
        let r2 = psd_sqrt(&m2, true).map_err(err)?.into_matrix();
        let dim = r1.nrows();
        let zeta = 10f64.powf(rng.random_range(-8.0..-2.0));
        let s1 = &r1 + hermitian_of_norm(dim, zeta, &mut rng);
        let s2 = &r2 + hermitian_of_norm(dim, zeta, &mut rng);
        let lhs = (trace_norm(&(&s1 * &s2)) - trace_norm(&(&r1 * &r2))).abs();
        let d_eff = n.max(dim) as f64;
        let rhs = d_eff * zeta * (spectral_norm(&s1) + spectral_norm(&r2));
        worst_trace = worst_trace.max(lhs / rhs);
        if lhs > rhs {
            return Err(format!("instance {k}: trace-norm perturbation {lhs:.3e} > {rhs:.3e}"));
        }

        let root = spectral_norm(&r1);
        let bound = spectral_norm(p.b());
        worst_root = worst_root.max(root / bound);
        if root > bound * (1.0 + 1e-12) {
            return Err(format!("instance {k}: |sqrt T1(rho)| = {root} > |B| = {bound}"));
        }
    }
    Ok(format!(
        "max ratio to bound: {worst_trace:.3} (trace norm), {worst_root:.3} (root)"
    ))
}

fn c9_gradient(cx: &Ctx) -> Check {
    let mut rng = cx.rng(9);
    let count = cx.scale.pick(100, 20);
    let objectives = [
        Objective::new(&sample::random_channel_difference(2, 1, &mut rng)).map_err(err)?,
        Objective::new(&sample::random_channel_difference(2, 2, &mut rng)).map_err(err)?,
        Objective::new(&sample::random_stinespring(2, 2, &mut rng)).map_err(err)?,
    ];
    let h = 1e-5;
    let mut worst = 0.0f64;
    for k in 0..count {
        let obj = &objectives[k % objectives.len()];
        let basis = PauliBasis::shared(obj.dim_v()).map_err(err)?;
        let shrink_in = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|c| 0.9 * c).collect() };
        let x = shrink_in(interior_point(&basis, &mut rng));
        let y = shrink_in(interior_point(&basis, &mut rng));
        let (gx, gy) = obj.g_subgradient(&x, &y, obj.default_delta()).map_err(err)?;
        let analytic: Vec<f64> = gx.into_iter().chain(gy).collect();
        let mut z: Vec<f64> = x.iter().chain(&y).copied().collect();
        let m = x.len();
        let mut fd = Vec::with_capacity(z.len());
        for i in 0..z.len() {
            let orig = z[i];
            z[i] = orig + h;
            let up = obj.g_exact(&z[..m], &z[m..]).map_err(err)?;
            z[i] = orig - h;
            let down = obj.g_exact(&z[..m], &z[m..]).map_err(err)?;
            z[i] = orig;
            fd.push((up - down) / (2.0 * h));
        }
        let diff: Vec<f64> = analytic.iter().zip(&fd).map(|(a, b)| a - b).collect();
        let rel = norm(&diff) / norm(&fd).max(1e-12);
        worst = worst.max(rel);
        if rel > 1e-3 {
            return Err(format!("point {k}: relative error {rel:.3e}"));
        }
    }
    Ok(format!("max relative error {worst:.2e}"))
}

fn c10_multiplicativity(cx: &Ctx) -> Check {
    let mut rng = cx.rng(10);
    let cfg = oracle_cfg();
    let mut worst = 0.0f64;
    let mut first = None;
    for k in 0..cx.scale.pick(5, 2) {
        let p = sample::random_channel_difference(2, 2, &mut rng);
        let q = sample::random_channel_difference(2, 2, &mut rng);
        let pq = tensor_superop(&p, &q);
        let joint = bruteforce_diamond(&pq, &cfg).map_err(err)?;
        let prod = bruteforce_diamond(&p, &cfg).map_err(err)? * bruteforce_diamond(&q, &cfg).map_err(err)?;
        let d = (joint - prod).abs();
        if d > 5e-3 {
            return Err(format!("pair {k}: product {joint} vs {prod}"));
        }
        worst = worst.max(d);
        first.get_or_insert((pq, prod));
    }
    let (pq, prod) = first.expect("at least one pair");
    let eps = 1e-2;
    let c = cx.diamond(&pq, eps)?;
    if (c - prod).abs() > 2.0 * eps + 5e-3 {
        return Err(format!("solver on product {c} vs {prod}"));
    }
    Ok(format!(
        "max oracle deviation {worst:.2e}, solver on product off by {:.2e}",
        (c - prod).abs()
    ))
}

fn c11_determinism(cx: &Ctx) -> Check {
    let mut rng = cx.rng(11);
    let file = ChannelFile::from_pair(&sample::random_channel_difference(2, 2, &mut rng));
    let mut runs = vec![
        ComputeOptions::new(1e-2, Method::Convex),
        ComputeOptions::new(1e-3, Method::Bruteforce),
    ];
    let mut membership_only = ComputeOptions::new(1e-2, Method::Convex);
    membership_only.mode = Mode::MembershipOnly;
    membership_only.seed = 7;
    runs.push(membership_only);
    for opts in &mut runs {
        opts.fault = cx.fault;
        let once = || -> Result<String, String> {
            let r = compute(&file, opts).map_err(|e| e.message().to_string())?;
            Ok(render(&r, OutputFormat::Json))
        };
        let (a, b) = (once()?, once()?);
        if a != b {
            return Err(format!("{:?}/{:?}: outputs differ", opts.method, opts.mode));
        }
    }
    Ok(format!("{} configurations byte-identical", runs.len()))
}

fn c12_round_trips(cx: &Ctx) -> Check {
    let mut rng = cx.rng(12);
    let mut worst = 0.0f64;
    for k in 0..cx.scale.pick(50, 10) {
        let n = if k % 2 == 0 { 2 } else { 4 };
        let dim_a = 1 + k % 4;
        let p = match k % 3 {
            0 => sample::random_stinespring(n, dim_a, &mut rng),
            1 => sample::random_cp(n, dim_a, &mut rng),
            _ => sample::random_channel_difference(n, 1 + k % 2, &mut rng),
        };
        let nat = natural_from_stinespring(&p);
        let back = stinespring_from_natural(&nat);
        let nat2 = natural_from_stinespring(&back);
        let scale = nat.matrix().norm().max(1.0);
        let e_nat = (nat.matrix() - nat2.matrix()).norm() / scale;
        let x = sample::ginibre(n, n, &mut rng);
        let e_act = (apply_stinespring(&p, &x).map_err(err)? - apply_stinespring(&back, &x).map_err(err)?)
            .norm()
            / scale;
        let e = e_nat.max(e_act);
        worst = worst.max(e);
        if e > 1e-9 {
            return Err(format!("map {k}: round-trip error {e:.3e}"));
        }
    }
    Ok(format!("max round-trip error {worst:.2e}"))
}

pub fn run_criterion(id: u8, scale: Scale, fault: Option<FaultInjection>) -> Outcome {
    let cx = Ctx { scale, fault };
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .unwrap_or("unknown");
    let start = Instant::now();
    let result = match id {
        1 => c1_identity(&cx),
        2 => c2_zero(&cx),
        3 => c3_unitary(&cx),
        4 => c4_concordance(&cx),
        5 => c5_balls(&cx),
        6 => c6_membership(&cx),
        7 => c7_convexity(&cx),
        8 => c8_perturbation(&cx),
        9 => c9_gradient(&cx),
        10 => c10_multiplicativity(&cx),
        11 => c11_determinism(&cx),
        12 => c12_round_trips(&cx),
        _ => Err(format!("no criterion {id}")),
    };
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs every criterion, printing one line per criterion as it finishes.
/// Returns the number of failures.
pub fn run_all(scale: Scale, fault: Option<FaultInjection>, out: &mut dyn Write) -> usize {
    let mut failures = 0;
    for (id, _) in CRITERIA {
        let o = run_criterion(id, scale, fault);
        if !o.passed {
            failures += 1;
        }
        let _ = writeln!(out, "{}", o.line());
    }
    let _ = writeln!(
        out,
        "{} of {} criteria passed",
        CRITERIA.len() - failures,
        CRITERIA.len()
    );
    failures
}
