//! The residual checks run by `berezin verify`.
//!
//! Every check produces one non-negative residual and a threshold; a check
//! passes when `residual < threshold`. Random operators and states are drawn
//! from a ChaCha stream seeded by the caller, so a run is reproducible bit for
//! bit.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::berezin::{
    analysis, covariance_residual, covariant_symbol, hs_identity_residual, injectivity_sweep, onb_expansion_check,
    Baseline, VERDICT_INJECTIVE,
};
use crate::error::Result;
use crate::heisenberg::{HeisenbergElement, PhasePoint};
use crate::model::{Chart, GridFunction, ModelConfig, OperatorMatrix, OrbitGridFunction, PhaseGrid};
use crate::oracle::{gauss_hermite_matrix_element, oracle_double_sum_ft, oracle_double_sum_ift, Oracle};
use crate::random;
use crate::schroedinger::RepresentationContext;
use crate::transforms::{coefficient_map, fourier_orbit, inverse_fourier_orbit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl CheckResult {
    pub fn new(name: &str, residual: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            residual,
            threshold,
            // NaN fails.
            passed: residual < threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    /// Symbol-map singular values for the truncations swept by the
    /// injectivity check.
    pub injectivity: Vec<Baseline>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn residual_summary(&self) -> BTreeMap<String, f64> {
        self.checks.iter().map(|c| (c.name.clone(), c.residual)).collect()
    }

    /// Fixed-width table, one check per line.
    pub fn table(&self) -> String {
        let mut out = format!("{:<30} {:>12} {:>12}  status\n", "check", "residual", "threshold");
        for c in &self.checks {
            out.push_str(&format!(
                "{:<30} {:>12.3e} {:>12.3e}  {}\n",
                c.name,
                c.residual,
                c.threshold,
                if c.passed { "PASS" } else { "FAIL" }
            ));
        }
        out
    }
}

const RANDOM_TRACE_OPERATORS: usize = 20;
const POSITIVE_OPERATORS: usize = 50;
const REPRODUCING_OPERATORS: usize = 10;
const REPRODUCING_POINTS: usize = 10;
const ONB_OPERATORS: usize = 5;
const ONB_PAIRS: usize = 5;
const OVERLAP_SIDE: usize = 5;
const FOURIER_G: usize = 16;
const HS_MAX_M: usize = 6;
const INJECTIVITY_MAX_M: usize = 4;

/// Runs every check on `cfg`.
pub fn run_verification(cfg: &ModelConfig, seed: u64) -> Result<VerificationReport> {
    cfg.validate()?;
    let ctx = RepresentationContext::new(cfg.clone())?;
    let mut rng = random::rng(seed);
    let mut checks = Vec::new();

    checks.extend(moyal(&ctx)?);
    checks.extend(trace(&ctx, &mut rng)?);
    checks.push(hs(cfg, &mut rng)?);
    checks.extend(positivity(&ctx, &mut rng)?);
    checks.push(reproducing(&ctx, &mut rng)?);
    checks.push(onb(&ctx, &mut rng)?);
    checks.push(covariance(&ctx, &mut rng)?);
    let (inj, baselines) = injectivity(cfg)?;
    checks.extend(inj);
    checks.push(coherent_overlap(cfg)?);
    checks.extend(fourier(cfg, &mut rng)?);

    Ok(VerificationReport {
        checks,
        injectivity: baselines,
    })
}

fn unit_operator(a: OperatorMatrix) -> OperatorMatrix {
    let s = 1.0 / a.op_norm();
    a.combine(
        Complex64::new(s, 0.0),
        &OperatorMatrix::zeros(a.dim()),
        Complex64::new(0.0, 0.0),
    )
    .expect("same dimension")
}

/// Random point of the inner box `|x|_∞ ≤ L/2`.
fn inner_point(rng: &mut impl Rng, n: usize, l: f64) -> PhasePoint {
    let mut c = || rng.random_range(-l / 2.0..=l / 2.0);
    let a = (0..n).map(|_| c()).collect();
    let b = (0..n).map(|_| c()).collect();
    PhasePoint::new(a, b)
}

/// Both orthogonality relations for `f₁, f₂ ∈ {e₀..e₅}` with the window fixed
/// at the Gaussian vector.
fn moyal(ctx: &RepresentationContext) -> Result<Vec<CheckResult>> {
    let phi = ctx.gaussian_vector();
    let count = ctx.dim().min(6);
    let maps: Vec<GridFunction> = (0..count)
        .map(|j| coefficient_map(ctx, &ctx.basis(j), &phi))
        .collect::<Result<_>>()?;
    let wigners: Vec<OrbitGridFunction> = maps.iter().map(inverse_fourier_orbit).collect::<Result<_>>()?;
    let (mut ra, mut rw) = (0.0f64, 0.0f64);
    for i in 0..count {
        for j in 0..count {
            let target = if i == j { 1.0 } else { 0.0 };
            ra = ra.max((maps[i].inner(&maps[j])? - target).norm());
            rw = rw.max((wigners[i].inner(&wigners[j])? - target).norm());
        }
    }
    Ok(vec![
        CheckResult::new("moyal_coefficient", ra, 1e-6),
        CheckResult::new("moyal_wigner", rw, 1e-6),
    ])
}

/// `Tr A = ∫ S(A) dμ`, relative to `‖A‖_tr`, plus the vacuum projector whose
/// both sides equal one.
fn trace(ctx: &RepresentationContext, rng: &mut impl Rng) -> Result<Vec<CheckResult>> {
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_TRACE_OPERATORS {
        let a = random::operator(rng, ctx.dim());
        let integral = covariant_symbol(ctx, &a)?.integral();
        worst = worst.max((a.trace() - integral).norm() / a.trace_norm());
    }
    let phi = ctx.gaussian_vector();
    let p = OperatorMatrix::rank_one(&phi, &phi)?;
    let integral = covariant_symbol(ctx, &p)?.integral();
    let vacuum = (integral - 1.0).norm().max((p.trace() - 1.0).norm());
    Ok(vec![
        CheckResult::new("trace_identity", worst, 1e-6),
        CheckResult::new("trace_vacuum_projector", vacuum, 1e-8),
    ])
}

/// `‖A‖²_HS = ∬ |K^A|² dμ dμ` on a sub-model with `M ≤ 6`; for `n = 1` it
/// runs on a 64-point grid per axis.
fn hs(cfg: &ModelConfig, rng: &mut impl Rng) -> Result<CheckResult> {
    let mut sub = ModelConfig::with_defaults(cfg.n, cfg.lambda, cfg.m.min(HS_MAX_M));
    sub.tol_identity = cfg.tol_identity;
    sub.tol_quadrature = cfg.tol_quadrature;
    if cfg.n == 1 {
        sub.g = 64;
    }
    let ctx = RepresentationContext::new(sub)?;
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let a = random::operator(rng, ctx.dim());
        let hs2 = a.entries().iter().map(|z| z.norm_sqr()).sum::<f64>();
        worst = worst.max(hs_identity_residual(&ctx, &a)? / hs2);
    }
    Ok(CheckResult::new("hs_identity", worst, 1e-5))
}

/// `A ≥ 0 ⇒ S(A) ≥ 0`: reports `max(0, −min Re S)` and `max |Im S|`.
fn positivity(ctx: &RepresentationContext, rng: &mut impl Rng) -> Result<Vec<CheckResult>> {
    let (mut neg, mut imag) = (0.0f64, 0.0f64);
    for _ in 0..POSITIVE_OPERATORS {
        let a = unit_operator(random::positive(rng, ctx.dim()));
        for v in covariant_symbol(ctx, &a)?.values() {
            neg = neg.max(-v.re);
            imag = imag.max(v.im.abs());
        }
    }
    Ok(vec![
        CheckResult::new("positivity_negative_part", neg, 1e-10),
        CheckResult::new("positivity_imaginary_part", imag, 1e-10),
    ])
}

/// `∫ K^A(x, y) (Vf)(y) dμ(y) = (V Af)(x)` for unit `A`, unit `f`, at grid
/// points of the inner box.
fn reproducing(ctx: &RepresentationContext, rng: &mut impl Rng) -> Result<CheckResult> {
    let grid = ctx.grid().clone();
    let half = ctx.cfg().l / 2.0;
    let inner: Vec<usize> = (0..grid.len()).filter(|&k| grid.point(k).norm_inf() <= half).collect();
    let mut worst = 0.0f64;
    for _ in 0..REPRODUCING_OPERATORS {
        let a = unit_operator(random::operator(rng, ctx.dim()));
        let f = random::unit_state(rng, ctx.n(), ctx.truncation());
        let vf = analysis(ctx, &f)?;
        let vaf = analysis(ctx, &a.apply(&f)?)?;
        let adj = a.adjoint();
        for _ in 0..REPRODUCING_POINTS {
            let k = inner[rng.random_range(0..inner.len())];
            let x = grid.point(k);
            // K^A(x, y) = (φ_y | A* φ_x), a grid function of y.
            let ax = adj.apply(&ctx.coherent_state(&x)?)?;
            let kernel_row = analysis(ctx, &ax)?;
            let integral: Complex64 = kernel_row
                .values()
                .iter()
                .zip(vf.values())
                .map(|(kv, fv)| kv.conj() * fv)
                .sum::<Complex64>()
                * grid.weight();
            worst = worst.max((integral - vaf.values()[k]).norm());
        }
    }
    Ok(CheckResult::new("reproducing_formula", worst, 1e-6))
}

fn onb(ctx: &RepresentationContext, rng: &mut impl Rng) -> Result<CheckResult> {
    let l = ctx.cfg().l;
    let mut worst = 0.0f64;
    for _ in 0..ONB_OPERATORS {
        let a = unit_operator(random::operator(rng, ctx.dim()));
        for _ in 0..ONB_PAIRS {
            let x = inner_point(rng, ctx.n(), l);
            let y = inner_point(rng, ctx.n(), l);
            worst = worst.max(onb_expansion_check(ctx, &a, &x, &y)?);
        }
    }
    Ok(CheckResult::new("onb_expansion", worst, 1e-10))
}

/// `S(π(g)* A π(g))(z) = S(A)(g·z)` for a few grid-step displacements.
fn covariance(ctx: &RepresentationContext, rng: &mut impl Rng) -> Result<CheckResult> {
    let n = ctx.n();
    let h = ctx.grid().step();
    let a = unit_operator(random::hermitian(rng, ctx.dim()));
    let mut worst = 0.0f64;
    for (ka, kb, c) in [(1.0, 0.0, 0.0), (0.0, -2.0, 0.3), (3.0, 1.0, -1.0)] {
        let mut av = vec![0.0; n];
        let mut bv = vec![0.0; n];
        av[0] = ka * h;
        bv[n - 1] = kb * h;
        let g = HeisenbergElement::new(av, bv, c)?;
        worst = worst.max(covariance_residual(ctx, &a, &g)?);
    }
    Ok(CheckResult::new("covariance", worst, 1e-6))
}

/// Smallest singular value of the symbol map over `M = 1..=min(M, 4)` on
/// default geometry, and for `M = 1` its closed form `2^{−n/2}`.
fn injectivity(cfg: &ModelConfig) -> Result<(Vec<CheckResult>, Vec<Baseline>)> {
    let reports = injectivity_sweep(cfg, 1..=cfg.m.min(INJECTIVITY_MAX_M))?;
    let baselines = reports.first().map(|r| r.baselines.clone()).unwrap_or_default();
    let sigma_min = baselines.iter().map(|b| b.sigma_min).fold(f64::INFINITY, f64::min);
    let all_injective = baselines.iter().all(|b| b.verdict == VERDICT_INJECTIVE);
    // Report a failed verdict as a residual above threshold.
    let margin = if all_injective { 1e-4 / sigma_min } else { f64::INFINITY };
    let closed = 2f64.powf(-(cfg.n as f64) / 2.0);
    let m1 = (baselines[0].sigma_min - closed).abs();
    Ok((
        vec![
            CheckResult::new("injectivity_margin", margin, 1.0),
            CheckResult::new("injectivity_m1_closed_form", m1, 1e-6),
        ],
        baselines,
    ))
}

/// `|(φ | φ_x)| = e^{−λ|x|²/4}` at 25 points from the model and from both
/// position-space oracles.
fn coherent_overlap(cfg: &ModelConfig) -> Result<CheckResult> {
    let ctx = RepresentationContext::new(cfg.clone())?;
    let one = ModelConfig::with_defaults(1, cfg.lambda, cfg.m);
    let oracle = Oracle::new(&one)?;
    let phi = ctx.gaussian_vector();
    let span = cfg.l / 4.0;
    let mut worst = 0.0f64;
    for i in 0..OVERLAP_SIDE {
        for j in 0..OVERLAP_SIDE {
            let step = |k: usize| -span + 2.0 * span * k as f64 / (OVERLAP_SIDE - 1) as f64;
            let (a, b) = (step(i), step(j));
            let exact = (-cfg.lambda * (a * a + b * b) / 4.0).exp();
            let mut av = vec![0.0; cfg.n];
            let mut bv = vec![0.0; cfg.n];
            av[0] = a;
            bv[0] = b;
            let model = phi.inner(&ctx.coherent_state(&PhasePoint::new(av, bv))?)?.norm();
            let riemann = oracle.vacuum_overlap(a, b)?.norm();
            let g = HeisenbergElement::new(vec![a], vec![b], 0.0)?;
            let gh = gauss_hermite_matrix_element(cfg.lambda, &g, 0, 0, 64)?.norm();
            for v in [model, riemann, gh] {
                worst = worst.max((v - exact).abs());
            }
        }
    }
    Ok(CheckResult::new("coherent_overlap", worst, 1e-8))
}

/// Parseval and FFT-vs-double-sum agreement on a 16 × 16 grid with the
/// configured `λ` and `L`.
fn fourier(cfg: &ModelConfig, rng: &mut impl Rng) -> Result<Vec<CheckResult>> {
    let density = cfg.lambda / (2.0 * std::f64::consts::PI);
    let phase = Arc::new(PhaseGrid::new(1, cfg.l, FOURIER_G, density, Chart::Phase)?);
    let orbit = Arc::new(phase.dual());
    let mut draw = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let f = GridFunction::new(phase.clone(), (0..phase.len()).map(|_| draw()).collect())?;
    let a = OrbitGridFunction::new(orbit.clone(), (0..orbit.len()).map(|_| draw()).collect())?;

    let fa = fourier_orbit(&a)?;
    let ifa = inverse_fourier_orbit(&f)?;
    let parseval = ((fa.norm() - a.norm()) / a.norm())
        .abs()
        .max(((ifa.norm() - f.norm()) / f.norm()).abs());
    let agreement = fa
        .max_abs_diff(&oracle_double_sum_ft(&a)?)?
        .max(ifa.max_abs_diff(&oracle_double_sum_ift(&f)?)?);
    Ok(vec![
        CheckResult::new("fourier_parseval", parseval, 1e-8),
        CheckResult::new("fourier_double_sum", agreement, 1e-10),
    ])
}
