//! Reproducing kernel, full symbol, and Berezin covariant symbol.
//!
//! With a scalar multiplier space the evaluation functional at `x` on
//! `K = Ran V` is pairing against `φ_x`, and `V` is unitary onto `K`, so every
//! operator `T` on `K` is represented by `A = V* T V` acting on the Hermite
//! truncation. In these terms
//!
//! * `K(x, y) = K_x K_y* = (φ_y | φ_x)`, so that `K_y = K(·, y) = Vφ_y`,
//! * `K^A(x, y) = (A φ_y | φ_x)`,
//! * `S(A)(x) = (A φ_x | φ_x)`.
//!
//! Coherent states are the truncated vectors `Pφ_x`; since every `A` here
//! satisfies `A = PAP`, the symbols are exact and `K` is the reproducing
//! kernel of the truncated space `V(Ran P)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{multiply, project_to_phase, HeisenbergElement, PhasePoint};
use crate::model::grid::compensated_sum;
use crate::model::{hs_inner, GridFunction, HermiteState, ModelConfig, OperatorMatrix};
use crate::schroedinger::{apply_per_axis, extended_truncation, RepresentationContext};

pub const VERDICT_INJECTIVE: &str = "injective-at-truncation";
pub const VERDICT_NOT_CERTIFIED: &str = "not-certified";

fn pair(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

fn matvec(a: &OperatorMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let e = a.entries();
    (0..e.nrows())
        .map(|i| (0..e.ncols()).map(|j| e[(i, j)] * v[j]).sum())
        .collect()
}

fn check_operator(ctx: &RepresentationContext, a: &OperatorMatrix) -> Result<()> {
    if a.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch {
            expected: ctx.dim(),
            found: a.dim(),
        });
    }
    Ok(())
}

fn coherent(ctx: &RepresentationContext, x: &PhasePoint) -> Result<Vec<Complex64>> {
    Ok(ctx.coherent_state(x)?.coeffs().to_vec())
}

/// Coherent-state coefficients for every grid point, row-major `N × dim`.
fn coherent_table(ctx: &RepresentationContext) -> Vec<Vec<Complex64>> {
    let grid = ctx.grid();
    (0..grid.len())
        .into_par_iter()
        .map(|k| ctx.coherent_coefficients(&grid.coords(k), ctx.truncation()))
        .collect()
}

/// `K(x, y) = (φ_y | φ_x)`.
pub fn kernel(ctx: &RepresentationContext, x: &PhasePoint, y: &PhasePoint) -> Result<Complex64> {
    Ok(pair(&coherent(ctx, y)?, &coherent(ctx, x)?))
}

/// `K_y = K(·, y)` sampled on the grid.
pub fn kernel_section(ctx: &RepresentationContext, y: &PhasePoint) -> Result<GridFunction> {
    let cy = coherent(ctx, y)?;
    let values = coherent_table(ctx).iter().map(|cx| pair(&cy, cx)).collect();
    GridFunction::new(ctx.grid().clone(), values)
}

/// `(Vf)(x) = (f | φ_x)` on the grid.
pub fn analysis(ctx: &RepresentationContext, f: &HermiteState) -> Result<GridFunction> {
    ctx.require_state(f)?;
    let values = coherent_table(ctx).iter().map(|cx| pair(f.coeffs(), cx)).collect();
    GridFunction::new(ctx.grid().clone(), values)
}

/// `K^A(x, y) = (A φ_y | φ_x)`.
pub fn full_symbol(
    ctx: &RepresentationContext,
    a: &OperatorMatrix,
    x: &PhasePoint,
    y: &PhasePoint,
) -> Result<Complex64> {
    check_operator(ctx, a)?;
    Ok(pair(&matvec(a, &coherent(ctx, y)?), &coherent(ctx, x)?))
}

/// `|K^A(x, y) − Σ_j (Ve_j)(x) conj((VA*e_j)(y))|`, an exact identity on the
/// truncation.
pub fn onb_expansion_check(
    ctx: &RepresentationContext,
    a: &OperatorMatrix,
    x: &PhasePoint,
    y: &PhasePoint,
) -> Result<f64> {
    let lhs = full_symbol(ctx, a, x, y)?;
    let cx = coherent(ctx, x)?;
    let cy = coherent(ctx, y)?;
    let adj = a.adjoint();
    let rhs: Complex64 = (0..ctx.dim())
        .map(|j| {
            let ej = ctx.basis(j);
            let ve_j = pair(ej.coeffs(), &cx);
            let va_ej = pair(adj.apply(&ej).expect("dimension checked").coeffs(), &cy);
            ve_j * va_ej.conj()
        })
        .sum();
    Ok((lhs - rhs).norm())
}

/// `∫ K^A(x, y) (Vf)(y) dμ(y)` by Riemann sum; approximates `(V(Af))(x)`.
pub fn reconstruct(
    ctx: &RepresentationContext,
    a: &OperatorMatrix,
    f: &HermiteState,
    x: &PhasePoint,
) -> Result<Complex64> {
    check_operator(ctx, a)?;
    ctx.require_state(f)?;
    let cx = coherent(ctx, x)?;
    // K^A(x, y) = (A φ_y | φ_x) = (φ_y | A* φ_x).
    let adj_x = matvec(&a.adjoint(), &cx);
    let table = coherent_table(ctx);
    let sum = compensated_sum(table.iter().map(|cy| pair(cy, &adj_x) * pair(f.coeffs(), cy)));
    Ok(sum * ctx.grid().weight())
}

/// `S(A)(x) = (A φ_x | φ_x)` on the grid.
pub fn covariant_symbol(ctx: &RepresentationContext, a: &OperatorMatrix) -> Result<GridFunction> {
    check_operator(ctx, a)?;
    let values = coherent_table(ctx)
        .par_iter()
        .map(|cx| pair(&matvec(a, cx), cx))
        .collect();
    GridFunction::new(ctx.grid().clone(), values)
}

/// `|Tr A − ∫ S(A) dμ|`.
pub fn trace_identity_residual(ctx: &RepresentationContext, a: &OperatorMatrix) -> Result<f64> {
    let integral = covariant_symbol(ctx, a)?.integral();
    Ok((a.trace() - integral).norm())
}

/// `R = Σ_x w φ_x φ_x*`, the grid quadrature of the resolution of identity.
pub fn frame_operator(ctx: &RepresentationContext) -> OperatorMatrix {
    let dim = ctx.dim();
    let w = ctx.grid().weight();
    let table = coherent_table(ctx);
    let zero = DMatrix::<Complex64>::zeros(dim, dim);
    let r = table
        .par_iter()
        .fold(
            || zero.clone(),
            |mut acc, c| {
                for i in 0..dim {
                    for j in 0..dim {
                        acc[(i, j)] += c[i] * c[j].conj();
                    }
                }
                acc
            },
        )
        .reduce(|| zero.clone(), |a, b| a + b);
    OperatorMatrix::new(r * Complex64::new(w, 0.0)).expect("finite")
}

/// `|‖A‖²_HS − ∬ |K^A(x, y)|² dμ(x) dμ(y)|` with the double Riemann sum
/// folded into `Tr(R A R A*)`, `R` the [`frame_operator`].
pub fn hs_identity_residual(ctx: &RepresentationContext, a: &OperatorMatrix) -> Result<f64> {
    check_operator(ctx, a)?;
    let r = frame_operator(ctx);
    let quad = r.compose(a)?.compose(&r)?.compose(&a.adjoint())?.trace().re;
    Ok((hs_inner(a, a)?.re - quad).abs())
}

/// Largest deviation of `S(π(g)* A π(g))(z)` from `S(A)(g·z)` over grid points
/// `z` with `z` and `g·z` inside the half-width `L/2` box.
///
/// The left side is evaluated as `(A v | v)` with `v = P π(g) φ_z`, where
/// `φ_z` is resolved to an extended truncation large enough that the
/// compression does not leak; the right side is read off the grid.
pub fn covariance_residual(ctx: &RepresentationContext, a: &OperatorMatrix, g: &HeisenbergElement) -> Result<f64> {
    check_operator(ctx, a)?;
    let cfg = ctx.cfg();
    let grid = ctx.grid().clone();
    let half = cfg.l / 2.0;
    if g.n() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n,
            found: g.n(),
        });
    }
    if g.displacement_norm() > half {
        return Err(Error::DisplacementOutOfRange {
            norm: g.displacement_norm(),
            limit: half,
        });
    }
    let h = grid.step();
    for x in g.a.iter().chain(&g.b) {
        let r = x / h;
        if (r - r.round()).abs() > 1e-9 {
            return Err(Error::NotCommensurate {
                step: h,
                detail: format!("displacement component {x} is {r} steps"),
            });
        }
    }

    let m = cfg.m;
    let wide = extended_truncation(cfg.lambda * half * half, m, 1e-30);
    let blocks = ctx.displacement_blocks(&g.a, &g.b, m, wide);
    let scalar = Complex64::from_polar(1.0, cfg.lambda * g.c);
    let symbol = covariant_symbol(ctx, a)?;
    let n = cfg.n;

    let residuals: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .filter_map(|k| {
            let z = grid.point(k);
            if z.norm_inf() > half {
                return None;
            }
            let target = project_to_phase(&multiply(g, &z.to_element()).ok()?);
            if target.norm_inf() > half {
                return None;
            }
            let idx = grid.locate(&target.coords())?;
            let per_axis: Vec<DMatrix<Complex64>> = (0..n)
                .map(|ax| {
                    let col = ctx.coherent_coefficients(&[z.a[ax], z.b[ax]], wide);
                    &blocks[ax] * DMatrix::from_column_slice(wide, 1, &col)
                })
                .collect();
            // v = ⊗_k (P π_k(g) φ_{z_k}) as a tensor of shape m^n.
            let v: Vec<Complex64> = apply_per_axis(&per_axis, &[Complex64::new(1.0, 0.0)])
                .into_iter()
                .map(|x| x * scalar)
                .collect();
            let lhs = pair(&matvec(a, &v), &v);
            Some((lhs - symbol.values()[idx]).norm())
        })
        .collect();
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

/// The symbol map on matrix units, weighted so that column norms are
/// `L²(μ)` norms: column `i·dim + j` is `sqrt(density·h^{2n})·S(e_i ⊗ e_j*)`.
#[derive(Debug, Clone)]
pub struct SymbolMapMatrix {
    pub entries: DMatrix<Complex64>,
    pub singular_values: Vec<f64>,
}

impl SymbolMapMatrix {
    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Numerical rank at the given absolute threshold.
    pub fn rank(&self, threshold: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > threshold).count()
    }
}

pub fn build_symbol_map(ctx: &RepresentationContext) -> Result<SymbolMapMatrix> {
    let dim = ctx.dim();
    let points = ctx.grid().len();
    let unknowns = dim * dim;
    if unknowns > points {
        return Err(Error::Underdetermined { points, unknowns });
    }
    let scale = ctx.grid().weight().sqrt();
    let table = coherent_table(ctx);
    // S(e_i ⊗ e_j*)(x) = (φ_x | e_j)(e_i | φ_x) = c_j conj(c_i).
    let entries = DMatrix::from_fn(points, unknowns, |k, col| {
        let (i, j) = (col / dim, col % dim);
        table[k][j] * table[k][i].conj() * scale
    });
    let mut singular_values: Vec<f64> = entries
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    Ok(SymbolMapMatrix {
        entries,
        singular_values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "G")]
    pub g: usize,
    pub h: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    #[serde(rename = "M")]
    pub m: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub verdict: String,
}

/// Singular-value certificate for injectivity of the truncated symbol map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub config: ModelConfigSnapshot,
    pub grid: GridSummary,
    #[serde(rename = "M")]
    pub m: usize,
    pub lambda: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub cond: f64,
    pub threshold: f64,
    pub verdict: String,
    pub baselines: Vec<Baseline>,
}

/// Serialized copy of a [`ModelConfig`].
pub type ModelConfigSnapshot = serde_json::Value;

pub fn verdict_for(sigma_min: f64, tol_quadrature: f64) -> &'static str {
    if sigma_min > 100.0 * tol_quadrature {
        VERDICT_INJECTIVE
    } else {
        VERDICT_NOT_CERTIFIED
    }
}

pub fn grid_summary(ctx: &RepresentationContext) -> GridSummary {
    let grid = ctx.grid();
    GridSummary {
        l: grid.half_width(),
        g: grid.points_per_axis(),
        h: grid.step(),
        density: grid.density(),
    }
}

pub fn injectivity_report(ctx: &RepresentationContext) -> Result<InjectivityReport> {
    let map = build_symbol_map(ctx)?;
    let cfg = ctx.cfg();
    let (sigma_min, sigma_max) = (map.sigma_min(), map.sigma_max());
    let verdict = verdict_for(sigma_min, cfg.tol_quadrature).to_string();
    Ok(InjectivityReport {
        config: serde_json::to_value(cfg)?,
        grid: grid_summary(ctx),
        m: cfg.m,
        lambda: cfg.lambda,
        sigma_min,
        sigma_max,
        cond: sigma_max / sigma_min,
        threshold: 100.0 * cfg.tol_quadrature,
        verdict: verdict.clone(),
        baselines: vec![Baseline {
            m: cfg.m,
            sigma_min,
            sigma_max,
            verdict,
        }],
    })
}

/// Reports for each truncation in `ms`, each on its own default geometry for
/// `(n, λ)`; every report carries the full list of baselines.
pub fn injectivity_sweep(base: &ModelConfig, ms: impl IntoIterator<Item = usize>) -> Result<Vec<InjectivityReport>> {
    let mut reports = Vec::new();
    for m in ms {
        let mut cfg = ModelConfig::with_defaults(base.n, base.lambda, m);
        cfg.tol_identity = base.tol_identity;
        cfg.tol_quadrature = base.tol_quadrature;
        reports.push(injectivity_report(&RepresentationContext::new(cfg)?)?);
    }
    let baselines: Vec<Baseline> = reports.iter().flat_map(|r| r.baselines.clone()).collect();
    for r in &mut reports {
        r.baselines = baselines.clone();
    }
    Ok(reports)
}
