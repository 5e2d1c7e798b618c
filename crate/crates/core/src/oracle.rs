//! Brute-force reference computations.
//!
//! Nothing in this module calls into the fast paths (`schroedinger`,
//! `transforms`, `berezin`). Matrix elements are position-space Riemann sums
//! of the literal formula `e^{iλ(c − b·x + ½a·b)} f(x − a)`, Fourier transforms
//! are literal double sums, and the symbol-map Gram matrix has a closed form.
//! Everything here is slow on purpose and guarded against oversized inputs.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg::HeisenbergElement;
use crate::model::{split_index, GridFunction, HermiteState, ModelConfig, OrbitGridFunction};

/// Largest per-axis size accepted by the double-sum transforms.
pub const DOUBLE_SUM_MAX_G: usize = 32;
const MAX_POSITION_POINTS: usize = 4_000_000;

/// Uniform grid on `[-R, R]^n`, endpoints included, with step `s`.
#[derive(Debug, Clone)]
pub struct PositionGrid {
    n: usize,
    radius: f64,
    step: f64,
    axis: Vec<f64>,
}

impl PositionGrid {
    /// The coarsest grid satisfying `R ≥ L + 6/sqrt(λ)` and
    /// `s ≤ min(1/(4·sqrt(λ(2M+1))), π/(4λL))`.
    pub fn for_config(cfg: &ModelConfig) -> Result<Self> {
        let radius = cfg.l + 6.0 / cfg.lambda.sqrt();
        let s_max = (1.0 / (4.0 * (cfg.lambda * (2 * cfg.m + 1) as f64).sqrt())).min(PI / (4.0 * cfg.lambda * cfg.l));
        Self::new(cfg.n, radius, s_max)
    }

    pub fn new(n: usize, radius: f64, max_step: f64) -> Result<Self> {
        let intervals = (2.0 * radius / max_step).ceil() as usize;
        let per_axis = intervals + 1;
        if per_axis.checked_pow(n as u32).is_none_or(|p| p > MAX_POSITION_POINTS) {
            return Err(Error::CostGuard(format!(
                "position grid with {per_axis}^{n} points exceeds {MAX_POSITION_POINTS}"
            )));
        }
        let step = 2.0 * radius / intervals as f64;
        let axis = (0..per_axis).map(|k| -radius + k as f64 * step).collect();
        Ok(PositionGrid { n, radius, step, axis })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn len(&self) -> usize {
        self.axis.len().pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }
}

/// Values of the 1D λ-scaled Hermite functions `e_0..e_{m-1}` at `x`,
/// by the normalized three-term recurrence.
pub fn hermite_functions(lambda: f64, m: usize, x: f64) -> Vec<f64> {
    let u = lambda.sqrt() * x;
    let mut out = Vec::with_capacity(m);
    let e0 = (lambda / PI).powf(0.25) * (-0.5 * u * u).exp();
    out.push(e0);
    if m > 1 {
        out.push(2f64.sqrt() * u * e0);
    }
    for j in 1..m.saturating_sub(1) {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * u * out[j] - (jf / (jf + 1.0)).sqrt() * out[j - 1];
        out.push(next);
    }
    out
}

/// Position-space samples `Σ_j f_j e_j(x)` on a position grid.
pub fn synthesize(f: &HermiteState, lambda: f64, grid: &PositionGrid) -> Result<Vec<Complex64>> {
    if f.n() != grid.n {
        return Err(Error::DimensionMismatch {
            expected: grid.n,
            found: f.n(),
        });
    }
    let m = f.truncation();
    let table: Vec<Vec<f64>> = grid.axis.iter().map(|&x| hermite_functions(lambda, m, x)).collect();
    let g = grid.axis.len();
    Ok((0..grid.len())
        .map(|p| {
            let pos = split_index(p, grid.n, g);
            f.coeffs()
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let js = split_index(j, grid.n, m);
                    c * pos.iter().zip(&js).map(|(&pi, &jk)| table[pi][jk]).product::<f64>()
                })
                .sum()
        })
        .collect())
}

/// `s^n Σ |samples|²`.
pub fn position_norm_sqr(samples: &[Complex64], grid: &PositionGrid) -> f64 {
    samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.step.powi(grid.n as i32)
}

/// Reference evaluator for representation matrix elements.
#[derive(Debug, Clone)]
pub struct Oracle {
    lambda: f64,
    n: usize,
    m: usize,
    grid: PositionGrid,
}

impl Oracle {
    pub fn new(cfg: &ModelConfig) -> Result<Self> {
        Ok(Oracle {
            lambda: cfg.lambda,
            n: cfg.n,
            m: cfg.m,
            grid: PositionGrid::for_config(cfg)?,
        })
    }

    pub fn grid(&self) -> &PositionGrid {
        &self.grid
    }

    /// The `(j, k)` matrix entry of `π₀(g)`, `∫ conj(e_j(x)) (π₀(g) e_k)(x) dx`,
    /// by Riemann sum over the position grid. `j`, `k` are flat multi-indices.
    pub fn matrix_element(&self, g: &HeisenbergElement, j: usize, k: usize) -> Result<Complex64> {
        if g.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: g.n(),
            });
        }
        let js = split_index(j, self.n, self.m);
        let ks = split_index(k, self.n, self.m);
        let mut total = Complex64::from_polar(1.0, self.lambda * g.c);
        for axis in 0..self.n {
            let (a, b) = (g.a[axis], g.b[axis]);
            let sum: Complex64 = self
                .grid
                .axis
                .iter()
                .map(|&x| {
                    let ej = hermite_functions(self.lambda, js[axis] + 1, x)[js[axis]];
                    let ek = hermite_functions(self.lambda, ks[axis] + 1, x - a)[ks[axis]];
                    Complex64::from_polar(ej * ek, self.lambda * (-b * x + 0.5 * a * b))
                })
                .sum();
            total *= sum * self.grid.step;
        }
        Ok(total)
    }

    /// `(φ | π([a,b,0])φ)` by Riemann sum, for `n = 1`.
    pub fn vacuum_overlap(&self, a: f64, b: f64) -> Result<Complex64> {
        let g = HeisenbergElement::new(vec![a], vec![b], 0.0)?;
        Ok(self.matrix_element(&g, 0, 0)?.conj())
    }
}

/// Gauss–Hermite nodes and weights for `∫ h(u) e^{-u²} du` (Golub–Welsch).
pub fn gauss_hermite(nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(nodes, nodes, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..nodes)
        .map(|i| (eig.eigenvalues[i], PI.sqrt() * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

/// The `(j, k)` entry of `π₀([a,b,c])` for `n = 1` by Gauss–Hermite
/// quadrature, centred on the midpoint `a/2` of the two Gaussian envelopes.
pub fn gauss_hermite_matrix_element(
    lambda: f64,
    g: &HeisenbergElement,
    j: usize,
    k: usize,
    nodes: usize,
) -> Result<Complex64> {
    if g.n() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: g.n(),
        });
    }
    let (a, b, c) = (g.a[0], g.b[0], g.c);
    let (u, w) = gauss_hermite(nodes);
    let sl = lambda.sqrt();
    let sum: Complex64 = u
        .iter()
        .zip(&w)
        .map(|(&ui, &wi)| {
            let x = ui / sl + 0.5 * a;
            let ej = hermite_functions(lambda, j + 1, x)[j];
            let ek = hermite_functions(lambda, k + 1, x - a)[k];
            // e_j(x) e_k(x−a) = (envelope) · e^{−u²}: divide the weight back out.
            let integrand = ej * ek * (ui * ui).exp();
            Complex64::from_polar(wi * integrand, lambda * (c - b * x + 0.5 * a * b))
        })
        .sum();
    Ok(sum / sl)
}

/// Literal Riemann sum of `∫ e^{−i⟨ξ,x⟩} a(ξ) dξ` over the orbit grid,
/// evaluated on the dual phase grid. `O(G^{4n})`.
pub fn oracle_double_sum_ft(a: &OrbitGridFunction) -> Result<GridFunction> {
    double_sum(a.grid().as_ref(), a.values(), -1.0).and_then(|(grid, v)| GridFunction::new(grid, v))
}

/// Literal Riemann sum of `∫ e^{+i⟨ξ,x⟩} F(x) dμ(x)` onto the dual orbit grid.
pub fn oracle_double_sum_ift(f: &GridFunction) -> Result<OrbitGridFunction> {
    double_sum(f.grid().as_ref(), f.values(), 1.0).and_then(|(grid, v)| OrbitGridFunction::new(grid, v))
}

fn double_sum(
    src: &crate::model::PhaseGrid,
    values: &[Complex64],
    sign: f64,
) -> Result<(Arc<crate::model::PhaseGrid>, Vec<Complex64>)> {
    if src.points_per_axis() > DOUBLE_SUM_MAX_G {
        return Err(Error::CostGuard(format!(
            "double-sum transform limited to G <= {DOUBLE_SUM_MAX_G}, got {}",
            src.points_per_axis()
        )));
    }
    let dst = Arc::new(src.dual());
    let src_points: Vec<Vec<f64>> = src.points().collect();
    let out = dst
        .points()
        .map(|x| {
            let s: Complex64 = src_points
                .iter()
                .zip(values)
                .map(|(xi, v)| {
                    let phase: f64 = xi.iter().zip(&x).map(|(p, q)| p * q).sum();
                    v * Complex64::from_polar(1.0, sign * phase)
                })
                .sum();
            s * src.weight()
        })
        .collect();
    Ok((dst, out))
}

/// Closed-form Gram matrix of the weighted symbol-map columns for `n = 1`:
/// `<S(e_i⊗e_j*), S(e_k⊗e_l*)>_{L²(μ)} = δ_{i−j, k−l} (i+l)! / (2^{i+l+1} sqrt(i! j! k! l!))`.
/// Columns are ordered `(i, j) ↦ i·M + j`.
pub fn symbol_map_gram(m: usize) -> DMatrix<f64> {
    let fact = |k: usize| (1..=k).map(|x| x as f64).product::<f64>();
    let dim = m * m;
    DMatrix::from_fn(dim, dim, |p, q| {
        let (i, j) = (p / m, p % m);
        let (k, l) = (q / m, q % m);
        if i as i64 - j as i64 != k as i64 - l as i64 {
            return 0.0;
        }
        let s = i + l;
        fact(s) / (2f64.powi(s as i32 + 1) * (fact(i) * fact(j) * fact(k) * fact(l)).sqrt())
    })
}

/// Singular values (descending) of the symbol map implied by [`symbol_map_gram`].
pub fn symbol_map_singular_values(m: usize) -> Vec<f64> {
    let eig = SymmetricEigen::new(symbol_map_gram(m));
    let mut sv: Vec<f64> = eig.eigenvalues.iter().map(|e| e.max(0.0).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Chart, PhaseGrid};

    fn cfg(lambda: f64, m: usize) -> ModelConfig {
        ModelConfig::new(1, lambda, m).unwrap()
    }

    fn el(a: f64, b: f64, c: f64) -> HeisenbergElement {
        HeisenbergElement::new(vec![a], vec![b], c).unwrap()
    }

    #[test]
    fn position_grid_meets_its_invariants() {
        let c = cfg(1.0, 16);
        let g = PositionGrid::for_config(&c).unwrap();
        assert!(g.radius() >= c.l + 6.0);
        let bound = (1.0 / (4.0 * 33f64.sqrt())).min(PI / (4.0 * c.l));
        assert!(g.step() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn synthesized_vacuum_at_origin() {
        for lambda in [0.5, 1.0, 4.0] {
            let c = cfg(lambda, 4);
            let grid = PositionGrid::new(1, 8.0, 0.5).unwrap();
            assert!(grid.axis().contains(&0.0));
            let samples = synthesize(&HermiteState::vacuum(1, 4), lambda, &grid).unwrap();
            let mid = grid.axis().iter().position(|&x| x == 0.0).unwrap();
            assert!((samples[mid].re - (lambda / PI).powf(0.25)).abs() < 1e-15);
            let odd = synthesize(&HermiteState::basis(1, 4, 1), c.lambda, &grid).unwrap();
            assert_eq!(odd[mid].norm(), 0.0);
        }
    }

    #[test]
    fn synthesized_norms() {
        let c = cfg(1.0, 6);
        let grid = PositionGrid::for_config(&c).unwrap();
        for j in 0..6 {
            let s = synthesize(&HermiteState::basis(1, 6, j), 1.0, &grid).unwrap();
            assert!((position_norm_sqr(&s, &grid) - 1.0).abs() < c.tol_quadrature, "e_{j}");
        }
    }

    #[test]
    fn matrix_element_examples() {
        let o = Oracle::new(&cfg(1.0, 6)).unwrap();
        let chi = o.matrix_element(&el(0.0, 0.0, 0.8), 3, 3).unwrap();
        assert!((chi - Complex64::from_polar(1.0, 0.8)).norm() < 1e-12);
        let off = o.matrix_element(&HeisenbergElement::identity(1), 2, 4).unwrap();
        assert!(off.norm() < 1e-12);
        let shifted = o.matrix_element(&el(1.0, 0.0, 0.0), 0, 0).unwrap();
        assert!((shifted.re - (-0.25f64).exp()).abs() < 1e-12 && shifted.im.abs() < 1e-12);
        assert!((shifted.re - 0.7788007830714049).abs() < 1e-12);
    }

    #[test]
    fn gauss_hermite_integrates_polynomials() {
        let (u, w) = gauss_hermite(20);
        let moment = |p: i32| u.iter().zip(&w).map(|(x, wi)| wi * x.powi(p)).sum::<f64>();
        assert!((moment(0) - PI.sqrt()).abs() < 1e-13);
        assert!((moment(2) - PI.sqrt() / 2.0).abs() < 1e-13);
        assert!((moment(4) - 3.0 * PI.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn two_oracles_agree_on_matrix_elements() {
        let lambda = 1.0;
        let o = Oracle::new(&cfg(lambda, 8)).unwrap();
        let g = el(0.9, -1.3, 0.4);
        for j in 0..8 {
            for k in 0..8 {
                let r = o.matrix_element(&g, j, k).unwrap();
                let q = gauss_hermite_matrix_element(lambda, &g, j, k, 80).unwrap();
                assert!((r - q).norm() < 1e-10, "({j},{k}): {r} vs {q}");
            }
        }
    }

    #[test]
    fn double_sum_of_delta_is_a_plane_wave() {
        let orbit = Arc::new(PhaseGrid::new(1, 2.0, 8, 0.5, Chart::Orbit).unwrap());
        let mut v = vec![Complex64::new(0.0, 0.0); orbit.len()];
        v[19] = Complex64::new(1.0, 0.0);
        let a = OrbitGridFunction::new(orbit.clone(), v).unwrap();
        let f = oracle_double_sum_ft(&a).unwrap();
        let xi = orbit.coords(19);
        for (x, val) in f.grid().points().zip(f.values()) {
            assert!((val.norm() - orbit.weight()).abs() < 1e-15);
            let phase = -(xi[0] * x[0] + xi[1] * x[1]);
            assert!((val - Complex64::from_polar(orbit.weight(), phase)).norm() < 1e-14);
        }
        let zero = oracle_double_sum_ft(&OrbitGridFunction::zeros(orbit)).unwrap();
        assert!(zero.values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn double_sum_cost_guard() {
        let orbit = Arc::new(PhaseGrid::new(1, 2.0, 64, 0.5, Chart::Orbit).unwrap());
        assert!(matches!(
            oracle_double_sum_ft(&OrbitGridFunction::zeros(orbit)),
            Err(Error::CostGuard(_))
        ));
    }

    #[test]
    fn closed_form_singular_values() {
        let frozen = [
            std::f64::consts::FRAC_1_SQRT_2,
            0.30901699437494745,
            0.1183655724313623,
            0.04314713606008409,
        ];
        for (m, want) in (1..=4).zip(frozen) {
            let sv = symbol_map_singular_values(m);
            assert!((sv.last().unwrap() - want).abs() < 1e-12, "M={m}");
        }
    }
}
