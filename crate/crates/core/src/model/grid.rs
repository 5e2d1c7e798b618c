//! Uniform tensor grids on phase space and on the flat coadjoint orbit,
//! and the sampled functions that live on them.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg::PhasePoint;
use crate::model::config::ModelConfig;

/// Which space a grid charts. Functions on different charts never mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// `g_e ≅ R^{2n}` with coordinates `(a, b)`.
    Phase,
    /// The orbit `{γ = λ}` with coordinates `(α, β)`.
    Orbit,
}

/// Uniform grid on `[-L, L)^{2n}` with points `-L + k·h`, `h = 2L/G`.
///
/// The measure attached to the grid is `density × Lebesgue`, so a Riemann sum
/// weights every point by `density · cell_weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    n: usize,
    half_width: f64,
    g: usize,
    step: f64,
    cell_weight: f64,
    density: f64,
    chart: Chart,
    axis: Vec<f64>,
}

/// Builds the phase-space grid of a validated configuration, with measure
/// density `(λ/2π)^n`.
pub fn build_grid(cfg: &ModelConfig) -> Result<PhaseGrid> {
    cfg.validate()?;
    let density = (cfg.lambda / (2.0 * PI)).powi(cfg.n as i32);
    PhaseGrid::new(cfg.n, cfg.l, cfg.g, density, Chart::Phase)
}

impl PhaseGrid {
    pub fn new(n: usize, half_width: f64, g: usize, density: f64, chart: Chart) -> Result<Self> {
        if n == 0 || g < 2 || !g.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "grid needs n >= 1 and even G >= 2 (n = {n}, G = {g})"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite() && density > 0.0 && density.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "grid needs positive finite half-width and density (L = {half_width}, d = {density})"
            )));
        }
        let step = 2.0 * half_width / g as f64;
        let axis = (0..g).map(|k| -half_width + k as f64 * step).collect();
        Ok(PhaseGrid {
            n,
            half_width,
            g,
            step,
            cell_weight: step.powi(2 * n as i32),
            density,
            chart,
            axis,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.g
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn cell_weight(&self) -> f64 {
        self.cell_weight
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// Quadrature weight of a single point, `density · h^{2n}`.
    pub fn weight(&self) -> f64 {
        self.density * self.cell_weight
    }

    /// Coordinates of one axis, `-L + k·h` for `k = 0..G`.
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn len(&self) -> usize {
        self.g.pow(2 * self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `density · (2L)^{2n}`, the closed form of the total grid measure.
    pub fn total_measure(&self) -> f64 {
        self.density * (2.0 * self.half_width).powi(2 * self.n as i32)
    }

    /// Per-axis indices of point `k`, most significant axis (`a_1`) first.
    pub fn multi_index(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; 2 * self.n];
        for slot in idx.iter_mut().rev() {
            *slot = k % self.g;
            k /= self.g;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.g + i)
    }

    pub fn coords(&self, k: usize) -> Vec<f64> {
        self.multi_index(k).into_iter().map(|i| self.axis[i]).collect()
    }

    pub fn point(&self, k: usize) -> PhasePoint {
        let c = self.coords(k);
        PhasePoint::new(c[..self.n].to_vec(), c[self.n..].to_vec())
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|k| self.coords(k))
    }

    /// Index of the grid point at `coords`, if it lies on the grid to within
    /// `1e-9` of a step.
    pub fn locate(&self, coords: &[f64]) -> Option<usize> {
        if coords.len() != 2 * self.n {
            return None;
        }
        let mut idx = Vec::with_capacity(coords.len());
        for &c in coords {
            let r = (c + self.half_width) / self.step;
            let k = r.round();
            if (r - k).abs() > 1e-9 || k < 0.0 || k >= self.g as f64 {
                return None;
            }
            idx.push(k as usize);
        }
        Some(self.flat_index(&idx))
    }

    /// The reciprocal grid of a unitary DFT: step `π/L`, half-width
    /// `πG/(2L)`, density chosen so that `density · dual.density = (2π)^{-2n}`.
    /// The dual of the dual is the original grid.
    pub fn dual(&self) -> PhaseGrid {
        let half_width = PI * self.g as f64 / (2.0 * self.half_width);
        let density = (2.0 * PI).powi(-2 * self.n as i32) / self.density;
        let chart = match self.chart {
            Chart::Phase => Chart::Orbit,
            Chart::Orbit => Chart::Phase,
        };
        PhaseGrid::new(self.n, half_width, self.g, density, chart).expect("dual of a valid grid is valid")
    }

    /// Same geometry, measure and chart (to rounding).
    pub fn compatible(&self, other: &PhaseGrid) -> bool {
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs());
        self.n == other.n
            && self.g == other.g
            && self.chart == other.chart
            && close(self.half_width, other.half_width)
            && close(self.density, other.density)
    }
}

/// Complex samples on a phase-space grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<PhaseGrid>,
    values: Vec<Complex64>,
}

/// Complex samples on the orbit chart. The measure constant is the grid's
/// density, `(2πλ)^{-n}` for the orbit dual to a model grid.
#[derive(Debug, Clone)]
pub struct OrbitGridFunction {
    grid: Arc<PhaseGrid>,
    values: Vec<Complex64>,
}

macro_rules! sampled_function {
    ($ty:ident, $chart:expr) => {
        impl $ty {
            pub fn new(grid: Arc<PhaseGrid>, values: Vec<Complex64>) -> Result<Self> {
                if grid.chart() != $chart {
                    return Err(Error::GridMismatch);
                }
                if values.len() != grid.len() {
                    return Err(Error::DimensionMismatch {
                        expected: grid.len(),
                        found: values.len(),
                    });
                }
                if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    return Err(Error::NonFinite(stringify!($ty).into()));
                }
                Ok($ty { grid, values })
            }

            pub fn zeros(grid: Arc<PhaseGrid>) -> Self {
                let values = vec![Complex64::new(0.0, 0.0); grid.len()];
                $ty { grid, values }
            }

            /// Samples `f` at every grid point (coordinates in grid order).
            pub fn from_fn(grid: Arc<PhaseGrid>, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
                let values = grid.points().map(|p| f(&p)).collect();
                Self::new(grid, values)
            }

            pub fn grid(&self) -> &Arc<PhaseGrid> {
                &self.grid
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.values
            }

            /// `density · h^{2n} · Σ u_k conj(v_k)`.
            pub fn inner(&self, other: &Self) -> Result<Complex64> {
                if !self.grid.compatible(&other.grid) {
                    return Err(Error::GridMismatch);
                }
                Ok(weighted_inner(self.grid.weight(), &self.values, &other.values))
            }

            pub fn norm(&self) -> f64 {
                weighted_inner(self.grid.weight(), &self.values, &self.values)
                    .re
                    .max(0.0)
                    .sqrt()
            }

            /// Integral against the grid measure.
            pub fn integral(&self) -> Complex64 {
                compensated_sum(self.values.iter().copied()) * self.grid.weight()
            }

            pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
                if !self.grid.compatible(&other.grid) {
                    return Err(Error::GridMismatch);
                }
                Ok(self
                    .values
                    .iter()
                    .zip(&other.values)
                    .map(|(u, v)| (u - v).norm())
                    .fold(0.0, f64::max))
            }
        }
    };
}

sampled_function!(GridFunction, Chart::Phase);
sampled_function!(OrbitGridFunction, Chart::Orbit);

/// The `L²(g_e, μ)` pairing, linear in `u`, conjugate-linear in `v`.
pub fn inner_l2(u: &GridFunction, v: &GridFunction) -> Result<Complex64> {
    u.inner(v)
}

fn weighted_inner(weight: f64, u: &[Complex64], v: &[Complex64]) -> Complex64 {
    compensated_sum(u.iter().zip(v).map(|(a, b)| a * b.conj())) * weight
}

/// Neumaier summation in a fixed left-to-right order.
pub(crate) fn compensated_sum(terms: impl Iterator<Item = Complex64>) -> Complex64 {
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for t in terms {
        re.add(t.re);
        im.add(t.im);
    }
    Complex64::new(re.value(), im.value())
}

#[derive(Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
