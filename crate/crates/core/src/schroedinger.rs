//! The Schrödinger representation `π₀([a,b,c]) f(x) = e^{iλ(c − b·x + ½a·b)} f(x − a)`
//! on the λ-scaled Hermite basis.
//!
//! On each axis `π₀([a,b,0])` is the displacement operator `D(α)` with
//! `α = sqrt(λ/2)·(a − i b)`, so matrix elements have the closed Laguerre form
//!
//! ```text
//! <m|D(α)|k> = sqrt(k!/m!) α^{m−k} e^{−|α|²/2} L_k^{(m−k)}(|α|²)        m ≥ k
//!            = sqrt(m!/k!) (−ᾱ)^{k−m} e^{−|α|²/2} L_m^{(k−m)}(|α|²)     m < k
//! ```
//!
//! evaluated in log-magnitude form so that large displacements neither
//! overflow nor underflow. The Gaussian `φ` is `e_0`, and `φ_x = π(x)φ` has
//! coefficients `e^{−|α|²/2} α^j / sqrt(j!)`: the truncation keeps the first
//! `M` of them exactly, so `‖φ_x‖² = P(N < M)` for `N ~ Poisson(λ|x|²/2)`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg::{HeisenbergElement, PhasePoint};
use crate::model::{build_grid, split_index, HermiteState, ModelConfig, OperatorMatrix, PhaseGrid};

/// `α = sqrt(λ/2)·(a − i b)` for one axis.
pub fn ladder_amplitude(lambda: f64, a: f64, b: f64) -> Complex64 {
    Complex64::new(a, -b) * (lambda / 2.0).sqrt()
}

fn ln_factorials(up_to: usize) -> Vec<f64> {
    let mut lf = Vec::with_capacity(up_to + 1);
    lf.push(0.0);
    for k in 1..=up_to {
        lf.push(lf[k - 1] + (k as f64).ln());
    }
    lf
}

/// Generalized Laguerre polynomial `L_deg^{(order)}(t)` by forward recurrence.
pub fn laguerre(deg: usize, order: f64, t: f64) -> f64 {
    let mut prev = 1.0;
    if deg == 0 {
        return prev;
    }
    let mut cur = 1.0 + order - t;
    for j in 1..deg {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + order - t) * cur - (jf + order) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// The `rows × cols` upper-left block of `D(α)` in the Hermite basis.
pub fn displacement_block(alpha: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let t = alpha.norm_sqr();
    let ln_abs = 0.5 * t.ln();
    let arg = alpha.arg();
    let lf = ln_factorials(rows.max(cols));
    DMatrix::from_fn(rows, cols, |m, k| {
        let (d, lo, hi) = if m >= k { (m - k, k, m) } else { (k - m, m, k) };
        if d > 0 && t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut log_mag = 0.5 * (lf[lo] - lf[hi]) - 0.5 * t;
        if d > 0 {
            log_mag += d as f64 * ln_abs;
        }
        let poly = laguerre(lo, d as f64, t);
        let phase = if m >= k {
            Complex64::from_polar(1.0, d as f64 * arg)
        } else {
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::from_polar(sign, -(d as f64) * arg)
        };
        phase * (log_mag.exp() * poly)
    })
}

/// First `m` coefficients of `D(α)e_0 = e^{−|α|²/2} Σ α^j/sqrt(j!) e_j`.
pub fn coherent_coefficients_1d(alpha: Complex64, m: usize) -> Vec<Complex64> {
    let t = alpha.norm_sqr();
    if t == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); m];
        v[0] = Complex64::new(1.0, 0.0);
        return v;
    }
    let ln_abs = 0.5 * t.ln();
    let arg = alpha.arg();
    let mut ln_fact = 0.0;
    (0..m)
        .map(|j| {
            if j > 0 {
                ln_fact += (j as f64).ln();
            }
            let jf = j as f64;
            Complex64::from_polar((-0.5 * t + jf * ln_abs - 0.5 * ln_fact).exp(), jf * arg)
        })
        .collect()
}

/// `P(N ≥ m)` for `N ~ Poisson(t)`: the squared norm a coherent state with
/// `|α|² = t` loses when truncated to `m` levels.
pub fn truncation_tail(t: f64, m: usize) -> f64 {
    if t == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let mut ln_term = -t;
    for j in 1..=m {
        ln_term += t.ln() - (j as f64).ln();
    }
    let mut term = ln_term.exp();
    let mut sum = 0.0;
    let mut j = m;
    // Terms decrease once j > t.
    loop {
        sum += term;
        j += 1;
        term *= t / j as f64;
        if (j as f64 > t && term < 1e-18 * sum) || sum >= 1.0 {
            break;
        }
    }
    sum.min(1.0)
}

/// Smallest truncation `≥ m` whose tail at `t` is below `eps`.
pub fn extended_truncation(t: f64, m: usize, eps: f64) -> usize {
    let mut k = m;
    while truncation_tail(t, k) >= eps {
        k += 1;
    }
    k
}

/// Applies one matrix per axis to a row-major tensor with `v.len() = cols^n`.
/// Every matrix must be `rows × cols`.
pub fn apply_per_axis(mats: &[DMatrix<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    let n = mats.len();
    let (rows, cols) = mats[0].shape();
    let mut cur = v.to_vec();
    for (axis, mat) in mats.iter().enumerate() {
        let pre = rows.pow(axis as u32);
        let post = cols.pow((n - axis - 1) as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); pre * rows * post];
        for p in 0..pre {
            for r in 0..rows {
                for c in 0..cols {
                    let m = mat[(r, c)];
                    if m == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let src = (p * cols + c) * post;
                    let dst = (p * rows + r) * post;
                    for q in 0..post {
                        out[dst + q] += m * cur[src + q];
                    }
                }
            }
        }
        cur = out;
    }
    cur
}

/// Owns the configuration, the phase grid, and a write-once cache of
/// representation matrices for grid-commensurate group elements.
#[derive(Debug)]
pub struct RepresentationContext {
    cfg: ModelConfig,
    grid: Arc<PhaseGrid>,
    rep_cache: RwLock<HashMap<Vec<i64>, Arc<OperatorMatrix>>>,
}

impl RepresentationContext {
    pub fn new(cfg: ModelConfig) -> Result<Self> {
        let grid = Arc::new(build_grid(&cfg)?);
        Ok(RepresentationContext {
            cfg,
            grid,
            rep_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn cfg(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Arc<PhaseGrid> {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.cfg.n
    }

    pub fn lambda(&self) -> f64 {
        self.cfg.lambda
    }

    pub fn truncation(&self) -> usize {
        self.cfg.m
    }

    pub fn dim(&self) -> usize {
        self.cfg.dim()
    }

    pub fn gaussian_vector(&self) -> HermiteState {
        gaussian_vector(&self.cfg)
    }

    pub fn basis(&self, j: usize) -> HermiteState {
        HermiteState::basis(self.cfg.n, self.cfg.m, j)
    }

    fn check_displacement(&self, norm: f64) -> Result<()> {
        if norm > self.cfg.l * (1.0 + 1e-12) {
            return Err(Error::DisplacementOutOfRange {
                norm,
                limit: self.cfg.l,
            });
        }
        Ok(())
    }

    fn check_state(&self, f: &HermiteState) -> Result<()> {
        if f.n() != self.cfg.n || f.truncation() != self.cfg.m {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: f.dim(),
            });
        }
        Ok(())
    }

    fn amplitudes(&self, a: &[f64], b: &[f64]) -> Vec<Complex64> {
        a.iter()
            .zip(b)
            .map(|(&ak, &bk)| ladder_amplitude(self.cfg.lambda, ak, bk))
            .collect()
    }

    /// Truncated coherent-state coefficients at grid coordinates
    /// `(a_1..a_n, b_1..b_n)`, with `levels` levels per axis. No range check.
    pub fn coherent_coefficients(&self, coords: &[f64], levels: usize) -> Vec<Complex64> {
        let n = self.cfg.n;
        let per_axis: Vec<Vec<Complex64>> = self
            .amplitudes(&coords[..n], &coords[n..])
            .into_iter()
            .map(|al| coherent_coefficients_1d(al, levels))
            .collect();
        let dim = levels.pow(n as u32);
        (0..dim)
            .map(|j| {
                split_index(j, n, levels)
                    .iter()
                    .zip(&per_axis)
                    .map(|(&jk, c)| c[jk])
                    .product()
            })
            .collect()
    }

    /// `φ_x = π([a, b, 0]) φ`, truncated.
    pub fn coherent_state(&self, x: &PhasePoint) -> Result<HermiteState> {
        if x.n() != self.cfg.n {
            return Err(Error::DimensionMismatch {
                expected: self.cfg.n,
                found: x.n(),
            });
        }
        self.check_displacement(x.norm_inf())?;
        HermiteState::new(
            self.cfg.n,
            self.cfg.m,
            self.coherent_coefficients(&x.coords(), self.cfg.m),
        )
    }

    /// Per-axis `rows × cols` blocks of `π([a, b, 0])`. No range check.
    pub fn displacement_blocks(&self, a: &[f64], b: &[f64], rows: usize, cols: usize) -> Vec<DMatrix<Complex64>> {
        self.amplitudes(a, b)
            .into_iter()
            .map(|al| displacement_block(al, rows, cols))
            .collect()
    }

    /// The block `P_rows π(g) P_cols` of the representation, for truncations
    /// of `rows` and `cols` levels per axis.
    pub fn rep_block(&self, g: &HeisenbergElement, rows: usize, cols: usize) -> Result<DMatrix<Complex64>> {
        self.check_element(g)?;
        let blocks = self.displacement_blocks(&g.a, &g.b, rows, cols);
        let n = self.cfg.n;
        let scalar = Complex64::from_polar(1.0, self.cfg.lambda * g.c);
        Ok(DMatrix::from_fn(rows.pow(n as u32), cols.pow(n as u32), |r, c| {
            let ri = split_index(r, n, rows);
            let ci = split_index(c, n, cols);
            let mut v = scalar;
            for k in 0..n {
                v *= blocks[k][(ri[k], ci[k])];
            }
            v
        }))
    }

    fn check_element(&self, g: &HeisenbergElement) -> Result<()> {
        if g.n() != self.cfg.n {
            return Err(Error::DimensionMismatch {
                expected: self.cfg.n,
                found: g.n(),
            });
        }
        self.check_displacement(g.displacement_norm())
    }

    fn cache_key(&self, g: &HeisenbergElement) -> Option<Vec<i64>> {
        let h = self.grid.step();
        g.a.iter()
            .chain(&g.b)
            .map(|x| {
                let r = x / h;
                ((r - r.round()).abs() < 1e-9).then_some(r.round() as i64)
            })
            .collect()
    }

    /// Matrix of `π(g)` on the truncation; column `j` is `π(g) e_j`.
    pub fn rep_matrix(&self, g: &HeisenbergElement) -> Result<OperatorMatrix> {
        self.check_element(g)?;
        let scalar = Complex64::from_polar(1.0, self.cfg.lambda * g.c);
        let translation = HeisenbergElement { c: 0.0, ..g.clone() };
        let key = self.cache_key(g);
        if let Some(key) = &key {
            if let Some(hit) = self.rep_cache.read().expect("cache lock").get(key) {
                return OperatorMatrix::new(hit.entries().map(|x| x * scalar));
            }
        }
        let m = self.cfg.m;
        let base = Arc::new(OperatorMatrix::new(self.rep_block(&translation, m, m)?)?);
        if let Some(key) = key {
            self.rep_cache
                .write()
                .expect("cache lock")
                .entry(key)
                .or_insert_with(|| base.clone());
        }
        OperatorMatrix::new(base.entries().map(|x| x * scalar))
    }

    /// `π(g) f` on the truncation.
    pub fn apply_group(&self, g: &HeisenbergElement, f: &HermiteState) -> Result<HermiteState> {
        self.check_element(g)?;
        self.check_state(f)?;
        let m = self.cfg.m;
        let blocks = self.displacement_blocks(&g.a, &g.b, m, m);
        let scalar = Complex64::from_polar(1.0, self.cfg.lambda * g.c);
        let coeffs = apply_per_axis(&blocks, f.coeffs())
            .into_iter()
            .map(|x| x * scalar)
            .collect();
        HermiteState::new(self.cfg.n, m, coeffs)
    }

    pub(crate) fn require_state(&self, f: &HermiteState) -> Result<()> {
        self.check_state(f)
    }
}

/// The normalized Gaussian `φ(x) = (λ/π)^{n/4} e^{−λ|x|²/2}`, which is `e_0`.
pub fn gaussian_vector(cfg: &ModelConfig) -> HermiteState {
    HermiteState::vacuum(cfg.n, cfg.m)
}
