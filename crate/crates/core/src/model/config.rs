//! Physical and numerical parameters of a run.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOL_IDENTITY: f64 = 1e-8;
pub const DEFAULT_TOL_QUADRATURE: f64 = 1e-5;

/// Parameters of the truncated Schrödinger model and its phase-space grid.
///
/// `n` is the number of position coordinates (the group has dimension
/// `2n + 1`), `lambda` the central character parameter, `m` the Hermite
/// truncation per axis, `l` the phase-space half-width and `g` the number of
/// grid points per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct ModelConfig {
    pub n: usize,
    pub lambda: f64,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "G")]
    pub g: usize,
    pub tol_identity: f64,
    pub tol_quadrature: f64,
}

/// On-disk form. Only `n`, `lambda` and `M` are mandatory.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: usize,
    lambda: f64,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "L")]
    l: Option<f64>,
    #[serde(rename = "G")]
    g: Option<usize>,
    tol_identity: Option<f64>,
    tol_quadrature: Option<f64>,
}

impl ModelConfig {
    /// Default geometry for the given model: `L = 4·sqrt((2M+1)/λ)` and
    /// `G = 128` for `n = 1` (32 otherwise). Not validated.
    pub fn with_defaults(n: usize, lambda: f64, m: usize) -> Self {
        ModelConfig {
            n,
            lambda,
            m,
            l: default_half_width(lambda, m),
            g: if n == 1 { 128 } else { 32 },
            tol_identity: DEFAULT_TOL_IDENTITY,
            tol_quadrature: DEFAULT_TOL_QUADRATURE,
        }
    }

    /// Validated default configuration.
    pub fn new(n: usize, lambda: f64, m: usize) -> Result<Self> {
        let cfg = Self::with_defaults(n, lambda, m);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_grid(mut self, l: f64, g: usize) -> Self {
        self.l = l;
        self.g = g;
        self
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)?;
        Self::try_from(raw)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Dimension of the truncated Hilbert space, `M^n`.
    pub fn dim(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn step(&self) -> f64 {
        2.0 * self.l / self.g as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!("lambda must be a positive real, got {}", self.lambda));
        }
        if self.m == 0 {
            return bad("M must be at least 1".into());
        }
        if !(self.l.is_finite() && self.l > 0.0) {
            return bad(format!("L must be a positive real, got {}", self.l));
        }
        if self.g < 2 || !self.g.is_multiple_of(2) {
            return bad(format!("G must be even and at least 2, got {}", self.g));
        }
        for (name, t) in [
            ("tol_identity", self.tol_identity),
            ("tol_quadrature", self.tol_quadrature),
        ] {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("{name} must be a positive real, got {t}"));
            }
        }
        let tail = (-self.lambda * self.l * self.l / 4.0).exp();
        if tail >= self.tol_quadrature {
            return Err(Error::GridTooCoarse(format!(
                "exp(-lambda*L^2/4) = {tail:.3e} >= tol_quadrature = {:.3e} (increase L)",
                self.tol_quadrature
            )));
        }
        let h = self.step();
        let dual_tail = (-PI * PI / (self.lambda * h * h)).exp();
        if dual_tail >= self.tol_quadrature {
            return Err(Error::GridTooCoarse(format!(
                "exp(-pi^2/(lambda*h^2)) = {dual_tail:.3e} >= tol_quadrature = {:.3e} \
                 with h = 2L/G = {h:.4} (increase G)",
                self.tol_quadrature
            )));
        }
        Ok(())
    }
}

impl TryFrom<RawConfig> for ModelConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        let mut cfg = Self::with_defaults(raw.n, raw.lambda, raw.m);
        if let Some(l) = raw.l {
            cfg.l = l;
        }
        if let Some(g) = raw.g {
            cfg.g = g;
        }
        if let Some(t) = raw.tol_identity {
            cfg.tol_identity = t;
        }
        if let Some(t) = raw.tol_quadrature {
            cfg.tol_quadrature = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn default_half_width(lambda: f64, m: usize) -> f64 {
    4.0 * ((2 * m + 1) as f64 / lambda).sqrt()
}
