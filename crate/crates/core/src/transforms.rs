//! Coefficient mapping, orbit Fourier transform, and the cross-Wigner
//! distribution.
//!
//! The orbit is charted by `(α, β)` with `γ = λ` and paired with phase space
//! through `⟨ξ, x⟩ = α·a + β·b`. Its grid is the DFT dual of the phase grid,
//! and its measure `(2πλ)^{−n} dα dβ` makes the discrete transform exactly
//! unitary between `L²(O)` and `L²(g_e, μ)` with `μ = (λ/2π)^n da db`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::model::{GridFunction, HermiteState, OrbitGridFunction, PhaseGrid};
use crate::schroedinger::{apply_per_axis, RepresentationContext};

/// `x ↦ (f | π([a, b, 0]) φ)` sampled on the context grid.
pub fn coefficient_map(ctx: &RepresentationContext, f: &HermiteState, phi: &HermiteState) -> Result<GridFunction> {
    ctx.require_state(f)?;
    ctx.require_state(phi)?;
    let grid = ctx.grid().clone();
    let n = ctx.n();
    let m = ctx.truncation();
    let vacuum = phi == &ctx.gaussian_vector();
    let values = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let x = grid.coords(k);
            let moved = if vacuum {
                ctx.coherent_coefficients(&x, m)
            } else {
                apply_per_axis(&ctx.displacement_blocks(&x[..n], &x[n..], m, m), phi.coeffs())
            };
            f.coeffs().iter().zip(&moved).map(|(a, b)| a * b.conj()).sum()
        })
        .collect();
    GridFunction::new(grid, values)
}

/// `â(x) = ∫_O e^{−i⟨ξ,x⟩} a(ξ) dξ` on the dual phase grid.
pub fn fourier_orbit(a: &OrbitGridFunction) -> Result<GridFunction> {
    let (grid, values) = grid_transform(a.grid(), a.values(), FftDirection::Forward)?;
    GridFunction::new(grid, values)
}

/// `F̌(ξ) = ∫ e^{+i⟨ξ,x⟩} F(x) dμ(x)` on the dual orbit grid; the inverse of
/// [`fourier_orbit`].
pub fn inverse_fourier_orbit(f: &GridFunction) -> Result<OrbitGridFunction> {
    let (grid, values) = grid_transform(f.grid(), f.values(), FftDirection::Inverse)?;
    OrbitGridFunction::new(grid, values)
}

/// `out(z_k) = w_src · Σ_m e^{s·i⟨y_m, z_k⟩} v_m` with `s = −1` forward and
/// `+1` inverse, `y_m = −L_s + mΔ_s`, `z_k = −L_d + kΔ_d`, `Δ_sΔ_d = 2π/G`.
///
/// Per axis `y z = L_sL_d − L_sΔ_d k − L_dΔ_s m + 2πmk/G`, so the sum is a
/// plain DFT between a pre-phase in `m` and a post-phase in `k`.
fn grid_transform(
    src: &Arc<PhaseGrid>,
    values: &[Complex64],
    direction: FftDirection,
) -> Result<(Arc<PhaseGrid>, Vec<Complex64>)> {
    if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite("transform input".into()));
    }
    let dst = Arc::new(src.dual());
    let s = match direction {
        FftDirection::Forward => -1.0,
        FftDirection::Inverse => 1.0,
    };
    let g = src.points_per_axis();
    let axes = 2 * src.n();
    let (ls, ds) = (src.half_width(), src.step());
    let (ld, dd) = (dst.half_width(), dst.step());

    let pre: Vec<Complex64> = (0..g)
        .map(|m| Complex64::from_polar(1.0, -s * ld * ds * m as f64))
        .collect();
    let post: Vec<Complex64> = (0..g)
        .map(|k| Complex64::from_polar(1.0, -s * ls * dd * k as f64))
        .collect();

    let mut data: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(idx, v)| v * axis_phase(idx, g, axes, &pre))
        .collect();

    let fft = FftPlanner::new().plan_fft(g, direction);
    let mut line = vec![Complex64::new(0.0, 0.0); g];
    for axis in 0..axes {
        let stride = g.pow((axes - axis - 1) as u32);
        let outer = data.len() / (g * stride);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * g * stride + inner;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }

    let global = Complex64::from_polar(src.weight(), s * ls * ld * axes as f64);
    for (idx, v) in data.iter_mut().enumerate() {
        *v *= axis_phase(idx, g, axes, &post) * global;
    }
    Ok((dst, data))
}

fn axis_phase(mut idx: usize, g: usize, axes: usize, table: &[Complex64]) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..axes {
        p *= table[idx % g];
        idx /= g;
    }
    p
}

/// The cross-Wigner distribution, defined by `fourier_orbit(W(f, φ)) = A_φ f`.
pub fn wigner(ctx: &RepresentationContext, f: &HermiteState, phi: &HermiteState) -> Result<OrbitGridFunction> {
    inverse_fourier_orbit(&coefficient_map(ctx, f, phi)?)
}

/// Deviations of both orthogonality relations from `(f₁|f₂)·conj(φ₁|φ₂)`:
/// `(coefficient-map residual, Wigner residual)`.
pub fn moyal_residual(
    ctx: &RepresentationContext,
    f1: &HermiteState,
    phi1: &HermiteState,
    f2: &HermiteState,
    phi2: &HermiteState,
) -> Result<(f64, f64)> {
    let target = f1.inner(f2)? * phi1.inner(phi2)?.conj();
    let a1 = coefficient_map(ctx, f1, phi1)?;
    let a2 = coefficient_map(ctx, f2, phi2)?;
    let w1 = inverse_fourier_orbit(&a1)?;
    let w2 = inverse_fourier_orbit(&a2)?;
    Ok(((a1.inner(&a2)? - target).norm(), (w1.inner(&w2)? - target).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Chart, ModelConfig};
    use std::f64::consts::PI;

    fn ctx(lambda: f64, m: usize) -> RepresentationContext {
        RepresentationContext::new(ModelConfig::new(1, lambda, m).unwrap()).unwrap()
    }

    #[test]
    fn coefficient_map_at_origin() {
        let c = ctx(1.0, 6);
        let phi = c.gaussian_vector();
        let origin = c.grid().locate(&[0.0, 0.0]).unwrap();
        let a = coefficient_map(&c, &phi, &phi).unwrap();
        assert!((a.values()[origin] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let b = coefficient_map(&c, &c.basis(1), &phi).unwrap();
        assert!(b.values()[origin].norm() < 1e-15);
        assert!((a.norm() - 1.0).abs() < c.cfg().tol_identity);
    }

    #[test]
    fn general_window_matches_vacuum_fast_path() {
        let c = ctx(1.0, 5);
        let f = HermiteState::new(
            1,
            5,
            (0..5)
                .map(|k| Complex64::new(1.0 / (k + 1) as f64, 0.3 * k as f64))
                .collect(),
        )
        .unwrap();
        let fast = coefficient_map(&c, &f, &c.gaussian_vector()).unwrap();
        // Same window, but perturbed by zero in a way that defeats the equality check.
        let mut coeffs = c.gaussian_vector().coeffs().to_vec();
        coeffs[4] = Complex64::new(1e-300, 0.0);
        let slow = coefficient_map(&c, &f, &HermiteState::new(1, 5, coeffs).unwrap()).unwrap();
        assert!(fast.max_abs_diff(&slow).unwrap() < 1e-14);
    }

    #[test]
    fn zero_transforms_to_zero() {
        let orbit = Arc::new(PhaseGrid::new(1, 3.0, 16, 0.1, Chart::Orbit).unwrap());
        let f = fourier_orbit(&OrbitGridFunction::zeros(orbit)).unwrap();
        assert!(f.values().iter().all(|v| v.norm() == 0.0));
        let back = inverse_fourier_orbit(&f).unwrap();
        assert!(back.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn vacuum_wigner_is_the_gaussian_two_exp() {
        // W(φ, φ)(α, β) = 2 e^{−(α²+β²)/λ} for n = 1.
        for lambda in [0.5, 1.0, 4.0] {
            let c = ctx(lambda, 4);
            let phi = c.gaussian_vector();
            let w = wigner(&c, &phi, &phi).unwrap();
            let want = OrbitGridFunction::from_fn(w.grid().clone(), |xi| {
                Complex64::new(2.0 * (-(xi[0] * xi[0] + xi[1] * xi[1]) / lambda).exp(), 0.0)
            })
            .unwrap();
            assert!(w.max_abs_diff(&want).unwrap() < 1e-10, "lambda = {lambda}");
            assert!((w.grid().density() - 1.0 / (2.0 * PI * lambda)).abs() < 1e-15);
        }
    }

    #[test]
    fn moyal_for_vacuum_and_orthogonal_pair() {
        let c = ctx(1.0, 8);
        let phi = c.gaussian_vector();
        let tol = c.cfg().tol_identity;
        let (ra, rw) = moyal_residual(&c, &phi, &phi, &phi, &phi).unwrap();
        assert!(ra < tol && rw < tol, "{ra} {rw}");
        let (ra, rw) = moyal_residual(&c, &c.basis(0), &phi, &c.basis(1), &phi).unwrap();
        assert!(ra < tol && rw < tol, "{ra} {rw}");
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let orbit = Arc::new(PhaseGrid::new(1, 3.0, 4, 0.1, Chart::Orbit).unwrap());
        let mut a = OrbitGridFunction::zeros(orbit.clone()).into_values();
        a[0] = Complex64::new(f64::NAN, 0.0);
        assert!(OrbitGridFunction::new(orbit, a).is_err());
    }
}
