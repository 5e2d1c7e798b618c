//! Seeded random test operators and states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::model::{HermiteState, OperatorMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex Gaussian entries.
pub fn operator(rng: &mut impl Rng, dim: usize) -> OperatorMatrix {
    OperatorMatrix::new(DMatrix::from_fn(dim, dim, |_, _| gaussian(rng))).expect("finite")
}

pub fn hermitian(rng: &mut impl Rng, dim: usize) -> OperatorMatrix {
    let a = operator(rng, dim);
    a.combine(Complex64::new(0.5, 0.0), &a.adjoint(), Complex64::new(0.5, 0.0))
        .expect("same dimension")
}

/// `B B*` for a Gaussian `B`.
pub fn positive(rng: &mut impl Rng, dim: usize) -> OperatorMatrix {
    let b = operator(rng, dim);
    b.compose(&b.adjoint()).expect("same dimension")
}

pub fn state(rng: &mut impl Rng, n: usize, m: usize) -> HermiteState {
    let dim = m.pow(n as u32);
    HermiteState::new(n, m, (0..dim).map(|_| gaussian(rng)).collect()).expect("finite")
}

pub fn unit_state(rng: &mut impl Rng, n: usize, m: usize) -> HermiteState {
    let s = state(rng, n, m);
    let norm = s.norm();
    s.scale(Complex64::new(1.0 / norm, 0.0))
}
