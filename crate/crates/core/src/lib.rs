//! Berezin covariant symbols for the Schrödinger representation of the
//! Heisenberg group, computed on finite Hermite truncations.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: configuration, phase-space grids, states and operators;
//! * [`heisenberg`]: exact group law and coadjoint action;
//! * [`schroedinger`]: the representation, coherent states, matrix elements;
//! * [`transforms`]: coefficient mapping, orbit Fourier transform, Wigner;
//! * [`berezin`]: kernel, full and covariant symbols, injectivity;
//! * [`oracle`]: slow independent references used by the tests;
//! * [`verify`]: the residual checks behind `berezin verify`;
//! * [`io`]: CSV and JSON formats.
//!
//! The guide in `book/` walks through each of these with runnable examples.

pub mod berezin;
pub mod error;
pub mod heisenberg;
pub mod io;
pub mod model;
pub mod oracle;
pub mod random;
pub mod schroedinger;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use heisenberg::{HeisenbergElement, OrbitPoint, PhasePoint};
pub use model::{GridFunction, HermiteState, ModelConfig, OperatorMatrix, OrbitGridFunction, PhaseGrid};
pub use schroedinger::RepresentationContext;

/// The guide's code listings, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/heisenberg.md")]
    mod heisenberg {}
    #[doc = include_str!("../../../book/src/schroedinger.md")]
    mod schroedinger {}
    #[doc = include_str!("../../../book/src/transforms.md")]
    mod transforms {}
    #[doc = include_str!("../../../book/src/symbols.md")]
    mod symbols {}
    #[doc = include_str!("../../../book/src/injectivity.md")]
    mod injectivity {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
