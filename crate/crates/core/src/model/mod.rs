//! Configuration, grids, and the state/operator containers shared by the
//! rest of the crate.

pub mod config;
pub mod grid;
pub mod state;

pub use config::ModelConfig;
pub use grid::{build_grid, inner_l2, Chart, GridFunction, OrbitGridFunction, PhaseGrid};
pub use state::{hs_inner, split_index, HermiteState, OperatorMatrix};
