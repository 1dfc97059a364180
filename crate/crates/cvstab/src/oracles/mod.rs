pub mod dense;
pub mod fock;
pub mod grid;

pub use dense::DenseQuditState;
pub use fock::FockState;
pub use grid::{BinnedDistribution, GridSpec, GridState};
