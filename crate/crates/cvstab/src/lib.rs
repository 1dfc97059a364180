//! Recognize GKP and rotation-symmetric bosonic circuits as encoded qudit
//! Clifford circuits and simulate them with a stabilizer tableau.

pub mod circuit;
pub mod encoding;
pub mod error;
pub mod gkp;
pub mod oracles;
pub mod pauli;
pub mod pipeline;
pub mod program;
pub mod report;
pub mod ring;
pub mod rsb;
pub mod tableau;
pub mod wigner;

pub use error::{Error, Result};
pub use pauli::PauliWord;
pub use ring::PauliPhaseRing;
pub use tableau::{MeasurementRecord, Support, Tableau};
