//! Wannier-Stark ladders in a non-Hermitian SSH chain under a static field.
//!
//! * [`lattice`] builds the finite-chain Hamiltonian and initial states.
//! * [`floquet`] integrates the two-band momentum-space monodromy and classifies
//!   the ladder phase.
//! * [`analytics`] holds the closed forms (dimer, weak-field EP curve, Hermitian blocks).
//! * [`dynamics`] evolves states on the chain and analyses the resulting patterns.
//! * [`cli`], [`config`] and [`output`] back the `wsmoire` binary.

pub mod analytics;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod floquet;
pub mod lattice;
pub mod output;

pub use error::{Error, Result};
pub use lattice::C64;
