//! Mean-field Dicke superradiance toolkit.
//!
//! * [`meanfield`]: closed-form single-atom state, Hamiltonian, coherence and
//!   radiated intensity of the mean-field burst.
//! * [`qsl`]: Bures angle, averaged energy spread and the quantum speed limit
//!   ratio along the mean-field trajectory.
//! * [`dicke_oracle`]: exact collective master equation on the Dicke ladder,
//!   used to check the mean-field picture at moderate `N`.
//! * [`cli`]: the `srlab` command-line front end.

pub mod cli;
pub mod dicke_oracle;
pub mod error;
pub mod meanfield;
pub mod numeric;
pub mod qsl;

pub use error::{Error, Result};
pub use meanfield::ModelParams;
