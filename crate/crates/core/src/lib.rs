//! Coherent information and quantum capacity of N-qubit dephasing channels
//! with memory.
//!
//! Two noise models are provided: a stationary Markov chain of sigma_z
//! errors ([`markov`]) and a bosonic bath with a Lorentzian spectrum
//! ([`spinboson`]). Both are dephasing channels in the sense of [`channel`]:
//! populations in the computational basis are preserved and coherences are
//! attenuated. [`sweep`] and [`verify`] drive parameter sweeps and property
//! suites for the `dephcap` command-line tool.

pub mod channel;
pub mod entropy;
pub mod error;
pub mod markov;
pub mod quadrature;
pub mod sampling;
pub mod spinboson;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
