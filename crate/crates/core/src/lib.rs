//! Siegert (outgoing-wave) eigenstates of a one-dimensional square well and
//! the particle-number bookkeeping that makes their squared modulus
//! meaningful.
//!
//! * [`model`]: reduced units, the potential, dispersion and classification.
//! * [`siegert_solver`]: bound, resonant and anti-resonant roots in the K plane.
//! * [`wavefunc`]: eigenfunctions and superpositions, density, current, norms.
//! * [`flux_identities`]: the imaginary part of `<H>` and the norm decay rate
//!   as boundary momentum leaks.
//! * [`expanding_domain`]: integration regions that grow with the fleeing
//!   particles, over which the norm is conserved.
//! * [`tdse_oracle`]: an independent Crank-Nicolson evolution used to
//!   cross-check decay rates.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod expanding_domain;
pub mod flux_identities;
pub mod model;
pub mod quadrature;
pub mod siegert_solver;
pub mod tdse_oracle;
mod trig;
pub mod wavefunc;

pub use error::{Error, Result};
pub use model::{Parity, PotentialSpec, StateClass, UnitSystem};
pub use num_complex::Complex64;
pub use siegert_solver::{ScanRegion, SiegertRoot};
pub use wavefunc::{EigenFunction, WaveState};
