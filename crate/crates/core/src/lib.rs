//! Reachability and synthesis for two-agent resource engines.
//!
//! Two families are covered:
//!
//! * the athermality engine, where two agents alternate thermal operations
//!   at a cold and a hot inverse temperature ([`thermo`], [`athermality`]);
//! * the coherence engine, where two agents alternate diagonal unitaries in
//!   two different bases ([`coherence`], [`qubit`], [`mutual`]).
//!
//! Indices in the public API are 0-based. Energy level `0` is the ground state.

pub mod athermality;
pub mod coherence;
pub mod error;
pub mod hull;
pub mod matrix_io;
pub mod mutual;
pub mod qubit;
pub mod rng;
pub mod thermo;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64;
