//! Weyl group actions on blow-ups of projective space at points of an
//! elliptic curve.
//!
//! The crate models the group `W(n, m)` in three parallel ways and provides the
//! machinery to check them against each other:
//!
//! - [`lattice`]: exact integer reflections on the Picard lattice
//!   `Z E + Z E_1 + ... + Z E_m` and its homology dual.
//! - [`config`]: the birational action (point swaps and the standard Cremona
//!   transformation) on `(n+1) x m` complex configuration matrices.
//! - [`elliptic`] and [`torus`]: the induced linear action on points of the
//!   torus `C / (Z + Z tau)` that parametrizes the configuration.
//!
//! [`harness`] ties the three together: it runs the geometric action, predicts
//! the result from the torus side, and measures the projective residual.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod config;
pub mod elliptic;
pub mod harness;
pub mod lattice;
pub mod linalg;
pub mod torus;

mod error;

pub use error::Error;
pub use linalg::{CMatrix, Scalar};

pub use num_complex::Complex64;
