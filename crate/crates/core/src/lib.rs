//! Entanglement verification for the correlation phase of quantum key
//! distribution.
//!
//! The crate simulates the 4-state (x/z bases) and 6-state (x/y/z bases)
//! protocols on an effectively distributed two-qubit state, and decides from
//! the observed joint outcome table alone whether that state is provably
//! entangled:
//!
//! - [`witnesses::detect_4state`] builds the symmetrized operator
//!   `Ω = ¼(ρ + ρ^{T_A} + ρ^{T_B} + ρ^T)` from x/z data and certifies
//!   entanglement with the witness `½(Q + Q^{T_B})` built from Ω's negative
//!   eigenvector.
//! - [`witnesses::detect_6state`] reconstructs ρ tomographically and applies
//!   the partial-transpose test, reporting an optimal witness.
//! - [`information`] shows the flip side: correlations explained by a
//!   separable state admit an eavesdropper extension with `I(A;B|E) = 0`.
//!
//! Linear algebra is exact small dense 2×2 / 4×4 complex arithmetic
//! ([`qlinalg`]); no external LAPACK is involved.
//!
//! The `parallel` feature (on by default) runs grid searches, sweeps and
//! batch checks on rayon; without it the same code runs sequentially and
//! produces bit-identical results.

pub mod channels;
pub mod cli;
pub mod error;
pub mod information;
pub mod measurements;
pub mod par;
pub mod qlinalg;
pub mod sampling;
pub mod states;
pub mod witnesses;

pub use error::{Error, Result};

/// Default tolerance for structural checks (hermiticity, normalization).
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default tolerance for entanglement verdicts.
pub const VERDICT_TOL: f64 = 1e-9;
