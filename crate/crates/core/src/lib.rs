//! Intrinsic localized modes (ILMs) of the one-dimensional discrete
//! nonlinear Schrödinger lattice with competing power nonlinearities
//!
//!   i u̇_n + ε(u_{n+1} − 2u_n + u_{n−1}) − u_n + |u_n|^{p−1}u_n − γ|u_n|^{q−1}u_n = 0,
//!
//! with integer powers 2 ≤ p < q, focusing power p and defocusing power q.
//!
//! What lives here:
//!
//! - **model**: the on-site nonlinearity f(u) = u(1 − |u|^{p−1} + γ|u|^{q−1}),
//!   its critical coupling γ_{p,q}, the two nonzero roots a < A, conserved
//!   energy/mass, and the map from physical lattice constants to the
//!   normalized (ε, γ) parameters.
//! - **codes**: finite words over {a₊, a₋, A₊, A₋} labelling ILM branches at
//!   the anticontinuum limit, their equivalence classes under sign flip and
//!   reflection, enumeration and closed-form counts.
//! - **solver**: zero-padded lattice windows, anticontinuum seeds, and Newton
//!   continuation of steady states to ε > 0 with a tridiagonal Jacobian.
//! - **spectrum**: the linearization operators L±, the N×N truncated pencil
//!   governing the O(ε) eigenvalues, Krein signatures, analytic inertia
//!   predictions, index-count identities, and stability verdicts.
//! - **continuation**: pseudo-arclength branch tracking in ε with fold and
//!   pitchfork detection.
//! - **scan**: bulk classification of all irreducible codes over (N, δ) grids
//!   and eigenvalue sweeps in γ.
//! - **dynamics**: RK4 time integration with conserved-quantity monitoring and
//!   orbital-deviation growth-rate fits.
//!
//! The crate is `no_std` (alloc only); all floating-point special functions
//! go through `libm`. Everything is pure and deterministic: the same inputs
//! produce the same bits on every run.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod codes;
pub mod complex;
pub mod continuation;
pub mod dynamics;
mod error;
pub(crate) mod float;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod scan;
pub mod solver;
pub mod spectrum;

pub use error::{Error, Result};
