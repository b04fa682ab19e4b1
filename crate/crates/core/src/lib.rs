//! Exact simulation of PT-symmetric two-level quantum dynamics.
//!
//! A two-level Hamiltonian that commutes with the combined parity (σ_x) and
//! time-reversal (complex conjugation) operators can be non-Hermitian and
//! still have an entirely real spectrum. This crate builds that family of
//! Hamiltonians in closed form, evolves states under it, constructs the
//! pseudo-Hermitian metric that makes the evolution norm-preserving in its
//! own inner product, and runs the entangled-pair protocol in which one
//! party applies such an evolution locally. The headline quantity is the
//! *signaling gap*: the change in the remote party's outcome distribution
//! induced purely by the local choice of operation, which vanishes exactly
//! when the local Hamiltonian is Hermitian.
//!
//! Everything is double precision and dimension 2 or 4 (plus small
//! embeddings), so all linear algebra is done in closed form; a
//! scaling-and-squaring series exponential is included purely as an
//! independent cross-check of the closed-form propagator.
//!
//! All values are immutable after construction and every operation is a
//! pure function, so the API is safe to use from concurrent contexts.

pub mod analysis;
pub mod linalg;
pub mod protocol;
pub mod pt;

mod error;

pub use error::{Error, Result};
