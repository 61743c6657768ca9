//! Numerical core for a linearly quenched non-Hermitian two-level mode with
//! a dynamical Hilbert-space metric.
//!
//! The crate integrates the twin Schrödinger equations of the state and the
//! metric weight operator, maps the dynamics to its Hermitian frame through
//! the Dyson square root, and evaluates spin expectations both in the metric
//! inner product and by naive norm division, together with the closed-form
//! asymptotics and the momentum-integrated defect densities.
//!
//! `no_std`-compatible (with `alloc`); the companion CLI crate carries all
//! IO and file formats.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod algebra;
pub mod defects;
pub mod evolution;
pub mod model;
pub mod observables;
pub mod validation;

pub use num_complex::Complex64;
