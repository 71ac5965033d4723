//! Entanglement dynamics of two parametrically driven, linearly coupled
//! harmonic oscillators, solved with Lewis–Riesenfeld invariants.
//!
//! The pipeline runs bottom-up:
//!
//! * [`scenario`] fixes ω, g, Δg, Ω and the normal-mode frequencies;
//! * [`integrator`] propagates the complex auxiliary equations;
//! * [`mathieu`] classifies parametric-resonance stability from monodromy
//!   matrices;
//! * [`auxiliary`] evolves the thermal-seeded amplitudes `B∓(t)`;
//! * [`gaussian`] turns them into reduced-state entropies and Wigner functions;
//! * [`general`] solves the general quadratic Hamiltonian through coupled
//!   auxiliary matrices.

// `!(x > 0.0)` is used on purpose so NaN lands in the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auxiliary;
pub mod cli;
pub mod error;
pub mod gaussian;
pub mod general;
pub mod integrator;
pub mod mathieu;
pub mod scenario;

pub use error::{Error, Result};
pub use integrator::{IntegratorConfig, Method, OscState};
pub use scenario::{DriveParameters, ModeSelector, ScenarioConfig};
