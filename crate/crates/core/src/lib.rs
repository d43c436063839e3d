//! Abel-Jacobi immersions of metric graphs and their canonical C¹ thickenings.
//!
//! Modules in pipeline order:
//!
//! * [`graph`]: half-edge graphs with length functions and collapsing morphisms.
//! * [`period`]: the canonical cocycle `ω(Γ, λ)` and the good scalar product on `H₁(Γ; ℝ)`.
//! * [`abel_jacobi`]: the immersion into the Jacobian torus and its taut cut trees.
//! * [`thickening`]: the field `Φ_T` built from the bump profile `ψ`, and the
//!   sublevel set `W = Φ⁻¹[0, ¼]` on the torus.
//! * [`family`]: simplices of length functions along chains of collapses.
//! * [`verify`]: every check for one metric graph in a single report.
//! * [`cli`]: the command surface behind the `abeljac` binary.

pub mod abel_jacobi;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod family;
pub mod graph;
pub mod linalg;
pub mod period;
pub mod report;
pub mod thickening;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Graph, LengthFunction, SpanningTree};
pub use report::{Check, Report, Status};

/// Tolerance for exact structural identities (balance, `λ_*` identity).
pub const TOL_STRUCTURAL: f64 = 1e-12;
/// Tolerance for geometric comparisons (zero vectors, tautness).
pub const TOL_GEOMETRIC: f64 = 1e-9;
