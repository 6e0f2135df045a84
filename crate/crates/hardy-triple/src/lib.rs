//! Numerical toolkit for the three-component Sobolev-critical Schrödinger
//! system with inverse-square (Hardy) potentials
//!
//! ```text
//! -Δu_i - λ_i u_i/|x|^2 = |u_i|^{2*-2} u_i + Σ_{j≠i} β_ij |u_j|^{2*/2} |u_i|^{2*/2-2} u_i
//! ```
//!
//! on `R^N`, `N ≥ 3`, `i = 1,2,3`, restricted to radial profiles.  The crate
//! provides the closed-form scalar bubbles and sharp constants, a log-grid
//! radial quadrature, the system energy with its Nehari constraint sets,
//! projections onto those sets in all three dimensional regimes, the explicit
//! coupling-threshold chains for `N = 3` and `N = 4`, and constrained energy
//! minimization with the escaping-bubble scan for the mixed
//! cooperative/competitive case.

pub mod cli;
pub mod closed_forms;
pub mod functional;
pub mod grid;
pub(crate) mod mat3;
pub mod nehari;
pub mod solver;
pub mod thresholds;

pub use closed_forms::{BubbleParams, SharpConstants};
pub use functional::{CouplingMatrix, InteractionMatrix, TripleState};
pub use grid::{RadialGrid, RadialProfile};
pub use nehari::NehariCoefficients;
pub use solver::MinimizeResult;
pub use thresholds::ThresholdReport;
