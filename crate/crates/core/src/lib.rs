//! First-passage times of Ornstein-Uhlenbeck processes and joint
//! probabilities of their interval maxima.
//!
//! - [`eigen`]: Hermite functions of real order, ₁F₁ and the eigen systems of
//!   the first-passage expansion.
//! - [`fpt`]: survival, density and hazard for one barrier.
//! - [`transform`]: time change of a process with time-dependent coefficients.
//! - [`crossing`]: joint crossing probabilities by nested quadrature, the
//!   product form and importance sampling.
//! - [`directmc`]: path simulation with exact steps.
//! - [`cli`]: the `ou-x` front end.

pub mod cli;
pub mod crossing;
pub mod directmc;
pub mod eigen;
pub mod error;
pub mod fpt;
pub mod prob;
pub mod quad;
pub mod transform;

pub use error::{Error, Result};
pub use fpt::{OuParams, StandardizedProblem};
pub use prob::{Density, ErrKind, ProbResult};
