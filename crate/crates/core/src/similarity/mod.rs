//! Similarity systems, their reduced profile `f(z)` and the normalized
//! zero-current solution `W(x,t) = t^{-α} y(z)`.
//!
//! The probability current is taken as `J = D¹W − ∂ₓ(D²W)`, the form that
//! turns the forward equation into the continuity equation `∂ₜW = −∂ₓJ`.

mod domain;
mod profile;
mod solution;
mod system;

pub use domain::{Domain, DomainKind};
pub use profile::{Profile, RealFn};
pub(crate) use solution::LogDensity;
pub use solution::{solve, solve_default, SimilaritySolution};
pub use system::{diffusion, drift, reduced_f, reduced_f_at, PhysicalPoint, ScalingLaw, SimilaritySystem};
