//! Shared numerical primitives: quadrature, running integrals,
//! finite-difference stencils, special functions, interpolation and
//! deterministic random streams.

mod cumulative;
mod fd;
mod interp;
mod quad;
mod rng;
mod special;

pub use cumulative::{cumulative_integral, cumulative_integral_with, integrate_from, CumulativeOptions};
pub use fd::{fd_derivatives, fd_first};
pub use interp::MonotoneCubic;
pub use quad::{adaptive_quad, adaptive_quad_with, Interval, QuadOptions, QuadResult};
pub use rng::{seeded_stream, RandomStream};
pub use special::{factorial, gamma, ln_gamma, odd_double_factorial};
