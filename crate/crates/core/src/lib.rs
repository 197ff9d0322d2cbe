//! Exact similarity solutions of one-dimensional Fokker–Planck equations
//! with drift `D¹(x,t) = t^{α-1}ρ₁(x/t^α)` and diffusion
//! `D²(x,t) = t^{2α-1}ρ₂(x/t^α)`, together with the numerical oracles used
//! to verify them.

pub mod error;
pub mod exceptional;
pub mod numerics;
pub mod families;
pub mod mc_verify;
pub mod pde_verify;
pub mod similarity;

pub use error::{FpeError, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/similarity.md")]
    mod similarity {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/exceptional.md")]
    mod exceptional {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
