//! Numerical laboratory for short-time behaviour of the uniformly parabolic
//! equation ∂ₜu = Δφ(u).

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod nonlinearity;
pub mod numerics;
pub mod pde;
pub mod selfsimilar;

pub use error::{Error, Result};
pub use nonlinearity::{Nonlinearity, PhiTransform};
