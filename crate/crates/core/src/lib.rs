//! Exact large-order perturbation theory for the ground-state wave function of
//! one-dimensional anharmonic oscillators, the Euclidean zero-energy
//! trajectories that govern its asymptotics, and a harness comparing the two.

pub mod cli;
pub mod error;
pub mod harness;
pub mod numeric;
pub mod poly;
pub mod potential;
pub mod quad;
pub mod saddle;
pub mod series;
pub mod trajectory;

pub use error::{Error, Result, Side};
