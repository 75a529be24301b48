//! Lozenge tilings of lattice regions, exact samplers for the uniform
//! measure, interlacing arrays along trapezoid boundaries and the
//! GUE-corners process they converge to.

pub mod concentration;
pub mod gue;
pub mod lattice;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod trapezoid;

pub use lattice::*;
pub use rng::{CounterRng, Seed};
