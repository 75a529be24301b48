//! The triangular lattice, domains, tilings and height functions.

mod domain;
mod entropy;
mod error;
mod geometry;
mod height;

pub use domain::{hexagon_steps, parse_steps, Domain};
pub use entropy::{discrete_energy, entropy_density, lobachevsky, SlopePair};
pub use error::LatticeError;
pub use geometry::{Direction, Face, FaceKind, Lozenge, LozengeKind, TriVertex};
pub use height::{
    extremal_extensions, extremal_heights, height_from_tiling, is_face_consistent, tiling_from_height, BoundaryHeightFunction,
    HeightFunction, Tiling, TilingRecord,
};
