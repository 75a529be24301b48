use thiserror::Error;

use super::geometry::{Direction, Face, TriVertex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("boundary path is not closed: it ends at {end} instead of {start}")]
    OpenPath { start: TriVertex, end: TriVertex },
    #[error("boundary path visits {0} twice")]
    SelfIntersection(TriVertex),
    #[error("boundary path encloses no triangular face")]
    EmptyInterior,
    #[error("region has {0} triangular faces; an odd count cannot be tiled by lozenges")]
    OddFaceCount(usize),
    #[error("vertex {0} is not in the domain")]
    VertexOutsideDomain(TriVertex),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("edge {from} -> {dir} has height increment {diff}, must be 0 or 1")]
    EdgeConstraint { from: TriVertex, dir: Direction, diff: i64 },
    #[error("face {0:?} pairs across the domain boundary")]
    FaceInconsistent(Face),
    #[error("face {0:?} is not covered by the tiling")]
    UncoveredFace(Face),
    #[error("face {0:?} is covered twice")]
    DoublyCoveredFace(Face),
    #[error("face {0:?} lies outside the domain")]
    FaceOutsideDomain(Face),
    #[error("region is not tileable: {0}")]
    NotTileable(String),
    #[error("value {value} is outside the allowed range {range}")]
    OutOfRange { value: f64, range: &'static str },
    #[error("domain text: {0}")]
    Parse(String),
    #[error("height functions live on different domains")]
    DomainMismatch,
}
