//! Uniform sampling of lozenge tilings: exhaustive enumeration for small
//! regions, single-site Glauber dynamics and monotone coupling from the past.

mod cftp;
mod chain;
mod enumerate;

use thiserror::Error;

use crate::lattice::LatticeError;

pub use cftp::{sample_cftp, CftpDiagnostics, CftpOptions, CftpSampler};
pub use chain::{flippable, glauber_step, sample_mcmc, ChainState, Flip, GridChain};
pub use enumerate::{enumerate_heights, enumerate_tilings, enumerate_tilings_with_cap, DEFAULT_FACE_CAP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("domain has {faces} faces, above the enumeration cap of {cap}")]
    TooLarge { faces: usize, cap: usize },
    #[error("coupling from the past did not coalesce within {proposals} proposals")]
    CapExceeded { proposals: u64 },
}
