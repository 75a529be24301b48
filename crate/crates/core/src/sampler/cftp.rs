use std::sync::Arc;

use super::chain::GridChain;
use super::SamplerError;
use crate::lattice::{extremal_heights, tiling_from_height, BoundaryHeightFunction, Domain, HeightFunction, LatticeError, Tiling};
use crate::rng::{CounterRng, Seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CftpOptions {
    /// Length of the most recent block, in sweeps.
    pub initial_sweeps: u64,
    /// Give up once this many proposals (per coupled pair) have been spent.
    pub max_proposals: u64,
}

impl Default for CftpOptions {
    fn default() -> Self {
        CftpOptions { initial_sweeps: 1, max_proposals: 1 << 30 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CftpDiagnostics {
    /// Number of starting times tried.
    pub attempts: u32,
    /// Proposals between the successful starting time and time 0.
    pub horizon: u64,
    /// Proposals spent over all attempts.
    pub total_proposals: u64,
}

/// Monotone coupling from the past for a fixed region and boundary.
///
/// Time before 0 is cut into blocks: block 0 is the last `T0` proposals,
/// block `j >= 1` the `T0 2^(j-1)` proposals before block `j-1`. Block `j`
/// always draws its randomness from the stream keyed `(seed, chain, j)`, so
/// extending the start time backwards reuses the randomness of the later
/// blocks exactly.
#[derive(Clone, Debug)]
pub struct CftpSampler {
    chain: GridChain,
    bottom: Vec<i32>,
    top: Vec<i32>,
    options: CftpOptions,
}

impl CftpSampler {
    pub fn new(b: &BoundaryHeightFunction, options: CftpOptions) -> Result<Self, SamplerError> {
        let (lo, hi) = extremal_heights(b)?;
        let chain = GridChain::new(b.domain().clone());
        let bottom = chain.to_cells(&lo);
        let top = chain.to_cells(&hi);
        Ok(CftpSampler { chain, bottom, top, options })
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.chain.domain()
    }

    pub fn grid(&self) -> &GridChain {
        &self.chain
    }

    fn block_len(&self, j: u32) -> u64 {
        let t0 = self.options.initial_sweeps.max(1) * self.chain.num_interior() as u64;
        if j == 0 {
            t0
        } else {
            t0 << (j - 1)
        }
    }

    /// Exact uniform sample as grid cells (see [`GridChain`]).
    pub fn sample_cells(&self, seed: Seed, chain_id: u64) -> Result<(Vec<i32>, CftpDiagnostics), SamplerError> {
        let mut diag = CftpDiagnostics::default();
        if self.chain.num_interior() == 0 || self.top == self.bottom {
            diag.attempts = 1;
            return Ok((self.bottom.clone(), diag));
        }
        let mut top = self.top.clone();
        let mut bottom = self.bottom.clone();
        for j in 0u32.. {
            let horizon: u64 = (0..=j).map(|b| self.block_len(b)).sum();
            if diag.total_proposals + horizon > self.options.max_proposals {
                return Err(SamplerError::CapExceeded { proposals: diag.total_proposals });
            }
            top.copy_from_slice(&self.top);
            bottom.copy_from_slice(&self.bottom);
            let mut merged = false;
            for b in (0..=j).rev() {
                let mut rng = CounterRng::new(seed, chain_id, u64::from(b));
                if merged {
                    // once the extremal chains agree, one copy suffices
                    self.chain.run(&mut bottom, &mut rng, self.block_len(b));
                } else {
                    let len = self.block_len(b);
                    let chunk = 8 * self.chain.num_interior() as u64;
                    let mut done = 0;
                    while done < len && !merged {
                        let step = chunk.min(len - done);
                        self.chain.run_coupled(&mut top, &mut bottom, &mut rng, step);
                        done += step;
                        merged = top == bottom;
                    }
                    self.chain.run(&mut bottom, &mut rng, len - done);
                }
            }
            diag.attempts = j + 1;
            diag.horizon = horizon;
            diag.total_proposals += horizon;
            if merged {
                return Ok((bottom, diag));
            }
        }
        unreachable!()
    }

    pub fn sample_height(&self, seed: Seed, chain_id: u64) -> Result<(HeightFunction, CftpDiagnostics), SamplerError> {
        let (cells, diag) = self.sample_cells(seed, chain_id)?;
        Ok((self.chain.to_height(&cells), diag))
    }

    pub fn sample(&self, seed: Seed, chain_id: u64) -> Result<Tiling, SamplerError> {
        let (h, _) = self.sample_height(seed, chain_id)?;
        Ok(tiling_from_height(&h)?)
    }
}

/// Exact uniform sample of the tilings of `d` with boundary data `b`.
pub fn sample_cftp(d: &Arc<Domain>, b: &BoundaryHeightFunction, seed: Seed) -> Result<Tiling, SamplerError> {
    if b.domain() != d {
        return Err(LatticeError::DomainMismatch.into());
    }
    CftpSampler::new(b, CftpOptions::default())?.sample(seed, 0)
}
