use std::sync::Arc;

use rand_core::RngCore;

use super::SamplerError;
use crate::lattice::{extremal_heights, tiling_from_height, BoundaryHeightFunction, Domain, HeightFunction, LatticeError, Tiling, TriVertex};
use crate::rng::{CounterRng, Seed};

/// Which single-site moves are available at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flip {
    None,
    Up,
    Down,
    Both,
}

/// Range of values `H(v)` may take given its neighbours.
fn local_range(d: &Domain, values: &[i32], i: usize) -> (i32, i32) {
    let mut lo = i32::MIN;
    let mut hi = i32::MAX;
    for p in d.backward_neighbors(i).into_iter().flatten() {
        lo = lo.max(values[p]);
        hi = hi.min(values[p] + 1);
    }
    for s in d.forward_neighbors(i).into_iter().flatten() {
        lo = lo.max(values[s] - 1);
        hi = hi.min(values[s]);
    }
    (lo, hi)
}

/// Moves available at `v`; boundary vertices never move.
pub fn flippable(h: &HeightFunction, v: TriVertex) -> Result<Flip, LatticeError> {
    let d = h.domain();
    let i = d.index_of(v).ok_or(LatticeError::VertexOutsideDomain(v))?;
    if d.is_boundary(i) {
        return Ok(Flip::None);
    }
    let (lo, hi) = local_range(d, h.values(), i);
    let cur = h.at(i);
    Ok(match (cur < hi, cur > lo) {
        (true, true) => Flip::Both,
        (true, false) => Flip::Up,
        (false, true) => Flip::Down,
        (false, false) => Flip::None,
    })
}

/// Splits one random word into a uniform index below `n` and a direction bit.
#[inline]
pub(crate) fn decode(word: u64, n: usize) -> (usize, bool) {
    let idx = (((word >> 1) as u128 * n as u128) >> 63) as usize;
    (idx, word & 1 == 1)
}

/// State of a single Glauber chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainState {
    pub current: HeightFunction,
    /// Proposals made so far.
    pub proposals: u64,
    /// Words consumed from the chain's random stream.
    pub rng_position: u64,
}

impl ChainState {
    pub fn new(start: HeightFunction) -> Self {
        ChainState { current: start, proposals: 0, rng_position: 0 }
    }

    /// Completed sweeps, one sweep being as many proposals as interior vertices.
    pub fn sweep_count(&self) -> u64 {
        let n = self.current.domain().interior().len() as u64;
        self.proposals.checked_div(n).unwrap_or(0)
    }
}

/// One proposal: a uniform interior vertex and a fair sign; the move is
/// applied when the result is still a height function.
///
/// Because `H(v)` can only take two adjacent values given its neighbours,
/// this equals setting `H(v)` to the larger admissible value on `+` and the
/// smaller on `-`, which is monotone in the neighbouring values.
pub fn glauber_step(mut state: ChainState, rng: &mut CounterRng) -> ChainState {
    let d = state.current.domain().clone();
    let n = d.interior().len();
    state.proposals += 1;
    if n == 0 {
        return state;
    }
    let (k, up) = decode(rng.next_u64(), n);
    state.rng_position = rng.position();
    let i = d.interior()[k] as usize;
    let mut values = state.current.values().to_vec();
    let (lo, hi) = local_range(&d, &values, i);
    values[i] = if up { hi } else { lo };
    state.current = HeightFunction::new_unchecked(d, values);
    state
}

/// Approximate sample: `sweeps` sweeps of Glauber dynamics from the minimal
/// height function.
pub fn sample_mcmc(d: &Arc<Domain>, b: &BoundaryHeightFunction, seed: Seed, sweeps: u64) -> Result<Tiling, SamplerError> {
    if b.domain() != d {
        return Err(LatticeError::DomainMismatch.into());
    }
    let (lo, _) = extremal_heights(b)?;
    let chain = GridChain::new(d.clone());
    let mut cells = chain.to_cells(&lo);
    let mut rng = CounterRng::for_chain(seed, 0);
    let n = d.interior().len() as u64;
    chain.run(&mut cells, &mut rng, sweeps * n);
    Ok(tiling_from_height(&chain.to_height(&cells))?)
}

/// Height values laid out on the bounding-box grid so that the six
/// neighbours of a cell sit at fixed offsets.
#[derive(Clone, Debug)]
pub struct GridChain {
    domain: Arc<Domain>,
    width: usize,
    cells: usize,
    cell_of: Vec<u32>,
    interior: Vec<u32>,
}

impl GridChain {
    pub fn new(domain: Arc<Domain>) -> Self {
        let (x0, y0, x1, y1) = domain.bounding_box();
        let width = (x1 - x0 + 1) as usize;
        let cells = width * (y1 - y0 + 1) as usize;
        let cell_of: Vec<u32> = domain
            .vertices()
            .iter()
            .map(|v| ((v.y - y0) as usize * width + (v.x - x0) as usize) as u32)
            .collect();
        let interior = domain.interior().iter().map(|&i| cell_of[i as usize]).collect();
        GridChain { domain, width, cells, cell_of, interior }
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn num_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn to_cells(&self, h: &HeightFunction) -> Vec<i32> {
        let mut out = vec![0; self.cells];
        for (i, &c) in self.cell_of.iter().enumerate() {
            out[c as usize] = h.at(i);
        }
        out
    }

    pub fn to_height(&self, cells: &[i32]) -> HeightFunction {
        let values = self.cell_of.iter().map(|&c| cells[c as usize]).collect();
        HeightFunction::new_unchecked(self.domain.clone(), values)
    }

    /// Value at domain vertex `i`.
    #[inline]
    pub fn value(&self, cells: &[i32], i: usize) -> i32 {
        cells[self.cell_of[i] as usize]
    }

    #[inline]
    fn update(&self, h: &mut [i32], c: usize, up: bool) {
        let w = self.width;
        // interior cells have all six neighbours inside the grid
        assert!(c > w && c + w + 1 < h.len());
        let (l, d, sw) = (h[c - 1], h[c - w], h[c - w - 1]);
        let (r, u, ne) = (h[c + 1], h[c + w], h[c + w + 1]);
        let hi = (l.min(d).min(sw) + 1).min(r.min(u).min(ne));
        let lo = l.max(d).max(sw).max(r.max(u).max(ne) - 1);
        // branch-free select; the sign bit is a coin flip
        let up = i32::from(up);
        h[c] = lo + up * (hi - lo);
    }

    /// Applies `count` proposals drawn from `rng`.
    pub fn run(&self, h: &mut [i32], rng: &mut CounterRng, count: u64) {
        let n = self.interior.len();
        if n == 0 {
            return;
        }
        for _ in 0..count {
            let (k, up) = decode(rng.next_u64(), n);
            self.update(h, self.interior[k] as usize, up);
        }
    }

    /// Applies the same `count` proposals to two coupled configurations.
    pub fn run_coupled(&self, top: &mut [i32], bottom: &mut [i32], rng: &mut CounterRng, count: u64) {
        let n = self.interior.len();
        if n == 0 {
            return;
        }
        for _ in 0..count {
            let (k, up) = decode(rng.next_u64(), n);
            let c = self.interior[k] as usize;
            self.update(top, c, up);
            self.update(bottom, c, up);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hex(n: u32) -> (Arc<Domain>, BoundaryHeightFunction) {
        let d = Arc::new(Domain::hexagon(n, n, n).unwrap());
        let b = BoundaryHeightFunction::of_domain(d.clone(), 0).unwrap();
        (d, b)
    }

    #[test]
    fn unit_hexagon_flips() {
        let (_, b) = hex(1);
        let (lo, hi) = extremal_heights(&b).unwrap();
        let c = TriVertex::new(1, 1);
        assert_eq!(flippable(&lo, c).unwrap(), Flip::Up);
        assert_eq!(flippable(&hi, c).unwrap(), Flip::Down);
        assert_eq!(flippable(&lo, TriVertex::ORIGIN).unwrap(), Flip::None);
        assert!(flippable(&lo, TriVertex::new(5, 0)).is_err());
    }

    #[test]
    fn grid_chain_matches_glauber_step() {
        let (d, b) = hex(3);
        let (lo, _) = extremal_heights(&b).unwrap();
        let chain = GridChain::new(d);
        let mut cells = chain.to_cells(&lo);
        let mut r1 = CounterRng::for_chain(9, 0);
        let mut r2 = r1.clone();
        let mut state = ChainState::new(lo);
        for _ in 0..500 {
            state = glauber_step(state, &mut r1);
            chain.run(&mut cells, &mut r2, 1);
            assert_eq!(chain.to_height(&cells), state.current);
        }
        assert_eq!(state.proposals, 500);
        assert_eq!(state.rng_position, 500);
        assert_eq!(state.sweep_count(), 500 / 19);
    }

    #[test]
    fn mcmc_is_reproducible() {
        let (d, b) = hex(3);
        let a = sample_mcmc(&d, &b, 5, 50).unwrap();
        assert_eq!(a, sample_mcmc(&d, &b, 5, 50).unwrap());
    }
}
