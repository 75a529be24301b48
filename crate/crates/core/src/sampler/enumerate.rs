use std::sync::Arc;

use super::SamplerError;
use crate::lattice::{
    extremal_heights, is_face_consistent, tiling_from_height, BoundaryHeightFunction, Domain, HeightFunction,
    LatticeError, Tiling,
};

/// Largest face count accepted by [`enumerate_tilings`].
pub const DEFAULT_FACE_CAP: usize = 60;

/// Every height function extending `b`, in lexicographic order of the
/// interior values (interior vertices ordered by `x`, then `y`).
pub fn enumerate_heights(b: &BoundaryHeightFunction, face_cap: usize) -> Result<Vec<HeightFunction>, SamplerError> {
    let d = b.domain().clone();
    if d.faces().len() > face_cap {
        return Err(SamplerError::TooLarge { faces: d.faces().len(), cap: face_cap });
    }
    let (lo, hi) = match extremal_heights(b) {
        Ok(x) => x,
        Err(LatticeError::NotTileable(_)) => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    const UNSET: i32 = i32::MIN;
    let mut values = vec![UNSET; d.num_vertices()];
    for (i, h) in b.entries() {
        values[i] = h;
    }
    // vertices are stored sorted, so predecessors come first
    let order: Vec<usize> = d.interior().iter().map(|&i| i as usize).collect();
    let mut out = Vec::new();
    dfs(&d, &order, 0, &mut values, &lo, &hi, &mut out);
    Ok(out.into_iter().filter(is_face_consistent).collect())
}

fn dfs(
    d: &Arc<Domain>,
    order: &[usize],
    k: usize,
    values: &mut Vec<i32>,
    lo: &HeightFunction,
    hi: &HeightFunction,
    out: &mut Vec<HeightFunction>,
) {
    if k == order.len() {
        out.push(HeightFunction::new_unchecked(d.clone(), values.clone()));
        return;
    }
    let i = order[k];
    let (mut a, mut b) = (lo.at(i), hi.at(i));
    for p in d.backward_neighbors(i).into_iter().flatten() {
        if values[p] != i32::MIN {
            a = a.max(values[p]);
            b = b.min(values[p] + 1);
        }
    }
    for s in d.forward_neighbors(i).into_iter().flatten() {
        if values[s] != i32::MIN {
            a = a.max(values[s] - 1);
            b = b.min(values[s]);
        }
    }
    for v in a..=b {
        values[i] = v;
        dfs(d, order, k + 1, values, lo, hi, out);
    }
    values[i] = i32::MIN;
}

/// All tilings of `d` with boundary heights `b`.
pub fn enumerate_tilings(d: &Arc<Domain>, b: &BoundaryHeightFunction) -> Result<Vec<Tiling>, SamplerError> {
    enumerate_tilings_with_cap(d, b, DEFAULT_FACE_CAP)
}

pub fn enumerate_tilings_with_cap(d: &Arc<Domain>, b: &BoundaryHeightFunction, cap: usize) -> Result<Vec<Tiling>, SamplerError> {
    if b.domain() != d {
        return Err(LatticeError::DomainMismatch.into());
    }
    enumerate_heights(b, cap)?
        .iter()
        .map(|h| tiling_from_height(h).map_err(SamplerError::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(a: u32, b: u32, c: u32) -> usize {
        let d = Arc::new(Domain::hexagon(a, b, c).unwrap());
        let bh = BoundaryHeightFunction::of_domain(d.clone(), 0).unwrap();
        enumerate_tilings(&d, &bh).unwrap().len()
    }

    #[test]
    fn small_hexagon_counts() {
        assert_eq!(count(1, 1, 1), 2);
        assert_eq!(count(2, 2, 2), 20);
        assert_eq!(count(3, 2, 1), 10);
    }

    #[test]
    fn cap_is_enforced() {
        let d = Arc::new(Domain::hexagon(4, 4, 4).unwrap());
        let b = BoundaryHeightFunction::of_domain(d.clone(), 0).unwrap();
        assert_eq!(enumerate_tilings(&d, &b), Err(SamplerError::TooLarge { faces: 96, cap: 60 }));
    }
}
