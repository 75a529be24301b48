//! Ordered parallel map over chain indices.

use anyhow::{Context, Result};
use rayon::prelude::*;

/// `f(0), ..., f(count - 1)` in index order, computed on `threads` workers.
///
/// Each index carries its own random stream, so the result does not depend
/// on `threads`.
pub fn par_map<T, F>(threads: usize, count: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    if threads <= 1 {
        return (0..count).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().context("building thread pool")?;
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_kept() {
        let f = |i: u64| Ok(i * i);
        assert_eq!(par_map(1, 50, f).unwrap(), par_map(4, 50, f).unwrap());
        let err = par_map(3, 10, |i| if i == 7 { anyhow::bail!("bad {i}") } else { Ok(i) });
        assert!(err.is_err());
    }
}
