//! Exact checks: enumeration counts, the array bijection, the height-sum
//! identity, the level-set tree and the eigensolver.

use std::sync::Arc;

use anyhow::Result;
use lgl_core::concentration::{conditional_variance_check, dist_g, level_set_decomposition, DifferenceFunction};
use lgl_core::gue::{corners_eigenvalues, eigenvalues_by_charpoly, sample_gue_matrix};
use lgl_core::sampler::{enumerate_heights, enumerate_tilings, CftpOptions, CftpSampler, DEFAULT_FACE_CAP};
use lgl_core::trapezoid::{array_from_tiling, height_sum_identity, tiling_from_array, InterlacingArray, TrapezoidSpec};
use lgl_core::{height_from_tiling, tiling_from_height, BoundaryHeightFunction, CounterRng, Domain, Seed};
use serde::{Deserialize, Serialize};

use crate::parallel::par_map;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// First failure, or a short description of what was covered.
    pub detail: String,
}

impl OracleCheck {
    fn new(name: &str) -> Self {
        OracleCheck { name: name.into(), cases: 0, failures: 0, detail: String::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            if self.failures == 0 {
                self.detail = what();
            }
            self.failures += 1;
        }
    }

    fn covered(mut self, text: impl Into<String>) -> Self {
        if self.failures == 0 {
            self.detail = text.into();
        }
        self
    }

    pub fn pass(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub experiment: String,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(OracleCheck::pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn summary(&self) -> String {
        let mut s = String::from("oracle\n");
        for c in &self.checks {
            let verdict = if c.pass() { "ok  " } else { "FAIL" };
            s += &format!("  [{verdict}] {:<36} {:>7} cases, {} failures: {}\n", c.name, c.cases, c.failures, c.detail);
        }
        s
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Boxed plane partitions in an `a x b x c` box, `∏ (i+j+k-1)/(i+j+k-2)`.
pub fn plane_partitions(a: u32, b: u32, c: u32) -> u128 {
    let (mut num, mut den) = (1u128, 1u128);
    for i in 1..=a {
        for j in 1..=b {
            for k in 1..=c {
                num *= u128::from(i + j + k - 1);
                den *= u128::from(i + j + k - 2);
                let g = gcd(num, den);
                num /= g;
                den /= g;
            }
        }
    }
    num / den
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

fn hexagon_boundary(a: u32, b: u32, c: u32) -> Result<BoundaryHeightFunction> {
    Ok(BoundaryHeightFunction::of_domain(Arc::new(Domain::hexagon(a, b, c)?), 0)?)
}

/// Tiling counts of small hexagons against the plane-partition product and,
/// for `a x b x 1`, against `binomial(a + b, a)`.
pub fn enumeration_counts() -> Result<OracleCheck> {
    let mut c = OracleCheck::new("enumeration counts");
    let expected = [((2, 2, 2), 20u128), ((3, 2, 1), 10), ((4, 3, 1), 35)];
    for ((a, b, k), want) in expected {
        let bd = hexagon_boundary(a, b, k)?;
        let got = enumerate_tilings(bd.domain(), &bd)?.len() as u128;
        c.record(got == want, || format!("{a}x{b}x{k}: {got} tilings, expected {want}"));
    }
    for (a, b, k) in [(1, 1, 1), (3, 3, 3), (4, 2, 2), (3, 3, 2), (5, 2, 1), (2, 6, 1)] {
        let bd = hexagon_boundary(a, b, k)?;
        let got = enumerate_tilings(bd.domain(), &bd)?.len() as u128;
        let want = if k == 1 { binomial(u64::from(a + b), u64::from(a)) } else { plane_partitions(a, b, k) };
        c.record(got == want, || format!("{a}x{b}x{k}: {got} tilings, expected {want}"));
    }
    Ok(c.covered("9 hexagons"))
}

/// Every trapezoid with `1 <= L <= max_width`, `0 <= A <= max_side`.
pub fn all_trapezoids(max_width: u32, max_side: u32) -> Vec<TrapezoidSpec> {
    let mut out = Vec::new();
    for l in 1..=max_width {
        for a in 0..=max_side {
            let n = l + a;
            for mask in 0u32..(1 << n) {
                if mask.count_ones() == l {
                    let lambda = (0..n as i32).filter(|&i| mask >> i & 1 == 1).collect();
                    out.push(TrapezoidSpec::new(l, a, lambda).expect("valid dents"));
                }
            }
        }
    }
    out
}

/// Array to tiling and back on every tiling of every small trapezoid; the
/// number of tilings matches the product formula and the number of
/// interlacing arrays with the given top row.
pub fn bijection_round_trips(max_width: u32, max_side: u32) -> Result<OracleCheck> {
    let mut c = OracleCheck::new("array bijection round trips");
    let specs = all_trapezoids(max_width, max_side);
    for spec in &specs {
        let d = Arc::new(spec.domain()?);
        let b = BoundaryHeightFunction::of_domain(d.clone(), 0)?;
        let tilings = enumerate_tilings(&d, &b)?;
        let arrays = InterlacingArray::enumerate_with_top(&spec.lambda);
        let n = tilings.len() as u128;
        c.record(n == spec.tiling_count() && tilings.len() == arrays.len(), || {
            format!("{spec:?}: {n} tilings, {} arrays, product {}", arrays.len(), spec.tiling_count())
        });
        for t in &tilings {
            let back = array_from_tiling(t, spec).and_then(|a| Ok((tiling_from_array(&a, spec)?, a)));
            c.record(matches!(&back, Ok((u, a)) if u == t && arrays.contains(a)), || format!("{spec:?}: {back:?}"));
        }
    }
    Ok(c.covered(format!("{} trapezoids with L <= {max_width}, A <= {max_side}", specs.len())))
}

/// The sum of the dents through heights on the right boundary, on every
/// tiling of every small trapezoid.
pub fn height_sum_exhaustive(max_width: u32, max_side: u32) -> Result<OracleCheck> {
    let mut c = OracleCheck::new("height-sum identity (all tilings)");
    for spec in all_trapezoids(max_width, max_side) {
        let d = Arc::new(spec.domain()?);
        let b = BoundaryHeightFunction::of_domain(d.clone(), 0)?;
        for t in enumerate_tilings(&d, &b)? {
            let (lhs, rhs) = height_sum_identity(&t, &spec)?;
            c.record(lhs == rhs, || format!("{spec:?}: {lhs} != {rhs}"));
        }
    }
    Ok(c.covered(format!("L <= {max_width}, A <= {max_side}")))
}

/// A trapezoid with `1 <= L <= max_width`, `0 <= A <= max_side` and random
/// dents, drawn from the stream `(seed, index)`.
pub fn random_trapezoid(max_width: u32, max_side: u32, seed: Seed, index: u64) -> TrapezoidSpec {
    let mut rng = CounterRng::new(seed, index, 0x7472_6170);
    let l = 1 + (rng.next_word() % u64::from(max_width)) as u32;
    let a = (rng.next_word() % u64::from(max_side + 1)) as u32;
    // partial Fisher-Yates over 0..L+A
    let mut pool: Vec<i32> = (0..(l + a) as i32).collect();
    for i in 0..l as usize {
        let j = i + (rng.next_word() % (pool.len() - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut lambda = pool[..l as usize].to_vec();
    lambda.sort_unstable();
    TrapezoidSpec::new(l, a, lambda).expect("valid dents")
}

/// The height-sum identity on `count` exact samples, each from its own
/// random trapezoid.
pub fn height_sum_sampled(count: usize, max_width: u32, max_side: u32, seed: Seed, threads: usize) -> Result<OracleCheck> {
    let results = par_map(threads, count as u64, |i| {
        let spec = random_trapezoid(max_width, max_side, seed, i);
        let d = Arc::new(spec.domain()?);
        let b = BoundaryHeightFunction::of_domain(d, 0)?;
        let t = CftpSampler::new(&b, CftpOptions::default())?.sample(seed, i)?;
        let (lhs, rhs) = height_sum_identity(&t, &spec)?;
        Ok((spec, lhs, rhs))
    })?;
    let mut c = OracleCheck::new("height-sum identity (sampled)");
    let max_l = results.iter().map(|r| r.0.width).max().unwrap_or(0);
    for (spec, lhs, rhs) in results {
        c.record(lhs == rhs, || format!("{spec:?}: {lhs} != {rhs}"));
    }
    Ok(c.covered(format!("{count} samples, widths up to {max_l}")))
}

/// Tiling to height function and back on every tiling of small hexagons.
pub fn height_round_trips() -> Result<OracleCheck> {
    let mut c = OracleCheck::new("tiling/height round trips");
    for (a, b, k) in [(2, 2, 2), (3, 2, 2), (3, 3, 2)] {
        let bd = hexagon_boundary(a, b, k)?;
        for t in enumerate_tilings(bd.domain(), &bd)? {
            let back = height_from_tiling(&t, bd.domain().start(), 0).and_then(|h| tiling_from_height(&h));
            c.record(back.as_ref() == Ok(&t), || format!("{a}x{b}x{k}: {back:?}"));
        }
    }
    Ok(c.covered("hexagons 2x2x2, 3x2x2, 3x3x2"))
}

/// Jacobi eigenvalues of every corner against the roots of its
/// characteristic polynomial, on random Hermitian matrices of orders 1..=5.
pub fn eigensolver_vs_charpoly(count: usize, seed: Seed, tol: f64) -> Result<OracleCheck> {
    let mut c = OracleCheck::new("eigensolver vs characteristic polynomial");
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let k = 1 + i % 5;
        let m = sample_gue_matrix(k, seed, i as u64);
        let levels = corners_eigenvalues(&m).map(|s| s.levels().to_vec());
        let ok = match &levels {
            Ok(levels) => (1..=k).all(|j| {
                let roots = eigenvalues_by_charpoly(&m.corner(j));
                roots.len() == j
                    && levels[j - 1].iter().zip(&roots).all(|(a, b)| {
                        worst = worst.max((a - b).abs());
                        (a - b).abs() < tol
                    })
            }),
            Err(_) => false,
        };
        c.record(ok, || format!("matrix {i} (order {k}): {levels:?}"));
    }
    Ok(c.covered(format!("{count} matrices, largest difference {worst:.2e}")))
}

/// Conditional variance of the difference function equals tree distance,
/// exactly, on the regular hexagon of side `n`.
pub fn conditional_variance_identity(n: u32) -> Result<OracleCheck> {
    let r = conditional_variance_check(&hexagon_boundary(n, n, n)?, 0, 0)?;
    let mut c = OracleCheck::new("conditional variance = tree distance");
    c.cases = r.checks;
    c.failures = r.mismatches + (r.groups - r.uniform_groups);
    c.detail = format!(
        "{} pairs in {} groups, {} mismatches, {} groups with non-uniform signs",
        r.pairs,
        r.groups,
        r.mismatches,
        r.groups - r.uniform_groups
    );
    Ok(c)
}

/// Level-set forests of all ordered pairs of height functions on the
/// regular hexagon of side `n`: partition, tree and adjacency invariants,
/// and `dist_G(u, v)` at most the lattice distance.
pub fn level_set_invariants(n: u32) -> Result<OracleCheck> {
    let b = hexagon_boundary(n, n, n)?;
    let heights = enumerate_heights(&b, DEFAULT_FACE_CAP)?;
    let d = b.domain();
    let mut c = OracleCheck::new("level-set tree invariants");
    for (i, h) in heights.iter().enumerate() {
        for (j, h2) in heights.iter().enumerate() {
            let f = DifferenceFunction::from_heights(h, h2)?;
            let res = level_set_decomposition(&f).and_then(|forest| {
                forest.validate()?;
                for &u in d.vertices() {
                    for &v in d.vertices() {
                        if dist_g(&forest, u, v)? > u.lattice_distance(v) {
                            return Ok(Some((u, v)));
                        }
                    }
                }
                Ok(None)
            });
            c.record(matches!(res, Ok(None)), || format!("pair ({i}, {j}): {res:?}"));
        }
    }
    Ok(c.covered(format!("{} ordered pairs", heights.len().pow(2))))
}

/// All exact checks at their default sizes.
pub fn run_all(seed: Seed, threads: usize) -> Result<OracleReport> {
    let checks = vec![
        enumeration_counts()?,
        bijection_round_trips(3, 4)?,
        height_sum_exhaustive(3, 3)?,
        height_sum_sampled(200, 8, 4, seed, threads)?,
        height_round_trips()?,
        eigensolver_vs_charpoly(100, seed, 1e-8)?,
        conditional_variance_identity(2)?,
        level_set_invariants(2)?,
    ];
    Ok(OracleReport { experiment: "oracle".into(), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_formulas() {
        assert_eq!(plane_partitions(2, 2, 2), 20);
        assert_eq!(plane_partitions(3, 3, 3), 980);
        assert_eq!(binomial(5, 3), 10);
        assert_eq!(binomial(7, 4), 35);
        for (a, b) in [(3, 2), (4, 3), (6, 2)] {
            assert_eq!(plane_partitions(a, b, 1), binomial(u64::from(a + b), u64::from(a)));
        }
    }

    #[test]
    fn random_trapezoids_are_valid_and_vary() {
        let specs: Vec<_> = (0..200).map(|i| random_trapezoid(8, 4, 3, i)).collect();
        assert!(specs.iter().all(|s| (1..=8).contains(&s.width) && s.side <= 4));
        assert!(specs.iter().any(|s| s.width == 8) && specs.iter().any(|s| s.width == 1));
        assert_eq!(random_trapezoid(8, 4, 3, 7), specs[7]);
        assert_eq!(all_trapezoids(2, 1).len(), 1 + 2 + 1 + 3);
    }
}
