//! Difference of two height functions, its level-set decomposition and the
//! distance tree on level sets.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use num_rational::Ratio;
use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{BoundaryHeightFunction, Domain, HeightFunction, LatticeError, TriVertex};
use crate::rng::{CounterRng, Seed};
use crate::sampler::{enumerate_heights, CftpOptions, CftpSampler, SamplerError, DEFAULT_FACE_CAP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConcentrationError {
    #[error("difference is {value} at boundary vertex {at}")]
    NonzeroBoundary { at: TriVertex, value: i32 },
    #[error("difference jumps by {jump} between adjacent vertices {a} and {b}")]
    Jump { a: TriVertex, b: TriVertex, jump: i32 },
    #[error("level set {component} has {count} exterior-adjacent level sets")]
    ExteriorNotUnique { component: usize, count: usize },
    #[error("level-set forest invariant violated: {0}")]
    Invariant(String),
    #[error("{u} and {v} are not on a common line of the lattice")]
    NotAligned { u: TriVertex, v: TriVertex },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// `F = H - H'` for two height functions with the same boundary values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceFunction {
    domain: Arc<Domain>,
    values: Vec<i32>,
}

impl DifferenceFunction {
    pub fn from_heights(h: &HeightFunction, h2: &HeightFunction) -> Result<Self, ConcentrationError> {
        if h.domain() != h2.domain() {
            return Err(LatticeError::DomainMismatch.into());
        }
        let values = h.values().iter().zip(h2.values()).map(|(a, b)| a - b).collect();
        Self::new(h.domain().clone(), values)
    }

    /// Requires `F = 0` on the boundary and `|F(u) - F(v)| <= 1` for
    /// lattice-adjacent `u`, `v`.
    pub fn new(domain: Arc<Domain>, values: Vec<i32>) -> Result<Self, ConcentrationError> {
        if values.len() != domain.num_vertices() {
            return Err(LatticeError::LengthMismatch { expected: domain.num_vertices(), got: values.len() }.into());
        }
        for &b in domain.boundary_indices() {
            let b = b as usize;
            if values[b] != 0 {
                return Err(ConcentrationError::NonzeroBoundary { at: domain.vertex(b), value: values[b] });
            }
        }
        for i in 0..domain.num_vertices() {
            for j in domain.lattice_neighbors(i) {
                let jump = (values[i] - values[j]).abs();
                if jump > 1 {
                    return Err(ConcentrationError::Jump { a: domain.vertex(i), b: domain.vertex(j), jump });
                }
            }
        }
        Ok(DifferenceFunction { domain, values })
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn get(&self, v: TriVertex) -> Option<i32> {
        self.domain.index_of(v).map(|i| self.values[i])
    }
}

/// One level set `S_i` with its constant value `F(S_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSet {
    pub value: i32,
    /// Vertex indices, ascending.
    pub vertices: Vec<usize>,
}

/// Level sets of `F` and the tree in which each level set's parent is its
/// unique exterior-adjacent level set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSetForest {
    domain: Arc<Domain>,
    values: Vec<i32>,
    components: Vec<LevelSet>,
    /// Component of each vertex.
    label: Vec<usize>,
    parent: Vec<Option<usize>>,
    depth: Vec<u32>,
    root: usize,
}

/// Maximal connected sets of constant `F` under six-neighbour adjacency,
/// numbered in order of their least vertex.
pub fn level_set_decomposition(f: &DifferenceFunction) -> Result<LevelSetForest, ConcentrationError> {
    let d = f.domain.clone();
    let n = d.num_vertices();
    let mut label = vec![usize::MAX; n];
    let mut components = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let id = components.len();
        let value = f.values[s];
        let mut verts = vec![s];
        label[s] = id;
        let mut queue = VecDeque::from([s]);
        while let Some(i) = queue.pop_front() {
            for j in d.lattice_neighbors(i) {
                if label[j] == usize::MAX && f.values[j] == value {
                    label[j] = id;
                    verts.push(j);
                    queue.push_back(j);
                }
            }
        }
        verts.sort_unstable();
        components.push(LevelSet { value, vertices: verts });
    }
    let root = label[d.boundary_indices()[0] as usize];
    if d.boundary_indices().iter().any(|&b| label[b as usize] != root) {
        return Err(ConcentrationError::Invariant("boundary is split between level sets".into()));
    }
    let mut parent = vec![None; components.len()];
    let outside = ExteriorFinder::new(&d);
    for (c, comp) in components.iter().enumerate() {
        if c == root {
            continue;
        }
        let reach = outside.unbounded_complement(&comp.vertices);
        let mut ext: Vec<usize> = comp
            .vertices
            .iter()
            .flat_map(|&i| d.lattice_neighbors(i))
            .filter(|&j| label[j] != c && reach[outside.cell(d.vertex(j))])
            .map(|j| label[j])
            .collect();
        ext.sort_unstable();
        ext.dedup();
        if ext.len() != 1 {
            return Err(ConcentrationError::ExteriorNotUnique { component: c, count: ext.len() });
        }
        parent[c] = Some(ext[0]);
    }
    let mut depth = vec![u32::MAX; components.len()];
    depth[root] = 0;
    for c in 0..components.len() {
        let mut chain = vec![];
        let mut x = c;
        while depth[x] == u32::MAX {
            chain.push(x);
            if chain.len() > components.len() {
                return Err(ConcentrationError::Invariant("parent links contain a cycle".into()));
            }
            x = parent[x].ok_or_else(|| ConcentrationError::Invariant("non-root level set without parent".into()))?;
        }
        let mut dep = depth[x];
        for &y in chain.iter().rev() {
            dep += 1;
            depth[y] = dep;
        }
    }
    let forest = LevelSetForest { domain: d, values: f.values.clone(), components, label, parent, depth, root };
    forest.validate()?;
    Ok(forest)
}

/// Flood fill of the lattice minus a vertex set, inside the bounding box of
/// the domain widened by two cells; the frame lies in the unbounded part.
struct ExteriorFinder {
    x0: i32,
    y0: i32,
    width: usize,
    height: usize,
    domain_cells: Vec<usize>,
}

impl ExteriorFinder {
    fn new(d: &Domain) -> Self {
        let (x0, y0, x1, y1) = d.bounding_box();
        let (x0, y0) = (x0 - 2, y0 - 2);
        let width = (x1 + 2 - x0 + 1) as usize;
        let height = (y1 + 2 - y0 + 1) as usize;
        let mut f = ExteriorFinder { x0, y0, width, height, domain_cells: Vec::new() };
        f.domain_cells = d.vertices().iter().map(|&v| f.cell(v)).collect();
        f
    }

    fn cell(&self, v: TriVertex) -> usize {
        (v.y - self.y0) as usize * self.width + (v.x - self.x0) as usize
    }

    fn unbounded_complement(&self, set: &[usize]) -> Vec<bool> {
        let mut blocked = vec![false; self.width * self.height];
        for &i in set {
            blocked[self.domain_cells[i]] = true;
        }
        let mut seen = vec![false; blocked.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([(0i32, 0i32)]);
        while let Some((cx, cy)) = queue.pop_front() {
            let v = TriVertex::new(cx + self.x0, cy + self.y0);
            for n in v.neighbors() {
                let (nx, ny) = (n.x - self.x0, n.y - self.y0);
                if nx < 0 || ny < 0 || nx as usize >= self.width || ny as usize >= self.height {
                    continue;
                }
                let c = ny as usize * self.width + nx as usize;
                if !seen[c] && !blocked[c] {
                    seen[c] = true;
                    queue.push_back((nx, ny));
                }
            }
        }
        seen
    }
}

impl LevelSetForest {
    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn components(&self) -> &[LevelSet] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, c: usize) -> Option<usize> {
        self.parent[c]
    }

    pub fn children(&self, c: usize) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.parent[x] == Some(c)).collect()
    }

    pub fn depth(&self, c: usize) -> u32 {
        self.depth[c]
    }

    pub fn component_of(&self, v: TriVertex) -> Option<usize> {
        self.domain.index_of(v).map(|i| self.label[i])
    }

    /// Component labels by vertex index; two forests share a decomposition
    /// iff their labelings agree.
    pub fn labels(&self) -> &[usize] {
        &self.label
    }

    /// Tree distance between level sets.
    pub fn component_distance(&self, mut a: usize, mut b: usize) -> u32 {
        let mut dist = 0;
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
            dist += 1;
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
            dist += 1;
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
            dist += 2;
        }
        dist
    }

    /// Checks partition, constancy, connectivity, the unit jump between
    /// adjacent level sets, and that adjacency coincides with tree edges.
    pub fn validate(&self) -> Result<(), ConcentrationError> {
        let d = &self.domain;
        let bad = |s: String| Err(ConcentrationError::Invariant(s));
        let mut seen = vec![false; d.num_vertices()];
        for (c, comp) in self.components.iter().enumerate() {
            for &i in &comp.vertices {
                if std::mem::replace(&mut seen[i], true) {
                    return bad(format!("vertex {} in two level sets", d.vertex(i)));
                }
                if self.values[i] != comp.value || self.label[i] != c {
                    return bad(format!("level set {c} is not constant"));
                }
            }
            // connectivity
            let mut reached = vec![comp.vertices[0]];
            let mut mark: HashMap<usize, ()> = HashMap::from([(comp.vertices[0], ())]);
            let mut k = 0;
            while k < reached.len() {
                let i = reached[k];
                k += 1;
                for j in d.lattice_neighbors(i) {
                    if self.label[j] == c && mark.insert(j, ()).is_none() {
                        reached.push(j);
                    }
                }
            }
            if reached.len() != comp.vertices.len() {
                return bad(format!("level set {c} is disconnected"));
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("level sets do not cover the domain".into());
        }
        for i in 0..d.num_vertices() {
            for j in d.lattice_neighbors(i) {
                let (a, b) = (self.label[i], self.label[j]);
                if a == b {
                    continue;
                }
                if (self.components[a].value - self.components[b].value).abs() != 1 {
                    return bad(format!("adjacent level sets {a}, {b} differ by more than one"));
                }
                if self.parent[a] != Some(b) && self.parent[b] != Some(a) {
                    return bad(format!("adjacent level sets {a}, {b} are not joined in the tree"));
                }
            }
        }
        if self.parent[self.root].is_some() {
            return bad("root has a parent".into());
        }
        Ok(())
    }
}

/// Distance in the level-set tree between the sets containing `u` and `v`.
pub fn dist_g(forest: &LevelSetForest, u: TriVertex, v: TriVertex) -> Result<u32, ConcentrationError> {
    let a = forest.component_of(u).ok_or(LatticeError::VertexOutsideDomain(u))?;
    let b = forest.component_of(v).ok_or(LatticeError::VertexOutsideDomain(v))?;
    Ok(forest.component_distance(a, b))
}

/// Indicators of the events that both height increments from `u` to
/// `v = u + t w` are at most `δt`, respectively at least `(1-δ)t`.
pub fn f1_f2_events(
    h: &HeightFunction,
    h2: &HeightFunction,
    u: TriVertex,
    v: TriVertex,
    delta: f64,
) -> Result<(bool, bool), ConcentrationError> {
    let d = v - u;
    let t = match (d.x, d.y) {
        (x, 0) if x >= 0 => x,
        (0, y) if y >= 0 => y,
        (x, y) if x == y && x >= 0 => x,
        _ => return Err(ConcentrationError::NotAligned { u, v }),
    };
    let inc = |g: &HeightFunction| -> Result<f64, ConcentrationError> {
        let a = g.get(u).ok_or(LatticeError::VertexOutsideDomain(u))?;
        let b = g.get(v).ok_or(LatticeError::VertexOutsideDomain(v))?;
        Ok(f64::from(b - a))
    };
    let (a, b) = (inc(h)?, inc(h2)?);
    let t = f64::from(t);
    Ok((a <= delta * t && b <= delta * t, a >= (1.0 - delta) * t && b >= (1.0 - delta) * t))
}

/// Result of comparing conditional variances with tree distances over all
/// pairs of height functions of a small region.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionalVarianceReport {
    pub tilings: usize,
    pub pairs: usize,
    pub groups: usize,
    /// Vertex pairs checked, summed over groups.
    pub checks: usize,
    pub mismatches: usize,
    /// Groups in which every sign pattern on tree edges appears equally often.
    pub uniform_groups: usize,
    /// Largest total-variation distance between a group's law of `F` and
    /// the law produced by independent fair signs on tree edges.
    pub bernoulli_max_tv: f64,
    pub bernoulli_draws: usize,
}

impl ConditionalVarianceReport {
    pub fn holds(&self) -> bool {
        self.mismatches == 0 && self.uniform_groups == self.groups
    }
}

/// For every decomposition arising from a pair of height functions, the
/// exact variance of `F(u) - F(v)` over the pairs with that decomposition
/// is compared with `dist_g(u, v)`, for all vertex pairs.
pub fn conditional_variance_check(
    b: &BoundaryHeightFunction,
    draws_per_group: usize,
    seed: Seed,
) -> Result<ConditionalVarianceReport, ConcentrationError> {
    let heights = enumerate_heights(b, DEFAULT_FACE_CAP)?;
    let d = b.domain().clone();
    let n = d.num_vertices();
    // decomposition (vertex labels) -> (forest, F values of its members)
    let mut groups: BTreeMap<Vec<usize>, (LevelSetForest, Vec<Vec<i32>>)> = BTreeMap::new();
    for h in &heights {
        for h2 in &heights {
            let f = DifferenceFunction::from_heights(h, h2)?;
            let forest = level_set_decomposition(&f)?;
            groups
                .entry(forest.labels().to_vec())
                .or_insert_with(|| (forest, Vec::new()))
                .1
                .push(f.values);
        }
    }
    let mut report = ConditionalVarianceReport {
        tilings: heights.len(),
        pairs: heights.len() * heights.len(),
        groups: groups.len(),
        checks: 0,
        mismatches: 0,
        uniform_groups: 0,
        bernoulli_max_tv: 0.0,
        bernoulli_draws: draws_per_group,
    };
    for (g, (forest, members)) in groups.values().enumerate() {
        let count = members.len() as i64;
        for u in 0..n {
            for v in u + 1..n {
                let (mut s1, mut s2) = (0i64, 0i64);
                for f in members {
                    let x = i64::from(f[u] - f[v]);
                    s1 += x;
                    s2 += x * x;
                }
                let mean = Ratio::new(s1, count);
                let var = Ratio::new(s2, count) - mean * mean;
                let dist = forest.component_distance(forest.label[u], forest.label[v]);
                report.checks += 1;
                if var != Ratio::from_integer(i64::from(dist)) {
                    report.mismatches += 1;
                }
            }
        }
        let mut law: BTreeMap<&[i32], u64> = BTreeMap::new();
        for f in members {
            *law.entry(f.as_slice()).or_default() += 1;
        }
        let edges = forest.len() - 1;
        let uniform = law.len() == 1usize << edges && law.values().all(|&c| c == law.values().next().copied().unwrap());
        if uniform {
            report.uniform_groups += 1;
        }
        if draws_per_group > 0 && edges > 0 {
            let tv = bernoulli_tv(forest, &law, members.len(), draws_per_group, seed, g as u64);
            report.bernoulli_max_tv = report.bernoulli_max_tv.max(tv);
        }
    }
    Ok(report)
}

/// Resamples `F` by independent fair signs on the tree edges and returns
/// the total-variation distance to the group's law.
fn bernoulli_tv(
    forest: &LevelSetForest,
    law: &BTreeMap<&[i32], u64>,
    total: usize,
    draws: usize,
    seed: Seed,
    chain: u64,
) -> f64 {
    let mut rng = CounterRng::for_chain(seed, chain);
    let order = {
        let mut o: Vec<usize> = (0..forest.len()).collect();
        o.sort_by_key(|&c| forest.depth[c]);
        o
    };
    let mut counts: BTreeMap<Vec<i32>, u64> = BTreeMap::new();
    let mut comp_value = vec![0i32; forest.len()];
    for _ in 0..draws {
        for &c in &order {
            comp_value[c] = match forest.parent[c] {
                None => 0,
                Some(p) => comp_value[p] + if rng.next_u64() & 1 == 1 { 1 } else { -1 },
            };
        }
        let f: Vec<i32> = forest.label.iter().map(|&c| comp_value[c]).collect();
        *counts.entry(f).or_default() += 1;
    }
    let mut tv = 0.0;
    for (f, &c) in law {
        let p = c as f64 / total as f64;
        let q = counts.get(*f).copied().unwrap_or(0) as f64 / draws as f64;
        tv += (p - q).abs();
    }
    for (f, &c) in &counts {
        if !law.contains_key(f.as_slice()) {
            tv += c as f64 / draws as f64;
        }
    }
    0.5 * tv
}

/// A family of regions indexed by a size parameter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainFamily {
    /// Hexagon with all sides equal to the size.
    RegularHexagon,
    /// The base region scaled by the size.
    Scaled(String),
}

impl DomainFamily {
    pub fn member(&self, size: u32) -> Result<Domain, ConcentrationError> {
        Ok(match self {
            DomainFamily::RegularHexagon => Domain::hexagon(size, size, size)?,
            DomainFamily::Scaled(text) => Domain::from_text(text)?.scaled(size)?,
        })
    }
}

/// Height at the centre vertex for samples `0..count` of a region, each an
/// exact sample keyed by `(seed, sample index)`.
pub fn center_height_sample(d: &Arc<Domain>, seed: Seed, index: u64, sampler: &CftpSampler) -> Result<i32, ConcentrationError> {
    let c = d.index_of(d.center_vertex()).expect("centre lies in the domain");
    let (cells, _) = sampler.sample_cells(seed, index)?;
    Ok(sampler.grid().value(&cells, c))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub size: u32,
    pub samples: usize,
    pub center: TriVertex,
    pub mean: f64,
    pub variance: f64,
    pub variance_over_size: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub family: DomainFamily,
    pub seed: Seed,
    pub rows: Vec<VarianceRow>,
}

impl VarianceReport {
    /// Whether `Var/N` strictly decreases along the sizes.
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].variance_over_size < w[0].variance_over_size)
    }
}

/// Summarises centre heights of one size.
pub fn variance_row(d: &Domain, size: u32, heights: &[i32]) -> VarianceRow {
    let xs: Vec<f64> = heights.iter().map(|&h| f64::from(h)).collect();
    let variance = crate::stats::variance(&xs);
    VarianceRow {
        size,
        samples: heights.len(),
        center: d.center_vertex(),
        mean: crate::stats::mean(&xs),
        variance,
        variance_over_size: variance / f64::from(size),
    }
}

/// Sample variance of the centre height for each size, from exact samples.
pub fn variance_experiment(
    family: &DomainFamily,
    sizes: &[u32],
    samples: usize,
    seed: Seed,
) -> Result<VarianceReport, ConcentrationError> {
    let mut rows = Vec::new();
    for &size in sizes {
        let d = Arc::new(family.member(size)?);
        let b = BoundaryHeightFunction::of_domain(d.clone(), 0)?;
        let sampler = CftpSampler::new(&b, CftpOptions::default())?;
        let heights = (0..samples as u64)
            .map(|i| center_height_sample(&d, size_seed(seed, size), i, &sampler))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(variance_row(&d, size, &heights));
    }
    Ok(VarianceReport { family: family.clone(), seed, rows })
}

/// Seed used for the samples of one size, so sizes draw independent streams.
pub fn size_seed(seed: Seed, size: u32) -> Seed {
    CounterRng::new(seed, u64::from(size), u64::MAX).next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::extremal_heights;

    fn hex(n: u32) -> BoundaryHeightFunction {
        BoundaryHeightFunction::of_domain(Arc::new(Domain::hexagon(n, n, n).unwrap()), 0).unwrap()
    }

    #[test]
    fn identical_heights_give_single_root() {
        let b = hex(2);
        let (lo, _) = extremal_heights(&b).unwrap();
        let f = DifferenceFunction::from_heights(&lo, &lo).unwrap();
        let forest = level_set_decomposition(&f).unwrap();
        assert_eq!(forest.len(), 1);
        assert_eq!(forest.parent(forest.root()), None);
        assert_eq!(dist_g(&forest, TriVertex::ORIGIN, TriVertex::new(2, 2)).unwrap(), 0);
    }

    #[test]
    fn extremal_pair_of_unit_hexagon() {
        let b = hex(1);
        let (lo, hi) = extremal_heights(&b).unwrap();
        let f = DifferenceFunction::from_heights(&hi, &lo).unwrap();
        assert_eq!(f.get(TriVertex::new(1, 1)), Some(1));
        let forest = level_set_decomposition(&f).unwrap();
        assert_eq!(forest.len(), 2);
        assert_eq!(dist_g(&forest, TriVertex::ORIGIN, TriVertex::new(1, 1)).unwrap(), 1);
    }

    #[test]
    fn invalid_differences_are_rejected() {
        let d = Arc::new(Domain::hexagon(1, 1, 1).unwrap());
        let mut v = vec![0; d.num_vertices()];
        v[d.index_of(TriVertex::ORIGIN).unwrap()] = 1;
        assert!(matches!(DifferenceFunction::new(d.clone(), v), Err(ConcentrationError::NonzeroBoundary { .. })));
        let mut v = vec![0; d.num_vertices()];
        v[d.index_of(TriVertex::new(1, 1)).unwrap()] = 2;
        assert!(matches!(DifferenceFunction::new(d, v), Err(ConcentrationError::Jump { .. })));
    }

    #[test]
    fn events_need_aligned_vertices() {
        let b = hex(2);
        let (lo, hi) = extremal_heights(&b).unwrap();
        assert!(f1_f2_events(&lo, &hi, TriVertex::ORIGIN, TriVertex::new(1, 2), 0.1).is_err());
        let (f1, f2) = f1_f2_events(&lo, &lo, TriVertex::ORIGIN, TriVertex::new(2, 0), 0.1).unwrap();
        assert!(f1 && !f2);
    }
}
