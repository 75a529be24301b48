//! Tilings, height functions and the conversions between them.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::domain::Domain;
use super::error::LatticeError;
use super::geometry::{Direction, Face, FaceKind, Lozenge, LozengeKind, TriVertex};

/// An integer function on the vertices of a domain with increments in `{0, 1}`
/// along every forward domain edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightFunction {
    domain: Arc<Domain>,
    values: Vec<i32>,
}

impl HeightFunction {
    /// Validates the edge constraints; `values` is indexed like `domain.vertices()`.
    pub fn new(domain: Arc<Domain>, values: Vec<i32>) -> Result<Self, LatticeError> {
        if values.len() != domain.num_vertices() {
            return Err(LatticeError::LengthMismatch { expected: domain.num_vertices(), got: values.len() });
        }
        check_edges(&domain, &values)?;
        Ok(HeightFunction { domain, values })
    }

    pub(crate) fn new_unchecked(domain: Arc<Domain>, values: Vec<i32>) -> Self {
        debug_assert!(check_edges(&domain, &values).is_ok());
        HeightFunction { domain, values }
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<i32> {
        self.values
    }

    pub fn get(&self, v: TriVertex) -> Option<i32> {
        self.domain.index_of(v).map(|i| self.values[i])
    }

    pub fn at(&self, i: usize) -> i32 {
        self.values[i]
    }

    /// The same function shifted by a constant.
    pub fn shifted(&self, by: i32) -> HeightFunction {
        HeightFunction { domain: self.domain.clone(), values: self.values.iter().map(|v| v + by).collect() }
    }

    /// Restriction to the boundary cycle.
    pub fn boundary(&self) -> BoundaryHeightFunction {
        BoundaryHeightFunction {
            domain: self.domain.clone(),
            values: self.domain.boundary_indices().iter().map(|&i| self.values[i as usize]).collect(),
        }
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &HeightFunction) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

fn check_edges(domain: &Domain, values: &[i32]) -> Result<(), LatticeError> {
    for i in 0..domain.num_vertices() {
        for (k, j) in domain.forward_neighbors(i).into_iter().enumerate() {
            if let Some(j) = j {
                let diff = values[j] as i64 - values[i] as i64;
                if !(0..=1).contains(&diff) {
                    return Err(LatticeError::EdgeConstraint {
                        from: domain.vertex(i),
                        dir: Direction::FORWARD[k],
                        diff,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Height values prescribed on the boundary cycle of a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryHeightFunction {
    domain: Arc<Domain>,
    /// Indexed like `domain.boundary()`.
    values: Vec<i32>,
}

impl BoundaryHeightFunction {
    /// The boundary height function forced by the shape of the domain: along
    /// the boundary, `R`/`U` edges carry increment 0 and `NE` edges increment 1.
    /// The start vertex of the boundary path gets value `m`.
    pub fn of_domain(domain: Arc<Domain>, m: i32) -> Result<Self, LatticeError> {
        let mut values = Vec::with_capacity(domain.boundary().len());
        let mut h = m;
        for &s in domain.steps() {
            values.push(h);
            h += s.boundary_increment();
        }
        if h != m {
            return Err(LatticeError::NotTileable(format!(
                "boundary heights do not close up (net change {} around the cycle)",
                h - m
            )));
        }
        Ok(BoundaryHeightFunction { domain, values })
    }

    /// Arbitrary boundary data; checked for the `{0,1}` increment rule along
    /// boundary edges.
    pub fn new(domain: Arc<Domain>, values: Vec<i32>) -> Result<Self, LatticeError> {
        if values.len() != domain.boundary().len() {
            return Err(LatticeError::LengthMismatch { expected: domain.boundary().len(), got: values.len() });
        }
        let n = values.len();
        for (k, &s) in domain.steps().iter().enumerate() {
            let (a, b) = (values[k] as i64, values[(k + 1) % n] as i64);
            let diff = if s.is_forward() { b - a } else { a - b };
            if !(0..=1).contains(&diff) {
                let from = if s.is_forward() { domain.boundary()[k] } else { domain.boundary()[(k + 1) % n] };
                let dir = if s.is_forward() { s } else { s.opposite() };
                return Err(LatticeError::EdgeConstraint { from, dir, diff });
            }
        }
        Ok(BoundaryHeightFunction { domain, values })
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn get(&self, v: TriVertex) -> Option<i32> {
        self.domain.boundary().iter().position(|&b| b == v).map(|k| self.values[k])
    }

    /// `(vertex index, value)` pairs.
    pub fn entries(&self) -> impl Iterator<Item = (usize, i32)> + '_ {
        self.domain.boundary_indices().iter().zip(&self.values).map(|(&i, &h)| (i as usize, h))
    }
}

/// A set of lozenges partitioning the faces of a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tiling {
    domain: Arc<Domain>,
    lozenges: Vec<Lozenge>,
}

/// Wire form of a tiling: one `[type, x, y]` triple per lozenge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingRecord {
    pub lozenges: Vec<(u8, i32, i32)>,
}

impl Tiling {
    /// Checks that the lozenges cover every face of `domain` exactly once.
    pub fn new(domain: Arc<Domain>, mut lozenges: Vec<Lozenge>) -> Result<Self, LatticeError> {
        lozenges.sort();
        let mut covered: HashMap<Face, ()> = HashMap::with_capacity(domain.faces().len());
        for l in &lozenges {
            for f in l.faces() {
                if !domain.contains_face(f) {
                    return Err(LatticeError::FaceOutsideDomain(f));
                }
                if covered.insert(f, ()).is_some() {
                    return Err(LatticeError::DoublyCoveredFace(f));
                }
            }
        }
        if let Some(&f) = domain.faces().iter().find(|f| !covered.contains_key(f)) {
            return Err(LatticeError::UncoveredFace(f));
        }
        Ok(Tiling { domain, lozenges })
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    /// Lozenges in sorted order.
    pub fn lozenges(&self) -> &[Lozenge] {
        &self.lozenges
    }

    pub fn count(&self, kind: LozengeKind) -> usize {
        self.lozenges.iter().filter(|l| l.kind == kind).count()
    }

    pub fn contains(&self, l: &Lozenge) -> bool {
        self.lozenges.binary_search(l).is_ok()
    }

    pub fn to_record(&self) -> TilingRecord {
        TilingRecord {
            lozenges: self.lozenges.iter().map(|l| (l.kind.number(), l.anchor.x, l.anchor.y)).collect(),
        }
    }

    pub fn from_record(domain: Arc<Domain>, rec: &TilingRecord) -> Result<Self, LatticeError> {
        let lozenges = rec
            .lozenges
            .iter()
            .map(|&(k, x, y)| {
                LozengeKind::from_number(k)
                    .map(|kind| Lozenge::new(kind, TriVertex::new(x, y)))
                    .ok_or_else(|| LatticeError::Parse(format!("unknown lozenge type {k}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Tiling::new(domain, lozenges)
    }

    /// Whether the unit edge `from -> from+dir` is the shared diagonal of a lozenge.
    pub fn crosses_edge(&self, from: TriVertex, dir: Direction) -> bool {
        let (s, d) = if dir.is_forward() { (from, dir) } else { (from.step(dir), dir.opposite()) };
        let kind = LozengeKind::from_diagonal(d);
        let faces = super::domain::edge_faces(s, d);
        Lozenge::from_faces(faces[0], faces[1]).is_some_and(|l| l.kind == kind && self.contains(&l))
    }
}

/// Height function of a tiling normalised by `H(anchor) = m`.
///
/// Along forward edges the increment is 1 exactly on the `R` diagonal of a
/// type 1 lozenge, the `U` diagonal of a type 2 lozenge, and on every `NE`
/// edge that is not the diagonal of a type 3 lozenge.
pub fn height_from_tiling(t: &Tiling, anchor: TriVertex, m: i32) -> Result<HeightFunction, LatticeError> {
    let domain = t.domain.clone();
    let start = domain.index_of(anchor).ok_or(LatticeError::VertexOutsideDomain(anchor))?;
    let n = domain.num_vertices();
    // diag[i][k]: forward edge k out of vertex i is a lozenge diagonal.
    let mut diag = vec![[false; 3]; n];
    for l in &t.lozenges {
        let (s, d) = l.diagonal();
        let i = domain.index_of(s).ok_or(LatticeError::VertexOutsideDomain(s))?;
        let k = Direction::FORWARD.iter().position(|&f| f == d).unwrap();
        diag[i][k] = true;
    }
    let increment = |i: usize, k: usize| -> i32 {
        match Direction::FORWARD[k] {
            Direction::NE => i32::from(!diag[i][k]),
            _ => i32::from(diag[i][k]),
        }
    };
    let mut values = vec![i32::MIN; n];
    values[start] = m;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        let hi = values[i];
        for (k, j) in domain.forward_neighbors(i).into_iter().enumerate() {
            if let Some(j) = j {
                let want = hi + increment(i, k);
                if values[j] == i32::MIN {
                    values[j] = want;
                    queue.push_back(j);
                } else if values[j] != want {
                    return Err(LatticeError::NotTileable(format!("inconsistent heights at {}", domain.vertex(j))));
                }
            }
        }
        for (k, j) in domain.backward_neighbors(i).into_iter().enumerate() {
            if let Some(j) = j {
                let want = hi - increment(j, k);
                if values[j] == i32::MIN {
                    values[j] = want;
                    queue.push_back(j);
                } else if values[j] != want {
                    return Err(LatticeError::NotTileable(format!("inconsistent heights at {}", domain.vertex(j))));
                }
            }
        }
    }
    HeightFunction::new(domain, values)
}

/// The lozenge containing `face` under height function `h`, determined by
/// which of its edges carries the distinguished increment.
fn lozenge_of_face(h: &HeightFunction, face: Face) -> Result<Lozenge, LatticeError> {
    let d = &h.domain;
    let val = |x: i32, y: i32| -> Result<i32, LatticeError> {
        h.get(TriVertex::new(x, y)).ok_or(LatticeError::VertexOutsideDomain(TriVertex::new(x, y)))
    };
    let (x, y) = (face.x, face.y);
    let (loz, partner) = match face.kind {
        FaceKind::Lower => {
            let a = val(x + 1, y)? - val(x, y)?;
            let b = val(x + 1, y + 1)? - val(x + 1, y)?;
            if a == 1 {
                (Lozenge::new(LozengeKind::Type1, TriVertex::new(x, y - 1)), Face::upper(x, y - 1))
            } else if b == 1 {
                (Lozenge::new(LozengeKind::Type2, TriVertex::new(x, y)), Face::upper(x + 1, y))
            } else {
                (Lozenge::new(LozengeKind::Type3, TriVertex::new(x, y)), Face::upper(x, y))
            }
        }
        FaceKind::Upper => {
            let b = val(x, y + 1)? - val(x, y)?;
            let a = val(x + 1, y + 1)? - val(x, y + 1)?;
            if a == 1 {
                (Lozenge::new(LozengeKind::Type1, TriVertex::new(x, y)), Face::lower(x, y + 1))
            } else if b == 1 {
                (Lozenge::new(LozengeKind::Type2, TriVertex::new(x - 1, y)), Face::lower(x - 1, y))
            } else {
                (Lozenge::new(LozengeKind::Type3, TriVertex::new(x, y)), Face::lower(x, y))
            }
        }
    };
    if !d.contains_face(partner) {
        return Err(LatticeError::FaceInconsistent(face));
    }
    Ok(loz)
}

/// The tiling encoded by a height function.
pub fn tiling_from_height(h: &HeightFunction) -> Result<Tiling, LatticeError> {
    check_edges(&h.domain, &h.values)?;
    let mut lozenges = Vec::with_capacity(h.domain.faces().len() / 2);
    for &f in h.domain.faces() {
        let l = lozenge_of_face(h, f)?;
        // record each lozenge once, from its lower face
        if f.kind == FaceKind::Lower {
            lozenges.push(l);
        }
    }
    Tiling::new(h.domain.clone(), lozenges)
}

/// Whether every face of the domain pairs with a domain face under `h`.
pub fn is_face_consistent(h: &HeightFunction) -> bool {
    h.domain.faces().iter().all(|&f| lozenge_of_face(h, f).is_ok())
}

/// Pointwise minimal and maximal height functions extending `b`.
///
/// Both are solutions of the difference constraints `0 <= H(v) - H(u) <= 1`
/// over forward edges, computed as shortest paths from the boundary. The
/// domain is tileable with this boundary data iff both exist and are
/// face-consistent.
pub fn extremal_heights(b: &BoundaryHeightFunction) -> Result<(HeightFunction, HeightFunction), LatticeError> {
    let fixed: Vec<(usize, i32)> = b.entries().collect();
    extremal_extensions(&b.domain, &fixed)
}

/// Pointwise minimal and maximal height functions taking the prescribed
/// values at the listed vertex indices (which must include the boundary for
/// the result to encode tilings).
pub fn extremal_extensions(
    domain: &Arc<Domain>,
    fixed: &[(usize, i32)],
) -> Result<(HeightFunction, HeightFunction), LatticeError> {
    let domain = domain.clone();
    // max: H(v) <= H(u) + 1 along u -> v, H(u) <= H(v) backward.
    let upper = bound_by_shortest_paths(&domain, fixed.iter().map(|&(i, h)| (i, h as i64)), 1, 0)?;
    // min via g = -H: g(v) <= g(u), g(u) <= g(v) + 1.
    let neg_lower = bound_by_shortest_paths(&domain, fixed.iter().map(|&(i, h)| (i, -(h as i64))), 0, 1)?;
    let to_i32 = |v: i64| i32::try_from(v).map_err(|_| LatticeError::NotTileable("height overflow".into()));
    let max_vals = upper.into_iter().map(to_i32).collect::<Result<Vec<_>, _>>()?;
    let min_vals = neg_lower.into_iter().map(|g| to_i32(-g)).collect::<Result<Vec<_>, _>>()?;
    let hmin = HeightFunction::new(domain.clone(), min_vals).map_err(|e| LatticeError::NotTileable(e.to_string()))?;
    let hmax = HeightFunction::new(domain, max_vals).map_err(|e| LatticeError::NotTileable(e.to_string()))?;
    if !hmin.le(&hmax) {
        return Err(LatticeError::NotTileable("minimal extension exceeds maximal extension".into()));
    }
    for h in [&hmin, &hmax] {
        if let Some(&f) = h.domain.faces().iter().find(|&&f| lozenge_of_face(h, f).is_err()) {
            return Err(LatticeError::NotTileable(format!("face {f:?} cannot be paired")));
        }
    }
    Ok((hmin, hmax))
}

/// Least upper bounds `d(v) = min_s (src(s) + dist(s, v))` where a forward
/// step costs `fwd` and a backward step costs `bwd`. Fails if a source's own
/// bound is undercut by another source.
fn bound_by_shortest_paths(
    domain: &Domain,
    sources: impl Iterator<Item = (usize, i64)>,
    fwd: i64,
    bwd: i64,
) -> Result<Vec<i64>, LatticeError> {
    let n = domain.num_vertices();
    let mut dist = vec![i64::MAX; n];
    let mut prescribed = vec![None; n];
    let mut heap = BinaryHeap::new();
    for (i, h) in sources {
        prescribed[i] = Some(h);
        if h < dist[i] {
            dist[i] = h;
            heap.push(Reverse((h, i)));
        }
    }
    while let Some(Reverse((d, i))) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        let relax = |j: usize, w: i64, dist: &mut Vec<i64>, heap: &mut BinaryHeap<Reverse<(i64, usize)>>| {
            if d + w < dist[j] {
                dist[j] = d + w;
                heap.push(Reverse((d + w, j)));
            }
        };
        for j in domain.forward_neighbors(i).into_iter().flatten() {
            relax(j, fwd, &mut dist, &mut heap);
        }
        for j in domain.backward_neighbors(i).into_iter().flatten() {
            relax(j, bwd, &mut dist, &mut heap);
        }
    }
    for (i, p) in prescribed.iter().enumerate() {
        if let Some(h) = p {
            if dist[i] != *h {
                return Err(LatticeError::NotTileable(format!(
                    "boundary value at {} is incompatible with the rest of the boundary",
                    domain.vertex(i)
                )));
            }
        }
    }
    Ok(dist)
}
