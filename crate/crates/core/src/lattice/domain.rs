//! Simply-connected lattice regions bounded by a closed lattice path.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::error::LatticeError;
use super::geometry::{Direction, Face, FaceKind, TriVertex};

pub(crate) const NONE: u32 = u32::MAX;

/// Dense index over the bounding box of a domain, padded by one cell.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Grid {
    x0: i32,
    y0: i32,
    width: usize,
    height: usize,
    vertex: Vec<u32>,
    lower: Vec<bool>,
    upper: Vec<bool>,
}

impl Grid {
    #[inline]
    fn cell(&self, x: i32, y: i32) -> Option<usize> {
        let cx = x.checked_sub(self.x0)?;
        let cy = y.checked_sub(self.y0)?;
        if cx < 0 || cy < 0 || cx as usize >= self.width || cy as usize >= self.height {
            return None;
        }
        Some(cy as usize * self.width + cx as usize)
    }
}

/// A finite simply-connected region of the triangular lattice.
///
/// The region is the closure of the triangular faces enclosed by a simple
/// closed lattice path. Its vertices are the corners of those faces and its
/// edges are the sides of those faces; height-function constraints apply
/// along exactly these edges. Vertices on the path form the boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    start: TriVertex,
    steps: Vec<Direction>,
    boundary: Vec<TriVertex>,
    boundary_idx: Vec<u32>,
    vertices: Vec<TriVertex>,
    faces: Vec<Face>,
    is_boundary: Vec<bool>,
    interior: Vec<u32>,
    /// Neighbour index along `R`, `U`, `NE` when the edge belongs to the domain.
    forward: Vec<[u32; 3]>,
    /// Neighbour index along `L`, `D`, `SW` when the edge belongs to the domain.
    backward: Vec<[u32; 3]>,
    grid: Grid,
}

impl Domain {
    /// Builds the region enclosed by the closed path `start, start+s0, ...`.
    pub fn from_path(start: TriVertex, steps: &[Direction]) -> Result<Domain, LatticeError> {
        let mut path = Vec::with_capacity(steps.len() + 1);
        path.push(start);
        for &s in steps {
            let last = *path.last().unwrap();
            path.push(last.step(s));
        }
        let end = *path.last().unwrap();
        if end != start || steps.len() < 3 {
            return Err(LatticeError::OpenPath { start, end });
        }
        path.pop();
        let mut seen = HashSet::with_capacity(path.len());
        for &v in &path {
            if !seen.insert(v) {
                return Err(LatticeError::SelfIntersection(v));
            }
        }

        let (mut xmin, mut xmax, mut ymin, mut ymax) = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
        for v in &path {
            xmin = xmin.min(v.x);
            xmax = xmax.max(v.x);
            ymin = ymin.min(v.y);
            ymax = ymax.max(v.y);
        }

        let poly: Vec<(i64, i64)> = path.iter().map(|v| (3 * v.x as i64, 3 * v.y as i64)).collect();
        let mut faces = Vec::new();
        for x in xmin..xmax {
            for y in ymin..ymax {
                for f in [Face::lower(x, y), Face::upper(x, y)] {
                    if point_in_polygon(f.centroid3(), &poly) {
                        faces.push(f);
                    }
                }
            }
        }
        if faces.is_empty() {
            return Err(LatticeError::EmptyInterior);
        }
        if faces.len() % 2 == 1 {
            return Err(LatticeError::OddFaceCount(faces.len()));
        }
        faces.sort();

        let (x0, y0) = (xmin - 1, ymin - 1);
        let width = (xmax - xmin + 3) as usize;
        let height = (ymax - ymin + 3) as usize;
        let mut grid = Grid {
            x0,
            y0,
            width,
            height,
            vertex: vec![NONE; width * height],
            lower: vec![false; width * height],
            upper: vec![false; width * height],
        };
        let mut vertices: Vec<TriVertex> = Vec::new();
        for f in &faces {
            let c = grid.cell(f.x, f.y).expect("face inside bounding box");
            match f.kind {
                FaceKind::Lower => grid.lower[c] = true,
                FaceKind::Upper => grid.upper[c] = true,
            }
            vertices.extend(f.vertices());
        }
        vertices.sort();
        vertices.dedup();
        for (i, v) in vertices.iter().enumerate() {
            let c = grid.cell(v.x, v.y).expect("vertex inside bounding box");
            grid.vertex[c] = i as u32;
        }

        let mut is_boundary = vec![false; vertices.len()];
        let mut boundary_idx = Vec::with_capacity(path.len());
        for v in &path {
            let c = grid.cell(v.x, v.y).unwrap();
            let i = grid.vertex[c];
            // A path vertex that touches no enclosed face means the path
            // doubles back along itself.
            if i == NONE {
                return Err(LatticeError::SelfIntersection(*v));
            }
            is_boundary[i as usize] = true;
            boundary_idx.push(i);
        }
        let interior = (0..vertices.len() as u32).filter(|&i| !is_boundary[i as usize]).collect();

        let mut domain = Domain {
            start,
            steps: steps.to_vec(),
            boundary: path,
            boundary_idx,
            vertices,
            faces,
            is_boundary,
            interior,
            forward: Vec::new(),
            backward: Vec::new(),
            grid,
        };
        let mut forward = vec![[NONE; 3]; domain.vertices.len()];
        let mut backward = vec![[NONE; 3]; domain.vertices.len()];
        for (i, &v) in domain.vertices.iter().enumerate() {
            for (k, dir) in Direction::FORWARD.into_iter().enumerate() {
                if domain.has_edge(v, dir) {
                    let j = domain.index_of(v.step(dir)).expect("edge endpoints are domain vertices");
                    forward[i][k] = j as u32;
                    backward[j][k] = i as u32;
                }
            }
        }
        domain.forward = forward;
        domain.backward = backward;
        Ok(domain)
    }

    /// The `a x b x c` hexagon with sides `R^a NE^b U^c L^a SW^b D^c`,
    /// starting from its bottom-left corner at the origin.
    pub fn hexagon(a: u32, b: u32, c: u32) -> Result<Domain, LatticeError> {
        Domain::from_path(TriVertex::ORIGIN, &hexagon_steps(a, b, c))
    }

    /// The region obtained by dilating this one by an integer factor.
    pub fn scaled(&self, factor: u32) -> Result<Domain, LatticeError> {
        let k = factor as i32;
        let steps: Vec<Direction> =
            self.steps.iter().flat_map(|&s| std::iter::repeat_n(s, factor as usize)).collect();
        Domain::from_path(TriVertex::new(self.start.x * k, self.start.y * k), &steps)
    }

    /// Parses the `DOMAIN v1` text format.
    ///
    /// ```text
    /// file  := "DOMAIN v1" NL int WS int NL steps NL?
    /// steps := (WS* dir count?)* WS*
    /// dir   := "R" | "L" | "U" | "D" | "NE" | "SW"
    /// count := [1-9][0-9]*
    /// ```
    ///
    /// The first line is the header, the second the start vertex, the third
    /// the step string; a step may carry a repeat count (`R3` = `RRR`). Any
    /// non-blank content after the third line is rejected.
    pub fn from_text(text: &str) -> Result<Domain, LatticeError> {
        let (start, steps) = parse_domain_text(text)?;
        Domain::from_path(start, &steps)
    }

    /// Serializes to the `DOMAIN v1` text format with run-length steps.
    pub fn to_text(&self) -> String {
        let mut out = format!("DOMAIN v1\n{} {}\n", self.start.x, self.start.y);
        let mut i = 0;
        let mut first = true;
        while i < self.steps.len() {
            let d = self.steps[i];
            let mut j = i;
            while j < self.steps.len() && self.steps[j] == d {
                j += 1;
            }
            if !first {
                out.push(' ');
            }
            first = false;
            out.push_str(d.symbol());
            if j - i > 1 {
                let _ = write!(out, "{}", j - i);
            }
            i = j;
        }
        out.push('\n');
        out
    }

    pub fn start(&self) -> TriVertex {
        self.start
    }

    pub fn steps(&self) -> &[Direction] {
        &self.steps
    }

    /// The boundary cycle; `boundary()[i].step(steps()[i]) == boundary()[i+1]`.
    pub fn boundary(&self) -> &[TriVertex] {
        &self.boundary
    }

    /// Vertex indices of the boundary cycle.
    pub fn boundary_indices(&self) -> &[u32] {
        &self.boundary_idx
    }

    /// All vertices, sorted lexicographically; positions are vertex indices.
    pub fn vertices(&self) -> &[TriVertex] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> TriVertex {
        self.vertices[i]
    }

    /// Indices of the vertices not on the boundary path.
    pub fn interior(&self) -> &[u32] {
        &self.interior
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.is_boundary[i]
    }

    #[inline]
    pub fn index_of(&self, v: TriVertex) -> Option<usize> {
        let c = self.grid.cell(v.x, v.y)?;
        let i = self.grid.vertex[c];
        (i != NONE).then_some(i as usize)
    }

    pub fn contains(&self, v: TriVertex) -> bool {
        self.index_of(v).is_some()
    }

    pub fn contains_face(&self, f: Face) -> bool {
        match self.grid.cell(f.x, f.y) {
            Some(c) => match f.kind {
                FaceKind::Lower => self.grid.lower[c],
                FaceKind::Upper => self.grid.upper[c],
            },
            None => false,
        }
    }

    /// Whether the unit edge from `v` in direction `dir` is a side of a domain face.
    pub fn has_edge(&self, v: TriVertex, dir: Direction) -> bool {
        let (from, fwd) = if dir.is_forward() { (v, dir) } else { (v.step(dir), dir.opposite()) };
        edge_faces(from, fwd).iter().any(|&f| self.contains_face(f))
    }

    /// Forward neighbours (`R`, `U`, `NE`) of vertex `i` along domain edges.
    #[inline]
    pub fn forward_neighbors(&self, i: usize) -> [Option<usize>; 3] {
        self.forward[i].map(|j| (j != NONE).then_some(j as usize))
    }

    /// Backward neighbours (`L`, `D`, `SW`) of vertex `i` along domain edges.
    #[inline]
    pub fn backward_neighbors(&self, i: usize) -> [Option<usize>; 3] {
        self.backward[i].map(|j| (j != NONE).then_some(j as usize))
    }

    /// Lattice neighbours of `i` that belong to the domain (regardless of edges).
    pub fn lattice_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.vertices[i].neighbors().into_iter().filter_map(move |n| self.index_of(n))
    }

    /// `(xmin, ymin, xmax, ymax)` over the domain vertices.
    pub fn bounding_box(&self) -> (i32, i32, i32, i32) {
        let g = &self.grid;
        (g.x0 + 1, g.y0 + 1, g.x0 + g.width as i32 - 2, g.y0 + g.height as i32 - 2)
    }

    /// The vertex nearest (in lattice distance, ties broken lexicographically)
    /// to the barycentre of the vertex set.
    pub fn center_vertex(&self) -> TriVertex {
        let n = self.vertices.len() as f64;
        let (sx, sy) = self.vertices.iter().fold((0.0, 0.0), |(a, b), v| (a + v.x as f64, b + v.y as f64));
        let target = TriVertex::new((sx / n).round() as i32, (sy / n).round() as i32);
        *self
            .vertices
            .iter()
            .min_by_key(|v| (v.lattice_distance(target), **v))
            .expect("domain is non-empty")
    }
}

/// The two faces on either side of a forward edge.
pub(crate) fn edge_faces(from: TriVertex, dir: Direction) -> [Face; 2] {
    let TriVertex { x, y } = from;
    match dir {
        Direction::R => [Face::lower(x, y), Face::upper(x, y - 1)],
        Direction::U => [Face::lower(x - 1, y), Face::upper(x, y)],
        Direction::NE => [Face::lower(x, y), Face::upper(x, y)],
        _ => unreachable!("edge_faces takes a forward direction"),
    }
}

pub fn hexagon_steps(a: u32, b: u32, c: u32) -> Vec<Direction> {
    use Direction::*;
    [(R, a), (NE, b), (U, c), (L, a), (SW, b), (D, c)]
        .into_iter()
        .flat_map(|(d, n)| std::iter::repeat_n(d, n as usize))
        .collect()
}

/// Even-odd test on a polygon scaled by 3; the query point never lies on an edge.
fn point_in_polygon(p: (i64, i64), poly: &[(i64, i64)]) -> bool {
    let (px, py) = p;
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.1 > py) != (b.1 > py) {
            let dy = b.1 - a.1;
            let lhs = (px - a.0) * dy;
            let rhs = (py - a.1) * (b.0 - a.0);
            let left_of_crossing = if dy > 0 { lhs < rhs } else { lhs > rhs };
            if left_of_crossing {
                inside = !inside;
            }
        }
    }
    inside
}

fn parse_domain_text(text: &str) -> Result<(TriVertex, Vec<Direction>), LatticeError> {
    let err = |m: &str| LatticeError::Parse(m.to_string());
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == "DOMAIN v1" => {}
        _ => return Err(err("missing `DOMAIN v1` header")),
    }
    let start_line = lines.next().ok_or_else(|| err("missing start vertex line"))?;
    let coords: Vec<&str> = start_line.split_whitespace().collect();
    if coords.len() != 2 {
        return Err(err("start line must hold exactly two integers"));
    }
    let parse_i = |s: &str| s.parse::<i32>().map_err(|_| LatticeError::Parse(format!("bad integer `{s}`")));
    let start = TriVertex::new(parse_i(coords[0])?, parse_i(coords[1])?);
    let step_line = lines.next().ok_or_else(|| err("missing step line"))?;
    let steps = parse_steps(step_line)?;
    for rest in lines {
        if !rest.trim().is_empty() {
            return Err(LatticeError::Parse(format!("trailing content `{}`", rest.trim())));
        }
    }
    Ok((start, steps))
}

/// Parses a step string such as `R3 NE2 U3 L3 SW2 D3` or `RRNEU`.
pub fn parse_steps(s: &str) -> Result<Vec<Direction>, LatticeError> {
    let bytes = s.as_bytes();
    let mut i = 0;
    let mut steps = Vec::new();
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let (dir, len) = match (c, bytes.get(i + 1)) {
            (b'R', _) => (Direction::R, 1),
            (b'L', _) => (Direction::L, 1),
            (b'U', _) => (Direction::U, 1),
            (b'D', _) => (Direction::D, 1),
            (b'N', Some(b'E')) => (Direction::NE, 2),
            (b'S', Some(b'W')) => (Direction::SW, 2),
            _ => return Err(LatticeError::Parse(format!("unexpected `{}` at column {}", c as char, i + 1))),
        };
        i += len;
        let digits_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let count = if i > digits_start {
            let txt = &s[digits_start..i];
            if txt.starts_with('0') {
                return Err(LatticeError::Parse(format!("repeat count `{txt}` has a leading zero")));
            }
            txt.parse::<usize>().map_err(|_| LatticeError::Parse(format!("bad repeat count `{txt}`")))?
        } else {
            1
        };
        steps.extend(std::iter::repeat_n(dir, count));
    }
    Ok(steps)
}
