//! Vertices, directions, faces and lozenges of the triangular lattice.
//!
//! Coordinates use two integer axes inclined at 120 degrees: `y` grows
//! upward on screen and `x` grows in the down-right direction. Two vertices
//! are adjacent iff their difference is one of `(±1, 0)`, `(0, ±1)`,
//! `±(1, 1)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A vertex of the triangular lattice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriVertex {
    pub x: i32,
    pub y: i32,
}

impl TriVertex {
    pub const ORIGIN: TriVertex = TriVertex { x: 0, y: 0 };

    #[inline]
    pub const fn new(x: i32, y: i32) -> Self {
        TriVertex { x, y }
    }

    #[inline]
    pub fn step(self, dir: Direction) -> Self {
        self + dir.offset()
    }

    /// The six lattice neighbours, in counter-clockwise order starting at `R`.
    pub fn neighbors(self) -> [TriVertex; 6] {
        Direction::ALL.map(|d| self.step(d))
    }

    pub fn is_adjacent(self, other: TriVertex) -> bool {
        Direction::from_offset(other - self).is_some()
    }

    /// Graph distance in the triangular lattice.
    pub fn lattice_distance(self, other: TriVertex) -> u32 {
        let d = other - self;
        let (dx, dy) = (d.x, d.y);
        if (dx >= 0) == (dy >= 0) {
            dx.unsigned_abs().max(dy.unsigned_abs())
        } else {
            dx.unsigned_abs() + dy.unsigned_abs()
        }
    }

    /// Counter-clockwise rotation by 60 degrees about the origin.
    ///
    /// This is the lattice automorphism sending `R -> NE -> U -> L -> SW -> D -> R`.
    #[inline]
    pub fn rotate60(self) -> Self {
        TriVertex::new(self.x - self.y, self.x)
    }

    /// Inverse of [`TriVertex::rotate60`].
    #[inline]
    pub fn rotate60_inv(self) -> Self {
        TriVertex::new(self.y, self.y - self.x)
    }

    /// Rotation by `60 * turns` degrees counter-clockwise (`turns` taken mod 6).
    pub fn rotate(self, turns: u8) -> Self {
        let mut v = self;
        for _ in 0..turns % 6 {
            v = v.rotate60();
        }
        v
    }

    pub fn rotate_inv(self, turns: u8) -> Self {
        let mut v = self;
        for _ in 0..turns % 6 {
            v = v.rotate60_inv();
        }
        v
    }
}

impl Add for TriVertex {
    type Output = TriVertex;
    #[inline]
    fn add(self, rhs: TriVertex) -> TriVertex {
        TriVertex::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for TriVertex {
    type Output = TriVertex;
    #[inline]
    fn sub(self, rhs: TriVertex) -> TriVertex {
        TriVertex::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for TriVertex {
    type Output = TriVertex;
    fn neg(self) -> TriVertex {
        TriVertex::new(-self.x, -self.y)
    }
}

impl fmt::Display for TriVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// The six lattice directions, listed counter-clockwise as seen on screen.
///
/// `R = (1,0)` points down-right, `NE = (1,1)` up-right, `U = (0,1)` up,
/// and `L`, `SW`, `D` are their opposites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    R,
    NE,
    U,
    L,
    SW,
    D,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::R,
        Direction::NE,
        Direction::U,
        Direction::L,
        Direction::SW,
        Direction::D,
    ];

    /// The three directions along which height functions are non-decreasing.
    pub const FORWARD: [Direction; 3] = [Direction::R, Direction::U, Direction::NE];

    #[inline]
    pub const fn offset(self) -> TriVertex {
        match self {
            Direction::R => TriVertex::new(1, 0),
            Direction::NE => TriVertex::new(1, 1),
            Direction::U => TriVertex::new(0, 1),
            Direction::L => TriVertex::new(-1, 0),
            Direction::SW => TriVertex::new(-1, -1),
            Direction::D => TriVertex::new(0, -1),
        }
    }

    pub fn from_offset(d: TriVertex) -> Option<Direction> {
        Direction::ALL.into_iter().find(|dir| dir.offset() == d)
    }

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn opposite(self) -> Direction {
        Direction::ALL[(self as usize + 3) % 6]
    }

    pub const fn rotate(self, turns: u8) -> Direction {
        Direction::ALL[(self as usize + turns as usize) % 6]
    }

    /// Forward directions are `R`, `U` and `NE`.
    pub const fn is_forward(self) -> bool {
        matches!(self, Direction::R | Direction::U | Direction::NE)
    }

    /// Height increment forced on a boundary edge traversed in this direction.
    ///
    /// A boundary edge is never the interior diagonal of a lozenge, so `R`/`U`
    /// edges carry increment 0 and `NE` edges carry increment 1.
    pub const fn boundary_increment(self) -> i32 {
        match self {
            Direction::NE => 1,
            Direction::SW => -1,
            _ => 0,
        }
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            Direction::R => "R",
            Direction::NE => "NE",
            Direction::U => "U",
            Direction::L => "L",
            Direction::SW => "SW",
            Direction::D => "D",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Which of the two triangles of the unit cell at `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FaceKind {
    /// `{(x,y), (x+1,y), (x+1,y+1)}`.
    Lower,
    /// `{(x,y), (x,y+1), (x+1,y+1)}`.
    Upper,
}

/// A unit triangular face of the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub x: i32,
    pub y: i32,
    pub kind: FaceKind,
}

impl Face {
    pub const fn lower(x: i32, y: i32) -> Self {
        Face { x, y, kind: FaceKind::Lower }
    }

    pub const fn upper(x: i32, y: i32) -> Self {
        Face { x, y, kind: FaceKind::Upper }
    }

    pub fn anchor(self) -> TriVertex {
        TriVertex::new(self.x, self.y)
    }

    pub fn vertices(self) -> [TriVertex; 3] {
        let (x, y) = (self.x, self.y);
        match self.kind {
            FaceKind::Lower => [TriVertex::new(x, y), TriVertex::new(x + 1, y), TriVertex::new(x + 1, y + 1)],
            FaceKind::Upper => [TriVertex::new(x, y), TriVertex::new(x, y + 1), TriVertex::new(x + 1, y + 1)],
        }
    }

    /// Recovers a face from its three vertices, if they span one.
    pub fn from_vertices(vs: [TriVertex; 3]) -> Option<Face> {
        let mut vs = vs;
        vs.sort();
        let [a, b, c] = vs;
        if c != a + TriVertex::new(1, 1) {
            return None;
        }
        if b == a + TriVertex::new(1, 0) {
            Some(Face::lower(a.x, a.y))
        } else if b == a + TriVertex::new(0, 1) {
            Some(Face::upper(a.x, a.y))
        } else {
            None
        }
    }

    pub fn rotate(self, turns: u8) -> Face {
        Face::from_vertices(self.vertices().map(|v| v.rotate(turns))).expect("rotation preserves faces")
    }

    /// Centroid scaled by 3, so that it has integer coordinates.
    pub(crate) fn centroid3(self) -> (i64, i64) {
        let (x, y) = (3 * self.x as i64, 3 * self.y as i64);
        match self.kind {
            FaceKind::Lower => (x + 2, y + 1),
            FaceKind::Upper => (x + 1, y + 2),
        }
    }
}

/// The three lozenge orientations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LozengeKind {
    /// Vertices `(x,y), (x,y+1), (x+1,y+2), (x+1,y+1)`; contains an `R` diagonal.
    Type1,
    /// The horizontal lozenge: `(x,y), (x+1,y), (x+2,y+1), (x+1,y+1)`; contains a `U` diagonal.
    Type2,
    /// Vertices `(x,y), (x,y+1), (x+1,y+1), (x+1,y)`; contains an `NE` diagonal.
    Type3,
}

impl LozengeKind {
    pub const ALL: [LozengeKind; 3] = [LozengeKind::Type1, LozengeKind::Type2, LozengeKind::Type3];

    pub const fn number(self) -> u8 {
        match self {
            LozengeKind::Type1 => 1,
            LozengeKind::Type2 => 2,
            LozengeKind::Type3 => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<LozengeKind> {
        match n {
            1 => Some(LozengeKind::Type1),
            2 => Some(LozengeKind::Type2),
            3 => Some(LozengeKind::Type3),
            _ => None,
        }
    }

    /// Direction of the short diagonal shared by the two faces.
    pub const fn diagonal(self) -> Direction {
        match self {
            LozengeKind::Type1 => Direction::R,
            LozengeKind::Type2 => Direction::U,
            LozengeKind::Type3 => Direction::NE,
        }
    }

    pub fn from_diagonal(dir: Direction) -> LozengeKind {
        match dir {
            Direction::R | Direction::L => LozengeKind::Type1,
            Direction::U | Direction::D => LozengeKind::Type2,
            Direction::NE | Direction::SW => LozengeKind::Type3,
        }
    }
}

/// A lozenge, identified by its kind and lexicographically least vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lozenge {
    pub kind: LozengeKind,
    pub anchor: TriVertex,
}

impl Lozenge {
    pub const fn new(kind: LozengeKind, anchor: TriVertex) -> Self {
        Lozenge { kind, anchor }
    }

    pub fn faces(self) -> [Face; 2] {
        let TriVertex { x, y } = self.anchor;
        match self.kind {
            LozengeKind::Type1 => [Face::upper(x, y), Face::lower(x, y + 1)],
            LozengeKind::Type2 => [Face::lower(x, y), Face::upper(x + 1, y)],
            LozengeKind::Type3 => [Face::lower(x, y), Face::upper(x, y)],
        }
    }

    /// The four corners, in cyclic order.
    pub fn vertices(self) -> [TriVertex; 4] {
        let TriVertex { x, y } = self.anchor;
        let v = TriVertex::new;
        match self.kind {
            LozengeKind::Type1 => [v(x, y), v(x + 1, y + 1), v(x + 1, y + 2), v(x, y + 1)],
            LozengeKind::Type2 => [v(x, y), v(x + 1, y), v(x + 2, y + 1), v(x + 1, y + 1)],
            LozengeKind::Type3 => [v(x, y), v(x + 1, y), v(x + 1, y + 1), v(x, y + 1)],
        }
    }

    /// The shared edge of the two faces, as `(start, direction)` with a forward direction.
    pub fn diagonal(self) -> (TriVertex, Direction) {
        let TriVertex { x, y } = self.anchor;
        match self.kind {
            LozengeKind::Type1 => (TriVertex::new(x, y + 1), Direction::R),
            LozengeKind::Type2 => (TriVertex::new(x + 1, y), Direction::U),
            LozengeKind::Type3 => (TriVertex::new(x, y), Direction::NE),
        }
    }

    /// The lozenge formed by two faces, if they share an edge.
    pub fn from_faces(a: Face, b: Face) -> Option<Lozenge> {
        let (lower, upper) = match (a.kind, b.kind) {
            (FaceKind::Lower, FaceKind::Upper) => (a, b),
            (FaceKind::Upper, FaceKind::Lower) => (b, a),
            _ => return None,
        };
        let (lx, ly, ux, uy) = (lower.x, lower.y, upper.x, upper.y);
        if ux == lx && uy == ly - 1 {
            Some(Lozenge::new(LozengeKind::Type1, TriVertex::new(ux, uy)))
        } else if ux == lx + 1 && uy == ly {
            Some(Lozenge::new(LozengeKind::Type2, TriVertex::new(lx, ly)))
        } else if ux == lx && uy == ly {
            Some(Lozenge::new(LozengeKind::Type3, TriVertex::new(lx, ly)))
        } else {
            None
        }
    }

    pub fn rotate(self, turns: u8) -> Lozenge {
        let [a, b] = self.faces();
        Lozenge::from_faces(a.rotate(turns), b.rotate(turns)).expect("rotation preserves adjacency")
    }

    pub fn translate(self, by: TriVertex) -> Lozenge {
        Lozenge::new(self.kind, self.anchor + by)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbor_offsets_are_the_six_lattice_steps() {
        let v = TriVertex::new(3, -2);
        let mut offs: Vec<_> = v.neighbors().iter().map(|&n| n - v).map(|d| (d.x, d.y)).collect();
        offs.sort();
        assert_eq!(offs, vec![(-1, -1), (-1, 0), (0, -1), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn rotation_cycles_directions() {
        for d in Direction::ALL {
            assert_eq!(d.offset().rotate60(), d.rotate(1).offset());
            assert_eq!(d.offset().rotate(6), d.offset());
        }
        let v = TriVertex::new(5, -3);
        assert_eq!(v.rotate60().rotate60_inv(), v);
        assert_eq!(v.rotate(3), -v);
    }

    #[test]
    fn lozenge_faces_round_trip() {
        for kind in LozengeKind::ALL {
            let loz = Lozenge::new(kind, TriVertex::new(2, -1));
            let [a, b] = loz.faces();
            assert_eq!(Lozenge::from_faces(a, b), Some(loz));
            assert_eq!(Lozenge::from_faces(b, a), Some(loz));
            let mut vs: Vec<_> = a.vertices().into_iter().chain(b.vertices()).collect();
            vs.sort();
            vs.dedup();
            let mut corners = loz.vertices().to_vec();
            corners.sort();
            assert_eq!(vs, corners);
            assert_eq!(corners[0], loz.anchor);
            let (s, d) = loz.diagonal();
            assert!(a.vertices().contains(&s) && b.vertices().contains(&s.step(d)));
            assert_eq!(LozengeKind::from_diagonal(d), kind);
        }
    }

    #[test]
    fn rotation_permutes_lozenge_types() {
        let at = TriVertex::new(0, 0);
        assert_eq!(Lozenge::new(LozengeKind::Type2, at).rotate(1).kind, LozengeKind::Type1);
        assert_eq!(Lozenge::new(LozengeKind::Type1, at).rotate(1).kind, LozengeKind::Type3);
        assert_eq!(Lozenge::new(LozengeKind::Type3, at).rotate(1).kind, LozengeKind::Type2);
        for kind in LozengeKind::ALL {
            let l = Lozenge::new(kind, TriVertex::new(4, 1));
            assert_eq!(l.rotate(6), l);
        }
    }

    #[test]
    fn lattice_distance_matches_bfs() {
        let o = TriVertex::ORIGIN;
        let mut dist = std::collections::HashMap::new();
        dist.insert(o, 0u32);
        let mut frontier = vec![o];
        for d in 1..=5 {
            let mut next = Vec::new();
            for v in frontier {
                for n in v.neighbors() {
                    dist.entry(n).or_insert_with(|| {
                        next.push(n);
                        d
                    });
                }
            }
            frontier = next;
        }
        for (v, d) in dist {
            assert_eq!(o.lattice_distance(v), d, "{v}");
        }
    }
}
