//! Fixed trapezoids, their interlacing arrays, and trapezoids embedded in
//! tilings of larger regions.

use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{
    height_from_tiling, tiling_from_height, Direction, Domain, HeightFunction, LatticeError, Lozenge, LozengeKind,
    Tiling, TriVertex,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrapezoidError {
    #[error("invalid trapezoid: {0}")]
    InvalidSpec(String),
    #[error("rows are not interlacing at level {level}, position {index}")]
    NotInterlacing { level: usize, index: usize },
    #[error("row {level} has {got} entries")]
    RowLength { level: usize, got: usize },
    #[error("top row {got:?} differs from the dents {expected:?}")]
    TopRowMismatch { expected: Vec<i32>, got: Vec<i32> },
    #[error("tiling is not a tiling of this trapezoid")]
    DomainMismatch,
    #[error("segments do not form one of the six trapezoid configurations")]
    MalformedSegments,
    #[error("no embedded trapezoid: {0}")]
    NotEmbedded(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Trapezoid of width `L` with a straight vertical side of length `A` and
/// `L` dents at heights `λ` on the opposite side.
///
/// Coordinates put the bottom-right corner at the origin: the straight side
/// is `x = -L, 0 <= y <= A`, the dented side is `x = 0`, and a dent at `λ` is
/// the triangle `(0, λ), (0, λ+1), (1, λ+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapezoidSpec {
    /// `L`
    pub width: u32,
    /// `A`
    pub side: u32,
    pub lambda: Vec<i32>,
}

impl TrapezoidSpec {
    pub fn new(width: u32, side: u32, lambda: Vec<i32>) -> Result<Self, TrapezoidError> {
        if width == 0 {
            return Err(TrapezoidError::InvalidSpec("width must be positive".into()));
        }
        if lambda.len() != width as usize {
            return Err(TrapezoidError::InvalidSpec(format!("{} dents for width {width}", lambda.len())));
        }
        if lambda[0] < 0 || lambda.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TrapezoidError::InvalidSpec("dents must be strictly increasing and nonnegative".into()));
        }
        let top = (side + width) as i32;
        if *lambda.last().unwrap() >= top {
            return Err(TrapezoidError::InvalidSpec(format!("largest dent must be below A + L = {top}")));
        }
        Ok(TrapezoidSpec { width, side, lambda })
    }

    /// The dents `0, 1, ..., L-1`, which admit a single tiling.
    pub fn frozen(width: u32, side: u32) -> Result<Self, TrapezoidError> {
        Self::new(width, side, (0..width as i32).collect())
    }

    fn height(&self) -> i32 {
        (self.side + self.width) as i32
    }

    pub fn boundary_steps(&self) -> Vec<Direction> {
        use Direction::*;
        let l = self.width as usize;
        let mut steps = vec![R; l];
        let mut dents = self.lambda.iter().peekable();
        for y in 0..self.height() {
            if dents.next_if_eq(&&y).is_some() {
                steps.extend([NE, L]);
            } else {
                steps.push(U);
            }
        }
        steps.extend(std::iter::repeat_n(SW, l));
        steps.extend(std::iter::repeat_n(D, self.side as usize));
        steps
    }

    pub fn start(&self) -> TriVertex {
        TriVertex::new(-(self.width as i32), 0)
    }

    pub fn domain(&self) -> Result<Domain, TrapezoidError> {
        Ok(Domain::from_path(self.start(), &self.boundary_steps())?)
    }

    /// Number of tilings, `∏_{i<j} (λ_j - λ_i) / (j - i)`.
    pub fn tiling_count(&self) -> u128 {
        let l = self.lambda.len();
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for j in 0..l {
            for i in 0..j {
                num *= (self.lambda[j] - self.lambda[i]) as u128;
                den *= (j - i) as u128;
                let g = gcd(num, den);
                num /= g;
                den /= g;
            }
        }
        debug_assert_eq!(den, 1);
        num / den
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Triangular array `y_i^k`, `1 <= i <= k <= L`, with
/// `y_i^{k+1} <= y_i^k < y_{i+1}^{k+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawArray", into = "RawArray")]
pub struct InterlacingArray {
    rows: Vec<Vec<i32>>,
}

#[derive(Serialize, Deserialize)]
struct RawArray {
    rows: Vec<Vec<i32>>,
}

impl TryFrom<RawArray> for InterlacingArray {
    type Error = TrapezoidError;
    fn try_from(r: RawArray) -> Result<Self, TrapezoidError> {
        InterlacingArray::new(r.rows)
    }
}

impl From<InterlacingArray> for RawArray {
    fn from(a: InterlacingArray) -> Self {
        RawArray { rows: a.rows }
    }
}

impl InterlacingArray {
    /// `rows[k-1]` is level `k` and has `k` entries.
    pub fn new(rows: Vec<Vec<i32>>) -> Result<Self, TrapezoidError> {
        for (k, row) in rows.iter().enumerate() {
            if row.len() != k + 1 {
                return Err(TrapezoidError::RowLength { level: k + 1, got: row.len() });
            }
        }
        for k in 1..rows.len() {
            let (lower, upper) = (&rows[k - 1], &rows[k]);
            for i in 0..k {
                if !(upper[i] <= lower[i] && lower[i] < upper[i + 1]) {
                    return Err(TrapezoidError::NotInterlacing { level: k, index: i + 1 });
                }
            }
        }
        Ok(InterlacingArray { rows })
    }

    pub fn depth(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i32>] {
        &self.rows
    }

    /// `y_i^k` with 1-based indices.
    pub fn get(&self, k: usize, i: usize) -> i32 {
        self.rows[k - 1][i - 1]
    }

    pub fn top(&self) -> &[i32] {
        self.rows.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// The first `k` levels.
    pub fn truncate(&self, k: usize) -> InterlacingArray {
        InterlacingArray { rows: self.rows[..k.min(self.rows.len())].to_vec() }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("arrays serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, TrapezoidError> {
        serde_json::from_str(line).map_err(|e| TrapezoidError::InvalidSpec(e.to_string()))
    }

    /// All arrays whose top row is `top`.
    pub fn enumerate_with_top(top: &[i32]) -> Vec<InterlacingArray> {
        let l = top.len();
        let mut rows: Vec<Vec<i32>> = vec![Vec::new(); l];
        if l == 0 {
            return vec![InterlacingArray { rows }];
        }
        rows[l - 1] = top.to_vec();
        let mut out = Vec::new();
        fill_level(&mut rows, l - 1, 0, &mut out);
        out
    }
}

/// Fills `rows[level - 1][i..]` given `rows[level]`.
fn fill_level(rows: &mut Vec<Vec<i32>>, level: usize, i: usize, out: &mut Vec<InterlacingArray>) {
    if level == 0 {
        out.push(InterlacingArray { rows: rows.clone() });
        return;
    }
    if i == level {
        fill_level(rows, level - 1, 0, out);
        return;
    }
    let (lo, hi) = (rows[level][i], rows[level][i + 1] - 1);
    for v in lo..=hi {
        rows[level - 1].truncate(i);
        rows[level - 1].push(v);
        fill_level(rows, level, i + 1, out);
    }
    rows[level - 1].truncate(i);
}

/// `m(λ)` and `σ(λ)²`, exact and rounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DentStats {
    pub m: f64,
    pub sigma2: f64,
    pub width: u32,
    #[serde(skip)]
    pub m_exact: Ratio<i128>,
    #[serde(skip)]
    pub sigma2_exact: Ratio<i128>,
}

impl DentStats {
    /// `sqrt(max(σ², 0))`.
    pub fn sigma(&self) -> f64 {
        self.sigma2.max(0.0).sqrt()
    }
}

/// `m = Σλ/L - L/2`, `σ² = (1/L)Σ(λ/L)² - ((1/L)Σ λ/L)² - 1/12`.
pub fn dent_stats(spec: &TrapezoidSpec) -> DentStats {
    let l = i128::from(spec.width);
    let s1: i128 = spec.lambda.iter().map(|&x| i128::from(x)).sum();
    let s2: i128 = spec.lambda.iter().map(|&x| i128::from(x) * i128::from(x)).sum();
    let m = Ratio::new(s1, l) - Ratio::new(l, 2);
    let mean = Ratio::new(s1, l * l);
    let sigma2 = Ratio::new(s2, l * l * l) - mean * mean - Ratio::new(1, 12);
    let to_f = |r: Ratio<i128>| *r.numer() as f64 / *r.denom() as f64;
    DentStats { m: to_f(m), sigma2: to_f(sigma2), width: spec.width, m_exact: m, sigma2_exact: sigma2 }
}

fn check_domain(t: &Tiling, spec: &TrapezoidSpec) -> Result<(), TrapezoidError> {
    let d = t.domain();
    if d.start() == spec.start() && d.steps() == spec.boundary_steps().as_slice() {
        return Ok(());
    }
    // same region given by another path
    if **d == spec.domain()? {
        Ok(())
    } else {
        Err(TrapezoidError::DomainMismatch)
    }
}

/// Positions of the horizontal lozenges on the vertical lines of the trapezoid.
///
/// Line `k` is `x = k - L`; a horizontal lozenge sits on it when its vertical
/// diagonal does, and its coordinate is the lower end of that diagonal.
pub fn array_from_tiling(t: &Tiling, spec: &TrapezoidSpec) -> Result<InterlacingArray, TrapezoidError> {
    check_domain(t, spec)?;
    let l = spec.width as i32;
    let mut rows: Vec<Vec<i32>> = vec![Vec::new(); l as usize];
    for loz in t.lozenges().iter().filter(|z| z.kind == LozengeKind::Type2) {
        let k = loz.anchor.x + 1 + l;
        if (1..=l).contains(&k) {
            rows[(k - 1) as usize].push(loz.anchor.y);
        }
    }
    for r in &mut rows {
        r.sort_unstable();
    }
    let a = InterlacingArray::new(rows)?;
    if a.top() != spec.lambda.as_slice() {
        return Err(TrapezoidError::TopRowMismatch { expected: spec.lambda.clone(), got: a.top().to_vec() });
    }
    Ok(a)
}

/// The height function `H(x, y) = #{i : y_i^k < y}` on line `k = x + L`,
/// with `H = 0` along the straight side.
pub fn height_from_array(a: &InterlacingArray, spec: &TrapezoidSpec) -> Result<HeightFunction, TrapezoidError> {
    if a.depth() != spec.width as usize {
        return Err(TrapezoidError::RowLength { level: spec.width as usize, got: a.depth() });
    }
    if a.top() != spec.lambda.as_slice() {
        return Err(TrapezoidError::TopRowMismatch { expected: spec.lambda.clone(), got: a.top().to_vec() });
    }
    let d = Arc::new(spec.domain()?);
    let l = spec.width as i32;
    let values = d
        .vertices()
        .iter()
        .map(|v| {
            let k = v.x + l;
            if k == 0 {
                0
            } else if k <= l {
                a.rows[(k - 1) as usize].iter().filter(|&&y| y < v.y).count() as i32
            } else {
                // tip of a dent: one more than its base
                a.top().iter().filter(|&&y| y < v.y - 1).count() as i32 + 1
            }
        })
        .collect();
    Ok(HeightFunction::new(d, values)?)
}

/// The tiling of the trapezoid encoded by `a`.
pub fn tiling_from_array(a: &InterlacingArray, spec: &TrapezoidSpec) -> Result<Tiling, TrapezoidError> {
    Ok(tiling_from_height(&height_from_array(a, spec)?)?)
}

/// Both sides of `Σ λ_i = (A+L-1) H(0, A+L) - Σ_{y=1}^{A+L-1} H(0, y)`,
/// with `H` the height function of `t` (any normalisation).
pub fn height_sum_identity(t: &Tiling, spec: &TrapezoidSpec) -> Result<(i64, i64), TrapezoidError> {
    check_domain(t, spec)?;
    let h = height_from_tiling(t, TriVertex::ORIGIN, 0)?;
    let top = i64::from(spec.side + spec.width);
    let at = |y: i64| i64::from(h.get(TriVertex::new(0, y as i32)).expect("dented side lies in the domain"));
    let lhs = spec.lambda.iter().map(|&x| i64::from(x)).sum();
    let rhs = (top - 1) * at(top) - (1..top).map(at).sum::<i64>();
    Ok((lhs, rhs))
}

/// A straight run of `len` unit edges from `start` in direction `dir`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: TriVertex,
    pub dir: Direction,
    pub len: u32,
}

impl Segment {
    pub fn new(start: TriVertex, dir: Direction, len: u32) -> Self {
        Segment { start, dir, len }
    }

    pub fn end(&self) -> TriVertex {
        let o = self.dir.offset();
        TriVertex::new(self.start.x + o.x * self.len as i32, self.start.y + o.y * self.len as i32)
    }

    pub fn edges(&self) -> impl Iterator<Item = TriVertex> + '_ {
        let o = self.dir.offset();
        (0..self.len as i32).map(move |s| TriVertex::new(self.start.x + o.x * s, self.start.y + o.y * s))
    }

    pub fn rotate(&self, turns: u8) -> Segment {
        Segment { start: self.start.rotate(turns), dir: self.dir.rotate(turns), len: self.len }
    }
}

/// Three segments `I^(l)`, `I`, `I^(r)` of an embedded trapezoid.
///
/// In the reference orientation `I` runs up from `P`, `I^(l)` runs right
/// from `P`, and `I^(r)` runs up-right from the top of `I`; the trapezoid
/// lies to the right of `I`. The other five orientations are the images
/// under rotation by multiples of 60 degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapezoidFrame {
    pub left: Segment,
    pub side: Segment,
    pub right: Segment,
}

impl TrapezoidFrame {
    /// Reference orientation with corner `p`.
    pub fn canonical(p: TriVertex, side: u32, left: u32, right: u32) -> Self {
        TrapezoidFrame {
            left: Segment::new(p, Direction::R, left),
            side: Segment::new(p, Direction::U, side),
            right: Segment::new(TriVertex::new(p.x, p.y + side as i32), Direction::NE, right),
        }
    }

    /// The frame along the left side of a hexagon with side lengths `a`, `b`, `c`.
    pub fn hexagon_left(a: u32, b: u32, c: u32) -> Self {
        Self::canonical(TriVertex::ORIGIN, c, a, b)
    }

    pub fn rotate(&self, turns: u8) -> Self {
        TrapezoidFrame { left: self.left.rotate(turns), side: self.side.rotate(turns), right: self.right.rotate(turns) }
    }

    /// Rotation taking the reference orientation to this frame.
    pub fn orientation(&self) -> Result<u8, TrapezoidError> {
        for j in 0..6u8 {
            let ok = self.side.dir == Direction::U.rotate(j)
                && self.left.dir == Direction::R.rotate(j)
                && self.right.dir == Direction::NE.rotate(j)
                && self.left.start == self.side.start
                && self.right.start == self.side.end()
                && self.side.len > 0
                && self.left.len > 0
                && self.right.len > 0;
            if ok {
                return Ok(j);
            }
        }
        Err(TrapezoidError::MalformedSegments)
    }

    /// Number of levels of the array read off along `I`.
    pub fn width(&self) -> u32 {
        self.left.len.min(self.right.len)
    }
}

/// Whether the three segments lie in the domain and no lozenge of `t`
/// crosses them.
pub fn detect_embedded_trapezoid(t: &Tiling, frame: &TrapezoidFrame) -> Result<bool, TrapezoidError> {
    frame.orientation()?;
    let d = t.domain();
    for seg in [&frame.left, &frame.side, &frame.right] {
        for v in seg.edges() {
            if !d.has_edge(v, seg.dir) || t.crosses_edge(v, seg.dir) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The interlacing array of lozenges whose diagonal is parallel to `I`,
/// read on the lines parallel to `I` at distances `1..=width` from it.
///
/// Coordinates are distances along `I` measured from its start.
pub fn extract_boundary_array(t: &Tiling, frame: &TrapezoidFrame) -> Result<InterlacingArray, TrapezoidError> {
    let j = frame.orientation()?;
    if !detect_embedded_trapezoid(t, frame)? {
        return Err(TrapezoidError::NotEmbedded("a segment is crossed by a lozenge or leaves the domain".into()));
    }
    let back = (6 - j) % 6;
    let p = frame.side.start.rotate(back);
    let side = frame.side.len as i32;
    let width = frame.width() as i32;
    let mut rows: Vec<Vec<i32>> = vec![Vec::new(); width as usize];
    for loz in t.lozenges() {
        let z: Lozenge = loz.rotate(back);
        if z.kind != LozengeKind::Type2 {
            continue;
        }
        let k = z.anchor.x + 1 - p.x;
        let y = z.anchor.y - p.y;
        if (1..=width).contains(&k) && (0..side + k).contains(&y) {
            rows[(k - 1) as usize].push(y);
        }
    }
    for (k, r) in rows.iter_mut().enumerate() {
        r.sort_unstable();
        if r.len() != k + 1 {
            return Err(TrapezoidError::NotEmbedded(format!("line {} carries {} lozenges", k + 1, r.len())));
        }
    }
    InterlacingArray::new(rows)
}
