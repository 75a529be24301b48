//! The Lobachevsky function and the lozenge entropy density.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::error::LatticeError;
use super::geometry::{Face, FaceKind};
use super::height::HeightFunction;

/// Lower end of the substituted integration range; below it the integrand
/// is replaced by its small-angle expansion.
const U_MIN: f64 = -40.0;
const TOL: f64 = 1e-13;

/// `G(a) = ∫_0^a log(2 sin z) dz` for `0 <= a <= π/2`.
///
/// With `z = a e^u` the log singularity at 0 becomes an exponentially
/// decaying integrand on `(-∞, 0]`.
fn g_half(a: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let f = |u: f64| {
        let z = a * u.exp();
        z * (2.0 * z.sin()).ln()
    };
    let delta = a * U_MIN.exp();
    // ∫_0^δ log(2z) dz, the error of replacing sin z by z is O(δ^3)
    let tail = delta * ((2.0 * delta).ln() - 1.0);
    tail + adaptive_simpson(&f, U_MIN, 0.0, TOL)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `L(x) = -∫_0^x log|2 sin z| dz` for `x` in `[0, π]`.
pub fn lobachevsky(x: f64) -> Result<f64, LatticeError> {
    if !(0.0..=PI).contains(&x) || x.is_nan() {
        return Err(LatticeError::OutOfRange { value: x, range: "[0, pi]" });
    }
    if x <= FRAC_PI_2 {
        Ok(-g_half(x))
    } else {
        // the integrand is symmetric about π/2
        Ok(g_half(PI - x) - 2.0 * g_half(FRAC_PI_2))
    }
}

/// A slope `(s, t)` in the closed triangle `s, t >= 0`, `s + t <= 1`.
///
/// `s`, `t` and `1 - s - t` are the local densities of type 1, 2 and 3 lozenges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopePair {
    pub s: f64,
    pub t: f64,
}

/// Slack allowed when deciding membership in the closed slope triangle.
const SLOPE_EPS: f64 = 1e-12;

impl SlopePair {
    pub fn new(s: f64, t: f64) -> Result<Self, LatticeError> {
        let ok = s >= -SLOPE_EPS && t >= -SLOPE_EPS && s + t <= 1.0 + SLOPE_EPS;
        if !ok || s.is_nan() || t.is_nan() {
            return Err(LatticeError::OutOfRange { value: s + t, range: "slope triangle s, t >= 0, s + t <= 1" });
        }
        Ok(SlopePair { s: s.clamp(0.0, 1.0), t: t.clamp(0.0, 1.0) })
    }

    pub fn third(&self) -> f64 {
        (1.0 - self.s - self.t).max(0.0)
    }
}

/// `σ(s, t) = (L(πs) + L(πt) + L(π(1 - s - t))) / π`.
pub fn entropy_density(p: SlopePair) -> Result<f64, LatticeError> {
    let p = SlopePair::new(p.s, p.t)?;
    let l = |v: f64| lobachevsky((PI * v).min(PI));
    Ok((l(p.s)? + l(p.t)? + l(p.third())?) / PI)
}

/// Discrete analogue of `∫ σ(∇H)`.
///
/// The piecewise-linear gradient of a height function on a single face is
/// always a corner of the slope triangle, where `σ` vanishes. Each vertex
/// therefore gets the mean gradient of the domain faces around it, weighted
/// by its share of their area (each face has area 1/2 in lattice
/// coordinates, split evenly among its three corners).
pub fn discrete_energy(h: &HeightFunction) -> f64 {
    let d = h.domain();
    let mut sum = vec![(0.0f64, 0.0f64, 0u32); d.num_vertices()];
    for &f in d.faces() {
        let (s, t) = face_gradient(h, f);
        for v in f.vertices() {
            let i = d.index_of(v).expect("face corners lie in the domain");
            sum[i].0 += s;
            sum[i].1 += t;
            sum[i].2 += 1;
        }
    }
    sum.iter()
        .filter(|e| e.2 > 0)
        .map(|&(s, t, n)| {
            let n = f64::from(n);
            let p = SlopePair::new(s / n, t / n).expect("averages of corner slopes stay in the triangle");
            n / 6.0 * entropy_density(p).expect("valid slope")
        })
        .sum()
}

/// `(∂H/∂x, ∂H/∂y)` of the linear interpolation on a face.
fn face_gradient(h: &HeightFunction, f: Face) -> (f64, f64) {
    let at = |x: i32, y: i32| h.get(super::geometry::TriVertex::new(x, y)).expect("face corner in domain");
    let (x, y) = (f.x, f.y);
    match f.kind {
        FaceKind::Lower => (f64::from(at(x + 1, y) - at(x, y)), f64::from(at(x + 1, y + 1) - at(x + 1, y))),
        FaceKind::Upper => (f64::from(at(x + 1, y + 1) - at(x, y + 1)), f64::from(at(x, y + 1) - at(x, y))),
    }
}
