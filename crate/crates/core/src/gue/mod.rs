//! The GUE-corners process: Hermitian Gaussian matrices and the eigenvalues
//! of their top-left corners.

mod eigen;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{CounterRng, Seed};
use crate::stats::{ks_one_sample, normal_cdf, Summary};

pub use eigen::{characteristic_polynomial, eigenvalues, eigenvalues_by_charpoly, real_roots, JACOBI_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GueError {
    #[error("entries do not form a Hermitian matrix at ({0}, {1})")]
    NotHermitian(usize, usize),
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("levels {level} and {next} are not strictly interlacing at position {index}")]
    NotInterlacing { level: usize, next: usize, index: usize },
}

/// A square matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    /// Row-major.
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Checks exact Hermitian symmetry.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self, GueError> {
        if data.len() != n * n {
            return Err(GueError::Shape { expected: n * n, got: data.len() });
        }
        for i in 0..n {
            for j in i..n {
                if data[i * n + j] != data[j * n + i].conj() {
                    return Err(GueError::NotHermitian(i, j));
                }
            }
        }
        Ok(HermitianMatrix { n, data })
    }

    /// Builds the matrix from its upper triangle; diagonal imaginary parts are dropped.
    pub fn from_upper(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(f(i, i).re, 0.0);
            for j in i + 1..n {
                let z = f(i, j);
                data[i * n + j] = z;
                data[j * n + i] = z.conj();
            }
        }
        HermitianMatrix { n, data }
    }

    pub fn real_symmetric(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        Self::from_upper(n, |i, j| Complex64::new(f(i, j), 0.0))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Top-left `k x k` corner.
    pub fn corner(&self, k: usize) -> HermitianMatrix {
        let data = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| self.get(i, j)).collect();
        HermitianMatrix { n: k, data }
    }

    /// `D M D*` for the diagonal unitary `D = diag(e^{i θ_j})`.
    pub fn conjugate_by_phases(&self, theta: &[f64]) -> HermitianMatrix {
        Self::from_upper(self.n, |i, j| self.get(i, j) * Complex64::from_polar(1.0, theta[i] - theta[j]))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }
}

fn complex_normal(rng: &mut CounterRng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `M = (X + X*)/2` with `X` filled by i.i.d. `N(0,1) + i N(0,1)`.
///
/// Entries are drawn corner by corner (the new row and column of the
/// `k x k` corner after those of the `(k-1) x (k-1)` corner), so the top-left
/// corners of matrices of different orders with the same seed agree.
pub fn sample_gue_matrix(k_max: usize, seed: Seed, chain: u64) -> HermitianMatrix {
    let mut rng = CounterRng::for_chain(seed, chain);
    let n = k_max;
    let mut x = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..n {
        for i in 0..k {
            x[i * n + k] = complex_normal(&mut rng);
            x[k * n + i] = complex_normal(&mut rng);
        }
        x[k * n + k] = complex_normal(&mut rng);
    }
    HermitianMatrix::from_upper(n, |i, j| (x[i * n + j] + x[j * n + i].conj()) * 0.5)
}

/// Eigenvalues of the top-left corners, level `k` holding `k` ascending values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLevels", into = "RawLevels")]
pub struct GueCornersSample {
    levels: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawLevels {
    rows: Vec<Vec<f64>>,
}

impl TryFrom<RawLevels> for GueCornersSample {
    type Error = GueError;
    fn try_from(r: RawLevels) -> Result<Self, GueError> {
        GueCornersSample::new(r.rows)
    }
}

impl From<GueCornersSample> for RawLevels {
    fn from(s: GueCornersSample) -> Self {
        RawLevels { rows: s.levels }
    }
}

impl GueCornersSample {
    /// Requires strict interlacing `ξ_i^{k+1} < ξ_i^k < ξ_{i+1}^{k+1}`.
    /// A tie is treated as a defect, never rounded away.
    pub fn new(levels: Vec<Vec<f64>>) -> Result<Self, GueError> {
        for (k, row) in levels.iter().enumerate() {
            if row.len() != k + 1 {
                return Err(GueError::Shape { expected: k + 1, got: row.len() });
            }
        }
        for k in 1..levels.len() {
            let (lo, up) = (&levels[k - 1], &levels[k]);
            for i in 0..k {
                if !(up[i] < lo[i] && lo[i] < up[i + 1]) {
                    return Err(GueError::NotInterlacing { level: k, next: k + 1, index: i + 1 });
                }
            }
        }
        Ok(GueCornersSample { levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// `ξ_i^k` with 1-based indices.
    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.levels[k - 1][i - 1]
    }

    pub fn level_sum(&self, k: usize) -> f64 {
        self.levels[k - 1].iter().sum()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("samples serialize")
    }
}

pub fn corners_eigenvalues(m: &HermitianMatrix) -> Result<GueCornersSample, GueError> {
    let levels = (1..=m.order()).map(|k| eigenvalues(&m.corner(k))).collect::<Result<Vec<_>, _>>()?;
    GueCornersSample::new(levels)
}

pub fn sample_gue_corners(k_max: usize, seed: Seed, chain: u64) -> Result<GueCornersSample, GueError> {
    corners_eigenvalues(&sample_gue_matrix(k_max, seed, chain))
}

/// Moments and Kolmogorov-Smirnov distance of one observable against `N(0, v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalCheck {
    pub name: String,
    pub target_variance: f64,
    pub summary: Summary,
    pub ks: f64,
}

impl MarginalCheck {
    pub fn new(name: impl Into<String>, xs: &[f64], target_variance: f64) -> Self {
        let sd = target_variance.sqrt();
        MarginalCheck {
            name: name.into(),
            target_variance,
            summary: Summary::of(xs),
            ks: ks_one_sample(xs, |x| normal_cdf(x / sd)),
        }
    }
}

/// `ξ_1^1` against `N(0,1)` and each level sum `Σ_i ξ_i^k` against `N(0,k)`.
pub fn gaussian_marginal_check(samples: &[GueCornersSample]) -> Vec<MarginalCheck> {
    let depth = samples.iter().map(GueCornersSample::depth).min().unwrap_or(0);
    let mut out = Vec::new();
    if depth == 0 {
        return out;
    }
    let first: Vec<f64> = samples.iter().map(|s| s.get(1, 1)).collect();
    out.push(MarginalCheck::new("xi_1^1", &first, 1.0));
    for k in 2..=depth {
        let tr: Vec<f64> = samples.iter().map(|s| s.level_sum(k)).collect();
        out.push(MarginalCheck::new(format!("trace_{k}"), &tr, k as f64));
    }
    out
}
