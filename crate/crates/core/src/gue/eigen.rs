//! Eigenvalues of Hermitian matrices.

use num_complex::Complex64;

use super::{GueError, HermitianMatrix};

/// Off-diagonal Frobenius norm below which the matrix counts as diagonal,
/// relative to the Frobenius norm of the input.
pub const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Ascending eigenvalues by cyclic complex Jacobi rotations.
pub fn eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>, GueError> {
    let n = m.order();
    let mut a: Vec<Complex64> = m.entries().to_vec();
    let idx = |i: usize, j: usize| i * n + j;
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let off = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += 2.0 * a[idx(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > JACOBI_TOL * scale {
        if sweeps == MAX_SWEEPS {
            return Err(GueError::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // unit phase making the pivot real
                let ph = apq / r;
                let (app, aqq) = (a[idx(p, p)].re, a[idx(q, q)].re);
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)] * ph.conj();
                    let new_p = akp * c - akq * s;
                    let new_q = akp * s + akq * c;
                    a[idx(k, p)] = new_p;
                    a[idx(p, k)] = new_p.conj();
                    a[idx(k, q)] = new_q;
                    a[idx(q, k)] = new_q.conj();
                }
                a[idx(p, p)] = Complex64::new(app - t * r, 0.0);
                a[idx(q, q)] = Complex64::new(aqq + t * r, 0.0);
                a[idx(p, q)] = Complex64::new(0.0, 0.0);
                a[idx(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[idx(i, i)].re).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Coefficients `c_0, ..., c_n` of `det(x I - M) = Σ c_j x^j` by the
/// Faddeev-LeVerrier recursion.
pub fn characteristic_polynomial(m: &HermitianMatrix) -> Vec<f64> {
    let n = m.order();
    let a = m.entries();
    let mul = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let xik = x[i * n + k];
                for j in 0..n {
                    out[i * n + j] += xik * y[k * n + j];
                }
            }
        }
        out
    };
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k
    let mut mk = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 1..=n {
        for i in 0..n {
            mk[i * n + i] += coeffs[n - k + 1];
        }
        let am = mul(a, &mk);
        let tr: f64 = (0..n).map(|i| am[i * n + i].re).sum();
        coeffs[n - k] = -tr / k as f64;
        mk = am;
    }
    coeffs
}

fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * z + ci)
}

/// Ascending real parts of the roots of a monic real polynomial
/// (Durand-Kerner iteration, then Newton polishing on the real axis).
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len() - 1;
    let bound = 1.0 + coeffs[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = horner(coeffs, z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    let deriv: Vec<f64> = (1..=n).map(|j| coeffs[j] * j as f64).collect();
    let mut roots: Vec<f64> = z
        .iter()
        .map(|r| {
            let mut x = r.re;
            for _ in 0..50 {
                let d = horner(&deriv, Complex64::new(x, 0.0)).re;
                if d == 0.0 {
                    break;
                }
                let step = horner(coeffs, Complex64::new(x, 0.0)).re / d;
                x -= step;
                if step.abs() < 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            x
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// Eigenvalues from the roots of the characteristic polynomial.
pub fn eigenvalues_by_charpoly(m: &HermitianMatrix) -> Vec<f64> {
    real_roots(&characteristic_polynomial(m))
}
