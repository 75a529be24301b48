use lgl_core::gue::*;
use lgl_core::stats::{mean, variance};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_hermitian(n: usize, rng: &mut StdRng) -> HermitianMatrix {
    let entries: Vec<Complex64> =
        (0..n * n).map(|_| Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))).collect();
    HermitianMatrix::from_upper(n, |i, j| if i == j { Complex64::new(entries[i * n + j].re, 0.0) } else { entries[i * n + j] })
}

/// Number of eigenvalues below `x`, from the signs of the pivots of
/// `M - x I` (Sylvester's law of inertia).
fn count_below(m: &HermitianMatrix, x: f64) -> usize {
    let n = m.order();
    let mut a: Vec<Vec<Complex64>> =
        (0..n).map(|i| (0..n).map(|j| m.get(i, j) - if i == j { Complex64::new(x, 0.0) } else { Complex64::new(0.0, 0.0) }).collect()).collect();
    let mut negative = 0;
    for k in 0..n {
        let p = a[k][k];
        if p.re < 0.0 {
            negative += 1;
        }
        for i in k + 1..n {
            let f = a[i][k] / p;
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
        }
    }
    negative
}

#[test]
fn jacobi_matches_root_finder_and_inertia() {
    let mut rng = StdRng::seed_from_u64(17);
    for trial in 0..100 {
        let n = 1 + trial % 5;
        let m = random_hermitian(n, &mut rng);
        let jac = eigenvalues(&m).unwrap();
        let roots = eigenvalues_by_charpoly(&m);
        assert_eq!(jac.len(), n);
        for (a, b) in jac.iter().zip(&roots) {
            assert!((a - b).abs() < 1e-8, "trial {trial}: {jac:?} vs {roots:?}");
        }
        for (i, &l) in jac.iter().enumerate() {
            assert_eq!(count_below(&m, l - 1e-7), i);
            assert_eq!(count_below(&m, l + 1e-7), i + 1);
        }
        assert!((jac.iter().sum::<f64>() - m.trace()).abs() < 1e-10);
    }
}

#[test]
fn corners_match_oracle_on_gue_samples() {
    for chain in 0..100 {
        let m = sample_gue_matrix(5, 99, chain);
        let s = corners_eigenvalues(&m).unwrap();
        for k in 1..=5 {
            let oracle = eigenvalues_by_charpoly(&m.corner(k));
            for i in 0..k {
                assert!((s.levels()[k - 1][i] - oracle[i]).abs() < 1e-8);
            }
            assert!((s.level_sum(k) - m.corner(k).trace()).abs() < 1e-10);
        }
    }
}

#[test]
fn characteristic_polynomial_of_known_matrix() {
    // [[1, 2], [2, 1]] has -3 - 2x + x^2 = (x - 3)(x + 1), coefficients ascending
    let m = HermitianMatrix::real_symmetric(2, |i, j| if i == j { 1.0 } else { 2.0 });
    let p = characteristic_polynomial(&m);
    for (a, b) in p.iter().zip([-3.0, -2.0, 1.0]) {
        assert!((a - b).abs() < 1e-14, "{p:?}");
    }
    let ev = eigenvalues(&m).unwrap();
    assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
}

#[test]
fn phase_conjugation_keeps_spectra() {
    for chain in 0..20 {
        let m = sample_gue_matrix(3, 5, chain);
        let theta = [0.3 * chain as f64, 1.1, -2.0];
        let c = m.conjugate_by_phases(&theta);
        for k in 2..=3 {
            let a = eigenvalues(&m.corner(k)).unwrap();
            let b = eigenvalues_by_charpoly(&c.corner(k));
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn entry_variances() {
    let n = 20_000;
    let (mut diag, mut re, mut im) = (Vec::new(), Vec::new(), Vec::new());
    for chain in 0..n {
        let m = sample_gue_matrix(2, 3, chain);
        assert_eq!(m.get(0, 0).im, 0.0);
        diag.push(m.get(0, 0).re);
        re.push(m.get(0, 1).re);
        im.push(m.get(0, 1).im);
    }
    // standard error of a variance estimate is about v sqrt(2 / n)
    assert!((variance(&diag) - 1.0).abs() < 0.04);
    assert!((variance(&re) - 0.5).abs() < 0.02);
    assert!((variance(&im) - 0.5).abs() < 0.02);
    assert!(mean(&diag).abs() < 0.03);
}

#[test]
fn samples_interlace_and_serialize() {
    for chain in 0..500 {
        let s = sample_gue_corners(6, 1, chain).unwrap();
        for k in 1..6 {
            for i in 0..k {
                assert!(s.levels()[k][i] < s.levels()[k - 1][i] && s.levels()[k - 1][i] < s.levels()[k][i + 1]);
            }
        }
        let back: GueCornersSample = serde_json::from_str(&s.to_json_line()).unwrap();
        assert_eq!(back, s);
    }
    assert!(serde_json::from_str::<GueCornersSample>(r#"{"rows":[[0.0],[0.5,1.0]]}"#).is_err());
}

#[test]
fn marginal_check_on_moderate_sample() {
    let samples: Vec<GueCornersSample> = (0..4000).map(|c| sample_gue_corners(3, 21, c).unwrap()).collect();
    let checks = gaussian_marginal_check(&samples);
    assert_eq!(checks.len(), 3);
    for c in &checks {
        assert!((c.summary.variance / c.target_variance - 1.0).abs() < 0.1, "{c:?}");
        assert!(c.ks < 0.03, "{c:?}");
    }
}
