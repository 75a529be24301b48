//! The statistical experiments behind the CLI verbs.
//!
//! Sample `i` of every experiment is drawn from the random stream keyed by
//! `(seed, i)`, and results are collected in index order, so outputs do not
//! depend on the number of worker threads.

use std::sync::Arc;

use anyhow::{bail, Context, Result};
use lgl_core::concentration::{
    center_height_sample, conditional_variance_check, size_seed, variance_row, ConditionalVarianceReport, DomainFamily,
    VarianceReport,
};
use lgl_core::gue::{gaussian_marginal_check, sample_gue_corners, GueCornersSample, GueError};
use lgl_core::sampler::{CftpOptions, CftpSampler};
use lgl_core::stats::{ks_one_sample, ks_two_sample, mean, normal_cdf};
use lgl_core::trapezoid::{
    array_from_tiling, dent_stats, extract_boundary_array, InterlacingArray, TrapezoidError, TrapezoidFrame,
    TrapezoidSpec,
};
use lgl_core::{BoundaryHeightFunction, CounterRng, Domain, Seed, Tiling};
use serde::Serialize;

use crate::config::Center;
use crate::parallel::par_map;
use crate::report::{Check, Quantity, Source, StatReport};

/// Limiting variance `σ² = 3/8` of the rescaled first-line position on a
/// regular hexagon.
pub const HEXAGON_SIGMA2: f64 = 0.375;

/// Window for `Var[(y_1^1 - N/2)/√N]` at `N = 20`.
pub const HEXAGON_VARIANCE_WINDOW: (f64, f64) = (0.28, 0.47);

/// Bound on the two-sample KS distance between tiling and GUE first lines.
pub const KS_BOUND: f64 = 0.05;

const JITTER_BLOCK: u64 = 0x6a69_7474_6572;
const REFERENCE_BLOCK: u64 = 0x6775_6572_6566;

fn derived_seed(seed: Seed, block: u64) -> Seed {
    CounterRng::new(seed, 0, block).next_word()
}

/// Uniform offsets in `(-1/2, 1/2)` for the entries of sample `index`.
///
/// Positions are integers; adding an independent uniform offset turns them
/// into a continuous variable with the same limit, so that KS distances
/// measure the shape of the law rather than the lattice spacing.
fn jitter(seed: Seed, index: u64, count: usize) -> Vec<f64> {
    let mut rng = CounterRng::new(seed, index, JITTER_BLOCK);
    (0..count).map(|_| ((rng.next_word() >> 11) as f64 + 0.5) / (1u64 << 53) as f64 - 0.5).collect()
}

/// Tiling samples of a region, keyed by `(seed, index)`.
pub fn sample_tilings(b: &BoundaryHeightFunction, samples: usize, seed: Seed, threads: usize) -> Result<Vec<Tiling>> {
    let sampler = CftpSampler::new(b, CftpOptions::default())?;
    par_map(threads, samples as u64, |i| Ok(sampler.sample(seed, i)?))
}

/// Arrays read off sampled tilings; samples whose array fails to interlace
/// are counted rather than kept.
#[derive(Clone, Debug, Default)]
pub struct ArraySamples {
    pub arrays: Vec<InterlacingArray>,
    /// Sample index of each array.
    pub indices: Vec<u64>,
    pub not_interlacing: usize,
}

fn collect_arrays(results: Vec<Result<InterlacingArray, TrapezoidError>>, levels: usize) -> Result<ArraySamples> {
    let mut out = ArraySamples::default();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(a) => {
                if a.depth() < levels {
                    bail!("sample {i}: array has {} levels, {levels} requested", a.depth());
                }
                out.arrays.push(a.truncate(levels));
                out.indices.push(i as u64);
            }
            Err(TrapezoidError::NotInterlacing { .. }) => out.not_interlacing += 1,
            Err(e) => return Err(e).with_context(|| format!("sample {i}")),
        }
    }
    Ok(out)
}

/// GUE-corners reference samples, keyed by a seed derived from `seed`.
pub fn reference_samples(levels: usize, count: usize, seed: Seed, threads: usize) -> Result<Vec<GueCornersSample>> {
    let rs = derived_seed(seed, REFERENCE_BLOCK);
    par_map(threads, count as u64, |j| Ok(sample_gue_corners(levels, rs, j)?))
}

/// How positions are standardised before comparison with `scale · ξ`.
#[derive(Clone, Debug)]
pub struct Standardization {
    /// Theoretical centre.
    pub center: f64,
    /// Positions are divided by this.
    pub divisor: f64,
    /// Limit of the standardised array is `reference_scale · ξ`.
    pub reference_scale: f64,
    /// Printed before the reference variable, e.g. `"sqrt(3/8) "`.
    pub reference_label: String,
}

/// Common GUE comparison settings.
#[derive(Clone, Debug)]
pub struct GueComparison {
    pub seed: Seed,
    pub samples: usize,
    pub levels: usize,
    pub center: Center,
    pub gue_samples: usize,
    pub threads: usize,
}

/// Result of a tiling versus GUE comparison.
#[derive(Clone, Debug)]
pub struct ComparisonRun {
    pub report: StatReport,
    pub arrays: Vec<InterlacingArray>,
}

/// Products `(x - x̄)(y - ȳ)`, whose mean is the sample covariance.
fn centered_products(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let (mx, my) = (mean(xs), mean(ys));
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect()
}

/// Tiling covariance against the GUE one, allowing 10% for finite size
/// plus four standard errors of the difference.
fn covariance_check(name: String, tiling: &Quantity, reference: &Quantity) -> Check {
    let se = (tiling.mean_radius.powi(2) + reference.mean_radius.powi(2)).sqrt() / 1.96;
    let r = 0.1 * reference.mean.abs() + 4.0 * se;
    Check::within(name, tiling.mean, reference.mean - r, reference.mean + r)
}

/// Values of `f` on every array, in sample order.
fn collect<T>(items: &[T], f: impl Fn(&T) -> f64) -> Vec<f64> {
    items.iter().map(f).collect()
}

fn compare(
    experiment: &str,
    config: serde_json::Value,
    data: &ArraySamples,
    cmp: &GueComparison,
    st: &Standardization,
) -> Result<StatReport> {
    let levels = cmp.levels;
    if data.arrays.len() < 2 {
        bail!("fewer than 2 usable samples");
    }
    let reference = reference_samples(levels, cmp.gue_samples, cmp.seed, cmp.threads)?;
    let s = st.reference_scale;
    let var_target = s * s;
    let mut quantities = Vec::new();
    let mut checks = Vec::new();
    let arrays = &data.arrays;

    // reference side, scaled to the limit of the standardised array
    let g11 = collect(&reference, |r| s * r.get(1, 1));
    let gsum = |k: usize| collect(&reference, |r| s * r.level_sum(k));
    quantities.push(Quantity::new("gue y_1^1", Source::Reference, &g11));
    for k in 2..=levels {
        quantities.push(Quantity::new(format!("gue level_sum_{k}"), Source::Reference, &gsum(k)));
    }

    // joint moments through covariances, which do not depend on centring
    let z = |y: i32| f64::from(y) / st.divisor;
    let t11 = collect(arrays, |a| z(a.get(1, 1)));
    for k in 2..=levels {
        let name = format!("cov(y_1^1, level_sum_{k})");
        let tsum = collect(arrays, |a| (1..=k).map(|i| z(a.get(k, i))).sum());
        let t = Quantity::new(name.clone(), Source::Sample, &centered_products(&t11, &tsum));
        let r = Quantity::new(format!("gue {name}"), Source::Reference, &centered_products(&g11, &gsum(k)));
        checks.push(covariance_check(name, &t, &r));
        quantities.extend([t, r]);
    }
    if levels >= 2 {
        let name = "cov(y_1^2, y_2^2)".to_string();
        let (a1, a2) = (collect(arrays, |a| z(a.get(2, 1))), collect(arrays, |a| z(a.get(2, 2))));
        let (b1, b2) = (collect(&reference, |r| s * r.get(2, 1)), collect(&reference, |r| s * r.get(2, 2)));
        let t = Quantity::new(name.clone(), Source::Sample, &centered_products(&a1, &a2));
        let r = Quantity::new(format!("gue {name}"), Source::Reference, &centered_products(&b1, &b2));
        checks.push(covariance_check(name, &t, &r));
        quantities.extend([t, r]);
    }

    let jit: Vec<Vec<f64>> =
        data.indices.iter().map(|&i| jitter(cmp.seed, i, levels * (levels + 1) / 2)).collect();
    let mut centers = Vec::new();
    if cmp.center.theoretical() {
        centers.push(("theoretical", st.center));
    }
    if cmp.center.empirical() {
        centers.push(("empirical", mean(&collect(arrays, |a| f64::from(a.get(1, 1))))));
    }
    for (label, c) in centers {
        // jitter entries are laid out in row order
        let zj = |a: &InterlacingArray, u: &[f64], k: usize, i: usize| {
            (f64::from(a.get(k, i)) + u[(k - 1) * k / 2 + (i - 1)] - c) / st.divisor
        };
        let z11 = collect(arrays, |a| (f64::from(a.get(1, 1)) - c) / st.divisor);
        let ks = ks_one_sample(&z11, |x| normal_cdf(x / s));
        quantities.push(
            Quantity::new(format!("y_1^1 [{label}]"), Source::Sample, &z11).with_ks(ks, format!("N(0, {var_target})")),
        );
        let z11j: Vec<f64> = arrays.iter().zip(&jit).map(|(a, u)| zj(a, u, 1, 1)).collect();
        let ks = ks_two_sample(&z11j, &g11);
        quantities.push(
            Quantity::new(format!("y_1^1 jittered [{label}]"), Source::Sample, &z11j)
                .with_ks(ks, format!("{}xi_1^1", st.reference_label)),
        );
        checks.push(Check::below(format!("two-sample KS y_1^1 [{label}]"), ks, KS_BOUND));
        for k in 2..=levels {
            let sums: Vec<f64> = arrays.iter().zip(&jit).map(|(a, u)| (1..=k).map(|i| zj(a, u, k, i)).sum()).collect();
            let ks = ks_two_sample(&sums, &gsum(k));
            quantities.push(
                Quantity::new(format!("level_sum_{k} jittered [{label}]"), Source::Sample, &sums)
                    .with_ks(ks, format!("{}GUE level sum {k}", st.reference_label)),
            );
        }
    }
    let total = arrays.len() + data.not_interlacing;
    checks.push(Check::within("interlacing fraction", arrays.len() as f64 / total as f64, 1.0, 1.0));
    let report = StatReport {
        experiment: experiment.into(),
        config,
        samples: arrays.len(),
        reference_samples: reference.len(),
        quantities,
        checks,
    };
    report.validate()?;
    Ok(report)
}

/// First levels of the array along the left side of the regular hexagon of
/// side `n`, compared with `√(3/8)` times GUE corners after centring at
/// `N/2` (or the sample mean of `y_1^1`) and dividing by `√N`.
pub fn hexagon_gue(n: u32, cmp: &GueComparison, config: serde_json::Value) -> Result<ComparisonRun> {
    if cmp.levels > n as usize {
        bail!("{} levels requested from a hexagon of side {n}", cmp.levels);
    }
    let d = Arc::new(Domain::hexagon(n, n, n)?);
    let b = BoundaryHeightFunction::of_domain(d, 0)?;
    let sampler = CftpSampler::new(&b, CftpOptions::default())?;
    let frame = TrapezoidFrame::hexagon_left(n, n, n);
    let results = par_map(cmp.threads, cmp.samples as u64, |i| {
        let t = sampler.sample(cmp.seed, i)?;
        Ok(extract_boundary_array(&t, &frame))
    })?;
    let data = collect_arrays(results, cmp.levels)?;
    let st = Standardization {
        center: f64::from(n) / 2.0,
        divisor: f64::from(n).sqrt(),
        reference_scale: HEXAGON_SIGMA2.sqrt(),
        reference_label: "sqrt(3/8) ".into(),
    };
    let mut report = compare("hexagon-gue", config, &data, cmp, &st)?;
    for label in ["theoretical", "empirical"] {
        if let Some(q) = report.quantity(&format!("y_1^1 [{label}]")) {
            let (lo, hi) = HEXAGON_VARIANCE_WINDOW;
            let c = Check::within(format!("variance y_1^1 [{label}]"), q.variance, lo, hi);
            report.checks.insert(0, c);
        }
    }
    Ok(ComparisonRun { report, arrays: data.arrays })
}

/// Arrays of a fixed trapezoid, standardised by `m(λ)` and `σ(λ)√L`,
/// compared with GUE corners.
pub fn trapezoid_gue(spec: &TrapezoidSpec, cmp: &GueComparison, config: serde_json::Value) -> Result<ComparisonRun> {
    if cmp.levels > spec.width as usize {
        bail!("{} levels requested from a trapezoid of width {}", cmp.levels, spec.width);
    }
    let ds = dent_stats(spec);
    if ds.sigma2 <= 0.0 {
        bail!("σ(λ)² = {} is not positive; the dents are too close to frozen to standardise", ds.sigma2);
    }
    let d = Arc::new(spec.domain()?);
    let b = BoundaryHeightFunction::of_domain(d, 0)?;
    let sampler = CftpSampler::new(&b, CftpOptions::default())?;
    let results = par_map(cmp.threads, cmp.samples as u64, |i| {
        let t = sampler.sample(cmp.seed, i)?;
        Ok(array_from_tiling(&t, spec))
    })?;
    let data = collect_arrays(results, cmp.levels)?;
    let st = Standardization {
        center: ds.m,
        divisor: ds.sigma() * f64::from(spec.width).sqrt(),
        reference_scale: 1.0,
        reference_label: "".into(),
    };
    let report = compare("trapezoid-gue", config, &data, cmp, &st)?;
    Ok(ComparisonRun { report, arrays: data.arrays })
}

/// GUE-corners samples and their Gaussian marginals.
pub fn gue_marginals(
    k_max: usize,
    samples: usize,
    seed: Seed,
    threads: usize,
    config: serde_json::Value,
) -> Result<(Vec<GueCornersSample>, StatReport)> {
    let results = par_map(threads, samples as u64, |i| match sample_gue_corners(k_max, seed, i) {
        Ok(s) => Ok(Some(s)),
        Err(GueError::NotInterlacing { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    })?;
    let total = results.len();
    let kept: Vec<GueCornersSample> = results.into_iter().flatten().collect();
    if kept.len() < 2 {
        bail!("fewer than 2 usable samples");
    }
    let mut quantities = Vec::new();
    let mut checks = Vec::new();
    for m in gaussian_marginal_check(&kept) {
        let q = Quantity {
            name: m.name.clone(),
            source: Source::Sample,
            count: m.summary.count,
            mean: m.summary.mean,
            variance: m.summary.variance,
            mean_radius: m.summary.mean_radius,
            variance_radius: m.summary.variance_radius,
            ks: Some(m.ks),
            ks_reference: Some(format!("N(0, {})", m.target_variance)),
        };
        if m.name == "xi_1^1" {
            checks.push(Check::within("mean xi_1^1", q.mean, -0.02, 0.02));
            checks.push(Check::within("variance xi_1^1", q.variance, 0.97, 1.03));
        }
        if m.name == "trace_2" {
            checks.push(Check::within("variance trace_2", q.variance, 1.94, 2.06));
        }
        quantities.push(q);
    }
    if k_max >= 2 {
        let p: Vec<f64> = kept.iter().map(|s| s.get(1, 1) * s.level_sum(2)).collect();
        let q = Quantity::new("xi_1^1*trace_2", Source::Sample, &p);
        checks.push(Check::within("moment xi_1^1*trace_2", q.mean, 0.95, 1.05));
        quantities.push(q);
    }
    checks.push(Check::within("interlacing fraction", kept.len() as f64 / total as f64, 1.0, 1.0));
    let report = StatReport {
        experiment: "gue".into(),
        config,
        samples: kept.len(),
        reference_samples: 0,
        quantities,
        checks,
    };
    report.validate()?;
    Ok((kept, report))
}

/// Centre-height variances along a ladder of sizes; identical to
/// `variance_experiment` for any number of threads.
pub fn variance_ladder(
    family: &DomainFamily,
    sizes: &[u32],
    samples: usize,
    seed: Seed,
    threads: usize,
) -> Result<VarianceReport> {
    let mut rows = Vec::new();
    for &size in sizes {
        let d = Arc::new(family.member(size)?);
        let b = BoundaryHeightFunction::of_domain(d.clone(), 0)?;
        let sampler = CftpSampler::new(&b, CftpOptions::default())?;
        let s = size_seed(seed, size);
        let heights = par_map(threads, samples as u64, |i| Ok(center_height_sample(&d, s, i, &sampler)?))?;
        rows.push(variance_row(&d, size, &heights));
    }
    Ok(VarianceReport { family: family.clone(), seed, rows })
}

/// Draws per group for the Bernoulli cross-check of the level-set tree.
pub const BERNOULLI_DRAWS: usize = 20_000;

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub variance: VarianceReport,
    pub strictly_decreasing: bool,
    pub conditional: ConditionalVarianceReport,
    pub checks: Vec<Check>,
}

impl ConcentrationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn summary(&self) -> String {
        let mut s = format!("concentration: seed {}\n  size  samples   centre      mean       Var     Var/N\n", self.variance.seed);
        for r in &self.variance.rows {
            s += &format!(
                "  {:>4} {:>8}  ({:>3},{:>3}) {:>9.4} {:>9.4} {:>9.5}\n",
                r.size, r.samples, r.center.x, r.center.y, r.mean, r.variance, r.variance_over_size
            );
        }
        let c = &self.conditional;
        s += &format!(
            "  level-set tree: {} pairs, {} groups, {} vertex-pair checks, {} mismatches, {} uniform groups, max Bernoulli TV {:.4}\n",
            c.pairs, c.groups, c.checks, c.mismatches, c.uniform_groups, c.bernoulli_max_tv
        );
        for k in &self.checks {
            s += &format!("  [{}] {}\n", if k.pass { "ok  " } else { "FAIL" }, k.name);
        }
        s
    }
}

/// Variance ladder plus the exact conditional-variance check on the regular
/// hexagon of side `small`.
pub fn concentration(
    family: &DomainFamily,
    sizes: &[u32],
    samples: usize,
    small: u32,
    seed: Seed,
    threads: usize,
    config: serde_json::Value,
) -> Result<ConcentrationReport> {
    let variance = variance_ladder(family, sizes, samples, seed, threads)?;
    let b = BoundaryHeightFunction::of_domain(Arc::new(Domain::hexagon(small, small, small)?), 0)?;
    let conditional = conditional_variance_check(&b, BERNOULLI_DRAWS, seed)?;
    let strictly_decreasing = variance.strictly_decreasing();
    let checks = vec![
        Check::within("Var/N strictly decreasing", f64::from(u8::from(strictly_decreasing)), 1.0, 1.0),
        Check::within("conditional variance mismatches", conditional.mismatches as f64, 0.0, 0.0),
        Check::within(
            "uniform sign patterns",
            conditional.uniform_groups as f64,
            conditional.groups as f64,
            conditional.groups as f64,
        ),
        Check::below("Bernoulli total variation", conditional.bernoulli_max_tv, 0.05),
    ];
    Ok(ConcentrationReport {
        experiment: "concentration".into(),
        config,
        variance,
        strictly_decreasing,
        conditional,
        checks,
    })
}
