//! One function per CLI verb.
//!
//! With `--out DIR` every artifact is written under `DIR`; otherwise the
//! report (or the samples, for `sample` and `render`) goes to stdout. A
//! human-readable summary always goes to stderr.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use lgl_core::concentration::DomainFamily;
use lgl_core::sampler::{enumerate_tilings, DEFAULT_FACE_CAP};
use lgl_core::trapezoid::TrapezoidSpec;
use lgl_core::{BoundaryHeightFunction, Domain, Tiling, TilingRecord};
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};
use crate::experiments::{self, GueComparison};
use crate::oracle;
use crate::render::render_svg;

/// Whether every check of the run passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed,
}

impl Outcome {
    fn of(passed: bool) -> Self {
        if passed {
            Outcome::Passed
        } else {
            Outcome::Failed
        }
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.experiment {
        Experiment::Sample => cmd_sample(cfg),
        Experiment::Enumerate => cmd_enumerate(cfg),
        Experiment::Gue => cmd_gue(cfg),
        Experiment::HexagonGue => cmd_hexagon_gue(cfg),
        Experiment::TrapezoidGue => cmd_trapezoid_gue(cfg),
        Experiment::Concentration => cmd_concentration(cfg),
        Experiment::Oracle => cmd_oracle(cfg),
        Experiment::Render => cmd_render(cfg),
    }
}

struct Output<'a> {
    dir: Option<&'a Path>,
}

impl<'a> Output<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        if let Some(d) = &cfg.out {
            fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Output { dir: cfg.out.as_deref() })
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.map(|d| d.join(name))
    }

    /// Writes `name` under the output directory, or to stdout when
    /// `to_stdout` is set and there is no directory.
    fn emit(&self, name: &str, contents: &str, to_stdout: bool) -> Result<()> {
        match self.path(name) {
            Some(p) => fs::write(&p, contents).with_context(|| format!("writing {}", p.display())),
            None if to_stdout => {
                std::io::stdout().lock().write_all(contents.as_bytes())?;
                Ok(())
            }
            None => Ok(()),
        }
    }
}

fn summary(text: &str) {
    eprint!("{text}");
}

fn json_lines<T>(items: &[T], line: impl Fn(&T) -> String) -> String {
    items.iter().map(|x| line(x) + "\n").collect()
}

fn tiling_line(t: &Tiling) -> String {
    serde_json::to_string(&t.to_record()).expect("tilings serialize")
}

fn trapezoid_spec(cfg: &ExperimentConfig, lambda: &[i32]) -> Result<TrapezoidSpec> {
    let width = lambda.len() as u32;
    let side = match cfg.side {
        Some(a) => a,
        // the smallest straight side that fits the dents
        None => (lambda.iter().max().copied().unwrap_or(0) + 1 - width as i32).max(0) as u32,
    };
    Ok(TrapezoidSpec::new(width, side, lambda.to_vec())?)
}

/// The region named by `--lambda`, `--domain` or `--size`, in that order.
pub fn region(cfg: &ExperimentConfig) -> Result<Arc<Domain>> {
    if let Some(lambda) = &cfg.lambda {
        return Ok(Arc::new(trapezoid_spec(cfg, lambda)?.domain()?));
    }
    if let Some(p) = &cfg.domain {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        return Ok(Arc::new(Domain::from_text(&text).with_context(|| format!("parsing {}", p.display()))?));
    }
    Ok(Arc::new(Domain::hexagon(cfg.size, cfg.size, cfg.size)?))
}

fn boundary(d: &Arc<Domain>) -> Result<BoundaryHeightFunction> {
    Ok(BoundaryHeightFunction::of_domain(d.clone(), 0)?)
}

pub fn cmd_sample(cfg: &ExperimentConfig) -> Result<Outcome> {
    if cfg.svg && cfg.out.is_none() {
        bail!("--svg needs --out");
    }
    let out = Output::new(cfg)?;
    let d = region(cfg)?;
    let tilings = experiments::sample_tilings(&boundary(&d)?, cfg.samples, cfg.seed, cfg.threads)?;
    out.emit("domain.txt", &d.to_text(), false)?;
    out.emit("tilings.jsonl", &json_lines(&tilings, tiling_line), true)?;
    if cfg.svg {
        if let Some(t) = tilings.first() {
            out.emit("tiling.svg", &render_svg(t), false)?;
        }
    }
    summary(&format!("sample: {} tilings of a region with {} faces\n", tilings.len(), d.faces().len()));
    Ok(Outcome::Passed)
}

#[derive(Serialize)]
struct EnumerationReport {
    experiment: String,
    config: serde_json::Value,
    faces: usize,
    count: usize,
}

pub fn cmd_enumerate(cfg: &ExperimentConfig) -> Result<Outcome> {
    let out = Output::new(cfg)?;
    let d = region(cfg)?;
    let tilings = enumerate_tilings(&d, &boundary(&d)?)?;
    let report = EnumerationReport {
        experiment: "enumerate".into(),
        config: cfg.echo(),
        faces: d.faces().len(),
        count: tilings.len(),
    };
    out.emit("domain.txt", &d.to_text(), false)?;
    out.emit("tilings.jsonl", &json_lines(&tilings, tiling_line), false)?;
    out.emit("report.json", &(serde_json::to_string_pretty(&report)? + "\n"), true)?;
    summary(&format!("enumerate: {} tilings ({} faces, cap {DEFAULT_FACE_CAP})\n", tilings.len(), d.faces().len()));
    Ok(Outcome::Passed)
}

pub fn cmd_gue(cfg: &ExperimentConfig) -> Result<Outcome> {
    let out = Output::new(cfg)?;
    let (samples, report) =
        experiments::gue_marginals(cfg.size as usize, cfg.samples, cfg.seed, cfg.threads, cfg.echo())?;
    out.emit("samples.jsonl", &json_lines(&samples, |s| s.to_json_line()), false)?;
    out.emit("report.json", &report.to_json(), true)?;
    summary(&report.summary());
    Ok(Outcome::of(report.passed()))
}

fn comparison(cfg: &ExperimentConfig) -> GueComparison {
    GueComparison {
        seed: cfg.seed,
        samples: cfg.samples,
        levels: cfg.levels,
        center: cfg.center,
        gue_samples: cfg.gue_samples,
        threads: cfg.threads,
    }
}

pub fn cmd_hexagon_gue(cfg: &ExperimentConfig) -> Result<Outcome> {
    let out = Output::new(cfg)?;
    let run = experiments::hexagon_gue(cfg.size, &comparison(cfg), cfg.echo())?;
    out.emit("arrays.jsonl", &json_lines(&run.arrays, |a| a.to_json_line()), false)?;
    out.emit("report.json", &run.report.to_json(), true)?;
    summary(&run.report.summary());
    Ok(Outcome::of(run.report.passed()))
}

pub fn cmd_trapezoid_gue(cfg: &ExperimentConfig) -> Result<Outcome> {
    let Some(lambda) = &cfg.lambda else {
        bail!("trapezoid-gue needs --lambda");
    };
    let out = Output::new(cfg)?;
    let spec = trapezoid_spec(cfg, lambda)?;
    let run = experiments::trapezoid_gue(&spec, &comparison(cfg), cfg.echo())?;
    out.emit("arrays.jsonl", &json_lines(&run.arrays, |a| a.to_json_line()), false)?;
    out.emit("report.json", &run.report.to_json(), true)?;
    summary(&run.report.summary());
    Ok(Outcome::of(run.report.passed()))
}

pub fn cmd_concentration(cfg: &ExperimentConfig) -> Result<Outcome> {
    let out = Output::new(cfg)?;
    let family = match &cfg.domain {
        Some(p) => DomainFamily::Scaled(fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
        None => DomainFamily::RegularHexagon,
    };
    let report =
        experiments::concentration(&family, &cfg.sizes, cfg.samples, cfg.size, cfg.seed, cfg.threads, cfg.echo())?;
    out.emit("report.json", &report.to_json(), true)?;
    summary(&report.summary());
    Ok(Outcome::of(report.passed()))
}

pub fn cmd_oracle(cfg: &ExperimentConfig) -> Result<Outcome> {
    let out = Output::new(cfg)?;
    let report = oracle::run_all(cfg.seed, cfg.threads)?;
    out.emit("report.json", &report.to_json(), true)?;
    summary(&report.summary());
    Ok(Outcome::of(report.passed()))
}

/// Reads tilings written by `sample` (one JSON record per line).
pub fn load_tilings(d: &Arc<Domain>, path: &Path) -> Result<Vec<Tiling>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            let rec: TilingRecord = serde_json::from_str(l).with_context(|| format!("line {}", n + 1))?;
            Tiling::from_record(d.clone(), &rec).with_context(|| format!("line {}", n + 1))
        })
        .collect()
}

/// Renders the first tiling of `--input` on the region given by
/// `--domain`, `--lambda` or `--size`.
pub fn cmd_render(cfg: &ExperimentConfig) -> Result<Outcome> {
    let Some(input) = &cfg.input else {
        bail!("render needs --input");
    };
    let out = Output::new(cfg)?;
    let d = region(cfg)?;
    let tilings = load_tilings(&d, input)?;
    let Some(t) = tilings.first() else {
        bail!("{} holds no tilings", input.display());
    };
    out.emit("tiling.svg", &render_svg(t), true)?;
    summary(&format!("render: {} lozenges\n", t.lozenges().len()));
    Ok(Outcome::Passed)
}
