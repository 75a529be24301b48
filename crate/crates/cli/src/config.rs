//! Run configuration assembled from flags, an optional key=value file and
//! the `LGL_THREADS` environment variable.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Environment variable giving the default number of worker threads.
pub const THREADS_ENV: &str = "LGL_THREADS";

/// Centering of the first-line positions before comparison with GUE.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Center {
    /// `N/2` for hexagons, `m(λ)` for trapezoids.
    Theoretical,
    /// The sample mean of `y_1^1`.
    Empirical,
    Both,
}

impl Center {
    pub fn theoretical(self) -> bool {
        matches!(self, Center::Theoretical | Center::Both)
    }

    pub fn empirical(self) -> bool {
        matches!(self, Center::Empirical | Center::Both)
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "theoretical" => Ok(Center::Theoretical),
            "empirical" => Ok(Center::Empirical),
            "both" => Ok(Center::Both),
            _ => bail!("unknown centering {s:?}, expected theoretical, empirical or both"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Sample,
    Enumerate,
    Gue,
    HexagonGue,
    TrapezoidGue,
    Concentration,
    Oracle,
    Render,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Experiment::Sample => "sample",
            Experiment::Enumerate => "enumerate",
            Experiment::Gue => "gue",
            Experiment::HexagonGue => "hexagon-gue",
            Experiment::TrapezoidGue => "trapezoid-gue",
            Experiment::Concentration => "concentration",
            Experiment::Oracle => "oracle",
            Experiment::Render => "render",
        };
        f.write_str(s)
    }
}

/// Settings shared by flags and config files; `None` means unset.
#[derive(Clone, Debug, Default, PartialEq, clap::Args)]
pub struct Settings {
    /// Master seed; sample `i` uses the stream keyed by (seed, i)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Side length N of the regular hexagon (or corner depth for `gue`)
    #[arg(long, global = true)]
    pub size: Option<u32>,
    /// Comma-separated size ladder for `concentration`
    #[arg(long, global = true, value_delimiter = ',')]
    pub sizes: Option<Vec<u32>>,
    /// Number of samples
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Worker threads (default: $LGL_THREADS, else all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory; reports go to stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Centering of first-line positions
    #[arg(long, global = true, value_enum)]
    pub center: Option<Center>,
    /// Number of array levels compared with GUE
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Region file in the DOMAIN text format
    #[arg(long, global = true)]
    pub domain: Option<PathBuf>,
    /// Comma-separated trapezoid dents
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<i32>>,
    /// Trapezoid straight side A
    #[arg(long, global = true)]
    pub side: Option<u32>,
    /// Number of GUE reference samples
    #[arg(long = "gue-samples", global = true)]
    pub gue_samples: Option<usize>,
    /// Also render the first sampled tiling as SVG
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub svg: Option<bool>,
    /// Tiling file (JSON lines) for `render`
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment, and keys may use
    /// `-` or `_`.
    pub fn parse_file(text: &str) -> Result<Settings> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", n + 1))?;
            let (key, value) = (key.trim().replace('_', "-"), value.trim());
            s.set(&key, value).with_context(|| format!("line {}: {key}", n + 1))?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse_file(&text).with_context(|| format!("in {}", path.display()))
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>>
        where
            T::Err: std::error::Error + Send + Sync + 'static,
        {
            v.split(',').map(|x| Ok(x.trim().parse()?)).collect()
        }
        match key {
            "seed" => self.seed = Some(value.parse()?),
            "size" => self.size = Some(value.parse()?),
            "sizes" => self.sizes = Some(list(value)?),
            "samples" => self.samples = Some(value.parse()?),
            "threads" => self.threads = Some(value.parse()?),
            "out" => self.out = Some(value.into()),
            "center" => self.center = Some(Center::parse(value)?),
            "levels" => self.levels = Some(value.parse()?),
            "domain" => self.domain = Some(value.into()),
            "lambda" => self.lambda = Some(list(value)?),
            "side" => self.side = Some(value.parse()?),
            "gue-samples" => self.gue_samples = Some(value.parse()?),
            "svg" => self.svg = Some(value.parse()?),
            "input" => self.input = Some(value.into()),
            _ => bail!("unknown key"),
        }
        Ok(())
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            seed: over.seed.or(self.seed),
            size: over.size.or(self.size),
            sizes: over.sizes.or(self.sizes),
            samples: over.samples.or(self.samples),
            threads: over.threads.or(self.threads),
            out: over.out.or(self.out),
            center: over.center.or(self.center),
            levels: over.levels.or(self.levels),
            domain: over.domain.or(self.domain),
            lambda: over.lambda.or(self.lambda),
            side: over.side.or(self.side),
            gue_samples: over.gue_samples.or(self.gue_samples),
            svg: over.svg.or(self.svg),
            input: over.input.or(self.input),
        }
    }
}

/// A fully resolved run. Together with the seed it determines every output
/// byte; `threads` and `out` only affect where and how fast.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub size: u32,
    pub sizes: Vec<u32>,
    pub samples: usize,
    pub center: Center,
    pub levels: usize,
    pub domain: Option<PathBuf>,
    pub lambda: Option<Vec<i32>>,
    pub side: Option<u32>,
    pub gue_samples: usize,
    pub svg: bool,
    pub input: Option<PathBuf>,
    #[serde(skip)]
    pub threads: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Applies per-experiment defaults to `settings`. `env_threads` is the
    /// value of `LGL_THREADS`, if set.
    pub fn resolve(experiment: Experiment, settings: Settings, env_threads: Option<&str>) -> Result<Self> {
        let (size, samples) = match experiment {
            Experiment::Sample => (6, 1),
            Experiment::Enumerate => (2, 0),
            Experiment::Gue => (3, 10_000),
            Experiment::HexagonGue => (20, 5000),
            Experiment::TrapezoidGue => (0, 2000),
            Experiment::Concentration => (2, 2000),
            Experiment::Oracle | Experiment::Render => (6, 0),
        };
        let threads = match (settings.threads, env_threads) {
            (Some(t), _) => t,
            (None, Some(v)) => v.trim().parse().with_context(|| format!("{THREADS_ENV}={v:?}"))?,
            (None, None) => std::thread::available_parallelism().map_or(1, usize::from),
        };
        if threads == 0 {
            bail!("threads must be positive");
        }
        let cfg = ExperimentConfig {
            experiment,
            seed: settings.seed.unwrap_or(1),
            size: settings.size.unwrap_or(size),
            sizes: settings.sizes.unwrap_or_else(|| vec![8, 16, 24]),
            samples: settings.samples.unwrap_or(samples),
            center: settings.center.unwrap_or(Center::Both),
            levels: settings.levels.unwrap_or(3),
            domain: settings.domain,
            lambda: settings.lambda,
            side: settings.side,
            gue_samples: settings.gue_samples.unwrap_or(100_000),
            svg: settings.svg.unwrap_or(false),
            input: settings.input,
            threads,
            out: settings.out,
        };
        let statistical = matches!(
            experiment,
            Experiment::Gue | Experiment::HexagonGue | Experiment::TrapezoidGue | Experiment::Concentration
        );
        if statistical && cfg.samples < 2 {
            bail!("{experiment} needs at least 2 samples");
        }
        if matches!(experiment, Experiment::HexagonGue | Experiment::TrapezoidGue) && cfg.gue_samples < 2 {
            bail!("{experiment} needs at least 2 GUE samples");
        }
        if cfg.levels == 0 {
            bail!("levels must be positive");
        }
        Ok(cfg)
    }

    /// Resolves flags over an optional config file, reading `LGL_THREADS`.
    pub fn from_sources(experiment: Experiment, config_file: Option<&Path>, flags: Settings) -> Result<Self> {
        let base = match config_file {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        let env = std::env::var(THREADS_ENV).ok();
        Self::resolve(experiment, base.overlay(flags), env.as_deref())
    }

    /// The configuration as recorded in reports.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing_and_precedence() {
        let file = Settings::parse_file("# run\nseed = 5\nsamples=10 # inline\nsizes = 4, 6\ncenter = empirical\n").unwrap();
        assert_eq!(file.seed, Some(5));
        assert_eq!(file.sizes, Some(vec![4, 6]));
        let flags = Settings { seed: Some(9), ..Settings::default() };
        let cfg = ExperimentConfig::resolve(Experiment::Concentration, file.overlay(flags), Some("3")).unwrap();
        assert_eq!((cfg.seed, cfg.samples, cfg.threads, cfg.center), (9, 10, 3, Center::Empirical));
        assert!(Settings::parse_file("colour = red").is_err());
        assert!(Settings::parse_file("seed 4").is_err());
    }

    #[test]
    fn echo_omits_threads_and_output() {
        let a = ExperimentConfig::resolve(Experiment::Gue, Settings::default(), Some("1")).unwrap();
        let mut b = a.clone();
        b.threads = 8;
        b.out = Some("x".into());
        assert_eq!(a.echo(), b.echo());
        assert!(ExperimentConfig::resolve(Experiment::Gue, Settings { samples: Some(1), ..Default::default() }, None).is_err());
    }
}
