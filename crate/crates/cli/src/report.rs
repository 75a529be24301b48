//! Statistical reports: per-quantity summaries and pass/fail checks.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use lgl_core::stats::Summary;
use serde::{Deserialize, Serialize};

/// Where the values of a quantity come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// The experiment's own samples.
    Sample,
    /// GUE-corners reference samples.
    Reference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub source: Source,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    /// 1.96 standard errors.
    pub mean_radius: f64,
    pub variance_radius: f64,
    /// Kolmogorov-Smirnov distance to `ks_reference`.
    pub ks: Option<f64>,
    pub ks_reference: Option<String>,
}

impl Quantity {
    pub fn new(name: impl Into<String>, source: Source, xs: &[f64]) -> Self {
        let s = Summary::of(xs);
        Quantity {
            name: name.into(),
            source,
            count: s.count,
            mean: s.mean,
            variance: s.variance,
            mean_radius: s.mean_radius,
            variance_radius: s.variance_radius,
            ks: None,
            ks_reference: None,
        }
    }

    pub fn with_ks(mut self, ks: f64, reference: impl Into<String>) -> Self {
        self.ks = Some(ks);
        self.ks_reference = Some(reference.into());
        self
    }
}

/// `low <= value <= high`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub low: f64,
    pub high: f64,
    pub pass: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, low: f64, high: f64) -> Self {
        Check { name: name.into(), value, low, high, pass: low <= value && value <= high }
    }

    pub fn below(name: impl Into<String>, value: f64, high: f64) -> Self {
        Check { name: name.into(), value, low: f64::MIN, high, pass: value < high }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub samples: usize,
    pub reference_samples: usize,
    pub quantities: Vec<Quantity>,
    pub checks: Vec<Check>,
}

impl StatReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn quantity(&self, name: &str) -> Option<&Quantity> {
        self.quantities.iter().find(|q| q.name == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Sample counts agree with the header and KS distances lie in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        for q in &self.quantities {
            let want = match q.source {
                Source::Sample => self.samples,
                Source::Reference => self.reference_samples,
            };
            if q.count != want {
                bail!("{}: {} values, expected {want}", q.name, q.count);
            }
            if let Some(ks) = q.ks {
                if !(0.0..=1.0).contains(&ks) {
                    bail!("{}: KS distance {ks} outside [0, 1]", q.name);
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{}: {} samples, {} reference samples\n", self.experiment, self.samples, self.reference_samples);
        for q in &self.quantities {
            let _ = write!(
                s,
                "  {:<40} mean {:>9.5} ± {:.5}  var {:>9.5} ± {:.5}",
                q.name, q.mean, q.mean_radius, q.variance, q.variance_radius
            );
            if let (Some(ks), Some(r)) = (q.ks, &q.ks_reference) {
                let _ = write!(s, "  KS {ks:.4} vs {r}");
            }
            s.push('\n');
        }
        for c in &self.checks {
            let verdict = if c.pass { "ok  " } else { "FAIL" };
            if c.low == f64::MIN {
                let _ = writeln!(s, "  [{verdict}] {}: {:.5} < {}", c.name, c.value, c.high);
            } else {
                let _ = writeln!(s, "  [{verdict}] {}: {:.5} in [{}, {}]", c.name, c.value, c.low, c.high);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_and_round_trip() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let mut r = StatReport {
            experiment: "t".into(),
            config: serde_json::json!({}),
            samples: 4,
            reference_samples: 2,
            quantities: vec![Quantity::new("x", Source::Sample, &xs).with_ks(0.25, "N(0,1)")],
            checks: vec![Check::within("v", 0.5, 0.0, 1.0), Check::below("k", 0.2, 0.1)],
        };
        r.validate().unwrap();
        assert!(!r.passed());
        let back: StatReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        r.quantities.push(Quantity::new("y", Source::Reference, &xs));
        assert!(r.validate().is_err());
    }
}
