//! TOML experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{NoiseKind, NoiseSpec, SignalSpec};
use crate::pseudo_noise::Strategy;
use crate::spectral::DEFAULT_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Hist,
    R0VsR1,
    SeVsAse,
    OracleAttainment,
    Regret,
    ConvergenceRate,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::Hist => "hist",
            ExperimentKind::R0VsR1 => "r0_vs_r1",
            ExperimentKind::SeVsAse => "se_vs_ase",
            ExperimentKind::OracleAttainment => "oracle_attainment",
            ExperimentKind::Regret => "regret",
            ExperimentKind::ConvergenceRate => "convergence_rate",
        }
    }

    fn needs_k(self) -> bool {
        !matches!(self, ExperimentKind::Hist | ExperimentKind::R0VsR1)
    }

    fn needs_spikes(self) -> bool {
        matches!(
            self,
            ExperimentKind::SeVsAse | ExperimentKind::OracleAttainment | ExperimentKind::ConvergenceRate
        )
    }

    fn needs_x_grid(self) -> bool {
        matches!(self, ExperimentKind::R0VsR1 | ExperimentKind::Regret)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    kind: String,
    gamma: f64,
    rho: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRange {
    start: f64,
    stop: f64,
    points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawGrid {
    List(Vec<f64>),
    Range(RawRange),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignal {
    #[serde(default)]
    spikes: Vec<f64>,
    x_grid: Option<RawGrid>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    noise: RawNoise,
    #[serde(default)]
    signal: RawSignal,
    p_list: Vec<usize>,
    k: Option<usize>,
    strategies: Option<Vec<Strategy>>,
    replicates: Option<usize>,
    seed: Option<u64>,
    reference_p: Option<usize>,
    tol: Option<f64>,
    bins: Option<usize>,
    svg: Option<bool>,
    out: Option<PathBuf>,
}

/// Validated experiment settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub noise: NoiseSpec,
    pub spikes: Vec<f64>,
    /// Spike intensities swept by single-spike experiments.
    pub x_grid: Vec<f64>,
    pub p_list: Vec<usize>,
    pub k: usize,
    pub strategies: Vec<Strategy>,
    pub replicates: usize,
    pub seed: u64,
    /// Column count of the matrix behind the plugin reference quantities.
    pub reference_p: usize,
    pub tol: f64,
    pub bins: usize,
    pub svg: bool,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_REFERENCE_P: usize = 3000;
pub const DEFAULT_BINS: usize = 60;

fn field_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map_or_else(|| "config".to_string(), |s| format!("line {}", line_of(text, s.start)));
            Error::Config {
                field,
                message: e.message().trim().to_string(),
            }
        })?;
        Self::from_raw(raw)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let kind = NoiseKind::from_label(&raw.noise.kind, raw.noise.rho).map_err(|e| field_err("noise.kind", e.to_string()))?;
        let seed = raw.seed.unwrap_or(0);
        let noise = NoiseSpec::new(kind, raw.noise.gamma, seed).map_err(|e| field_err("noise.gamma", e.to_string()))?;

        if raw.p_list.is_empty() {
            return Err(field_err("p_list", "must contain at least one size"));
        }
        if raw.p_list.contains(&0) {
            return Err(field_err("p_list", "sizes must be positive"));
        }

        let experiment = raw.experiment;
        let k = match raw.k {
            Some(k) => k,
            None if experiment.needs_k() => return Err(field_err("k", format!("required for {experiment}"))),
            None => 0,
        };
        let strategies = match raw.strategies {
            Some(s) if s.is_empty() => return Err(field_err("strategies", "must not be empty")),
            Some(mut s) => {
                s.dedup();
                s
            }
            None => Strategy::ALL.to_vec(),
        };
        for &p in &raw.p_list {
            if experiment.needs_k() {
                for s in &strategies {
                    s.check_rank(k, p).map_err(|e| field_err("k", e.to_string()))?;
                }
            }
        }

        let replicates = raw.replicates.unwrap_or(1);
        if replicates == 0 {
            return Err(field_err("replicates", "must be at least 1"));
        }

        let spikes = raw.signal.spikes;
        SignalSpec::new(spikes.clone(), 0).map_err(|e| field_err("signal.spikes", e.to_string()))?;
        if experiment.needs_spikes() && spikes.is_empty() {
            return Err(field_err("signal.spikes", format!("required for {experiment}")));
        }
        let min_p = *raw.p_list.iter().min().expect("nonempty");
        if spikes.len() > min_p {
            return Err(field_err("signal.spikes", "rank exceeds the smallest p"));
        }

        let x_grid = match raw.signal.x_grid {
            None => vec![],
            Some(RawGrid::List(v)) => v,
            Some(RawGrid::Range(r)) => {
                if r.points < 2 || !(r.start < r.stop) {
                    return Err(field_err("signal.x_grid", "range needs start < stop and at least 2 points"));
                }
                (0..r.points)
                    .map(|i| r.start + (r.stop - r.start) * i as f64 / (r.points - 1) as f64)
                    .collect()
            }
        };
        if x_grid.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(field_err("signal.x_grid", "values must be positive and finite"));
        }
        if experiment.needs_x_grid() && x_grid.is_empty() {
            return Err(field_err("signal.x_grid", format!("required for {experiment}")));
        }

        let tol = raw.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(field_err("tol", "must lie in (0, 1)"));
        }
        let reference_p = raw.reference_p.unwrap_or(DEFAULT_REFERENCE_P);
        if reference_p < 2 {
            return Err(field_err("reference_p", "must be at least 2"));
        }
        let bins = raw.bins.unwrap_or(DEFAULT_BINS);
        if bins == 0 {
            return Err(field_err("bins", "must be at least 1"));
        }

        Ok(Self {
            experiment,
            noise,
            spikes,
            x_grid,
            p_list: raw.p_list,
            k,
            strategies,
            replicates,
            seed,
            reference_p,
            tol,
            bins,
            svg: raw.svg.unwrap_or(false),
            out: raw.out,
        })
    }

    /// `<experiment>_<noise>_<gamma>`, the stem shared by every output file.
    pub fn stem(&self) -> String {
        format!("{}_{}_{}", self.experiment.label(), self.noise.kind.label(), self.noise.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
experiment = "oracle_attainment"
p_list = [100, 200]
k = 20
replicates = 3
seed = 9

[noise]
kind = "mp"
gamma = 0.5

[signal]
spikes = [5.2, 2.5, 1.3, 1.0, 0.5]
"#;

    fn field(text: &str) -> String {
        match ExperimentConfig::from_toml_str(text) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_and_defaults() {
        let c = ExperimentConfig::from_toml_str(BASE).unwrap();
        assert_eq!(c.experiment, ExperimentKind::OracleAttainment);
        assert_eq!(c.strategies, Strategy::ALL.to_vec());
        assert_eq!(c.reference_p, DEFAULT_REFERENCE_P);
        assert_eq!(c.noise.seed, 9);
        assert_eq!(c.stem(), "oracle_attainment_mp_0.5");
    }

    #[test]
    fn ranges_expand() {
        let text = r#"
experiment = "regret"
p_list = [100]
k = 4
[noise]
kind = "ar1"
gamma = 1.0
rho = 0.2
[signal]
x_grid = { start = 1.0, stop = 3.0, points = 5 }
"#;
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(c.x_grid, vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(c.stem(), "regret_ar1_1");
    }

    #[test]
    fn errors_name_the_field_or_line() {
        assert_eq!(field(&BASE.replace("k = 20", "k = 60")), "k");
        assert_eq!(field(&BASE.replace("replicates = 3", "replicates = 0")), "replicates");
        assert_eq!(field(&BASE.replace("p_list = [100, 200]", "p_list = []")), "p_list");
        assert_eq!(field(&BASE.replace("\"mp\"", "\"cauchy\"")), "noise.kind");
        assert_eq!(field(&BASE.replace("gamma = 0.5", "gamma = 2.0")), "noise.gamma");
        assert_eq!(field(&BASE.replace("0.5]", "0.5, 0.7]")), "signal.spikes");
        assert_eq!(field(&BASE.replace("k = 20\n", "")), "k");
        assert_eq!(field(&BASE.replace("seed = 9", "seed = 9\ncolour = 1")), "line 7");
        assert_eq!(field(&BASE.replace("k = 20", "k = \"many\"")), "line 4");
    }
}
