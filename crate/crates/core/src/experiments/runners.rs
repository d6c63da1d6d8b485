//! One runner per experiment kind. Each returns its main table, summary rows and a chart.

use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind};
use super::svg::{Chart, Series, SeriesStyle};
use super::table::{Cell, SummaryRow, Table};
use crate::asymptotics::SpikeLimit;
use crate::error::Result;
use crate::matrix::{gram_singular_values, svd, DenseMatrix, LossProfile};
use crate::noise::{derive_seed, gen_low_rank, gen_noise, rows_for, NoiseKind, NoiseSpec, SignalSpec};
use crate::pipeline::{screenot, ScreenotParams};
use crate::pseudo_noise::SingularSpectrum;
use crate::spectral::{bbp_location, solve_optimal_threshold, spike_inverse, AtomicCdf, ShapeRatio};

const REFERENCE_STREAM: u64 = u64::MAX;
/// Method label for the plugin reference threshold.
pub const REFERENCE_METHOD: &str = "reference";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub table: Table,
    pub summary: Vec<SummaryRow>,
    #[serde(skip)]
    pub chart: Chart,
}

impl ExperimentOutput {
    pub fn summary_value(&self, quantity: &str, method: &str) -> Option<f64> {
        self.summary
            .iter()
            .find(|r| r.quantity == quantity && r.method == method)
            .map(|r| r.value)
    }
}

fn summary(quantity: impl Into<String>, method: &str, value: f64) -> SummaryRow {
    SummaryRow {
        quantity: quantity.into(),
        method: method.to_string(),
        value,
    }
}

/// Plugin limiting quantities from one large sampled noise matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reference {
    pub n: usize,
    pub p: usize,
    pub gamma: ShapeRatio,
    pub cdf: AtomicCdf,
    pub bulk_edge: f64,
    pub t_gamma: f64,
    /// Heuristic phase-transition location.
    pub transition: f64,
    pub x_star: f64,
}

impl Reference {
    pub fn from_spectrum(spectrum: &SingularSpectrum, tol: f64) -> Result<Self> {
        let gamma = ShapeRatio::new(spectrum.gamma())?;
        let cdf = spectrum.to_cdf();
        let t_gamma = solve_optimal_threshold(&cdf, gamma, tol)?.root;
        Ok(Self {
            n: spectrum.n(),
            p: spectrum.p(),
            gamma,
            bulk_edge: cdf.bulk_edge(),
            transition: bbp_location(&cdf, gamma)?,
            x_star: spike_inverse(t_gamma, &cdf, gamma)?,
            t_gamma,
            cdf,
        })
    }

    /// Samples an `ceil(p / gamma) x p` noise matrix with the given seed.
    pub fn sample(kind: NoiseKind, gamma: f64, p: usize, seed: u64, tol: f64) -> Result<Self> {
        let n = rows_for(p, gamma);
        let z = gen_noise(&NoiseSpec::new(kind, gamma, seed)?, n, p)?;
        Self::from_spectrum(&SingularSpectrum::new(gram_singular_values(&z)?, n, p)?, tol)
    }

    fn for_config(cfg: &ExperimentConfig) -> Result<Self> {
        Self::sample(
            cfg.noise.kind,
            cfg.noise.gamma,
            cfg.reference_p,
            derive_seed(cfg.seed, REFERENCE_STREAM),
            cfg.tol,
        )
    }

    fn summary(&self) -> Vec<SummaryRow> {
        vec![
            summary("bulk_edge", "", self.bulk_edge),
            summary("transition", "", self.transition),
            summary("t_gamma", "", self.t_gamma),
            summary("x_star", "", self.x_star),
            summary("reference_p", "", self.p as f64),
        ]
    }
}

/// `(noise seed, signal seed)` for replicate `t` at size `p`.
fn instance_seeds(seed: u64, p: usize, t: usize) -> (u64, u64) {
    let base = derive_seed(seed, p as u64);
    (derive_seed(base, 2 * t as u64), derive_seed(base, 2 * t as u64 + 1))
}

struct Instance {
    x: DenseMatrix,
    y: DenseMatrix,
    n: usize,
    p: usize,
}

fn draw_instance(cfg: &ExperimentConfig, spikes: &[f64], p: usize, t: usize) -> Result<Instance> {
    let n = rows_for(p, cfg.noise.gamma);
    let (noise_seed, signal_seed) = instance_seeds(cfg.seed, p, t);
    let z = gen_noise(&NoiseSpec { seed: noise_seed, ..cfg.noise }, n, p)?;
    let x = gen_low_rank(&SignalSpec::new(spikes.to_vec(), signal_seed)?, n, p)?.matrix;
    let y = x.add(&z)?;
    Ok(Instance { x, y, n, p })
}

/// `(method, theta)` for the reference and every configured strategy.
fn thresholds(cfg: &ExperimentConfig, spectrum: &SingularSpectrum, reference: &Reference) -> Result<Vec<(String, f64)>> {
    let mut out = vec![(REFERENCE_METHOD.to_string(), reference.t_gamma)];
    for &s in &cfg.strategies {
        let params = ScreenotParams::new(cfg.k).with_strategy(s).with_tol(cfg.tol);
        out.push((s.label().to_string(), screenot(spectrum, &params)?.theta_hat));
    }
    Ok(out)
}

fn methods(cfg: &ExperimentConfig) -> Vec<String> {
    std::iter::once(REFERENCE_METHOD.to_string())
        .chain(cfg.strategies.iter().map(|s| s.label().to_string()))
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Median; averages the two central values for even lengths.
pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Least-squares slope of `log y` against `log x`; nonpositive values are skipped.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.experiment {
        ExperimentKind::Hist => hist(cfg),
        ExperimentKind::R0VsR1 => r0_vs_r1(cfg),
        ExperimentKind::SeVsAse => se_vs_ase(cfg),
        ExperimentKind::OracleAttainment => oracle_attainment(cfg),
        ExperimentKind::Regret => regret(cfg),
        ExperimentKind::ConvergenceRate => convergence_rate(cfg),
    }
}

fn title(cfg: &ExperimentConfig) -> String {
    format!("{} / {} / gamma = {}", cfg.experiment, cfg.noise.kind, cfg.noise.gamma)
}

fn hist(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let p = cfg.p_list[0];
    let n = rows_for(p, cfg.noise.gamma);
    let (noise_seed, _) = instance_seeds(cfg.seed, p, 0);
    let z = gen_noise(&NoiseSpec { seed: noise_seed, ..cfg.noise }, n, p)?;
    let spectrum = SingularSpectrum::new(gram_singular_values(&z)?, n, p)?;
    let reference = Reference::from_spectrum(&spectrum, cfg.tol)?;

    let values = spectrum.values();
    let lo = values[values.len() - 1];
    let hi = values[0];
    let width = if hi > lo { (hi - lo) / cfg.bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; cfg.bins];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(cfg.bins - 1);
        counts[b] += 1;
    }
    let mut table = Table::new(&["bin_left", "bin_right", "count", "density"]);
    let mut points = Vec::with_capacity(cfg.bins + 1);
    for (b, &c) in counts.iter().enumerate() {
        let left = lo + width * b as f64;
        let density = c as f64 / (p as f64 * width);
        table.push(vec![left.into(), (left + width).into(), c.into(), density.into()]);
        points.push((left, density));
    }
    points.push((lo + width * cfg.bins as f64, *points.last().map(|(_, d)| d).unwrap_or(&0.0)));

    let mut summary_rows = reference.summary();
    summary_rows.push(summary("p", "", p as f64));
    Ok(ExperimentOutput {
        table,
        summary: summary_rows,
        chart: Chart {
            title: title(cfg),
            x_label: "singular value".into(),
            y_label: "density".into(),
            series: vec![Series::new("histogram", points, SeriesStyle::Step)],
            markers: vec![("edge".into(), reference.bulk_edge), ("T".into(), reference.t_gamma)],
            ..Chart::default()
        },
    })
}

fn r0_vs_r1(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let reference = Reference::for_config(cfg)?;
    let p = cfg.p_list[0];
    let n = rows_for(p, cfg.noise.gamma);
    let (noise_seed, signal_seed) = instance_seeds(cfg.seed, p, 0);
    let z = gen_noise(&NoiseSpec { seed: noise_seed, ..cfg.noise }, n, p)?;
    let unit = gen_low_rank(&SignalSpec::new(vec![1.0], signal_seed)?, n, p)?.matrix;

    let mut grid = cfg.x_grid.clone();
    grid.sort_by(f64::total_cmp);
    let mut table = Table::new(&["x", "r0", "r1_empirical", "r1_asymptotic"]);
    let mut series = [vec![], vec![], vec![]];
    let mut diffs = Vec::with_capacity(grid.len());
    for &x in &grid {
        let signal = unit.scaled(x);
        let y = signal.add(&z)?;
        let r1_emp = LossProfile::new(&signal, &svd(&y)?)?.levels[1];
        let r1_asym = SpikeLimit::new(x, &reference.cdf, reference.gamma)?.r1;
        table.push(vec![x.into(), (x * x).into(), r1_emp.into(), Cell::opt(r1_asym)]);
        series[0].push((x, x * x));
        series[1].push((x, r1_emp));
        if let Some(r) = r1_asym {
            series[2].push((x, r));
        }
        diffs.push((x, r1_emp - x * x));
    }

    let mut summary_rows = reference.summary();
    // last sign change of R1_hat - R0 from nonnegative to negative
    if let Some(w) = diffs.windows(2).rev().find(|w| w[0].1 >= 0.0 && w[1].1 < 0.0) {
        let ((x0, d0), (x1, d1)) = (w[0], w[1]);
        summary_rows.push(summary("empirical_crossing", "", x0 + (x1 - x0) * d0 / (d0 - d1)));
    }
    let [r0, r1e, r1a] = series;
    Ok(ExperimentOutput {
        table,
        summary: summary_rows,
        chart: Chart {
            title: title(cfg),
            x_label: "x".into(),
            y_label: "loss".into(),
            series: vec![
                Series::new("R0", r0, SeriesStyle::Line),
                Series::new("R1 empirical", r1e, SeriesStyle::Markers),
                Series::new("R1 limit", r1a, SeriesStyle::Line),
            ],
            markers: vec![("x*".into(), reference.x_star)],
            ..Chart::default()
        },
    })
}

/// Thresholds hitting every level of the piecewise-constant loss: one point
/// below the smallest value, the midpoints, and one point above the largest.
pub fn level_grid(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    let mut grid = Vec::with_capacity(m + 1);
    grid.push(0.5 * values[m - 1]);
    for i in (1..m).rev() {
        grid.push(0.5 * (values[i] + values[i - 1]));
    }
    grid.push(1.1 * values[0]);
    grid
}

fn se_vs_ase(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let reference = Reference::for_config(cfg)?;
    let p = cfg.p_list[0];
    let inst = draw_instance(cfg, &cfg.spikes, p, 0)?;
    let dec = svd(&inst.y)?;
    let profile = LossProfile::new(&inst.x, &dec)?;
    let spectrum = SingularSpectrum::new(dec.s.clone(), inst.n, inst.p)?;
    let limits: Vec<SpikeLimit> = cfg
        .spikes
        .iter()
        .map(|&x| SpikeLimit::new(x, &reference.cdf, reference.gamma))
        .collect::<Result<_>>()?;
    let norm_sq: f64 = cfg.spikes.iter().map(|x| x * x).sum();

    let mut table = Table::new(&["theta", "se", "ase"]);
    let mut se_pts = vec![];
    let mut ase_pts = vec![];
    let mut max_gap: f64 = 0.0;
    for theta in level_grid(&dec.s) {
        let se = profile.se_at(theta);
        let ase = (theta > reference.bulk_edge).then(|| limits.iter().map(|l| l.loss_at(theta)).sum::<f64>());
        table.push(vec![theta.into(), se.into(), Cell::opt(ase)]);
        if let Some(a) = ase {
            if theta > reference.bulk_edge + 0.05 {
                max_gap = max_gap.max((se - a).abs());
            }
            ase_pts.push((theta, a));
        }
        if theta > 0.9 * reference.bulk_edge {
            se_pts.push((theta, se));
        }
    }

    let mut summary_rows = reference.summary();
    let mut markers = vec![("edge".into(), reference.bulk_edge), ("T".into(), reference.t_gamma)];
    for (method, theta) in thresholds(cfg, &spectrum, &reference)?.into_iter().skip(1) {
        summary_rows.push(summary("theta_hat", &method, theta));
        markers.push((method, theta));
    }
    summary_rows.push(summary("signal_norm_sq", "", norm_sq));
    summary_rows.push(summary("max_abs_gap", "", max_gap));
    summary_rows.push(summary("max_rel_gap", "", max_gap / norm_sq));
    Ok(ExperimentOutput {
        table,
        summary: summary_rows,
        chart: Chart {
            title: title(cfg),
            x_label: "theta".into(),
            y_label: "squared error".into(),
            series: vec![
                Series::new("SE", se_pts, SeriesStyle::Step),
                Series::new("ASE", ase_pts, SeriesStyle::Step),
            ],
            markers,
            ..Chart::default()
        },
    })
}

fn oracle_attainment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let reference = Reference::for_config(cfg)?;
    let methods = methods(cfg);
    let mut table = Table::new(&["row_type", "p", "replicate", "method", "theta", "se", "oracle_se", "attained"]);
    let mut aggregates = Vec::new();
    let mut summary_rows = reference.summary();
    for &p in &cfg.p_list {
        let mut hits = vec![0usize; methods.len()];
        let mut se_sum = vec![Vec::new(); methods.len()];
        let mut oracle_sum = Vec::new();
        for t in 0..cfg.replicates {
            let inst = draw_instance(cfg, &cfg.spikes, p, t)?;
            let dec = svd(&inst.y)?;
            let profile = LossProfile::new(&inst.x, &dec)?;
            let spectrum = SingularSpectrum::new(dec.s.clone(), inst.n, inst.p)?;
            oracle_sum.push(profile.oracle().oracle_se);
            for (m, (method, theta)) in thresholds(cfg, &spectrum, &reference)?.into_iter().enumerate() {
                let r = profile.report(theta);
                hits[m] += r.attained_oracle as usize;
                se_sum[m].push(r.se_at_theta);
                table.push(vec![
                    "replicate".into(),
                    p.into(),
                    t.into(),
                    Cell::text(method),
                    theta.into(),
                    r.se_at_theta.into(),
                    r.oracle_se.into(),
                    (r.attained_oracle as usize).into(),
                ]);
            }
        }
        for (m, method) in methods.iter().enumerate() {
            let fraction = hits[m] as f64 / cfg.replicates as f64;
            aggregates.push(vec![
                "aggregate".into(),
                p.into(),
                Cell::Empty,
                Cell::text(method),
                Cell::Empty,
                mean(&se_sum[m]).into(),
                mean(&oracle_sum).into(),
                fraction.into(),
            ]);
            summary_rows.push(summary(format!("attainment_fraction_p{p}"), method, fraction));
        }
    }
    let series = methods
        .iter()
        .map(|method| {
            let pts = aggregates
                .iter()
                .filter(|r| matches!(&r[3], Cell::Text(t) if t == method))
                .map(|r| (r[1].as_f64().unwrap(), r[7].as_f64().unwrap()))
                .collect();
            Series::new(method.clone(), pts, SeriesStyle::Line)
        })
        .collect();
    aggregates.into_iter().for_each(|r| table.push(r));
    Ok(ExperimentOutput {
        table,
        summary: summary_rows,
        chart: Chart {
            title: title(cfg),
            x_label: "p".into(),
            y_label: "fraction attaining oracle loss".into(),
            log_x: true,
            series,
            ..Chart::default()
        },
    })
}

fn regret(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let reference = Reference::for_config(cfg)?;
    let methods = methods(cfg);
    let p = cfg.p_list[0];
    let mut grid = cfg.x_grid.clone();
    grid.sort_by(f64::total_cmp);
    let mut table = Table::new(&["row_type", "x", "replicate", "method", "theta", "se", "oracle_se", "ratio"]);
    let mut series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); methods.len()];
    let mut summary_rows = reference.summary();
    let mut aggregates = Vec::new();
    for &x in &grid {
        let mut ratios = vec![Vec::new(); methods.len()];
        for t in 0..cfg.replicates {
            let inst = draw_instance(cfg, &[x], p, t)?;
            let dec = svd(&inst.y)?;
            let profile = LossProfile::new(&inst.x, &dec)?;
            let spectrum = SingularSpectrum::new(dec.s.clone(), inst.n, inst.p)?;
            for (m, (method, theta)) in thresholds(cfg, &spectrum, &reference)?.into_iter().enumerate() {
                let r = profile.report(theta);
                let ratio = r.se_at_theta / r.oracle_se;
                ratios[m].push(ratio);
                table.push(vec![
                    "replicate".into(),
                    x.into(),
                    t.into(),
                    Cell::text(method),
                    theta.into(),
                    r.se_at_theta.into(),
                    r.oracle_se.into(),
                    ratio.into(),
                ]);
            }
        }
        for (m, method) in methods.iter().enumerate() {
            let avg = mean(&ratios[m]);
            aggregates.push(vec![
                "aggregate".into(),
                x.into(),
                Cell::Empty,
                Cell::text(method),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                avg.into(),
            ]);
            series[m].push((x, avg));
            summary_rows.push(summary(format!("mean_ratio_x{x}"), method, avg));
        }
    }
    aggregates.into_iter().for_each(|r| table.push(r));
    Ok(ExperimentOutput {
        table,
        summary: summary_rows,
        chart: Chart {
            title: title(cfg),
            x_label: "x".into(),
            y_label: "SE / oracle SE".into(),
            series: methods
                .iter()
                .zip(series)
                .map(|(m, pts)| Series::new(m.clone(), pts, SeriesStyle::Line))
                .collect(),
            markers: vec![("x*".into(), reference.x_star)],
            ..Chart::default()
        },
    })
}

fn convergence_rate(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let reference = Reference::for_config(cfg)?;
    let target = reference.t_gamma;
    let strategies: Vec<String> = cfg.strategies.iter().map(|s| s.label().to_string()).collect();
    let mut table = Table::new(&["row_type", "p", "replicate", "method", "theta", "t_gamma", "rel_error"]);
    let mut medians: Vec<Vec<(f64, f64)>> = vec![Vec::new(); strategies.len()];
    let mut summary_rows = reference.summary();
    let mut aggregates = Vec::new();
    for &p in &cfg.p_list {
        let mut errors = vec![Vec::new(); strategies.len()];
        for t in 0..cfg.replicates {
            let inst = draw_instance(cfg, &cfg.spikes, p, t)?;
            let spectrum = SingularSpectrum::new(gram_singular_values(&inst.y)?, inst.n, inst.p)?;
            for (m, (method, theta)) in thresholds(cfg, &spectrum, &reference)?.into_iter().skip(1).enumerate() {
                let rel = (theta - target).abs() / target;
                errors[m].push(rel);
                table.push(vec![
                    "replicate".into(),
                    p.into(),
                    t.into(),
                    Cell::text(method),
                    theta.into(),
                    target.into(),
                    rel.into(),
                ]);
            }
        }
        for (m, method) in strategies.iter().enumerate() {
            let med = median(&errors[m]);
            let avg = mean(&errors[m]);
            for (kind, v) in [("median", med), ("mean", avg)] {
                aggregates.push(vec![
                    Cell::text(kind),
                    p.into(),
                    Cell::Empty,
                    Cell::text(method),
                    Cell::Empty,
                    target.into(),
                    v.into(),
                ]);
            }
            medians[m].push((p as f64, med));
            summary_rows.push(summary(format!("median_rel_error_p{p}"), method, med));
            summary_rows.push(summary(format!("mean_rel_error_p{p}"), method, avg));
        }
    }
    for (m, method) in strategies.iter().enumerate() {
        if medians[m].len() >= 2 {
            summary_rows.push(summary("log_log_slope", method, log_log_slope(&medians[m])));
        }
    }
    aggregates.into_iter().for_each(|r| table.push(r));
    Ok(ExperimentOutput {
        table,
        summary: summary_rows,
        chart: Chart {
            title: title(cfg),
            x_label: "p".into(),
            y_label: "median relative error".into(),
            log_x: true,
            log_y: true,
            series: strategies
                .iter()
                .zip(medians)
                .map(|(m, pts)| Series::new(m.clone(), pts, SeriesStyle::Line))
                .collect(),
            ..Chart::default()
        },
    })
}
