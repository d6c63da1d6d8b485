use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use screenot::experiments::{run_experiment, ExperimentConfig};
use screenot::io::{read_matrix_csv, read_spectrum, write_matrix_csv};
use screenot::matrix::{hard_threshold_reconstruct, svd};
use screenot::{screenot_values, DenoiseReport, Error, ScreenotParams, Strategy, ThresholdResult};
use serde_json::json;

#[derive(Parser)]
#[command(name = "screenot", version, about = "Adaptive optimal hard thresholding of singular values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the threshold for a spectrum file (one singular value per line).
    Threshold {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        /// Upper bound on the signal rank.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "impute")]
        strategy: Strategy,
        #[arg(long, default_value_t = screenot::spectral::DEFAULT_TOL)]
        tol: f64,
        /// Also write the result as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Denoise a headerless CSV matrix by hard thresholding its singular values.
    Denoise {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "impute")]
        strategy: Strategy,
        #[arg(long, default_value_t = screenot::spectral::DEFAULT_TOL)]
        tol: f64,
        /// Output CSV; defaults to `<matrix>.denoised.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Clean matrix, if known; adds oracle losses to the report.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Run a simulation experiment described by a TOML config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `out` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG chart.
        #[arg(long)]
        svg: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        "io" => 3,
        "parse" => 4,
        "domain" | "degenerate_cdf" | "rank_bound" | "below_transition" | "invalid_input" | "shape_mismatch" => 5,
        "config" => 6,
        "solver" => 7,
        _ => 1,
    }
}

fn result_json(r: &ThresholdResult) -> serde_json::Value {
    json!({
        "theta_hat": r.theta_hat,
        "retained_rank": r.retained_rank,
        "strategy": r.strategy,
        "k": r.k,
        "gamma_used": r.gamma_used,
        "solver_iterations": r.solver_iterations,
        "psi_at_theta": r.psi_at_theta,
    })
}

fn write_json(path: &Path, value: &serde_json::Value) -> screenot::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(cli: Cli) -> screenot::Result<()> {
    match cli.command {
        Command::Threshold {
            spectrum,
            n,
            p,
            k,
            strategy,
            tol,
            out,
        } => {
            let values = read_spectrum(&spectrum)?;
            let params = ScreenotParams::new(k).with_strategy(strategy).with_tol(tol);
            let r = screenot_values(&values, n, p, &params)?;
            println!("theta_hat {}", r.theta_hat);
            println!("retained_rank {}", r.retained_rank);
            if let Some(path) = out {
                write_json(&path, &result_json(&r))?;
            }
        }
        Command::Denoise {
            matrix,
            k,
            strategy,
            tol,
            out,
            truth,
        } => {
            let y = read_matrix_csv(&matrix)?;
            let dec = svd(&y)?;
            let params = ScreenotParams::new(k).with_strategy(strategy).with_tol(tol);
            let r = screenot_values(&dec.s, y.rows(), y.cols(), &params)?;
            let xhat = hard_threshold_reconstruct(&dec, r.theta_hat);
            let out = out.unwrap_or_else(|| sidecar(&matrix, ".denoised.csv"));
            write_matrix_csv(&out, &xhat)?;
            let mut report = result_json(&r);
            if let Some(truth) = truth {
                let x = read_matrix_csv(&truth)?;
                let d = DenoiseReport::exact(&x, &dec, r.theta_hat)?;
                report["denoise"] = json!({
                    "se_at_theta": d.se_at_theta,
                    "oracle_se": d.oracle_se,
                    "oracle_rank": d.oracle_rank,
                    "oracle_interval": [d.oracle_interval.0, if d.oracle_interval.1.is_finite() { json!(d.oracle_interval.1) } else { json!("inf") }],
                    "attained_oracle": d.attained_oracle,
                });
            }
            let report_path = sidecar(&out, ".report.json");
            write_json(&report_path, &report)?;
            println!("theta_hat {}", r.theta_hat);
            println!("retained_rank {}", r.retained_rank);
            println!("wrote {}", out.display());
            println!("wrote {}", report_path.display());
        }
        Command::Simulate { config, out, svg } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            cfg.svg |= svg;
            let dir = out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("results"));
            for path in run_experiment(&cfg, &dir)? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.category(), "message": e.to_string() }));
            ExitCode::from(exit_code(&e))
        }
    }
}
