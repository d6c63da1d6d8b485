//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --release -p screenot --test acceptance -- --nocapture`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use screenot::experiments::{execute, ExperimentConfig, Reference};
use screenot::matrix::{
    hard_threshold_reconstruct, oracle, orthonormality_error, partial_reconstruct, se_loss, singular_values, svd,
    svd_with, DenseMatrix, SvdBackend,
};
use screenot::noise::{gen_noise, gen_signal, NoiseKind, NoiseSpec, SignalSpec};
use screenot::pipeline::retained_rank;
use screenot::pseudo_noise::{ks_distance, SingularSpectrum, Strategy};
use screenot::spectral::{self, AtomicCdf, ShapeRatio};
use screenot::{screenot, screenot_values, ScreenotParams};

/// Seed of the single large noise matrix behind every plugin reference value.
const REFERENCE_SEED: u64 = 0;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let z = gen_noise(&NoiseSpec::new(NoiseKind::MarcenkoPastur, 1.0, 1).unwrap(), 2000, 2000).unwrap();
    let s = singular_values(&z).unwrap();
    let theta = screenot_values(&s, 2000, 2000, &ScreenotParams::new(20)).unwrap().theta_hat;
    let secs = start.elapsed().as_secs_f64();
    let target = 4.0 / 3f64.sqrt();
    let rel = (theta - target).abs() / target;
    check(
        rel <= 0.02 && secs < 10.0,
        format!("theta_hat = {theta:.5}, target {target:.5}, rel err {rel:.4} (<= 0.02), {secs:.1} s (< 10 s)"),
    )
}

fn criterion_2() -> Outcome {
    use screenot::noise::ColumnLaw::*;
    // (kind, gamma, T, T tol, edge)
    let table = [
        (NoiseKind::MarcenkoPastur, 0.5, 1.98, 0.05, 1.7),
        (NoiseKind::MarcenkoPastur, 1.0, 2.31, 0.05, 2.0),
        (NoiseKind::CorrelatedColumns { law: Chi10 }, 0.5, 2.17, 0.05, 2.11),
        (NoiseKind::CorrelatedColumns { law: Chi10 }, 1.0, 2.46, 0.05, 2.26),
        (NoiseKind::Fisher3n, 0.5, 2.23, 0.05, 1.99),
        (NoiseKind::Fisher3n, 1.0, 2.57, 0.05, 2.28),
        (NoiseKind::CorrelatedColumns { law: Mix2 }, 0.5, 5.34, 0.1, 4.76),
        (NoiseKind::CorrelatedColumns { law: Mix2 }, 1.0, 6.08, 0.1, 5.44),
        (NoiseKind::CorrelatedColumns { law: Uniform1To10 }, 0.5, 4.96, 0.1, 4.4),
        (NoiseKind::CorrelatedColumns { law: Uniform1To10 }, 1.0, 5.70, 0.1, 5.04),
        (NoiseKind::PaddedIdentity, 0.5, 1.62, 0.05, 1.0),
        (NoiseKind::PaddedIdentity, 1.0, 1.73, 0.05, 1.0),
    ];
    let start = Instant::now();
    let mut lines = vec![];
    let mut all_ok = true;
    for (kind, gamma, t_ref, t_tol, edge_ref) in table {
        let r = Reference::sample(kind, gamma, 3000, REFERENCE_SEED, 1e-9).unwrap();
        let t_ok = (r.t_gamma - t_ref).abs() <= t_tol;
        let e_ok = (r.bulk_edge - edge_ref).abs() <= 0.02 * edge_ref;
        all_ok &= t_ok && e_ok;
        lines.push(format!(
            "    {} {:<16} gamma={gamma}: T = {:.3} (table {t_ref} +-{t_tol}) {} | edge = {:.3} (table {edge_ref} +-2%) {} | x+ = {:.2}, x* = {:.2}",
            if t_ok && e_ok { "ok  " } else { "MISS" },
            kind.label(),
            r.t_gamma,
            if t_ok { "ok" } else { "out" },
            r.bulk_edge,
            if e_ok { "ok" } else { "out" },
            r.transition,
            r.x_star,
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    all_ok &= secs < 300.0;
    check(all_ok, format!("{secs:.0} s total (< 300 s)\n{}", lines.join("\n")))
}

fn criterion_3() -> Outcome {
    let r = screenot_values(&[1.0; 400], 400, 400, &ScreenotParams::new(0)).unwrap();
    let err = (r.theta_hat - 3f64.sqrt()).abs();
    check(err <= 1e-6 && r.retained_rank == 0, format!("|theta_hat - sqrt 3| = {err:.2e}"))
}

fn all_kinds() -> Vec<NoiseKind> {
    NoiseKind::TABLE.into_iter().chain([NoiseKind::Ar1 { rho: 0.2 }]).collect()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let kinds = all_kinds();
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut count = 0;
    let mut violations = Vec::new();
    let mut worst_shifted: f64 = f64::NEG_INFINITY;
    let mut shifted_kinds = std::collections::BTreeSet::new();
    for i in 0..210 {
        let kind = kinds[i % kinds.len()];
        let gamma = if rng.random::<bool>() { 0.5 } else { 1.0 };
        let p = if i % 3 == 0 { 500 } else { 100 };
        let n = (p as f64 / gamma) as usize;
        let k = rng.random_range(1..=20usize);
        let r = rng.random_range(0..=k.min(5));
        let mut spikes: Vec<f64> = (0..r).map(|j| 8.0 - j as f64 * rng.random_range(0.5..1.5)).collect();
        spikes.sort_by(|a, b| b.total_cmp(a));
        let z = gen_noise(&NoiseSpec::new(kind, gamma, i as u64).unwrap(), n, p).unwrap();
        let x = gen_signal(&SignalSpec::new(spikes, 1000 + i as u64).unwrap(), n, p).unwrap();
        let fz = SingularSpectrum::new(singular_values(&z).unwrap(), n, p).unwrap().to_cdf();
        let y = SingularSpectrum::new(singular_values(&x.add(&z).unwrap()).unwrap(), n, p).unwrap();
        for s in Strategy::ALL {
            let f = s.pseudo_noise(&y, k).unwrap();
            let d = ks_distance(&f, &fz);
            let bound = k as f64 / p as f64;
            if d > (k + r) as f64 / p as f64 {
                shifted_kinds.insert(kind.label());
            }
            if d > bound {
                violations.push(format!("#{i} {kind} p={p} k={k} r={r} {s}: {d:.4} > {bound:.4}"));
            }
            worst = worst.max(d - bound);
            worst_shifted = worst_shifted.max(d - (k + r) as f64 / p as f64);
            count += 1;
        }
    }
    let detail = format!(
        "{count} (instance, strategy) pairs, {} above k/p, max KS - k/p = {worst:.4}, max KS - (k+r)/p = {worst_shifted:.4} (kinds above (k+r)/p: {shifted_kinds:?})",
        violations.len()
    );
    if violations.is_empty() {
        Ok(detail)
    } else {
        let shown: Vec<&str> = violations.iter().take(4).map(String::as_str).collect();
        Err(format!("{detail}\n    {}", shown.join("\n    ")))
    }
}

fn random_cdf(rng: &mut ChaCha8Rng) -> AtomicCdf {
    let m = rng.random_range(1..=60usize);
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    let mut atoms: Vec<f64> = (0..m).map(|_| scale * rng.random_range(0.0..1.0)).collect();
    atoms[0] = atoms[0].max(0.1 * scale);
    AtomicCdf::new(atoms).unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst_fd: f64 = 0.0;
    for i in 0..1000 {
        let h = random_cdf(&mut rng);
        let g = ShapeRatio::new(rng.random_range(0.02..=1.0)).unwrap();
        let edge = h.bulk_edge();
        let y1 = edge * (1.0 + 10f64.powf(rng.random_range(-4.0..1.0)));
        let y2 = y1 * (1.0 + 10f64.powf(rng.random_range(-4.0..1.0)));
        let (p1, p2) = (spectral::psi(y1, &h, g).unwrap(), spectral::psi(y2, &h, g).unwrap());
        if !(p1 < p2) {
            return Err(format!("triple {i}: psi({y1}) = {p1} !< psi({y2}) = {p2}"));
        }
        let tail = spectral::psi(1e6 * edge, &h, g).unwrap();
        if !(tail > -2.0 - 1e-4 && tail < -2.0) {
            return Err(format!("triple {i}: tail value {tail}"));
        }
        let y = edge * (1.0 + rng.random_range(0.05..3.0));
        let step = 1e-5 * y;
        let phi_fd = (spectral::phi(y + step, &h).unwrap() - spectral::phi(y - step, &h).unwrap()) / (2.0 * step);
        let phi_x = spectral::phi_prime(y, &h).unwrap();
        let d_fd = (spectral::d_transform(y + step, &h, g).unwrap() - spectral::d_transform(y - step, &h, g).unwrap())
            / (2.0 * step);
        let d_x = spectral::d_transform_prime(y, &h, g).unwrap();
        let rel = ((phi_fd - phi_x) / phi_x).abs().max(((d_fd - d_x) / d_x).abs());
        worst_fd = worst_fd.max(rel);
        if rel > 1e-6 {
            return Err(format!("triple {i}: finite-difference mismatch {rel:.2e}"));
        }
    }
    Ok(format!("1000 triples monotone, tails in (-2-1e-4, -2), worst derivative rel err {worst_fd:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut narrow = 0;
    for i in 0..100 {
        let n = rng.random_range(2..=40usize);
        let p = rng.random_range(1..=n);
        let r = rng.random_range(0..=p.min(4));
        let spikes: Vec<f64> = (0..r).map(|j| 4.0 / (j as f64 + 1.0)).collect();
        let x = gen_signal(&SignalSpec::new(spikes, i).unwrap(), n, p).unwrap();
        let z = gen_noise(&NoiseSpec::new(NoiseKind::MarcenkoPastur, p as f64 / n as f64, 500 + i).unwrap(), n, p).unwrap();
        let dec = svd(&x.add(&z).unwrap()).unwrap();
        let o = oracle(&x, &dec).unwrap();
        // sweep, caching the loss per distinct retained rank
        let top = 1.1 * dec.s[0];
        let mut cache = vec![None; dec.rank_count() + 1];
        let mut grid_min = f64::INFINITY;
        for g in 0..10_000 {
            let theta = top * g as f64 / 9_999.0;
            let rank = retained_rank(&dec.s, theta);
            let se = *cache[rank].get_or_insert_with(|| se_loss(&x, &hard_threshold_reconstruct(&dec, theta)).unwrap());
            if se < o.oracle_se {
                return Err(format!("instance {i}: grid loss {se} below oracle {}", o.oracle_se));
            }
            grid_min = grid_min.min(se);
        }
        let step = top / 9_999.0;
        if o.interval.1 - o.interval.0 <= step {
            // the optimal gap can fall between grid points
            narrow += 1;
            continue;
        }
        if grid_min != o.oracle_se {
            return Err(format!("instance {i}: grid min {grid_min} != oracle {}", o.oracle_se));
        }
    }
    Ok(format!("100 instances, grid minimum equals the enumeration oracle bit-for-bit ({narrow} with an optimal gap narrower than the grid step)"))
}

fn criterion_7() -> Outcome {
    let cfg = ExperimentConfig::from_toml_str(
        r#"
experiment = "oracle_attainment"
p_list = [500]
k = 12
strategies = ["impute"]
replicates = 50
seed = 7
reference_p = 500
[noise]
kind = "ar1"
gamma = 1.0
rho = 0.2
[signal]
spikes = [4.0, 3.0, 2.0, 1.0]
"#,
    )
    .unwrap();
    let out = execute(&cfg).unwrap();
    let frac = out.summary_value("attainment_fraction_p500", "impute").unwrap();
    check(frac >= 0.8, format!("Impute attains the oracle loss in {:.0}% of 50 seeds (>= 80%)", 100.0 * frac))
}

fn criterion_8() -> Outcome {
    let cfg = ExperimentConfig::from_toml_str(
        r#"
experiment = "convergence_rate"
p_list = [250, 500, 1000, 2000]
k = 20
strategies = ["impute"]
replicates = 50
seed = 8
[noise]
kind = "mix2"
gamma = 0.5
[signal]
spikes = [10.0, 9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0]
"#,
    )
    .unwrap();
    let out = execute(&cfg).unwrap();
    let medians: Vec<f64> = cfg
        .p_list
        .iter()
        .map(|p| out.summary_value(&format!("median_rel_error_p{p}"), "impute").unwrap())
        .collect();
    let slope = out.summary_value("log_log_slope", "impute").unwrap();
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    check(
        decreasing && (-1.5..=-0.5).contains(&slope),
        format!(
            "medians {:?} strictly decreasing: {decreasing}; slope {slope:.3} in [-1.5, -0.5]",
            medians.iter().map(|m| format!("{m:.2e}")).collect::<Vec<_>>()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let p = rng.random_range(20..=300usize);
        let n = p + rng.random_range(0..=p);
        let mut v: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..3.0f64).powi(2)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        let y = SingularSpectrum::new(v, n, p).unwrap();
        let strategy = Strategy::ALL[i % 3];
        let k = rng.random_range(0..=(p - 1) / 2);
        let params = ScreenotParams::new(k).with_strategy(strategy);
        let base = screenot(&y, &params).unwrap().theta_hat;
        for c in [1e-3, 1.0, 1e3] {
            let scaled = screenot(&y.scaled(c).unwrap(), &params).unwrap().theta_hat;
            let rel = (scaled - c * base).abs() / (c * base);
            worst = worst.max(rel);
            if rel > 1e-8 {
                return Err(format!("instance {i} ({strategy}, k={k}), c={c}: rel err {rel:.2e}"));
            }
        }
    }
    Ok(format!("50 instances x 3 scales, worst rel err {worst:.1e} (<= 1e-8)"))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let shapes = [(200, 100), (100, 200), (150, 150), (37, 5), (5, 37), (1, 9), (64, 63)];
    let mut worst_rec: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    for (rows, cols) in shapes {
        let a = DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
        for backend in [SvdBackend::Faer, SvdBackend::Jacobi] {
            let t = svd_with(&a, backend).unwrap();
            let rec = se_loss(&a, &partial_reconstruct(&t, t.rank_count())).unwrap().sqrt() / a.frobenius_sq().sqrt();
            let orth = orthonormality_error(&t.u).max(orthonormality_error(&t.v));
            let sorted = t.s.windows(2).all(|w| w[0] >= w[1]);
            worst_rec = worst_rec.max(rec);
            worst_orth = worst_orth.max(orth);
            if rec > 1e-8 || orth > 1e-10 || !sorted {
                return Err(format!("{rows}x{cols} {backend:?}: recon {rec:.1e}, orth {orth:.1e}, sorted {sorted}"));
            }
        }
    }
    Ok(format!("both backends: worst recon {worst_rec:.1e} (<= 1e-8), worst orth {worst_orth:.1e} (<= 1e-10)"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("white-noise square-case constant 4/sqrt(3)", criterion_1),
        ("reference table reproduction at p = 3000", criterion_2),
        ("all-ones spectrum gives sqrt(3)", criterion_3),
        ("KS distance of pseudo-noise <= k/p", criterion_4),
        ("Psi monotonicity, tail and derivatives", criterion_5),
        ("enumeration oracle equals grid sweep", criterion_6),
        ("AR(1) stylized example attains oracle", criterion_7),
        ("Impute convergence trend", criterion_8),
        ("scale equivariance", criterion_9),
        ("SVD contract", criterion_10),
    ];
    // ACCEPTANCE_ONLY=2,4 runs a subset
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = vec![];
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}) [{secs:.1} s]: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL criterion {} ({name}) [{secs:.1} s]: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
