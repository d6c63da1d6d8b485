//! Seeded generators for the signal and noise ensembles used by the experiments.

use std::fmt;

use faer::{Mat, Side};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Generator behind every seeded draw in this crate.
pub const RNG_ALGORITHM: &str = "ChaCha8";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes `seed` with a stream index; distinct streams give unrelated seeds.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Column-variance law for correlated-column noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnLaw {
    /// Mean of 10 squared standard normals (mean 1).
    Chi10,
    /// Atoms 1 and 10 with equal weight.
    Mix2,
    /// Uniform on `[1, 10]`.
    Uniform1To10,
}

impl ColumnLaw {
    fn sample(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            ColumnLaw::Chi10 => {
                (0..10)
                    .map(|_| {
                        let g: f64 = StandardNormal.sample(rng);
                        g * g
                    })
                    .sum::<f64>()
                    / 10.0
            }
            ColumnLaw::Mix2 => {
                if rng.random::<bool>() {
                    10.0
                } else {
                    1.0
                }
            }
            ColumnLaw::Uniform1To10 => rng.random_range(1.0..=10.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    MarcenkoPastur,
    CorrelatedColumns { law: ColumnLaw },
    Fisher3n,
    PaddedIdentity,
    Ar1 { rho: f64 },
}

impl NoiseKind {
    /// Short name used in file names and configs.
    pub fn label(&self) -> &'static str {
        match self {
            NoiseKind::MarcenkoPastur => "mp",
            NoiseKind::CorrelatedColumns { law: ColumnLaw::Chi10 } => "chi10",
            NoiseKind::CorrelatedColumns { law: ColumnLaw::Mix2 } => "mix2",
            NoiseKind::CorrelatedColumns { law: ColumnLaw::Uniform1To10 } => "unif",
            NoiseKind::Fisher3n => "fisher3n",
            NoiseKind::PaddedIdentity => "padded_identity",
            NoiseKind::Ar1 { .. } => "ar1",
        }
    }

    /// Parses a [`label`](Self::label); `rho` is required for `ar1` and rejected otherwise.
    pub fn from_label(label: &str, rho: Option<f64>) -> Result<Self> {
        let kind = match label {
            "mp" | "marcenko_pastur" => NoiseKind::MarcenkoPastur,
            "chi10" => NoiseKind::CorrelatedColumns { law: ColumnLaw::Chi10 },
            "mix2" => NoiseKind::CorrelatedColumns { law: ColumnLaw::Mix2 },
            "unif" | "uniform" => NoiseKind::CorrelatedColumns {
                law: ColumnLaw::Uniform1To10,
            },
            "fisher3n" => NoiseKind::Fisher3n,
            "padded_identity" => NoiseKind::PaddedIdentity,
            "ar1" => {
                let rho = rho.ok_or_else(|| Error::InvalidInput("ar1 noise requires rho".into()))?;
                NoiseKind::Ar1 { rho }
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown noise kind `{other}` (expected mp, chi10, mix2, unif, fisher3n, padded_identity or ar1)"
                )))
            }
        };
        if rho.is_some() && !matches!(kind, NoiseKind::Ar1 { .. }) {
            return Err(Error::InvalidInput(format!("rho is only valid for ar1, not {label}")));
        }
        kind.validate()?;
        Ok(kind)
    }

    pub fn validate(&self) -> Result<()> {
        if let NoiseKind::Ar1 { rho } = *self {
            if !(0.0..1.0).contains(&rho) {
                return Err(Error::Domain {
                    what: "rho",
                    value: rho,
                    bound: 1.0,
                });
            }
        }
        Ok(())
    }

    pub const TABLE: [NoiseKind; 6] = [
        NoiseKind::MarcenkoPastur,
        NoiseKind::CorrelatedColumns { law: ColumnLaw::Chi10 },
        NoiseKind::Fisher3n,
        NoiseKind::CorrelatedColumns { law: ColumnLaw::Mix2 },
        NoiseKind::CorrelatedColumns {
            law: ColumnLaw::Uniform1To10,
        },
        NoiseKind::PaddedIdentity,
    ];
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::Ar1 { rho } => write!(f, "ar1(rho={rho})"),
            other => f.write_str(other.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub gamma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, gamma: f64, seed: u64) -> Result<Self> {
        kind.validate()?;
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Domain {
                what: "gamma",
                value: gamma,
                bound: 1.0,
            });
        }
        Ok(Self { kind, gamma, seed })
    }

    /// Row count for `p` columns: `ceil(p / gamma)`.
    pub fn rows_for(&self, p: usize) -> usize {
        rows_for(p, self.gamma)
    }
}

pub fn rows_for(p: usize, gamma: f64) -> usize {
    let n = (p as f64 / gamma).ceil() as usize;
    // guards against p / gamma landing a hair above an integer
    if ((n - 1) as f64) * gamma >= p as f64 {
        n - 1
    } else {
        n
    }
}

fn check_shape(n: usize, p: usize) -> Result<()> {
    if p == 0 || n == 0 || p > n {
        return Err(Error::InvalidInput(format!(
            "noise shape must satisfy 1 <= p <= n, got n = {n}, p = {p}"
        )));
    }
    Ok(())
}

fn gaussian(rows: usize, cols: usize, sd: f64, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| {
        let g: f64 = StandardNormal.sample(rng);
        sd * g
    })
}

/// Draws an `n x p` noise matrix, `p <= n`.
pub fn gen_noise(spec: &NoiseSpec, n: usize, p: usize) -> Result<DenseMatrix> {
    check_shape(n, p)?;
    spec.kind.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let scale = 1.0 / (n as f64).sqrt();
    Ok(match spec.kind {
        NoiseKind::MarcenkoPastur => gaussian(n, p, scale, &mut rng),
        NoiseKind::CorrelatedColumns { law } => {
            let mut w = gaussian(n, p, scale, &mut rng);
            let col_scale: Vec<f64> = (0..p).map(|_| law.sample(&mut rng).sqrt()).collect();
            w.scale_columns(&col_scale);
            w
        }
        NoiseKind::Fisher3n => fisher(n, p, &mut rng)?,
        NoiseKind::PaddedIdentity => DenseMatrix::from_fn(n, p, |i, j| if i == j { 1.0 } else { 0.0 }),
        NoiseKind::Ar1 { rho } => {
            let mut z = DenseMatrix::zeros(n, p);
            for j in 0..p {
                let mut prev = 0.0;
                for i in 0..n {
                    let eps: f64 = StandardNormal.sample(&mut rng);
                    let v = if i == 0 { eps } else { rho * prev + (1.0 - rho) * eps };
                    z.set(i, j, v * scale);
                    prev = v;
                }
            }
            z
        }
    })
}

/// `W1 S2^{-1/2}` with `S2 = W2^T W2`, `W1` of shape `n x p` with variance `1/n`
/// and `W2` of shape `3p x p` with variance `1/(3n)`.
fn fisher(n: usize, p: usize, rng: &mut ChaCha8Rng) -> Result<DenseMatrix> {
    let w1 = gaussian(n, p, 1.0 / (n as f64).sqrt(), rng).to_faer();
    let w2 = gaussian(3 * p, p, 1.0 / (3.0 * n as f64).sqrt(), rng).to_faer();
    let s2 = w2.transpose() * &w2;
    let eig = s2
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let q = eig.U();
    let lambda = eig.S().column_vector();
    let mut q_scaled = q.to_owned();
    for j in 0..p {
        let l = lambda[j];
        if l <= 0.0 {
            return Err(Error::Decomposition("Fisher denominator is singular".into()));
        }
        let f = l.powf(-0.5);
        for i in 0..p {
            q_scaled[(i, j)] *= f;
        }
    }
    let inv_sqrt: Mat<f64> = &q_scaled * q.transpose();
    Ok(DenseMatrix::from_faer(&(&w1 * &inv_sqrt)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalSpec {
    pub spikes: Vec<f64>,
    pub seed: u64,
}

impl SignalSpec {
    pub fn new(spikes: Vec<f64>, seed: u64) -> Result<Self> {
        if spikes.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidInput("spikes must be positive and finite".into()));
        }
        if spikes.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidInput("spikes must be strictly decreasing".into()));
        }
        Ok(Self { spikes, seed })
    }

    pub fn rank(&self) -> usize {
        self.spikes.len()
    }
}

/// Low-rank signal `A diag(x) B^T` together with its frames.
#[derive(Debug, Clone)]
pub struct LowRankSignal {
    pub left: DenseMatrix,
    pub right: DenseMatrix,
    pub spikes: Vec<f64>,
    pub matrix: DenseMatrix,
}

/// Orthonormal `rows x r` frame from the QR factor of a Gaussian matrix.
pub fn random_frame(rows: usize, r: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let g = gaussian(rows, r, 1.0, rng).to_faer();
    DenseMatrix::from_faer(&g.qr().compute_thin_Q())
}

pub fn gen_low_rank(spec: &SignalSpec, n: usize, p: usize) -> Result<LowRankSignal> {
    let r = spec.rank();
    if r > n.min(p) {
        return Err(Error::InvalidInput(format!(
            "signal rank {r} exceeds min(n, p) = {}",
            n.min(p)
        )));
    }
    if r == 0 {
        return Ok(LowRankSignal {
            left: DenseMatrix::zeros(n, 1),
            right: DenseMatrix::zeros(p, 1),
            spikes: vec![],
            matrix: DenseMatrix::zeros(n, p),
        });
    }
    let mut rng = rng_from_seed(spec.seed);
    let left = random_frame(n, r, &mut rng);
    let right = random_frame(p, r, &mut rng);
    let mut scaled = left.clone();
    scaled.scale_columns(&spec.spikes);
    let matrix = scaled.matmul(&right.transpose())?;
    Ok(LowRankSignal {
        left,
        right,
        spikes: spec.spikes.clone(),
        matrix,
    })
}

pub fn gen_signal(spec: &SignalSpec, n: usize, p: usize) -> Result<DenseMatrix> {
    Ok(gen_low_rank(spec, n, p)?.matrix)
}
