//! Pseudo-noise CDFs: the observed spectrum with its top `k` singular values
//! removed and replaced by a prosthesis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::AtomicCdf;

/// Nonincreasing singular values of an `n x p` matrix, with `p <= n` after
/// transpose normalization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularSpectrum {
    values: Vec<f64>,
    n: usize,
    p: usize,
}

impl SingularSpectrum {
    /// Validates and sorts `values`. The dimensions may be given in either
    /// order; `values.len()` must equal `min(n, p)`.
    pub fn new(mut values: Vec<f64>, n: usize, p: usize) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::InvalidInput("matrix dimensions must be positive".into()));
        }
        let (n, p) = (n.max(p), n.min(p));
        if values.len() != p {
            return Err(Error::InvalidInput(format!(
                "expected min(n, p) = {p} singular values, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidInput(format!(
                "singular values must be finite and nonnegative, got {bad}"
            )));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values, n, p })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Larger dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Smaller dimension, equal to the number of singular values.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn gamma(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    /// Empirical CDF of the spectrum itself.
    pub fn to_cdf(&self) -> AtomicCdf {
        AtomicCdf::new(self.values.clone()).expect("validated spectrum")
    }

    /// Every value multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect(), self.n, self.p)
    }
}

/// How the amputated top of the spectrum is replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// `k` zeros.
    #[serde(alias = "zero")]
    TransportToZero,
    /// `k` copies of `y_{k+1}`.
    Winsorize,
    /// A reconstructed square-root-edge tail.
    Impute,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::TransportToZero, Strategy::Winsorize, Strategy::Impute];

    pub fn label(self) -> &'static str {
        match self {
            Strategy::TransportToZero => "zero",
            Strategy::Winsorize => "winsorize",
            Strategy::Impute => "impute",
        }
    }

    /// Builds the pseudo-noise CDF for this strategy.
    pub fn pseudo_noise(self, y: &SingularSpectrum, k: usize) -> Result<AtomicCdf> {
        match self {
            Strategy::TransportToZero => transport_to_zero(y, k),
            Strategy::Winsorize => winsorize(y, k),
            Strategy::Impute => impute(y, k),
        }
    }

    /// Checks the rank bound this strategy places on `k` for `count` values.
    pub fn check_rank(self, k: usize, count: usize) -> Result<()> {
        match self {
            Strategy::TransportToZero | Strategy::Winsorize if k >= count => Err(Error::RankBound {
                k,
                count,
                rule: "k < p",
            }),
            Strategy::Impute if 2 * k + 1 > count => Err(Error::RankBound {
                k,
                count,
                rule: "2k + 1 <= p",
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zero" | "transport_to_zero" => Ok(Strategy::TransportToZero),
            "winsorize" => Ok(Strategy::Winsorize),
            "impute" => Ok(Strategy::Impute),
            other => Err(Error::InvalidInput(format!(
                "unknown strategy `{other}` (expected impute, winsorize or zero)"
            ))),
        }
    }
}

fn amputate(y: &SingularSpectrum, k: usize, fill: impl Iterator<Item = f64>) -> AtomicCdf {
    let atoms: Vec<f64> = fill.chain(y.values()[k..].iter().copied()).collect();
    AtomicCdf::new(atoms).expect("values are validated")
}

/// Top `k` values replaced by zeros.
pub fn transport_to_zero(y: &SingularSpectrum, k: usize) -> Result<AtomicCdf> {
    Strategy::TransportToZero.check_rank(k, y.p())?;
    Ok(amputate(y, k, std::iter::repeat_n(0.0, k)))
}

/// Top `k` values clipped to `y_{k+1}`.
pub fn winsorize(y: &SingularSpectrum, k: usize) -> Result<AtomicCdf> {
    Strategy::Winsorize.check_rank(k, y.p())?;
    let clip = y.values()[k];
    Ok(amputate(y, k, std::iter::repeat_n(clip, k)))
}

/// Top `k` values replaced by pseudo singular values
/// `y_{k+1} + (1 - ((i-1)/k)^{2/3}) / (2^{2/3} - 1) * (y_{k+1} - y_{2k+1})`.
///
/// The gap is taken as `y_{k+1} - y_{2k+1} >= 0`, so the reconstructed tail
/// lies above `y_{k+1}`.
pub fn impute(y: &SingularSpectrum, k: usize) -> Result<AtomicCdf> {
    Strategy::Impute.check_rank(k, y.p())?;
    if k == 0 {
        return Ok(y.to_cdf());
    }
    let values = y.values();
    let anchor = values[k];
    let gap = anchor - values[2 * k];
    let denom = 2f64.powf(2.0 / 3.0) - 1.0;
    let kf = k as f64;
    let tail = (0..k).map(|i| {
        let frac = (i as f64 / kf).powf(2.0 / 3.0);
        anchor + (1.0 - frac) / denom * gap
    });
    Ok(amputate(y, k, tail))
}

/// Kolmogorov-Smirnov distance `sup_z |F(z) - G(z)|`, evaluated exactly at
/// every atom of either CDF.
pub fn ks_distance(f: &AtomicCdf, g: &AtomicCdf) -> f64 {
    let (pf, pg) = (f.len() as u128, g.len() as u128);
    // ascending walks over both atom lists
    let fa: Vec<f64> = f.atoms().iter().rev().copied().collect();
    let ga: Vec<f64> = g.atoms().iter().rev().copied().collect();
    let (mut i, mut j) = (0usize, 0usize);
    let mut best: u128 = 0;
    while i < fa.len() || j < ga.len() {
        let z = match (fa.get(i), ga.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < fa.len() && fa[i] <= z {
            i += 1;
        }
        while j < ga.len() && ga[j] <= z {
            j += 1;
        }
        // |i/pf - j/pg| with an integer numerator, so equal ratios compare exactly
        let diff = (i as u128 * pg).abs_diff(j as u128 * pf);
        best = best.max(diff);
    }
    best as f64 / (pf * pg) as f64
}
