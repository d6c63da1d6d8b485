//! Dense matrices, SVD, hard-threshold reconstruction and oracle losses.

mod jacobi;

use faer::Mat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pipeline::retained_rank;
use crate::pseudo_noise::SingularSpectrum;

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries cannot fill a {rows} x {cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(rows: usize, cols: usize, d: &[f64]) -> Self {
        Self::from_fn(rows, cols, |i, j| if i == j && i < d.len() { d[i] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        Ok(Self::from_faer(&(self.to_faer() * other.to_faer())))
    }

    /// Multiplies column `j` by `scale[j]`.
    pub fn scale_columns(&mut self, scale: &[f64]) {
        for row in self.data.chunks_mut(self.cols) {
            for (v, s) in row.iter_mut().zip(scale) {
                *v *= s;
            }
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() == other.shape() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            })
        }
    }

    pub fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    pub fn from_faer(m: &Mat<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

/// Thin SVD `A = U diag(s) V^T` with `m = min(n, p)` components.
#[derive(Debug, Clone)]
pub struct SvdTriple {
    /// `n x m`, orthonormal columns.
    pub u: DenseMatrix,
    /// Nonincreasing singular values.
    pub s: Vec<f64>,
    /// `p x m`, orthonormal columns.
    pub v: DenseMatrix,
}

impl SvdTriple {
    pub fn rank_count(&self) -> usize {
        self.s.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.u.rows(), self.v.rows())
    }

    pub fn spectrum(&self) -> SingularSpectrum {
        let (n, p) = self.shape();
        SingularSpectrum::new(self.s.clone(), n, p).expect("SVD output is a valid spectrum")
    }
}

/// Decomposition routine behind [`svd_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SvdBackend {
    /// Bidiagonalization-based SVD from `faer`.
    #[default]
    Faer,
    /// Self-contained one-sided Jacobi.
    Jacobi,
}

pub fn svd(a: &DenseMatrix) -> Result<SvdTriple> {
    svd_with(a, SvdBackend::Faer)
}

pub fn svd_with(a: &DenseMatrix, backend: SvdBackend) -> Result<SvdTriple> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    match backend {
        SvdBackend::Faer => {
            let dec = a
                .to_faer()
                .thin_svd()
                .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
            let u = dec.U();
            let v = dec.V();
            let s: Vec<f64> = dec.S().column_vector().iter().copied().collect();
            Ok(SvdTriple {
                u: DenseMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
                s,
                v: DenseMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
            })
        }
        SvdBackend::Jacobi => Ok(jacobi::svd(a)),
    }
}

/// Singular values only, nonincreasing.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let mut s = a
        .to_faer()
        .singular_values()
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Singular values from the eigenvalues of the `p x p` Gram matrix (`p <= n`
/// after transposing). Faster than [`singular_values`] for tall matrices;
/// values below `sqrt(eps) * s_1` lose relative accuracy and tiny negative
/// eigenvalues are clamped to zero.
pub fn gram_singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let m = a.to_faer();
    let gram = if a.rows >= a.cols {
        m.transpose() * &m
    } else {
        &m * m.transpose()
    };
    let mut s: Vec<f64> = gram
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Sum of the leading `rank` dyads `s_i u_i v_i^T`, accumulated in index order.
pub fn partial_reconstruct(svd: &SvdTriple, rank: usize) -> DenseMatrix {
    let (n, p) = svd.shape();
    let mut out = DenseMatrix::zeros(n, p);
    for i in 0..rank.min(svd.rank_count()) {
        add_dyad(&mut out, svd, i);
    }
    out
}

fn add_dyad(out: &mut DenseMatrix, svd: &SvdTriple, i: usize) {
    let p = out.cols;
    let s = svd.s[i];
    for r in 0..out.rows {
        let coef = s * svd.u.get(r, i);
        if coef == 0.0 {
            continue;
        }
        let row = &mut out.data[r * p..(r + 1) * p];
        for (c, x) in row.iter_mut().enumerate() {
            *x += coef * svd.v.get(c, i);
        }
    }
}

/// Keeps the components with `s_i > theta`.
pub fn hard_threshold_reconstruct(svd: &SvdTriple, theta: f64) -> DenseMatrix {
    partial_reconstruct(svd, retained_rank(&svd.s, theta))
}

/// Squared Frobenius distance.
pub fn se_loss(x: &DenseMatrix, xhat: &DenseMatrix) -> Result<f64> {
    x.check_same_shape(xhat)?;
    Ok(x.data
        .iter()
        .zip(&xhat.data)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// Best achievable loss over all hard thresholds for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleReport {
    pub oracle_se: f64,
    pub oracle_rank: usize,
    /// Open interval `(y_{k*+1}, y_{k*})` of optimal thresholds; the upper end is
    /// `+inf` when `k* = 0` and the lower end is `0` when every component is kept.
    pub interval: (f64, f64),
}

impl OracleReport {
    fn from_levels(levels: &[f64], s: &[f64]) -> Self {
        let mut best = 0;
        for (k, &l) in levels.iter().enumerate() {
            if l < levels[best] {
                best = k;
            }
        }
        let hi = if best == 0 { f64::INFINITY } else { s[best - 1] };
        let lo = s.get(best).copied().unwrap_or(0.0);
        Self {
            oracle_se: levels[best],
            oracle_rank: best,
            interval: (lo, hi),
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta > self.interval.0 && theta < self.interval.1
    }
}

/// Exact oracle by rank enumeration: evaluates `||X - Xhat_[k]||_F^2` for
/// every `k = 0..=m` using the same accumulation as
/// [`hard_threshold_reconstruct`], so each level is bit-identical to the loss
/// of any threshold inside the corresponding gap. Ties go to the smaller rank.
pub fn oracle(x: &DenseMatrix, svd_y: &SvdTriple) -> Result<OracleReport> {
    if x.shape() != svd_y.shape() {
        return Err(Error::ShapeMismatch {
            expected: svd_y.shape(),
            found: x.shape(),
        });
    }
    let mut acc = DenseMatrix::zeros(x.rows, x.cols);
    let mut levels = Vec::with_capacity(svd_y.rank_count() + 1);
    levels.push(se_loss(x, &acc)?);
    for i in 0..svd_y.rank_count() {
        add_dyad(&mut acc, svd_y, i);
        levels.push(se_loss(x, &acc)?);
    }
    Ok(OracleReport::from_levels(&levels, &svd_y.s))
}

/// Loss levels of every hard threshold from the expansion
/// `||X||^2 - 2 sum_{i<k} s_i u_i^T X v_i + sum_{i<k} s_i^2`.
///
/// Costs one `n x p x m` product instead of `m` reconstructions; agrees with
/// [`oracle`] up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossProfile {
    /// `levels[k]` is the loss of keeping the top `k` components.
    pub levels: Vec<f64>,
    pub singular_values: Vec<f64>,
}

impl LossProfile {
    pub fn new(x: &DenseMatrix, svd_y: &SvdTriple) -> Result<Self> {
        if x.shape() != svd_y.shape() {
            return Err(Error::ShapeMismatch {
                expected: svd_y.shape(),
                found: x.shape(),
            });
        }
        let xv = x.to_faer() * svd_y.v.to_faer();
        let mut levels = Vec::with_capacity(svd_y.rank_count() + 1);
        let mut current = x.frobenius_sq();
        levels.push(current);
        for i in 0..svd_y.rank_count() {
            let align: f64 = (0..x.rows).map(|r| svd_y.u.get(r, i) * xv[(r, i)]).sum();
            let s = svd_y.s[i];
            current += s * s - 2.0 * s * align;
            levels.push(current);
        }
        Ok(Self {
            levels,
            singular_values: svd_y.s.clone(),
        })
    }

    pub fn se_at(&self, theta: f64) -> f64 {
        self.levels[retained_rank(&self.singular_values, theta)]
    }

    pub fn oracle(&self) -> OracleReport {
        OracleReport::from_levels(&self.levels, &self.singular_values)
    }

    pub fn report(&self, theta: f64) -> DenoiseReport {
        DenoiseReport::new(theta, self.se_at(theta), self.oracle())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DenoiseReport {
    pub theta: f64,
    pub se_at_theta: f64,
    pub oracle_se: f64,
    pub oracle_rank: usize,
    pub oracle_interval: (f64, f64),
    pub attained_oracle: bool,
}

impl DenoiseReport {
    pub fn new(theta: f64, se_at_theta: f64, oracle: OracleReport) -> Self {
        Self {
            theta,
            se_at_theta,
            oracle_se: oracle.oracle_se,
            oracle_rank: oracle.oracle_rank,
            oracle_interval: oracle.interval,
            attained_oracle: oracle.contains(theta),
        }
    }

    /// Report for threshold `theta` using the exact enumeration oracle.
    pub fn exact(x: &DenseMatrix, svd_y: &SvdTriple, theta: f64) -> Result<Self> {
        let se = se_loss(x, &hard_threshold_reconstruct(svd_y, theta))?;
        Ok(Self::new(theta, se, oracle(x, svd_y)?))
    }
}

/// Largest absolute entry of `Q^T Q - I`.
pub fn orthonormality_error(q: &DenseMatrix) -> f64 {
    let g = q.to_faer().transpose() * q.to_faer();
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}
