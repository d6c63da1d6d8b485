//! Spectral functionals of a discrete singular-value distribution.
//!
//! Everything here is a pure function of an [`AtomicCdf`] and a shape ratio
//! `gamma = p / n`. The central object is
//!
//! ```text
//! phi(y)   = mean_i  y / (y^2 - z_i^2)
//! phi~(y)  = gamma * phi(y) + (1 - gamma) / y
//! D(y)     = phi(y) * phi~(y)
//! Psi(y)   = y * D'(y) / D(y)
//! ```
//!
//! defined for `y` strictly above the largest atom. `Psi` increases from
//! `-inf` at the bulk edge to `-2` at infinity, and the optimal hard threshold
//! is the unique root of `Psi(y) = -4`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default absolute bracket width for the threshold solve.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Hard cap on bisection steps and on bracket expansions.
pub const MAX_ITERATIONS: usize = 200;
/// Level of the master equation `Psi(theta) = -4`.
pub const MASTER_LEVEL: f64 = -4.0;
/// Relative offset of the initial lower bracket above the bulk edge.
const EDGE_OFFSET: f64 = 1e-10;
/// Absolute offset above the bulk edge used by the phase-transition heuristic.
pub const BBP_HEURISTIC_OFFSET: f64 = 0.01;

/// Finite CDF of `p` equal-mass atoms, stored in nonincreasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicCdf {
    atoms: Vec<f64>,
}

impl AtomicCdf {
    /// Builds a CDF from arbitrary nonnegative finite atoms, sorting them.
    pub fn new(mut atoms: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("an atomic CDF needs at least one atom".into()));
        }
        if let Some(bad) = atoms.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(Error::InvalidInput(format!(
                "atoms must be finite and nonnegative, got {bad}"
            )));
        }
        atoms.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    /// Number of atoms `p`.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Upper edge of the support: the largest atom.
    pub fn bulk_edge(&self) -> f64 {
        self.atoms[0]
    }

    pub fn is_degenerate(&self) -> bool {
        self.bulk_edge() == 0.0
    }

    /// Fraction of atoms `<= z`.
    pub fn cdf(&self, z: f64) -> f64 {
        self.count_at_most(z) as f64 / self.len() as f64
    }

    /// Number of atoms `<= z`.
    pub fn count_at_most(&self, z: f64) -> usize {
        // atoms are nonincreasing, so those > z form a prefix
        self.len() - self.atoms.partition_point(|&a| a > z)
    }

    /// Atoms multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|a| a * c).collect(),
        }
    }
}

/// Aspect ratio `gamma = p / n` with `0 < gamma <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ShapeRatio(f64);

impl ShapeRatio {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma.is_finite() && gamma > 0.0 && gamma <= 1.0 {
            Ok(Self(gamma))
        } else {
            Err(Error::InvalidInput(format!("shape ratio must lie in (0, 1], got {gamma}")))
        }
    }

    /// Ratio of the smaller to the larger dimension.
    pub fn from_dims(n: usize, p: usize) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::InvalidInput("matrix dimensions must be positive".into()));
        }
        Self::new(n.min(p) as f64 / n.max(p) as f64)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A strictly positive signal singular value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct SpikeValue(f64);

impl SpikeValue {
    pub fn new(x: f64) -> Result<Self> {
        if x.is_finite() && x > 0.0 {
            Ok(Self(x))
        } else {
            Err(Error::InvalidInput(format!("spike must be positive and finite, got {x}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// All first-order spectral quantities at one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub y: f64,
    pub phi: f64,
    pub phi_prime: f64,
    pub phi_tilde: f64,
    pub phi_tilde_prime: f64,
}

impl SpectralPoint {
    /// Evaluates `phi`, `phi'` and their companion versions in one pass.
    pub fn evaluate(y: f64, h: &AtomicCdf, gamma: ShapeRatio) -> Result<Self> {
        let edge = h.bulk_edge();
        if !(y.is_finite() && y > edge) {
            return Err(Error::Domain {
                what: "evaluation point",
                value: y,
                bound: edge,
            });
        }
        let mut phi = CompensatedSum::default();
        let mut phi_prime = CompensatedSum::default();
        let y2 = y * y;
        for &z in h.atoms() {
            // (y - z)(y + z) avoids the cancellation in y^2 - z^2 near the edge
            let gap = (y - z) * (y + z);
            debug_assert!(gap > 0.0);
            phi.add(y / gap);
            phi_prime.add((y2 + z * z) / (gap * gap));
        }
        let p = h.len() as f64;
        let phi = phi.value() / p;
        let phi_prime = -phi_prime.value() / p;
        let g = gamma.get();
        Ok(Self {
            y,
            phi,
            phi_prime,
            phi_tilde: g * phi + (1.0 - g) / y,
            phi_tilde_prime: g * phi_prime - (1.0 - g) / y2,
        })
    }

    pub fn d(&self) -> f64 {
        self.phi * self.phi_tilde
    }

    pub fn d_prime(&self) -> f64 {
        self.phi_prime * self.phi_tilde + self.phi * self.phi_tilde_prime
    }

    /// `y * (phi'/phi + phi~'/phi~)`, equal to `y D'/D`.
    pub fn psi(&self) -> f64 {
        self.y * (self.phi_prime / self.phi + self.phi_tilde_prime / self.phi_tilde)
    }
}

pub fn phi(y: f64, h: &AtomicCdf) -> Result<f64> {
    Ok(SpectralPoint::evaluate(y, h, ShapeRatio(1.0))?.phi)
}

pub fn phi_prime(y: f64, h: &AtomicCdf) -> Result<f64> {
    Ok(SpectralPoint::evaluate(y, h, ShapeRatio(1.0))?.phi_prime)
}

/// Companion transform `gamma * phi(y) + (1 - gamma) / y`.
pub fn phi_tilde(y: f64, h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    Ok(SpectralPoint::evaluate(y, h, gamma)?.phi_tilde)
}

pub fn phi_tilde_prime(y: f64, h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    Ok(SpectralPoint::evaluate(y, h, gamma)?.phi_tilde_prime)
}

/// `D(y) = phi(y) * phi~(y)`: positive, strictly decreasing, vanishing at infinity.
pub fn d_transform(y: f64, h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    Ok(SpectralPoint::evaluate(y, h, gamma)?.d())
}

pub fn d_transform_prime(y: f64, h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    Ok(SpectralPoint::evaluate(y, h, gamma)?.d_prime())
}

/// The threshold functional `Psi(y) = y D'(y) / D(y)`.
///
/// Fails with [`Error::DegenerateCdf`] when every atom is zero: in that case
/// `Psi` is identically `-2` and the master equation has no root.
pub fn psi(y: f64, h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    if h.is_degenerate() {
        return Err(Error::DegenerateCdf);
    }
    Ok(SpectralPoint::evaluate(y, h, gamma)?.psi())
}

/// Bisection outcome with solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootSolve {
    pub root: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

/// Bisects an increasing function `f` for the crossing of `level` on `[lower, upper]`,
/// assuming `f(lower) < level <= f(upper)`. Stops once the bracket is no wider
/// than `width`, or when the midpoint can no longer be represented.
fn bisect_increasing<F>(mut f: F, level: f64, mut lower: f64, mut upper: f64, width: f64) -> Result<RootSolve>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut iterations = 0;
    while upper - lower > width && iterations < MAX_ITERATIONS {
        let mid = 0.5 * (lower + upper);
        if mid <= lower || mid >= upper {
            break;
        }
        iterations += 1;
        if f(mid)? < level {
            lower = mid;
        } else {
            upper = mid;
        }
    }
    Ok(RootSolve {
        root: 0.5 * (lower + upper),
        lower,
        upper,
        iterations,
    })
}

/// Bracket width actually used for a requested tolerance. Below unit scale the
/// tolerance is applied relative to the bulk edge so that rescaled spectra
/// resolve to the same relative precision.
fn effective_width(tol: f64, edge: f64) -> f64 {
    if edge > 0.0 {
        tol * edge.min(1.0)
    } else {
        tol
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")))
    }
}

/// Solves `Psi(theta) = -4` by bisection and reports diagnostics.
pub fn solve_optimal_threshold(h: &AtomicCdf, gamma: ShapeRatio, tol: f64) -> Result<RootSolve> {
    check_tol(tol)?;
    if h.is_degenerate() {
        return Err(Error::DegenerateCdf);
    }
    let edge = h.bulk_edge();
    let psi_at = |y: f64| SpectralPoint::evaluate(y, h, gamma).map(|s| s.psi());

    let mut offset = EDGE_OFFSET;
    let mut lower = edge * (1.0 + offset);
    let mut steps = 0;
    while psi_at(lower)? >= MASTER_LEVEL {
        steps += 1;
        offset *= 0.1;
        lower = edge * (1.0 + offset);
        if lower <= edge || steps > MAX_ITERATIONS {
            return Err(Error::Bracket {
                steps,
                reason: "Psi stays above -4 arbitrarily close to the bulk edge",
            });
        }
    }

    let mut span = 1.0;
    let mut upper = edge + span;
    steps = 0;
    while psi_at(upper)? < MASTER_LEVEL {
        steps += 1;
        if steps > MAX_ITERATIONS {
            return Err(Error::Bracket {
                steps,
                reason: "Psi stays below -4 after repeated doubling",
            });
        }
        span *= 2.0;
        upper = edge + span;
    }

    bisect_increasing(psi_at, MASTER_LEVEL, lower, upper, effective_width(tol, edge))
}

/// Optimal hard threshold `T_gamma(H)`: the root of `Psi(theta) = -4`.
pub fn optimal_threshold(h: &AtomicCdf, gamma: ShapeRatio, tol: f64) -> Result<f64> {
    solve_optimal_threshold(h, gamma, tol).map(|s| s.root)
}

/// Inverse of the strictly decreasing map `D` on `(bulk_edge, inf)`.
///
/// For an atomic CDF `D` blows up at the bulk edge, so every `d > 0` is in range.
pub fn d_inverse(d: f64, h: &AtomicCdf, gamma: ShapeRatio, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let edge = h.bulk_edge();
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Domain {
            what: "D value",
            value: d,
            bound: 0.0,
        });
    }
    let d_at = |y: f64| SpectralPoint::evaluate(y, h, gamma).map(|s| s.d());

    // lower end: D(lower) > d
    let mut steps = 0;
    let mut lower = if edge > 0.0 { edge * (1.0 + EDGE_OFFSET) } else { 1.0 };
    let mut offset = EDGE_OFFSET;
    while d_at(lower)? <= d {
        steps += 1;
        if edge > 0.0 {
            offset *= 0.1;
            lower = edge * (1.0 + offset);
        } else {
            lower *= 0.5;
        }
        if lower <= edge || steps > MAX_ITERATIONS {
            return Err(Error::Domain {
                what: "D value",
                value: d,
                bound: d_at(lower)?,
            });
        }
    }

    // upper end: D(upper) < d
    let mut span = 1.0;
    let mut upper = edge + span;
    steps = 0;
    while d_at(upper)? >= d {
        steps += 1;
        if steps > MAX_ITERATIONS {
            return Err(Error::Bracket {
                steps,
                reason: "D stays above the target after repeated doubling",
            });
        }
        span *= 2.0;
        upper = edge + span;
    }

    // -D is increasing
    let solve = bisect_increasing(
        |y| d_at(y).map(|v| -v),
        -d,
        lower,
        upper,
        effective_width(tol, lower),
    )?;
    Ok(solve.root)
}

/// Heuristic phase-transition location `D(bulk_edge + 0.01)^{-1/2}`.
///
/// The exact limit for any atomic CDF is zero; this finite offset gives a
/// usable plugin estimate for a large sampled noise spectrum. It is biased and
/// reported as-is.
pub fn bbp_location(h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    let d = d_transform(h.bulk_edge() + BBP_HEURISTIC_OFFSET, h, gamma)?;
    Ok(d.powf(-0.5))
}

/// Tolerance for inner inversions of `D`; effectively full machine precision.
const INVERSE_TOL: f64 = 1e-15;

/// Limiting location `Y(x) = D^{-1}(1 / x^2)` of the outlier produced by spike `x`.
pub fn spike_forward(x: SpikeValue, h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    let transition = bbp_location(h, gamma)?;
    let x = x.get();
    if x <= transition {
        return Err(Error::BelowTransition { x, transition });
    }
    d_inverse(1.0 / (x * x), h, gamma, INVERSE_TOL)
}

/// Limiting cosine `C(x) = -2 / (x^3 D'(Y(x)))`; zero at or below the transition.
pub fn spike_cosine(x: SpikeValue, h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    let y = match spike_forward(x, h, gamma) {
        Ok(y) => y,
        Err(Error::BelowTransition { .. }) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let x = x.get();
    Ok(-2.0 / (x * x * x * d_transform_prime(y, h, gamma)?))
}

/// Cosine in the implicit parametrization `-2 D(y)^{3/2} / D'(y)` at an outlier location `y`.
pub fn cosine_at_outlier(y: f64, h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    let s = SpectralPoint::evaluate(y, h, gamma)?;
    Ok(-2.0 * s.d().powf(1.5) / s.d_prime())
}

/// Spike strength whose outlier sits at `y`, i.e. `Y^{-1}(y) = D(y)^{-1/2}`.
pub fn spike_inverse(y: f64, h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    Ok(d_transform(y, h, gamma)?.powf(-0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cdf(atoms: &[f64]) -> AtomicCdf {
        AtomicCdf::new(atoms.to_vec()).unwrap()
    }

    fn unit() -> ShapeRatio {
        ShapeRatio::new(1.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn phi_small_cases() {
        assert!(close(phi(2.0, &cdf(&[1.0])).unwrap(), 2.0 / 3.0, 1e-15));
        assert!(close(phi(3.7, &cdf(&[0.0])).unwrap(), 1.0 / 3.7, 1e-15));
        assert!(close(phi(3.0, &cdf(&[2.0, 1.0])).unwrap(), 0.4875, 1e-15));
    }

    #[test]
    fn phi_prime_small_cases() {
        assert!(close(phi_prime(2.0, &cdf(&[1.0])).unwrap(), -5.0 / 9.0, 1e-15));
        assert!(close(phi_prime(2.0, &cdf(&[0.0])).unwrap(), -0.25, 1e-15));
        let expected = -0.5 * (13.0 / 25.0 + 10.0 / 64.0);
        assert!(close(phi_prime(3.0, &cdf(&[2.0, 1.0])).unwrap(), expected, 1e-15));
    }

    #[test]
    fn companion_small_cases() {
        let half = ShapeRatio::new(0.5).unwrap();
        assert!(close(phi_tilde(2.0, &cdf(&[1.0]), half).unwrap(), 7.0 / 12.0, 1e-15));
        assert!(close(phi_tilde(2.0, &cdf(&[0.0]), half).unwrap(), 0.5, 1e-15));
        let h = cdf(&[0.3, 0.2]);
        assert_eq!(phi_tilde(1.1, &h, unit()).unwrap(), phi(1.1, &h).unwrap());
        assert_eq!(phi_tilde_prime(1.1, &h, unit()).unwrap(), phi_prime(1.1, &h).unwrap());
    }

    #[test]
    fn d_small_cases() {
        assert!(close(d_transform(2.0, &cdf(&[1.0]), unit()).unwrap(), 4.0 / 9.0, 1e-15));
        assert!(close(d_transform(3.0, &cdf(&[0.0]), unit()).unwrap(), 1.0 / 9.0, 1e-15));
        let half = ShapeRatio::new(0.5).unwrap();
        assert!(close(d_transform(2.0, &cdf(&[1.0]), half).unwrap(), 7.0 / 18.0, 1e-15));
    }

    #[test]
    fn psi_one_point_bulk_closed_form() {
        let h = cdf(&[1.0; 7]);
        let v = psi(3f64.sqrt(), &h, unit()).unwrap();
        assert!(close(v, -4.0, 1e-14), "{v}");
        let far = psi(1e6, &h, unit()).unwrap();
        assert!(far > -2.0 - 1e-5 && far < -2.0, "{far}");
    }

    #[test]
    fn psi_matches_d_route() {
        let h = cdf(&[0.9, 0.5, 0.1]);
        let y = 1.2;
        let direct = psi(y, &h, unit()).unwrap();
        let d = d_transform(y, &h, unit()).unwrap();
        let dp = d_transform_prime(y, &h, unit()).unwrap();
        assert!(close(direct, y * dp / d, 1e-13));
    }

    #[test]
    fn evaluation_at_or_below_edge_is_rejected() {
        let h = cdf(&[2.0, 1.0]);
        assert!(matches!(phi(2.0, &h), Err(Error::Domain { .. })));
        assert!(matches!(phi(1.5, &h), Err(Error::Domain { .. })));
        assert!(matches!(phi(f64::NAN, &h), Err(Error::Domain { .. })));
    }

    #[test]
    fn degenerate_cdf_rejected() {
        let h = cdf(&[0.0, 0.0, 0.0]);
        assert!(matches!(psi(1.0, &h, unit()), Err(Error::DegenerateCdf)));
        assert!(matches!(optimal_threshold(&h, unit(), 1e-9), Err(Error::DegenerateCdf)));
    }

    #[test]
    fn bulk_edge_is_max_atom() {
        assert_eq!(cdf(&[1.0, 3.0, 2.0]).bulk_edge(), 3.0);
        assert_eq!(cdf(&[0.0, 0.0]).bulk_edge(), 0.0);
        assert_eq!(cdf(&[1.0, 3.0, 2.0]).atoms(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn atomic_cdf_validation() {
        assert!(AtomicCdf::new(vec![]).is_err());
        assert!(AtomicCdf::new(vec![1.0, -0.1]).is_err());
        assert!(AtomicCdf::new(vec![f64::INFINITY]).is_err());
        let h = cdf(&[3.0, 2.0, 2.0, 0.0]);
        assert_eq!(h.count_at_most(2.0), 3);
        assert_eq!(h.cdf(-1.0), 0.0);
        assert_eq!(h.cdf(3.0), 1.0);
    }

    #[test]
    fn threshold_for_one_point_bulk() {
        let h = cdf(&[1.0; 50]);
        let tol = 1e-9;
        let s = solve_optimal_threshold(&h, unit(), tol).unwrap();
        assert!((s.root - 3f64.sqrt()).abs() <= tol);
        assert!(s.upper - s.lower <= tol);
        assert!(psi(s.root - tol, &h, unit()).unwrap() < -4.0);
        assert!(psi(s.root + tol, &h, unit()).unwrap() > -4.0);
    }

    #[test]
    fn threshold_rejects_bad_tol() {
        assert!(optimal_threshold(&cdf(&[1.0]), unit(), 0.0).is_err());
        assert!(optimal_threshold(&cdf(&[1.0]), unit(), f64::NAN).is_err());
    }

    #[test]
    fn d_inverse_cases() {
        let y = d_inverse(4.0 / 9.0, &cdf(&[1.0]), unit(), 1e-14).unwrap();
        assert!(close(y, 2.0, 1e-12), "{y}");
        let y = d_inverse(1.0 / 9.0, &cdf(&[0.0]), unit(), 1e-14).unwrap();
        assert!(close(y, 3.0, 1e-12), "{y}");
        assert!(d_inverse(0.0, &cdf(&[1.0]), unit(), 1e-9).is_err());
        assert!(d_inverse(-1.0, &cdf(&[1.0]), unit(), 1e-9).is_err());
    }

    #[test]
    fn spike_forward_cases() {
        // no noise: outliers sit at the signal value
        for x in [0.5, 1.0, 4.0] {
            let y = spike_forward(SpikeValue::new(x).unwrap(), &cdf(&[0.0]), unit()).unwrap();
            assert!(close(y, x, 1e-12));
        }
        let y = spike_forward(SpikeValue::new(1.0).unwrap(), &cdf(&[1.0]), unit()).unwrap();
        assert!(close(y, (1.0 + 5f64.sqrt()) / 2.0, 1e-12), "{y}");
    }

    #[test]
    fn spike_below_transition() {
        let h = cdf(&[1.0, 0.5]);
        let xp = bbp_location(&h, unit()).unwrap();
        let x = SpikeValue::new(xp * 0.5).unwrap();
        assert!(matches!(spike_forward(x, &h, unit()), Err(Error::BelowTransition { .. })));
        assert_eq!(spike_cosine(x, &h, unit()).unwrap(), 0.0);
    }

    #[test]
    fn cosine_one_point_bulk() {
        let h = cdf(&[1.0; 5]);
        for x in [0.05, 0.5, 2.0] {
            let x = SpikeValue::new(x).unwrap();
            let y = spike_forward(x, &h, unit()).unwrap();
            let c = spike_cosine(x, &h, unit()).unwrap();
            assert!(close(c, y * y / (y * y + 1.0), 1e-10), "{c}");
        }
        // approaching the edge from the outlier side
        let c = cosine_at_outlier(1.0 + 1e-9, &h, unit()).unwrap();
        assert!((c - 0.5).abs() < 1e-6);
    }

    #[test]
    fn spike_inverse_round_trip() {
        let h = cdf(&[1.2, 0.8, 0.3]);
        let g = ShapeRatio::new(0.4).unwrap();
        let x = SpikeValue::new(3.0).unwrap();
        let y = spike_forward(x, &h, g).unwrap();
        assert!(close(spike_inverse(y, &h, g).unwrap(), 3.0, 1e-12));
    }

    #[test]
    fn shape_ratio_validation() {
        assert!(ShapeRatio::new(0.0).is_err());
        assert!(ShapeRatio::new(1.5).is_err());
        assert_eq!(ShapeRatio::from_dims(3, 7).unwrap().get(), 3.0 / 7.0);
        assert!(SpikeValue::new(0.0).is_err());
    }
}
