//! Limiting losses of fixed hard thresholds, evaluated on a plugin noise CDF.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{
    bbp_location, optimal_threshold, spike_cosine, spike_forward, spike_inverse, AtomicCdf, ShapeRatio,
    SpikeValue, DEFAULT_TOL,
};

/// Per-spike limits: outlier location, cosine and the two branch losses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpikeLimit {
    pub x: f64,
    pub above_transition: bool,
    /// `Y(x)` above the transition, otherwise the bulk edge.
    pub y_inf: f64,
    pub cosine: f64,
    pub r0: f64,
    /// Only defined above the transition.
    pub r1: Option<f64>,
}

impl SpikeLimit {
    pub fn new(x: f64, h: &AtomicCdf, gamma: ShapeRatio) -> Result<Self> {
        let spike = SpikeValue::new(x)?;
        let r0 = x * x;
        match spike_forward(spike, h, gamma) {
            Ok(y) => {
                let c = spike_cosine(spike, h, gamma)?;
                Ok(Self {
                    x,
                    above_transition: true,
                    y_inf: y,
                    cosine: c,
                    r0,
                    r1: Some(x * x + y * y - 2.0 * x * y * c),
                })
            }
            Err(Error::BelowTransition { .. }) => Ok(Self {
                x,
                above_transition: false,
                y_inf: h.bulk_edge(),
                cosine: 0.0,
                r0,
                r1: None,
            }),
            Err(e) => Err(e),
        }
    }

    /// Loss contribution `R(x | theta)`.
    pub fn loss_at(&self, theta: f64) -> f64 {
        match self.r1 {
            Some(r1) if self.y_inf > theta => r1,
            _ => self.r0,
        }
    }

    /// Best achievable contribution `R*(x)`.
    pub fn best_loss(&self) -> f64 {
        match self.r1 {
            Some(r1) => self.r0.min(r1),
            None => self.r0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct R0R1Row {
    pub x: f64,
    pub r0: f64,
    pub r1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct R0R1Table {
    pub rows: Vec<R0R1Row>,
    /// Crossing point `D(T)^{-1/2}` of `R0` and `R1`.
    pub x_star: f64,
    pub transition: f64,
    pub t_gamma: f64,
}

pub fn compute_r0_r1(x_grid: &[f64], h: &AtomicCdf, gamma: ShapeRatio) -> Result<R0R1Table> {
    let rows = x_grid
        .iter()
        .map(|&x| {
            let s = SpikeLimit::new(x, h, gamma)?;
            Ok(R0R1Row { x, r0: s.r0, r1: s.r1 })
        })
        .collect::<Result<Vec<_>>>()?;
    let t_gamma = optimal_threshold(h, gamma, DEFAULT_TOL)?;
    Ok(R0R1Table {
        rows,
        x_star: spike_inverse(t_gamma, h, gamma)?,
        transition: bbp_location(h, gamma)?,
        t_gamma,
    })
}

fn limits(spikes: &[f64], h: &AtomicCdf, gamma: ShapeRatio) -> Result<Vec<SpikeLimit>> {
    spikes.iter().map(|&x| SpikeLimit::new(x, h, gamma)).collect()
}

/// `ASE[x | theta]`; the limit is only finite for `theta` above the bulk edge.
pub fn compute_ase(spikes: &[f64], theta: f64, h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    let edge = h.bulk_edge();
    if !(theta > edge) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
            bound: edge,
        });
    }
    Ok(limits(spikes, h, gamma)?.iter().map(|s| s.loss_at(theta)).sum())
}

pub fn compute_ase_star(spikes: &[f64], h: &AtomicCdf, gamma: ShapeRatio) -> Result<f64> {
    Ok(limits(spikes, h, gamma)?.iter().map(SpikeLimit::best_loss).sum())
}

/// Asymptotic optimal interval: the gap between outlier locations containing
/// `T`, lower end at least the bulk edge and upper end `+inf` when no outlier
/// lies above `T`.
pub fn optimal_interval(spikes: &[f64], h: &AtomicCdf, gamma: ShapeRatio) -> Result<(f64, f64)> {
    let t = optimal_threshold(h, gamma, DEFAULT_TOL)?;
    let lims = limits(spikes, h, gamma)?;
    let mut lo = h.bulk_edge();
    let mut hi = f64::INFINITY;
    for s in &lims {
        if s.y_inf < t {
            lo = lo.max(s.y_inf);
        } else if s.y_inf > t {
            hi = hi.min(s.y_inf);
        }
    }
    Ok((lo, hi))
}

/// Reference limiting quantities for one signal and plugin noise CDF.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticQuantities {
    pub bulk_edge: f64,
    pub t_gamma: f64,
    pub transition: f64,
    pub x_star: f64,
    pub spikes: Vec<SpikeLimit>,
    pub ase_at_t: f64,
    pub ase_star: f64,
    pub interval: (f64, f64),
}

impl AsymptoticQuantities {
    pub fn new(spikes: &[f64], h: &AtomicCdf, gamma: ShapeRatio) -> Result<Self> {
        let t_gamma = optimal_threshold(h, gamma, DEFAULT_TOL)?;
        let lims = limits(spikes, h, gamma)?;
        Ok(Self {
            bulk_edge: h.bulk_edge(),
            t_gamma,
            transition: bbp_location(h, gamma)?,
            x_star: spike_inverse(t_gamma, h, gamma)?,
            ase_at_t: lims.iter().map(|s| s.loss_at(t_gamma)).sum(),
            ase_star: lims.iter().map(SpikeLimit::best_loss).sum(),
            interval: optimal_interval(spikes, h, gamma)?,
            spikes: lims,
        })
    }
}
