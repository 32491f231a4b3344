use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{integrate_orbit, PhaseState, SimConfig, Stop, SwitchLine};
use crate::error::{Error, Result};
use crate::generators::constants_for;
use crate::melnikov::{assemble, count_zeros, theoretical_bound, PerturbationSpec, ScanParams};
use crate::quadrature::hamiltonian;

/// `y_return − y0` after one revolution from `(0, y0)` on the section.
pub fn poincare_displacement(y0: f64, cfg: &SimConfig, spec: &PerturbationSpec) -> Result<f64> {
    if !(y0 > cfg.eta) {
        return Err(Error::Domain(format!("section ordinate must exceed eta = {}, got {y0}", cfg.eta)));
    }
    let start = PhaseState::on_region(0.0, y0, 1)?;
    let traj = integrate_orbit(start, cfg, spec, Stop::Events(4))?;
    let lines: Vec<_> = traj.events.iter().map(|e| e.line).collect();
    let end = traj.last();
    if lines != [SwitchLine::Y, SwitchLine::X, SwitchLine::Y, SwitchLine::X] || !(end.y > cfg.eta) {
        return Err(Error::Integration(format!("orbit from y0 = {y0} did not return to the section")));
    }
    Ok(end.y - y0)
}

/// Section ordinates of `count` orbits with energies spread uniformly over
/// `[0.98 h0, 0.02 h0]`, `h0 = −1/(2η)`.
pub fn default_grid(eta: f64, count: usize) -> Vec<f64> {
    let h0 = -0.5 / eta;
    let count = count.max(2);
    (0..count)
        .map(|k| {
            let h = h0 * (0.98 - 0.96 * k as f64 / (count - 1) as f64);
            let s = (2.0 * eta * h + 1.0).max(0.0).sqrt();
            (1.0 + s) / (-2.0 * h)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    /// Section ordinate `y*`.
    pub y: f64,
    /// `H(0, y*)`.
    pub h: f64,
    /// Derivative of the return map at `y*`.
    pub return_derivative: f64,
    /// Displacement left at `y*`.
    pub displacement: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleMatch {
    pub cycle_h: f64,
    pub zero_h: f64,
    pub delta_h: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub eta: f64,
    pub eps: f64,
    pub grid_size: usize,
    pub cycles: Vec<Cycle>,
    pub melnikov_zeros: Vec<f64>,
    pub matches: Vec<CycleMatch>,
    /// Every displacement on the grid was lost in integration noise.
    pub degenerate: bool,
}

/// Displacements below this are indistinguishable from integration error.
fn noise_floor(cfg: &SimConfig, y: f64) -> f64 {
    1e4 * cfg.tol * y.max(1.0)
}

/// Brackets sign changes of the displacement over `grid`, bisects them and
/// matches each cycle energy to the nearest zero of `M`.
pub fn find_limit_cycles(cfg: &SimConfig, spec: &PerturbationSpec, grid: &[f64]) -> Result<CycleReport> {
    cfg.validate()?;
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let d: Vec<f64> = grid.par_iter().map(|&y| poincare_displacement(y, cfg, spec)).collect::<Result<_>>()?;
    let signs: Vec<(f64, f64, i8)> = grid
        .iter()
        .zip(&d)
        .filter(|(&y, &v)| v.abs() > noise_floor(cfg, y))
        .map(|(&y, &v)| (y, v, if v > 0.0 { 1 } else { -1 }))
        .collect();
    let degenerate = signs.is_empty();
    let brackets: Vec<(f64, f64, i8)> =
        signs.windows(2).filter(|w| w[0].2 != w[1].2).map(|w| (w[0].0, w[1].0, w[0].2)).collect();
    let cycles = brackets
        .par_iter()
        .map(|&(lo, hi, s_lo)| refine(cfg, spec, lo, hi, s_lo))
        .collect::<Result<Vec<_>>>()?;

    let melnikov_zeros = melnikov_zeros(spec)?;
    let matches = cycles
        .iter()
        .filter_map(|c| {
            melnikov_zeros
                .iter()
                .map(|&z| CycleMatch { cycle_h: c.h, zero_h: z, delta_h: (c.h - z).abs() })
                .min_by(|a, b| a.delta_h.total_cmp(&b.delta_h))
        })
        .collect();
    Ok(CycleReport { eta: cfg.eta, eps: cfg.eps, grid_size: grid.len(), cycles, melnikov_zeros, matches, degenerate })
}

fn refine(cfg: &SimConfig, spec: &PerturbationSpec, mut lo: f64, mut hi: f64, s_lo: i8) -> Result<Cycle> {
    let mut d_mid = f64::NAN;
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        d_mid = poincare_displacement(mid, cfg, spec)?;
        if d_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (d_mid > 0.0) == (s_lo > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    let delta = 1e-4 * (y - cfg.eta);
    let slope = (poincare_displacement(y + delta, cfg, spec)? - poincare_displacement(y - delta, cfg, spec)?)
        / (2.0 * delta);
    Ok(Cycle { y, h: hamiltonian(0.0, y, cfg.eta), return_derivative: 1.0 + slope, displacement: d_mid })
}

fn melnikov_zeros(spec: &PerturbationSpec) -> Result<Vec<f64>> {
    let m = assemble(spec)?;
    if m.is_zero() {
        return Ok(Vec::new());
    }
    let k = constants_for(&spec.eta)?;
    match count_zeros(&m, &k, &ScanParams::default(), theoretical_bound(spec.n, spec.case)) {
        Ok(r) => Ok(r.zeros.iter().map(|z| z.h).collect()),
        Err(Error::PossiblyZero { .. }) => Ok(Vec::new()),
        Err(e) => Err(e),
    }
}
