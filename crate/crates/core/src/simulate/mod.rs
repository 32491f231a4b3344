//! Direct integration of the perturbed piecewise system, its return map on
//! the section `{x = 0, y > η}` and detection of limit cycles.

mod cycles;
mod integrator;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::algebra::Coefficient;
use crate::error::{Error, Result};
use crate::melnikov::PerturbationSpec;

pub use cycles::{default_grid, find_limit_cycles, poincare_displacement, Cycle, CycleMatch, CycleReport};
pub use integrator::{integrate_orbit, Stop};

/// Point of the phase plane with the piece of the vector field acting on it.
///
/// Regions: 1 is `x > 0, y > η`, 2 is `x > 0, y < η`, 3 is `x < 0, y < η`,
/// 4 is `x < 0, y > η`. On a switching line the region is declared.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub region: u8,
}

impl PhaseState {
    /// State off the switching lines with its region read from the signs.
    pub fn new(x: f64, y: f64, eta: f64) -> Result<Self> {
        if x == 0.0 || y == eta {
            return Err(Error::Domain(format!("({x}, {y}) lies on a switching line; declare its region")));
        }
        Ok(PhaseState { x, y, region: region_of(x > 0.0, y > eta) })
    }

    pub fn on_region(x: f64, y: f64, region: u8) -> Result<Self> {
        if !(1..=4).contains(&region) {
            return Err(Error::Domain(format!("region must be 1..=4, got {region}")));
        }
        Ok(PhaseState { x, y, region })
    }
}

pub(crate) fn region_of(right: bool, upper: bool) -> u8 {
    match (right, upper) {
        (true, true) => 1,
        (true, false) => 2,
        (false, false) => 3,
        (false, true) => 4,
    }
}

/// Signs of `x` and `y − η` inside a region.
pub(crate) fn region_signs(region: u8) -> (f64, f64) {
    match region {
        1 => (1.0, 1.0),
        2 => (1.0, -1.0),
        3 => (-1.0, -1.0),
        _ => (-1.0, 1.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub eta: f64,
    pub eps: f64,
    /// Per-step relative and absolute error tolerance.
    pub tol: f64,
    pub max_events: usize,
    pub max_steps: usize,
}

impl SimConfig {
    pub fn new(spec: &PerturbationSpec, eps: f64) -> Self {
        SimConfig { eta: spec.eta.to_real(), eps, tol: 1e-13, max_events: 10_000, max_steps: 2_000_000 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(Error::Domain(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.tol > 0.0 && self.tol < 1e-10) {
            return Err(Error::Domain(format!("integrator tolerance must lie in (0, 1e-10), got {}", self.tol)));
        }
        if !self.eps.is_finite() {
            return Err(Error::Domain("eps must be finite".into()));
        }
        Ok(())
    }
}

/// Polynomial pieces with float coefficients, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub(crate) struct Field {
    eta: f64,
    eps: f64,
    f: [Vec<(i32, i32, f64)>; 4],
    g: [Vec<(i32, i32, f64)>; 4],
}

fn monomials(table: &std::collections::BTreeMap<(u32, u32), crate::Rational>) -> Vec<(i32, i32, f64)> {
    table.iter().map(|(&(i, j), c)| (i as i32, j as i32, c.to_real())).collect()
}

fn poly_at(terms: &[(i32, i32, f64)], x: f64, y: f64) -> f64 {
    terms.iter().map(|&(i, j, c)| c * x.powi(i) * y.powi(j)).sum()
}

impl Field {
    pub(crate) fn new(cfg: &SimConfig, spec: &PerturbationSpec) -> Self {
        Field {
            eta: cfg.eta,
            eps: cfg.eps,
            f: std::array::from_fn(|k| monomials(&spec.pieces[k].f)),
            g: std::array::from_fn(|k| monomials(&spec.pieces[k].g)),
        }
    }

    pub(crate) fn eval(&self, region: u8, x: f64, y: f64) -> [f64; 2] {
        let k = region as usize - 1;
        let mut dx = y - 2.0 * x * x - self.eta;
        let mut dy = -2.0 * x * y;
        if self.eps != 0.0 {
            dx += self.eps * poly_at(&self.f[k], x, y);
            dy += self.eps * poly_at(&self.g[k], x, y);
        }
        [dx, dy]
    }
}

/// `(ẋ, ẏ)` of the piece acting on `s`.
pub fn vector_field(s: &PhaseState, cfg: &SimConfig, spec: &PerturbationSpec) -> (f64, f64) {
    let [dx, dy] = Field::new(cfg, spec).eval(s.region, s.x, s.y);
    (dx, dy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwitchLine {
    #[serde(rename = "x=0")]
    X,
    #[serde(rename = "y=eta")]
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub region: u8,
}

/// A located crossing; `residual` is the event function before snapping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub line: SwitchLine,
    pub from: u8,
    pub to: u8,
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn last(&self) -> Sample {
        *self.samples.last().expect("trajectory holds its start")
    }

    /// CSV with header `t,x,y,region`, one row per accepted step.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.samples {
            w.serialize(s).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}
