use serde::{Deserialize, Serialize};

use super::{region_of, region_signs, Event, Field, PhaseState, Sample, SimConfig, SwitchLine, Trajectory};
use crate::error::{Error, Result};
use crate::melnikov::PerturbationSpec;

/// When [`integrate_orbit`] stops. A negative time integrates backwards.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Stop {
    Events(usize),
    Time(f64),
}

/// Events are located until the event function is below this.
const EVENT_TOL: f64 = 1e-13;

// Dormand–Prince 5(4); the last row of `A` is also the solution weight.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One step of size `dt` from `z`; returns the new point and the error estimate.
fn rk_step(field: &Field, region: u8, z: [f64; 2], dt: f64) -> ([f64; 2], [f64; 2]) {
    let mut k = [[0.0; 2]; 7];
    for s in 0..7 {
        let mut p = z;
        for (r, a) in A[s].iter().enumerate().take(s) {
            p[0] += dt * a * k[r][0];
            p[1] += dt * a * k[r][1];
        }
        k[s] = field.eval(region, p[0], p[1]);
    }
    let mut out = z;
    let mut err = [0.0; 2];
    for s in 0..7 {
        let b = if s < 6 { A[6][s] } else { 0.0 };
        for d in 0..2 {
            out[d] += dt * b * k[s][d];
            err[d] += dt * E[s] * k[s][d];
        }
    }
    (out, err)
}

fn error_norm(z0: [f64; 2], z1: [f64; 2], err: [f64; 2], tol: f64) -> f64 {
    (0..2)
        .map(|d| {
            let scale = tol * (1.0 + z0[d].abs().max(z1[d].abs()));
            (err[d] / scale).powi(2)
        })
        .sum::<f64>()
        .sqrt()
        / std::f64::consts::SQRT_2
}

/// Signed event functions `x` and `y − η`, oriented positive inside the region.
fn inside(region: u8, z: [f64; 2], eta: f64) -> [f64; 2] {
    let (sx, sy) = region_signs(region);
    [sx * z[0], sy * (z[1] - eta)]
}

/// Bisects the step length on event `which` until its function is below
/// [`EVENT_TOL`].
fn locate(field: &Field, region: u8, z: [f64; 2], dt: f64, which: usize) -> (f64, [f64; 2], f64) {
    let g = |tau: f64| {
        let p = rk_step(field, region, z, tau).0;
        (inside(region, p, field.eta)[which], p)
    };
    let (mut lo, mut hi) = (0.0, dt);
    let (mut g_hi, mut p_hi) = g(dt);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let (gm, pm) = g(mid);
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
            g_hi = gm;
            p_hi = pm;
        }
        if g_hi.abs() < EVENT_TOL {
            break;
        }
    }
    (hi, p_hi, g_hi.abs())
}

fn escaped(z: [f64; 2]) -> bool {
    !(z[0].is_finite() && z[1].is_finite()) || z[1] <= 0.0 || z[0].abs().max(z[1]) > 1e9
}

/// Crossing from `from` through `line` at `z`: the normal velocity must
/// keep its sign across the line, otherwise the orbit would slide.
fn crossing(field: &Field, from: u8, line: SwitchLine, z: [f64; 2], dir: f64) -> Result<u8> {
    let (sx, sy) = region_signs(from);
    let to = match line {
        SwitchLine::X => region_of(sx < 0.0, sy > 0.0),
        SwitchLine::Y => region_of(sx > 0.0, sy < 0.0),
    };
    let d = match line {
        SwitchLine::X => 0,
        SwitchLine::Y => 1,
    };
    let before = dir * field.eval(from, z[0], z[1])[d];
    let after = dir * field.eval(to, z[0], z[1])[d];
    if before == 0.0 || after == 0.0 || before.signum() != after.signum() {
        return Err(Error::Integration(format!(
            "tangency or sliding at ({}, {}) between regions {from} and {to}",
            z[0], z[1]
        )));
    }
    Ok(to)
}

/// Integrates from `start` with adaptive Dormand–Prince steps. Crossings of
/// `x = 0` and `y = η` are located by bisection, snapped onto the line and
/// switch the acting piece.
pub fn integrate_orbit(start: PhaseState, cfg: &SimConfig, spec: &PerturbationSpec, stop: Stop) -> Result<Trajectory> {
    cfg.validate()?;
    let field = Field::new(cfg, spec);
    let (dir, t_end) = match stop {
        Stop::Events(n) if n > cfg.max_events => {
            return Err(Error::Integration(format!("{n} events requested, budget is {}", cfg.max_events)))
        }
        Stop::Events(_) => (1.0, f64::INFINITY),
        Stop::Time(t) => (if t < 0.0 { -1.0 } else { 1.0 }, t.abs()),
    };
    let mut traj = Trajectory::default();
    let mut z = [start.x, start.y];
    let mut region = start.region;
    let mut t = 0.0;
    traj.samples.push(Sample { t: 0.0, x: z[0], y: z[1], region });
    let mut dt: f64 = 1e-3;
    let mut steps = 0;
    loop {
        if let Stop::Events(n) = stop {
            if traj.events.len() >= n {
                break;
            }
        } else if t >= t_end {
            break;
        }
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::Integration(format!("step budget of {} exhausted", cfg.max_steps)));
        }
        dt = dt.min(t_end - t);
        let (z1, err) = rk_step(&field, region, z, dir * dt);
        let norm = error_norm(z, z1, err, cfg.tol);
        if !(norm <= 1.0) {
            let factor = if norm.is_finite() { (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            dt *= factor;
            if dt < 1e-14 * (1.0 + t) {
                return Err(Error::Integration(format!("step size underflow at t = {t}")));
            }
            continue;
        }
        let g1 = inside(region, z1, cfg.eta);
        let mut hit: Option<(f64, [f64; 2], f64, usize)> = None;
        for which in 0..2 {
            if g1[which] < 0.0 {
                let (tau, p, res) = locate(&field, region, z, dir * dt, which);
                if hit.is_none_or(|h| tau.abs() < h.0.abs()) {
                    hit = Some((tau, p, res, which));
                }
            }
        }
        match hit {
            Some((tau, mut p, residual, which)) => {
                let line = if which == 0 { SwitchLine::X } else { SwitchLine::Y };
                match line {
                    SwitchLine::X => p[0] = 0.0,
                    SwitchLine::Y => p[1] = cfg.eta,
                }
                t += tau.abs();
                let to = crossing(&field, region, line, p, dir)?;
                traj.events.push(Event { t: dir * t, x: p[0], y: p[1], line, from: region, to, residual });
                if traj.events.len() > cfg.max_events {
                    return Err(Error::Integration(format!("event budget of {} exhausted", cfg.max_events)));
                }
                region = to;
                z = p;
            }
            None => {
                t += dt;
                z = z1;
            }
        }
        if escaped(z) {
            return Err(Error::Integration(format!("orbit left the annulus near ({}, {})", z[0], z[1])));
        }
        traj.samples.push(Sample { t: dir * t, x: z[0], y: z[1], region });
        dt *= (0.9 * norm.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
    }
    Ok(traj)
}
