use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assemble::eval_m_with_scale;
use crate::algebra::Coefficient;
use crate::error::{Error, Result};
use crate::generators::GeneratorConstants;
use crate::reduction::ReducedExpr;

/// Sampling parameters of the zero scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub samples: usize,
    /// Bisection stops once the bracket is narrower than this.
    pub refine_tol: f64,
    /// Distance kept from both ends of the annulus, relative to its width.
    pub endpoint_margin: f64,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams { samples: 10_000, refine_tol: 1e-12, endpoint_margin: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub h: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub zeros: Vec<ZeroRecord>,
    pub count: usize,
    pub bound: u64,
    pub within_bound: bool,
    pub scan: ScanParams,
    /// `(h, M(h))` at every grid point.
    #[serde(skip)]
    pub samples: Vec<(f64, f64)>,
}

impl ZeroReport {
    /// Writes the scan samples as CSV with header `h,M`.
    pub fn write_samples_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["h", "M"]).map_err(|e| Error::Io(e.to_string()))?;
        for (h, m) in &self.samples {
            w.serialize((h, m)).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Grid on the annulus with spacing proportional to the square root of
/// the distance to the nearer end.
pub fn scan_grid(eta: f64, scan: &ScanParams) -> Vec<f64> {
    let width = 0.5 / eta;
    let lo = -width + scan.endpoint_margin * width;
    let hi = -scan.endpoint_margin * width;
    let n = scan.samples.max(2);
    (0..n)
        .map(|k| {
            let tau = k as f64 / (n - 1) as f64;
            let s = 0.5 * (1.0 - (std::f64::consts::PI * tau).cos());
            (lo + (hi - lo) * s).clamp(lo, hi)
        })
        .collect()
}

/// Sign of `M` when it clears 64 ulps of its rounding scale, else 0.
fn certain_sign(value: f64, scale: f64) -> i8 {
    if value.abs() <= 64.0 * f64::EPSILON * scale {
        0
    } else if value > 0.0 {
        1
    } else {
        -1
    }
}

/// Counts simple zeros of `M` on the annulus by sign changes on
/// [`scan_grid`], then bisects each bracket. Samples whose sign is lost in
/// rounding are skipped, so a bracket spans from the last sample of one
/// certain sign to the first of the other.
pub fn count_zeros(expr: &ReducedExpr, k: &GeneratorConstants, scan: &ScanParams, bound: u64) -> Result<ZeroReport> {
    let eta = expr.eta().to_real::<f64>();
    let grid = scan_grid(eta, scan);
    let evals: Vec<(f64, f64)> =
        grid.par_iter().map(|&h| eval_m_with_scale(expr, k, h)).collect::<Result<Vec<_>>>()?;
    let max_abs = evals.iter().map(|e| e.0.abs()).fold(0.0, f64::max);
    if max_abs < 1e-13 {
        return Err(Error::PossiblyZero { max_abs });
    }
    let m = |h: f64| eval_m_with_scale(expr, k, h);
    let mut zeros = Vec::new();
    let mut last: Option<(f64, i8)> = None;
    for (&h, &(v, scale)) in grid.iter().zip(&evals) {
        let s = certain_sign(v, scale);
        if s == 0 {
            continue;
        }
        if let Some((h_prev, s_prev)) = last {
            if s != s_prev {
                let (mut a, mut b) = (h_prev, h);
                while b - a > scan.refine_tol {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b {
                        break;
                    }
                    let (vm, _) = m(mid)?;
                    if vm == 0.0 {
                        a = mid;
                        b = mid;
                        break;
                    }
                    if (vm > 0.0) == (s_prev > 0) {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                zeros.push(ZeroRecord { bracket_lo: h_prev, bracket_hi: h, h: 0.5 * (a + b) });
            }
        }
        last = Some((h, s));
    }
    let count = zeros.len();
    Ok(ZeroReport {
        zeros,
        count,
        bound,
        within_bound: count as u64 <= bound,
        scan: *scan,
        samples: grid.into_iter().zip(evals.into_iter().map(|e| e.0)).collect(),
    })
}
