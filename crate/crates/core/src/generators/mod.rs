//! Closed forms of the generator integrals and calibration of their free
//! constants against quadrature.

mod calibrate;
mod crosscheck;

pub use calibrate::{calibrate, calibrate_with, constants_for, default_samples, CALIBRATION_THRESHOLD};
pub use crosscheck::{cross_check_bases, BasesReport};

use serde::{Deserialize, Serialize};

use crate::algebra::{rational_serde, Coefficient, Rational};
use crate::error::Result;
use crate::quadrature::shifted_energy;
use crate::reduction::GeneratorId;
use crate::scalar::Real;

/// Integration constants of the closed forms for one value of η.
///
/// `c1, d1` are the slopes of `I10, J10` in `h + 1/(2η)`; `e1, c1_hat,
/// d1_hat` those of `U10, V10, Vt10`. `c2, d2, e2` are the linear-in-`h`
/// constants of `I20, J20, U20`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConstants {
    #[serde(with = "rational_serde")]
    pub eta: Rational,
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
    pub e1: f64,
    pub e2: f64,
    pub c1_hat: f64,
    pub d1_hat: f64,
    pub calibration_h: Vec<f64>,
    pub residual: f64,
}

/// Shared pieces of the closed forms at one `h`.
struct Pieces<F> {
    h: F,
    eta: F,
    t: F,
    t2: F,
    /// `√(2ηh + 1)`
    s: F,
    /// `√|h|`
    root_h: F,
    /// `ln((1 − s)/(1 + s))`
    log_ratio: F,
    /// `arctan((2ηh + ½)/√(−2ηh(2ηh+1)))`, continuous at both ends.
    atan_plus: F,
    /// Same with `2ηh − ½` in the numerator.
    atan_minus: F,
}

impl<F: Real> Pieces<F> {
    fn new(h: F, eta: F) -> Result<Self> {
        let t2 = shifted_energy(h, eta)?;
        let two = F::lit(2.0);
        let half = F::lit(0.5);
        let s2 = two * eta * t2;
        let s = s2.sqrt();
        // 1 − s = −2ηh/(1 + s)
        let log_ratio = (-two * eta * h).ln() - two * s.ln_1p();
        let den = (-two * eta * h * s2).sqrt();
        Ok(Pieces {
            h,
            eta,
            t: t2.sqrt(),
            t2,
            s,
            root_h: (-h).sqrt(),
            log_ratio,
            atan_plus: (two * eta * h + half).atan2(den),
            atan_minus: (two * eta * h - half).atan2(den),
        })
    }
}

fn constants<F: Real>(k: &GeneratorConstants) -> [F; 8] {
    [k.c1, k.c2, k.d1, k.d2, k.e1, k.e2, k.c1_hat, k.d1_hat].map(F::lit)
}

/// Value of a generator through its closed form, `h ∈ [−1/(2η), 0)`.
///
/// Returns exactly 0 at the center `h = −1/(2η)`.
pub fn closed_form<F: Real>(g: GeneratorId, k: &GeneratorConstants, h: F) -> Result<F> {
    let p = Pieces::new(h, k.eta.to_real::<F>())?;
    if p.t2 == F::zero() {
        return Ok(F::zero());
    }
    Ok(formula(g, k, &p))
}

/// The closed form without the exact-zero shortcut at the center.
fn formula<F: Real>(g: GeneratorId, k: &GeneratorConstants, p: &Pieces<F>) -> F {
    use GeneratorId::*;
    let [c1, c2, d1, d2, e1, e2, c1_hat, d1_hat] = constants::<F>(k);
    let (two, half) = (F::lit(2.0), F::lit(0.5));
    let quarter_pi = F::FRAC_PI_4();
    let half_pi = F::FRAC_PI_2();
    let root_2eta = (two * p.eta).sqrt();
    let ln_abs_h = (-p.h).ln();
    match g {
        I01 | J01 => -(two / p.eta).sqrt() * p.t,
        U01 => -two * (two / p.eta).sqrt() * p.t,
        I10 => c1 * p.t2,
        J10 => d1 * p.t2,
        U10 => e1 * p.t2,
        V10 => c1_hat * p.t2,
        Vt10 => d1_hat * p.t2,
        I20 => {
            half * p.h * p.log_ratio + half * p.h * ln_abs_h - p.s / (two * p.eta) - c2 * p.h
                - F::lit(0.25) / p.eta
        }
        J20 => {
            half * p.h * p.log_ratio - half * p.h * ln_abs_h - p.s / (two * p.eta) - d2 * p.h
                + F::lit(0.25) / p.eta
        }
        U20 => p.h * p.log_ratio - p.s / p.eta - e2 * p.h,
        I11 => half * p.root_h * p.atan_plus - p.t + (quarter_pi - c1 * root_2eta) * p.root_h + c1,
        J11 => -half * p.root_h * p.atan_plus + p.t - (quarter_pi + d1 * root_2eta) * p.root_h + d1,
        U11 => -e1 * root_2eta * p.root_h + e1,
        V11 => p.root_h * p.atan_plus - two * p.t + (half_pi - c1_hat * root_2eta) * p.root_h + c1_hat,
        Vt11 => -p.root_h * p.atan_plus + two * p.t - (half_pi + d1_hat * root_2eta) * p.root_h + d1_hat,
    }
}

/// Generators with a commonly quoted closed form that differs from
/// [`closed_form`].
pub const PRINTED_VARIANTS: [GeneratorId; 4] =
    [GeneratorId::U01, GeneratorId::U20, GeneratorId::U11, GeneratorId::Vt11];

/// The commonly quoted closed form for the generators in
/// [`PRINTED_VARIANTS`], `None` for the rest. Kept only for comparison
/// reports; these do not match the integrals (the printed `U01` happens to
/// agree at η = 1/2). Like [`closed_form`], 0 at the center.
pub fn printed_form<F: Real>(g: GeneratorId, k: &GeneratorConstants, h: F) -> Result<Option<F>> {
    use GeneratorId::*;
    if !PRINTED_VARIANTS.contains(&g) {
        return Ok(None);
    }
    let p = Pieces::new(h, k.eta.to_real::<F>())?;
    if p.t2 == F::zero() {
        return Ok(Some(F::zero()));
    }
    let [_, _, _, _, e1, e2, _, d1_hat] = constants::<F>(k);
    let two = F::lit(2.0);
    let root_2eta = (two * p.eta).sqrt();
    let v = match g {
        U01 => -(two / p.eta) * p.t,
        U20 => F::lit(0.5) * p.h * p.log_ratio - p.s / (two * p.eta) - e2 * p.h,
        U11 => (F::FRAC_PI_4() - e1 * root_2eta) * p.root_h + e1,
        Vt11 => {
            -p.root_h * p.atan_minus - two * p.t - (F::FRAC_PI_2() + d1_hat * root_2eta) * p.root_h + d1_hat
        }
        _ => unreachable!(),
    };
    Ok(Some(v))
}
