//! Picard–Fuchs residuals with numerically differentiated generator values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::oval::shifted_energy;
use crate::error::{Error, Result};
use crate::reduction::GeneratorId;
use crate::scalar::Real;

/// Central-difference step.
pub const DEFAULT_STEP: f64 = 1e-5;

/// The eight linear systems `(K₁, K₂)ᵀ = A(h)(K₁', K₂')ᵀ + (0, g(h))ᵀ`.
///
/// Even pairs `(K01, K20)` use `A = [[2t², 0], [t², h]]`, `g = κt²`;
/// odd pairs `(K10, K11)` use `A = [[t², 0], [1, 2h]]`, `g = κt`, where
/// `t² = h + 1/(2η)` and `κ` is [`PfSystem::forcing`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PfSystem {
    I01I20,
    I10I11,
    J01J20,
    J10J11,
    U01U20,
    U10U11,
    V10V11,
    Vt10Vt11,
}

impl PfSystem {
    pub const ALL: [PfSystem; 8] = [
        PfSystem::I01I20,
        PfSystem::I10I11,
        PfSystem::J01J20,
        PfSystem::J10J11,
        PfSystem::U01U20,
        PfSystem::U10U11,
        PfSystem::V10V11,
        PfSystem::Vt10Vt11,
    ];

    pub fn generators(self) -> (GeneratorId, GeneratorId) {
        use GeneratorId::*;
        match self {
            PfSystem::I01I20 => (I01, I20),
            PfSystem::I10I11 => (I10, I11),
            PfSystem::J01J20 => (J01, J20),
            PfSystem::J10J11 => (J10, J11),
            PfSystem::U01U20 => (U01, U20),
            PfSystem::U10U11 => (U10, U11),
            PfSystem::V10V11 => (V10, V11),
            PfSystem::Vt10Vt11 => (Vt10, Vt11),
        }
    }

    pub fn is_odd(self) -> bool {
        self.generators().0.indices().0 == 1
    }

    /// Coefficient `κ` of the inhomogeneous term.
    pub fn forcing(self) -> f64 {
        match self {
            PfSystem::I01I20 => -0.5,
            PfSystem::J01J20 => 0.5,
            PfSystem::I10I11 => -1.0,
            PfSystem::J10J11 => 1.0,
            PfSystem::U01U20 | PfSystem::U10U11 => 0.0,
            PfSystem::V10V11 => -2.0,
            PfSystem::Vt10Vt11 => 2.0,
        }
    }

    pub fn name(self) -> String {
        let (a, b) = self.generators();
        format!("{a},{b}")
    }
}

impl fmt::Display for PfSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for PfSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        PfSystem::ALL
            .into_iter()
            .find(|p| {
                let (a, b) = p.generators();
                format!("{a}{b}").eq_ignore_ascii_case(&key)
            })
            .ok_or_else(|| Error::Parse(format!("unknown Picard-Fuchs system {s:?}")))
    }
}

/// Richardson-extrapolated central difference, `O(step⁴)`. The step is
/// shrunk when `h ± step` would leave the open annulus.
fn derivative<F: Real>(f: &impl Fn(F) -> Result<F>, h: F, lo: F, step: F) -> Result<F> {
    let room = F::lit(0.45) * (h - lo).min(-h);
    let s = step.min(room);
    if !(s > F::zero()) {
        return Err(Error::Domain(format!("no room for a difference step at h = {h}")));
    }
    let half = F::lit(0.5) * s;
    let d1 = (f(h + s)? - f(h - s)?) / (F::lit(2.0) * s);
    let d2 = (f(h + half)? - f(h - half)?) / s;
    Ok((F::lit(4.0) * d2 - d1) / F::lit(3.0))
}

/// Residuals of both equations of `sys` with generator values from `value`
/// and forcing coefficient `forcing` in place of the system's own.
pub fn pf_residual_with<F: Real>(
    sys: PfSystem,
    h: F,
    eta: F,
    step: F,
    forcing: F,
    value: impl Fn(GeneratorId, F) -> Result<F>,
) -> Result<[F; 2]> {
    let t2 = shifted_energy(h, eta)?;
    let lo = -(F::lit(0.5) / eta);
    let (g1, g2) = sys.generators();
    let f1 = |x: F| value(g1, x);
    let f2 = |x: F| value(g2, x);
    let (k1, k2) = (f1(h)?, f2(h)?);
    let (d1, d2) = (derivative(&f1, h, lo, step)?, derivative(&f2, h, lo, step)?);
    let two = F::lit(2.0);
    Ok(if sys.is_odd() {
        [k1 - t2 * d1, k2 - d1 - two * h * d2 - forcing * t2.sqrt()]
    } else {
        [k1 - two * t2 * d1, k2 - t2 * d1 - h * d2 - forcing * t2]
    })
}

/// Residuals of `sys` with generator values from quadrature at tolerance `tol`.
pub fn pf_residual<F: Real>(sys: PfSystem, h: F, eta: F, step: F, tol: F) -> Result<[F; 2]> {
    pf_residual_with(sys, h, eta, step, F::lit(sys.forcing()), |g, x| {
        super::generator_quadrature(g, x, eta, tol)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_systems_at_quarter() {
        for sys in PfSystem::ALL {
            let r = pf_residual(sys, -0.25_f64, 1.0, DEFAULT_STEP, 1e-13).unwrap();
            assert!(r[0].abs() < 1e-6 && r[1].abs() < 1e-6, "{sys}: {r:?}");
        }
    }

    #[test]
    fn closed_form_i01_exact() {
        let eta = 1.0_f64;
        let i01 = |x: f64| -(2.0 / eta).sqrt() * (x + 0.5 / eta).sqrt();
        let r = pf_residual_with(PfSystem::I01I20, -0.25, eta, DEFAULT_STEP, -0.5, |g, x| {
            Ok(if g == GeneratorId::I01 { i01(x) } else { 0.0 })
        })
        .unwrap();
        assert!(r[0].abs() < 1e-9);
    }

    #[test]
    fn forcing_discriminates() {
        let tol = 1e-13;
        let right = pf_residual_with(PfSystem::V10V11, -0.3_f64, 1.0, DEFAULT_STEP, -2.0, |g, x| {
            crate::quadrature::generator_quadrature(g, x, 1.0, tol)
        })
        .unwrap();
        let wrong = pf_residual_with(PfSystem::V10V11, -0.3_f64, 1.0, DEFAULT_STEP, -1.0, |g, x| {
            crate::quadrature::generator_quadrature(g, x, 1.0, tol)
        })
        .unwrap();
        assert!(right[1].abs() < 1e-6);
        assert!(wrong[1].abs() > 1e-2);
    }

    #[test]
    fn parse_names() {
        assert_eq!("I01,I20".parse::<PfSystem>().unwrap(), PfSystem::I01I20);
        assert_eq!("vt10vt11".parse::<PfSystem>().unwrap(), PfSystem::Vt10Vt11);
        assert!("I01,J20".parse::<PfSystem>().is_err());
    }
}
