use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::Zero;

use super::{formula, GeneratorConstants, Pieces};
use crate::algebra::{Coefficient, Rational};
use crate::error::{Error, Result};
use crate::quadrature::{generator_quadrature, shifted_energy};
use crate::reduction::GeneratorId;

/// Largest accepted cross-sample inconsistency.
pub const CALIBRATION_THRESHOLD: f64 = 1e-8;

const ORACLE_TOL: f64 = 1e-13;

/// Three interior energies at 80%, 50% and 20% of the way from the center
/// to `h = 0`.
pub fn default_samples(eta: &Rational) -> Vec<f64> {
    let center = -0.5 / eta.to_real::<f64>();
    [0.8, 0.5, 0.2].iter().map(|f| center * f).collect()
}

/// Calibrates against quadrature.
pub fn calibrate(eta: &Rational, samples: &[f64]) -> Result<GeneratorConstants> {
    let eta_f = eta.to_real::<f64>();
    calibrate_with(eta, |g, h| generator_quadrature(g, h, eta_f, ORACLE_TOL), samples)
}

/// Calibrates against an arbitrary generator oracle.
///
/// Slopes (`c1, d1, e1, c1_hat, d1_hat`) are the mean of `K10(h)/(h + 1/(2η))`
/// over the samples. The constants `c2, d2, e2` are solved from the
/// requirement that `I20, J20, U20` vanish on the degenerate oval. Every
/// closed form is then compared with the oracle at every sample; the
/// residual is the worst of the slope spreads and these differences
/// (relative for values above 1 in magnitude).
pub fn calibrate_with(
    eta: &Rational,
    oracle: impl Fn(GeneratorId, f64) -> Result<f64>,
    samples: &[f64],
) -> Result<GeneratorConstants> {
    if samples.len() < 3 {
        return Err(Error::CalibrationSamples { need: 3, got: samples.len() });
    }
    if !(*eta > Rational::zero()) {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    let eta_f = eta.to_real::<f64>();
    let mut t2s = Vec::with_capacity(samples.len());
    for &h in samples {
        let t2 = shifted_energy(h, eta_f)?;
        if t2 == 0.0 {
            return Err(Error::Domain(format!("calibration sample {h} is the center")));
        }
        t2s.push(t2);
    }

    let mut residual: f64 = 0.0;
    let mut slope = |g: GeneratorId| -> Result<f64> {
        let mut ratios = Vec::with_capacity(samples.len());
        for (&h, &t2) in samples.iter().zip(&t2s) {
            ratios.push(oracle(g, h)? / t2);
        }
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        residual = residual.max(hi - lo);
        Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
    };
    let mut k = GeneratorConstants {
        eta: eta.clone(),
        c1: slope(GeneratorId::I10)?,
        c2: 0.0,
        d1: slope(GeneratorId::J10)?,
        d2: 0.0,
        e1: slope(GeneratorId::U10)?,
        e2: 0.0,
        c1_hat: slope(GeneratorId::V10)?,
        d1_hat: slope(GeneratorId::Vt10)?,
        calibration_h: samples.to_vec(),
        residual: 0.0,
    };

    // Each closed form is affine in its constant: solve f(0) + c·(f(1) − f(0)) = 0.
    let center = Pieces::new(-0.5 / eta_f, eta_f)?;
    let vanish = |k: &GeneratorConstants, g: GeneratorId, set: fn(&mut GeneratorConstants, f64)| {
        let mut k0 = k.clone();
        set(&mut k0, 0.0);
        let mut k1 = k.clone();
        set(&mut k1, 1.0);
        let (f0, f1) = (formula(g, &k0, &center), formula(g, &k1, &center));
        -f0 / (f1 - f0)
    };
    k.c2 = vanish(&k, GeneratorId::I20, |k, v| k.c2 = v);
    k.d2 = vanish(&k, GeneratorId::J20, |k, v| k.d2 = v);
    k.e2 = vanish(&k, GeneratorId::U20, |k, v| k.e2 = v);

    for &h in samples {
        let p = Pieces::new(h, eta_f)?;
        for g in GeneratorId::ALL {
            let want = oracle(g, h)?;
            let got = formula(g, &k, &p);
            residual = residual.max((got - want).abs() / want.abs().max(1.0));
        }
    }
    k.residual = residual;
    if !(residual < CALIBRATION_THRESHOLD) {
        return Err(Error::Calibration { residual, threshold: CALIBRATION_THRESHOLD });
    }
    Ok(k)
}

/// Quadrature-calibrated constants at the default samples, cached per η.
pub fn constants_for(eta: &Rational) -> Result<GeneratorConstants> {
    static CACHE: OnceLock<Mutex<HashMap<Rational, GeneratorConstants>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(k) = cache.lock().expect("cache lock").get(eta) {
        return Ok(k.clone());
    }
    let k = calibrate(eta, &default_samples(eta))?;
    cache.lock().expect("cache lock").insert(eta.clone(), k.clone());
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;
    use std::f64::consts::PI;

    #[test]
    fn constants_at_unit_eta() {
        let eta = parse_rational("1").unwrap();
        let k = calibrate(&eta, &[-0.4, -0.25, -0.1]).unwrap();
        let c1 = -PI / 4.0 * 2f64.sqrt();
        assert!((k.c1 - c1).abs() < 1e-9);
        assert!((k.d1 - c1).abs() < 1e-9);
        assert!((k.e1 - 2.0 * c1).abs() < 1e-9);
        assert!((k.c1_hat - 2.0 * c1).abs() < 1e-9 && (k.d1_hat - 2.0 * c1).abs() < 1e-9);
        assert!((k.c2 - (1.0 + 0.5f64.ln()) / 2.0).abs() < 1e-12);
        assert!((k.d2 + k.c2).abs() < 1e-12);
        assert!(k.e2.abs() < 1e-12);
        assert!(k.residual < 1e-8);
    }

    #[test]
    fn too_few_samples() {
        let eta = parse_rational("1").unwrap();
        assert_eq!(calibrate(&eta, &[-0.25]).unwrap_err(), Error::CalibrationSamples { need: 3, got: 1 });
    }

    #[test]
    fn bad_oracle_fails() {
        let eta = parse_rational("1").unwrap();
        let r = calibrate_with(&eta, |g, h| generator_quadrature(g, h, 1.0, 1e-13).map(|v| v + h * h), &[-0.4, -0.25, -0.1]);
        assert!(matches!(r, Err(Error::Calibration { .. })));
    }

    #[test]
    fn reproducible() {
        let eta = parse_rational("2").unwrap();
        let a = calibrate(&eta, &[-0.2, -0.15, -0.05]).unwrap();
        let b = calibrate(&eta, &[-0.22, -0.1, -0.01]).unwrap();
        for (x, y) in [(a.c1, b.c1), (a.d1, b.d1), (a.e1, b.e1), (a.c2, b.c2)] {
            assert!((x - y).abs() < 1e-8);
        }
    }
}
