//! Numerical oracle: oval geometry, arc integrals by adaptive quadrature
//! and finite-difference Picard–Fuchs residuals.
//!
//! Nothing here uses the reduction algebra, so it can be used to check it.

mod gauss_kronrod;
mod oval;
mod pf;
mod report;

pub use gauss_kronrod::{integrate, QuadResult};
pub use oval::{hamiltonian, oval_endpoints, theta_interval, ArcParametrization, OvalGeometry, Point};
pub use pf::{pf_residual, pf_residual_with, PfSystem, DEFAULT_STEP};
pub use report::{write_csv, ReportRow};

use crate::error::{Error, Result};
use crate::reduction::{Arc, GeneratorId, Side};
use crate::scalar::Real;
pub(crate) use oval::shifted_energy;
use oval::AngleChart;

/// Default quadrature tolerance (absolute below magnitude 1, relative above).
pub const DEFAULT_TOL: f64 = 1e-10;
/// Interval budget of the adaptive integrator.
pub const MAX_INTERVALS: usize = 4000;

fn over_chart<F: Real>(arc: Arc, h: F, eta: F, tol: F, f: impl Fn(&AngleChart<F>, F) -> F) -> Result<F> {
    if !(tol > F::zero()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let chart = AngleChart::new(h, eta)?;
    if chart.degenerate() {
        return Ok(F::zero());
    }
    let (a, b) = theta_interval::<F>(arc);
    Ok(integrate(|theta| f(&chart, theta), a, b, tol, MAX_INTERVALS)?.value)
}

/// `∫ x^i y^(j−3) dy` along an arc in the flow direction.
pub fn arc_integral_dy<F: Real>(arc: impl Into<Arc>, i: u32, j: i32, h: F, eta: F, tol: F) -> Result<F> {
    over_chart(arc.into(), h, eta, tol, |chart, theta| {
        let p = chart.point(theta);
        p.x.powi(i as i32) * p.y.powi(j - 3) * chart.dy(&p)
    })
}

/// `∫ x^i y^exponent dx` along an arc in the flow direction.
pub fn arc_integral_dx<F: Real>(arc: impl Into<Arc>, i: u32, exponent: i32, h: F, eta: F, tol: F) -> Result<F> {
    if exponent < -3 {
        return Err(Error::InvalidIndex(format!("dx exponent {exponent} below -3")));
    }
    over_chart(arc.into(), h, eta, tol, |chart, theta| {
        let p = chart.point(theta);
        p.x.powi(i as i32) * p.y.powi(exponent) * chart.dx(&p)
    })
}

/// `∫ P dx + Q dy` along an arc, `form(x, y) = (P, Q)`.
pub fn line_integral<F: Real>(arc: impl Into<Arc>, h: F, eta: F, tol: F, form: impl Fn(F, F) -> (F, F)) -> Result<F> {
    over_chart(arc.into(), h, eta, tol, |chart, theta| {
        let p = chart.point(theta);
        let (pp, qq) = form(p.x, p.y);
        pp * chart.dx(&p) + qq * chart.dy(&p)
    })
}

/// Value of a generator integral by quadrature over its arc.
pub fn generator_quadrature<F: Real>(g: GeneratorId, h: F, eta: F, tol: F) -> Result<F> {
    let (i, j) = g.indices();
    arc_integral_dy(g.arc(), i, j, h, eta, tol)
}

/// Residual of the integration-by-parts identity on one side:
/// `∫x^i y^e dx − [x^(i+1) y^e/(i+1)] + e/(i+1) ∫x^(i+1) y^(e−1) dy`,
/// with the bracket taken between the side's corners.
pub fn green_residual<F: Real>(side: Side, i: u32, exponent: i32, h: F, eta: F, tol: F) -> Result<F> {
    let geom = oval_endpoints(h, eta)?;
    let (start, end) = geom.side_endpoints(side);
    let k = F::from_u32(i + 1).expect("small integer");
    let bracket = |p: Point<F>| p.x.powi(i as i32 + 1) * p.y.powi(exponent) / k;
    let boundary = bracket(end) - bracket(start);
    let dx = arc_integral_dx(side, i, exponent, h, eta, tol)?;
    let dy = arc_integral_dy(side, i + 1, exponent + 2, h, eta, tol)?;
    let e = F::from_i32(exponent).expect("small integer");
    Ok(dx - boundary + e / k * dy)
}

impl<F: Real> ArcParametrization<F> {
    /// `∫ x(y)^i y^(j−3) dy` straight over the `y`-range, for cross-checking
    /// the chart-based integrals. Slower: odd `i` leaves square-root
    /// behaviour at the corners on `x = 0`.
    pub fn integrate_dy(&self, i: u32, j: i32, tol: F) -> Result<F> {
        let f = |y: F| self.x_at(y).powi(i as i32) * y.powi(j - 3);
        Ok(integrate(f, self.y_start, self.y_end, tol, 20 * MAX_INTERVALS)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    const TOL: f64 = 1e-12;

    #[test]
    fn i01_quarter() {
        let v = arc_integral_dy(Side::One, 0, 1, -0.25_f64, 1.0, TOL).unwrap();
        assert!((v + FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_arc_is_zero() {
        for side in [Side::One, Side::Two, Side::Three, Side::Four] {
            assert_eq!(arc_integral_dy(side, 3, 2, -0.5_f64, 1.0, TOL).unwrap(), 0.0);
            assert_eq!(arc_integral_dx(side, 1, 0, -0.5_f64, 1.0, TOL).unwrap(), 0.0);
        }
    }

    #[test]
    fn reflected_side() {
        let s2 = arc_integral_dy(Side::Two, 2, 1, -0.25_f64, 1.0, TOL).unwrap();
        let s3 = arc_integral_dy(Side::Three, 2, 1, -0.25_f64, 1.0, TOL).unwrap();
        assert!((s2 + s3).abs() < 1e-12);
        assert!(s2.abs() > 1e-3);
    }

    #[test]
    fn dx_displacement() {
        let v = arc_integral_dx(Side::One, 0, 0, -0.25_f64, 1.0, TOL).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tolerance_refinement_converges() {
        for (i, j) in [(0, 1), (2, 0), (1, 1), (3, 2)] {
            let coarse = arc_integral_dy(Side::Two, i, j, -0.07_f64, 2.0, 1e-6).unwrap();
            let fine = arc_integral_dy(Side::Two, i, j, -0.07_f64, 2.0, 1e-7).unwrap();
            assert!((coarse - fine).abs() < 1e-6 * coarse.abs().max(1.0));
        }
    }

    #[test]
    fn additivity_over_gamma() {
        let h = -0.3_f64;
        let one = arc_integral_dy(Side::One, 2, 3, h, 1.0, TOL).unwrap();
        let two = arc_integral_dy(Side::Two, 2, 3, h, 1.0, TOL).unwrap();
        let both = arc_integral_dy(Arc::Gamma, 2, 3, h, 1.0, TOL).unwrap();
        assert!((one + two - both).abs() < 1e-11);
    }

    #[test]
    fn graph_parametrization_agrees() {
        let geom = oval_endpoints(-0.3_f64, 1.0).unwrap();
        for side in [Side::One, Side::Two, Side::Three, Side::Four] {
            let p = geom.parametrization(side);
            for (i, j) in [(0, 1), (1, 0), (2, 2), (3, -1)] {
                let graph = p.integrate_dy(i, j, 1e-11).unwrap();
                let chart = arc_integral_dy(side, i, j, -0.3, 1.0, TOL).unwrap();
                assert!((graph - chart).abs() < 1e-9, "{side} {i} {j}: {graph} vs {chart}");
            }
        }
    }

    #[test]
    fn green_identity() {
        for side in [Side::One, Side::Two, Side::Three, Side::Four] {
            for i in 0..=4 {
                for e in -3..=2 {
                    let r = green_residual(side, i, e, -0.2_f64, 1.3, TOL).unwrap();
                    assert!(r.abs() < 1e-10, "{side} {i} {e}: {r}");
                }
            }
        }
    }

    #[test]
    fn one_form_matches_dy() {
        let a = line_integral(Side::Four, -0.1_f64, 0.5, TOL, |x, y| (0.0, x * y.powi(-2))).unwrap();
        let b = arc_integral_dy(Side::Four, 1, 1, -0.1, 0.5, TOL).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn near_zero_energy() {
        // Long arcs through large y stay accurate.
        let v = arc_integral_dy(Side::One, 0, 1, -1e-4_f64, 1.0, TOL).unwrap();
        let exact = -(2.0_f64).sqrt() * (-1e-4_f64 + 0.5).sqrt();
        assert!((v - exact).abs() < 1e-11);
    }
}
