//! Geometry of the level curves `H(x, y) = h` and their four arcs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduction::{Arc, Side};
use crate::scalar::Real;

/// `H(x, y) = y⁻²(x² − y + η/2)`.
pub fn hamiltonian<F: Real>(x: F, y: F, eta: F) -> F {
    (x * x - y + F::lit(0.5) * eta) / (y * y)
}

/// `h + 1/(2η)`, clamped at zero for values that undershoot by roundoff.
pub(crate) fn shifted_energy<F: Real>(h: F, eta: F) -> Result<F> {
    if !(eta > F::zero()) {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    let center = -(F::lit(0.5) / eta);
    let t2 = h - center;
    let slack = F::lit(8.0) * F::epsilon() * center.abs();
    if !(h < F::zero()) || t2 < -slack || !t2.is_finite() {
        return Err(Error::Domain(format!("h = {h} outside the annulus [{center}, 0)")));
    }
    Ok(t2.max(F::zero()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point<F> {
    pub x: F,
    pub y: F,
}

/// Corners of the oval `L_h` on the switching lines.
///
/// `A` and `C` lie on `x = 0` above and below the center, `B` and `D` on
/// `y = η` to the right and left.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OvalGeometry<F> {
    pub h: F,
    pub eta: F,
    pub a: Point<F>,
    pub b: Point<F>,
    pub c: Point<F>,
    pub d: Point<F>,
}

pub fn oval_endpoints<F: Real>(h: F, eta: F) -> Result<OvalGeometry<F>> {
    let t2 = shifted_energy(h, eta)?;
    let two = F::lit(2.0);
    // s = √(2ηh + 1) = √(2η)·t
    let s = (two * eta * t2).sqrt();
    let y_a = (F::one() + s) / (-two * h);
    let y_c = eta / (F::one() + s);
    let x_b = eta * t2.sqrt();
    Ok(OvalGeometry {
        h,
        eta,
        a: Point { x: F::zero(), y: y_a },
        b: Point { x: x_b, y: eta },
        c: Point { x: F::zero(), y: y_c },
        d: Point { x: -x_b, y: eta },
    })
}

impl<F: Real> OvalGeometry<F> {
    pub fn corners(&self) -> [Point<F>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Largest `|H(P) − h|` over the four corners.
    pub fn on_curve_residual(&self) -> F {
        self.corners()
            .iter()
            .map(|p| (hamiltonian(p.x, p.y, self.eta) - self.h).abs())
            .fold(F::zero(), F::max)
    }

    /// Start and end corner of a side in the direction of the flow.
    pub fn side_endpoints(&self, side: Side) -> (Point<F>, Point<F>) {
        match side {
            Side::One => (self.a, self.b),
            Side::Two => (self.b, self.c),
            Side::Three => (self.c, self.d),
            Side::Four => (self.d, self.a),
        }
    }

    pub fn parametrization(&self, side: Side) -> ArcParametrization<F> {
        let (start, end) = self.side_endpoints(side);
        ArcParametrization {
            side,
            h: self.h,
            eta: self.eta,
            y_start: start.y,
            y_end: end.y,
            x_sign: if side.right() { F::one() } else { -F::one() },
        }
    }
}

/// A side written as a graph over `y`: `x(y) = ±√(h y² + y − η/2)`,
/// traversed from `y_start` to `y_end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcParametrization<F> {
    pub side: Side,
    pub h: F,
    pub eta: F,
    pub y_start: F,
    pub y_end: F,
    pub x_sign: F,
}

impl<F: Real> ArcParametrization<F> {
    pub fn y_range(&self) -> (F, F) {
        (self.y_start.min(self.y_end), self.y_start.max(self.y_end))
    }

    pub fn x_at(&self, y: F) -> F {
        let q = self.h * y * y + y - F::lit(0.5) * self.eta;
        self.x_sign * q.max(F::zero()).sqrt()
    }
}

/// Polar-type chart of the oval: with `u = 1/y` every level curve is the
/// circle `u = 1/η − r cos θ`, `x = √(η/2)·r·sin θ / u`, `r = √(2(h + 1/(2η))/η)`.
///
/// Side `k` is `θ ∈ [(k−1)π/2, kπ/2]` in the flow direction. In this chart
/// every integrand of the arc integrals is analytic on the closed interval.
#[derive(Clone, Copy, Debug)]
pub(crate) struct AngleChart<F> {
    eta: F,
    r: F,
    c: F,
    u_min: F,
}

pub(crate) struct ChartPoint<F> {
    pub x: F,
    pub y: F,
    pub u: F,
    pub sin: F,
    pub cos: F,
}

impl<F: Real> AngleChart<F> {
    pub fn new(h: F, eta: F) -> Result<Self> {
        let t2 = shifted_energy(h, eta)?;
        let two = F::lit(2.0);
        let r = (two * t2 / eta).sqrt();
        // 1/η − r = (−2h/η)/(1/η + r), kept free of cancellation as h → 0.
        let u_min = -two * h / (F::one() + eta * r);
        Ok(Self { eta, r, c: (F::lit(0.5) * eta).sqrt(), u_min })
    }

    pub fn degenerate(&self) -> bool {
        self.r == F::zero()
    }

    pub fn point(&self, theta: F) -> ChartPoint<F> {
        let (sin, cos) = theta.sin_cos();
        let half = (F::lit(0.5) * theta).sin();
        let u = if cos > F::zero() {
            self.u_min + F::lit(2.0) * self.r * half * half
        } else {
            self.eta.recip() - self.r * cos
        };
        ChartPoint { x: self.c * self.r * sin / u, y: u.recip(), u, sin, cos }
    }

    /// `dy/dθ` at a chart point.
    pub fn dy(&self, p: &ChartPoint<F>) -> F {
        -self.r * p.sin / (p.u * p.u)
    }

    /// `dx/dθ` at a chart point.
    pub fn dx(&self, p: &ChartPoint<F>) -> F {
        self.c * self.r * (p.cos / self.eta - self.r) / (p.u * p.u)
    }
}

/// θ-interval covered by an arc, in the flow direction.
pub fn theta_interval<F: Real>(arc: Arc) -> (F, F) {
    let q = F::FRAC_PI_2();
    let k = |n: f64| F::lit(n) * q;
    match arc {
        Arc::Side(Side::One) => (k(0.0), k(1.0)),
        Arc::Side(Side::Two) => (k(1.0), k(2.0)),
        Arc::Side(Side::Three) => (k(2.0), k(3.0)),
        Arc::Side(Side::Four) => (k(-1.0), k(0.0)),
        Arc::Gamma => (k(0.0), k(2.0)),
        Arc::GammaTilde => (k(2.0), k(4.0)),
        Arc::Upsilon => (k(-1.0), k(1.0)),
        Arc::UpsilonTilde => (k(1.0), k(3.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners_at_quarter() {
        let g = oval_endpoints(-0.25_f64, 1.0).unwrap();
        assert!((g.a.y - (2.0 + 2f64.sqrt())).abs() < 1e-14);
        assert!((g.c.y - (2.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((g.b.x - 0.5).abs() < 1e-15 && g.b.y == 1.0);
        assert!((g.d.x + 0.5).abs() < 1e-15);
        assert!(g.on_curve_residual() < 1e-12);
    }

    #[test]
    fn degenerate_oval_collapses_to_center() {
        let g = oval_endpoints(-0.5_f64, 1.0).unwrap();
        for p in g.corners() {
            assert_eq!((p.x, p.y), (0.0, 1.0));
        }
    }

    #[test]
    fn shrinking_oval() {
        let near = oval_endpoints(-0.49_f64, 1.0).unwrap();
        assert!(near.a.y - near.c.y < 0.3);
        let mut last = 0.0;
        for k in 1..20 {
            let g = oval_endpoints(-0.5 + 0.025 * k as f64, 1.0).unwrap();
            assert!(g.a.y - g.c.y > last);
            last = g.a.y - g.c.y;
        }
    }

    #[test]
    fn outside_annulus_rejected() {
        assert!(oval_endpoints(-0.6_f64, 1.0).is_err());
        assert!(oval_endpoints(0.0_f64, 1.0).is_err());
        assert!(oval_endpoints(0.1_f64, 1.0).is_err());
        assert!(oval_endpoints(-0.1_f64, -1.0).is_err());
    }

    #[test]
    fn corner_residual_small_across_annulus() {
        for eta in [0.5, 1.0, 2.0] {
            for k in 1..50 {
                let h = -0.5 / eta * (k as f64 / 50.0);
                let g = oval_endpoints(h, eta).unwrap();
                assert!(g.on_curve_residual() < 1e-12, "{eta} {h}");
                assert!(g.c.y < eta && eta < g.a.y && g.b.x > 0.0);
            }
        }
    }

    #[test]
    fn chart_lies_on_curve_and_hits_corners() {
        let (h, eta) = (-0.2_f64, 1.3);
        let chart = AngleChart::new(h, eta).unwrap();
        let g = oval_endpoints(h, eta).unwrap();
        for k in 0..=40 {
            let p = chart.point(k as f64 * std::f64::consts::PI / 20.0);
            assert!((hamiltonian(p.x, p.y, eta) - h).abs() < 1e-13);
        }
        let q = std::f64::consts::FRAC_PI_2;
        let corners = [g.a, g.b, g.c, g.d];
        for (k, c) in corners.iter().enumerate() {
            let p = chart.point(k as f64 * q);
            assert!((p.x - c.x).abs() < 1e-13 && (p.y - c.y).abs() < 1e-13, "corner {k}");
        }
    }

    #[test]
    fn parametrization_matches_curve() {
        let g = oval_endpoints(-0.25_f64, 1.0).unwrap();
        let p = g.parametrization(Side::Three);
        let (lo, hi) = p.y_range();
        assert!(lo < 1.0 && hi == 1.0);
        let y = 0.8;
        let x = p.x_at(y);
        assert!(x < 0.0);
        assert!((hamiltonian(x, y, 1.0) + 0.25).abs() < 1e-14);
    }
}
