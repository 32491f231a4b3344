use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rational::{int, one};
use super::{rational_vec_serde, Coefficient, Poly, Rational};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Finite sum `Σ_m c_m(h) · (h + 1/(2η))^{m/2}` with polynomial coefficients.
///
/// `m` is the doubled exponent, so odd `m` carries a square root. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicTail<T> {
    terms: BTreeMap<u32, Poly<T>>,
}

impl<T: Coefficient> Default for AlgebraicTail<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Coefficient> AlgebraicTail<T> {
    pub fn zero() -> Self {
        AlgebraicTail { terms: BTreeMap::new() }
    }

    pub fn term(m: u32, coeff: Poly<T>) -> Self {
        let mut t = Self::zero();
        t.add_term(m, coeff);
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Poly<T>)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn coeff(&self, m: u32) -> Poly<T> {
        self.terms.get(&m).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn add_term(&mut self, m: u32, coeff: Poly<T>) {
        let sum = &self.coeff(m) + &coeff;
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|c| c.scale(k))
    }

    pub fn mul_poly(&self, p: &Poly<T>) -> Self {
        self.map(|c| c * p)
    }

    fn map(&self, f: impl Fn(&Poly<T>) -> Poly<T>) -> Self {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            out.add_term(m, f(c));
        }
        out
    }

    /// Evaluates at `h`; requires `h >= -1/(2η)` up to rounding.
    pub fn eval<F: Real>(&self, h: F, eta: &T) -> Result<F> {
        let base = shifted_base(h, eta.to_real::<F>())?;
        let root = base.sqrt();
        Ok(self
            .terms
            .iter()
            .map(|(&m, c)| {
                let power = if m == 0 { F::one() } else { root.powi(m as i32) };
                c.eval(h) * power
            })
            .sum())
    }
}

/// `h + 1/(2η)`, clamped to zero when it is negative only by rounding.
pub(crate) fn shifted_base<F: Real>(h: F, eta: F) -> Result<F> {
    let center = (F::lit(2.0) * eta).recip();
    let base = h + center;
    if base >= F::zero() {
        return Ok(base);
    }
    let slack = F::lit(8.0) * F::epsilon() * (h.abs() + center.abs());
    if -base <= slack {
        Ok(F::zero())
    } else {
        Err(Error::Domain(format!(
            "h = {h} lies below the annulus center -1/(2η) = {}",
            -center
        )))
    }
}

impl AlgebraicTail<Rational> {
    /// Collapses every term onto `m ∈ {0, 1}` using
    /// `(h + 1/(2η))^{m/2} = (h + 1/(2η))^{⌊m/2⌋} · (h + 1/(2η))^{(m mod 2)/2}`.
    pub fn canonical(&self, eta: &Rational) -> Self {
        let shift = Poly::from_coeffs(vec![(int(2) * eta.clone()).recip(), one()]);
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            out.add_term(m % 2, c * &shift.pow((m / 2) as usize));
        }
        out
    }

    /// Even part `φ(h)` and odd part `ψ(h)` with `tail = φ + √(h+1/(2η)) ψ`.
    pub fn split(&self, eta: &Rational) -> (Poly<Rational>, Poly<Rational>) {
        let c = self.canonical(eta);
        (c.coeff(0), c.coeff(1))
    }

    pub fn to_records(&self) -> Vec<TailRecord> {
        self.terms()
            .map(|(m, c)| TailRecord { m, coeffs: c.coeffs().to_vec() })
            .collect()
    }

    pub fn from_records(records: &[TailRecord]) -> Self {
        let mut t = Self::zero();
        for r in records {
            t.add_term(r.m, Poly::from_coeffs(r.coeffs.clone()));
        }
        t
    }
}

/// JSON form of one tail term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRecord {
    pub m: u32,
    #[serde(with = "rational_vec_serde")]
    pub coeffs: Vec<Rational>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{frac, int};

    type Tail = AlgebraicTail<Rational>;

    #[test]
    fn empty_tail_is_zero() {
        assert_eq!(Tail::zero().eval(-0.3_f64, &int(1)).unwrap(), 0.0);
    }

    #[test]
    fn integer_power_term() {
        let t = Tail::term(2, Poly::constant(int(1)));
        assert_eq!(t.eval(-0.25_f64, &int(1)).unwrap(), 0.25);
    }

    #[test]
    fn vanishing_base() {
        let t = Tail::term(1, Poly::constant(int(1)));
        let eta = frac(2, 3);
        assert_eq!(t.eval(-0.75_f64, &eta).unwrap(), 0.0);
    }

    #[test]
    fn at_center_only_m0_survives() {
        let mut t = Tail::term(0, Poly::from_coeffs(vec![int(3), int(2)]));
        t.add_term(1, Poly::constant(int(7)));
        t.add_term(4, Poly::constant(int(-5)));
        let v = t.eval(-0.5_f64, &int(1)).unwrap();
        assert_eq!(v, 3.0 + 2.0 * -0.5);
    }

    #[test]
    fn below_center_is_domain_error() {
        let t = Tail::term(1, Poly::constant(int(1)));
        assert!(matches!(t.eval(-0.6_f64, &int(1)), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_entries_removed() {
        let mut t = Tail::term(3, Poly::constant(int(2)));
        t.add_term(3, Poly::constant(int(-2)));
        assert!(t.is_zero());
    }

    #[test]
    fn canonical_preserves_value() {
        let eta = frac(3, 2);
        let mut t = Tail::term(5, Poly::from_coeffs(vec![int(1), int(-2)]));
        t.add_term(2, Poly::constant(frac(1, 3)));
        t.add_term(0, Poly::h());
        let c = t.canonical(&eta);
        assert!(c.terms().all(|(m, _)| m < 2));
        for h in [-0.3_f64, -0.2, -0.01] {
            let a = t.eval(h, &eta).unwrap();
            let b = c.eval(h, &eta).unwrap();
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }
}
