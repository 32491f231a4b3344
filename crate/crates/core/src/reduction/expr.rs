use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::GeneratorId;
use crate::algebra::{Coefficient, rational_serde, rational_vec_serde, AlgebraicTail, Poly, Rational, TailRecord};
use crate::error::{Error, Result};
use crate::scalar::Real;

type PolyH = Poly<Rational>;
type Tail = AlgebraicTail<Rational>;

/// `[Σ_g c_g(h)·g(h) + φ(h) + √(h+1/(2η))·ψ(h)] / h^p`.
///
/// Kept in normal form: the tail only has `m ∈ {0, 1}` entries, no basis
/// coefficient is zero, and `p` is minimal (the numerator is not divisible
/// by `h` when `p > 0`). Two expressions are therefore equal as functions
/// exactly when they are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedExpr {
    eta: Rational,
    basis: BTreeMap<GeneratorId, PolyH>,
    tail: Tail,
    denom_power: u32,
}

impl ReducedExpr {
    pub fn new(eta: Rational, basis: BTreeMap<GeneratorId, PolyH>, tail: Tail, denom_power: u32) -> Self {
        let mut e = ReducedExpr { eta, basis, tail, denom_power };
        e.normalize();
        e
    }

    pub fn zero(eta: &Rational) -> Self {
        ReducedExpr { eta: eta.clone(), basis: BTreeMap::new(), tail: Tail::zero(), denom_power: 0 }
    }

    pub fn generator(eta: &Rational, g: GeneratorId) -> Self {
        Self::generator_times(eta, g, PolyH::constant(Rational::from_integer(1.into())))
    }

    pub fn generator_times(eta: &Rational, g: GeneratorId, coeff: PolyH) -> Self {
        let mut basis = BTreeMap::new();
        basis.insert(g, coeff);
        Self::new(eta.clone(), basis, Tail::zero(), 0)
    }

    pub fn from_tail(eta: &Rational, tail: Tail) -> Self {
        Self::new(eta.clone(), BTreeMap::new(), tail, 0)
    }

    /// `coeff · (h + 1/(2η))^{m/2}`.
    pub fn tail_term(eta: &Rational, m: u32, coeff: Rational) -> Self {
        Self::from_tail(eta, Tail::term(m, PolyH::constant(coeff)))
    }

    pub fn eta(&self) -> &Rational {
        &self.eta
    }

    pub fn denom_power(&self) -> u32 {
        self.denom_power
    }

    pub fn basis(&self) -> &BTreeMap<GeneratorId, PolyH> {
        &self.basis
    }

    pub fn coeff(&self, g: GeneratorId) -> PolyH {
        self.basis.get(&g).cloned().unwrap_or_else(PolyH::zero)
    }

    /// Tail in canonical form (`m ∈ {0, 1}`).
    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty() && self.tail.is_zero()
    }

    fn check_eta(&self, other: &Self) {
        assert_eq!(self.eta, other.eta, "combining reduced expressions with different η");
    }

    /// Numerator over `h^p` for `p >= denom_power`; `None` if `p` is too small.
    pub fn numerator_at(&self, p: u32) -> Option<(BTreeMap<GeneratorId, PolyH>, Tail)> {
        let k = p.checked_sub(self.denom_power)? as usize;
        let shift = PolyH::monomial(Rational::from_integer(1.into()), k);
        let basis = self.basis.iter().map(|(g, c)| (*g, c * &shift)).collect();
        Some((basis, self.tail.mul_poly(&shift)))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_eta(other);
        let p = self.denom_power.max(other.denom_power);
        let (mut basis, tail_a) = self.numerator_at(p).expect("p >= own power");
        let (other_basis, tail_b) = other.numerator_at(p).expect("p >= own power");
        for (g, c) in other_basis {
            let sum = &basis.get(&g).cloned().unwrap_or_default() + &c;
            basis.insert(g, sum);
        }
        Self::new(self.eta.clone(), basis, tail_a.add(&tail_b), p)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::from_integer(1.into()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        self.mul_poly(&PolyH::constant(k.clone()))
    }

    pub fn mul_poly(&self, p: &PolyH) -> Self {
        let basis = self.basis.iter().map(|(g, c)| (*g, c * p)).collect();
        Self::new(self.eta.clone(), basis, self.tail.mul_poly(p), self.denom_power)
    }

    /// Divides by `h`.
    pub fn div_h(&self) -> Self {
        Self::new(self.eta.clone(), self.basis.clone(), self.tail.clone(), self.denom_power + 1)
    }

    /// Replaces every generator by `map(g)` (a sign and a new label).
    pub fn relabel(&self, map: impl Fn(GeneratorId) -> (GeneratorId, i64)) -> Self {
        let mut out = Self::from_tail(&self.eta, self.tail.clone());
        out.denom_power = self.denom_power;
        let mut basis: BTreeMap<GeneratorId, PolyH> = BTreeMap::new();
        for (g, c) in &self.basis {
            let (ng, sign) = map(*g);
            let c = c.scale(&Rational::from_integer(sign.into()));
            let sum = &basis.get(&ng).cloned().unwrap_or_default() + &c;
            basis.insert(ng, sum);
        }
        Self::new(self.eta.clone(), basis, out.tail, out.denom_power)
    }

    fn normalize(&mut self) {
        self.basis.retain(|_, c| !c.is_zero());
        self.tail = self.tail.canonical(&self.eta);
        while self.denom_power > 0
            && self.basis.values().all(|c| c.divisible_by_h())
            && self.tail.terms().all(|(_, c)| c.divisible_by_h())
        {
            for c in self.basis.values_mut() {
                *c = c.shift_down();
            }
            let mut tail = Tail::zero();
            for (m, c) in self.tail.terms() {
                tail.add_term(m, c.shift_down());
            }
            self.tail = tail;
            self.denom_power -= 1;
        }
        if self.is_zero() {
            self.denom_power = 0;
        }
    }

    /// Evaluates with generator values supplied by `generator`.
    pub fn eval<F: Real>(&self, h: F, mut generator: impl FnMut(GeneratorId) -> Result<F>) -> Result<F> {
        if self.denom_power > 0 && h == F::zero() {
            return Err(Error::Domain("h = 0 with a nonzero h-power denominator".into()));
        }
        let mut num = self.tail.eval(h, &self.eta)?;
        for (g, c) in &self.basis {
            num = num + c.eval(h) * generator(*g)?;
        }
        Ok(num / h.powi(self.denom_power as i32))
    }

    /// Like [`eval`](Self::eval), also returning `Σ|term|/|h|^p` with each
    /// coefficient polynomial bounded by its absolute-valued coefficients
    /// and generator values floored at 1. `ε` times this scale bounds the
    /// rounding error of the value.
    pub fn eval_with_scale<F: Real>(
        &self,
        h: F,
        mut generator: impl FnMut(GeneratorId) -> Result<F>,
    ) -> Result<(F, F)> {
        if self.denom_power > 0 && h == F::zero() {
            return Err(Error::Domain("h = 0 with a nonzero h-power denominator".into()));
        }
        let abs_poly = |c: &PolyH| -> F {
            let a = PolyH::from_coeffs(c.coeffs().iter().map(|x| x.abs()).collect());
            a.eval(h.abs())
        };
        let mut num = self.tail.eval(h, &self.eta)?;
        let root = (h + self.eta.to_real::<F>().recip() * F::lit(0.5)).max(F::zero()).sqrt();
        let mut scale = self.tail.terms().map(|(m, c)| abs_poly(c) * root.powi(m as i32)).sum::<F>();
        for (g, c) in &self.basis {
            let v = generator(*g)?;
            num = num + c.eval(h) * v;
            scale = scale + abs_poly(c) * v.abs().max(F::one());
        }
        let d = h.powi(self.denom_power as i32);
        Ok((num / d, scale / d.abs()))
    }

    pub fn to_json(&self) -> ReducedExprJson {
        ReducedExprJson {
            eta: self.eta.clone(),
            denom_power: self.denom_power,
            basis: self
                .basis
                .iter()
                .map(|(g, c)| BasisRecord { gen: *g, coeffs: c.coeffs().to_vec() })
                .collect(),
            tail: self.tail.to_records(),
        }
    }

    pub fn from_json(j: &ReducedExprJson) -> Result<Self> {
        if !(j.eta > Rational::zero()) {
            return Err(Error::Parse("eta must be positive".into()));
        }
        let mut basis: BTreeMap<GeneratorId, PolyH> = BTreeMap::new();
        for r in &j.basis {
            let c = &basis.get(&r.gen).cloned().unwrap_or_default() + &PolyH::from_coeffs(r.coeffs.clone());
            basis.insert(r.gen, c);
        }
        Ok(Self::new(j.eta.clone(), basis, Tail::from_records(&j.tail), j.denom_power))
    }
}

impl fmt::Display for ReducedExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.basis.iter().map(|(g, c)| format!("[{c}]·{g}")).collect();
        let (phi, psi) = (self.tail.coeff(0), self.tail.coeff(1));
        if !phi.is_zero() {
            parts.push(format!("[{phi}]"));
        }
        if !psi.is_zero() {
            parts.push(format!("[{psi}]·√(h+1/(2η))"));
        }
        let body = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        match self.denom_power {
            0 => write!(f, "{body}"),
            1 => write!(f, "({body}) / h"),
            p => write!(f, "({body}) / h^{p}"),
        }
    }
}

/// JSON schema: `{eta, denom_power, basis: [{gen, coeffs}], tail: [{m, coeffs}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedExprJson {
    #[serde(with = "rational_serde")]
    pub eta: Rational,
    pub denom_power: u32,
    pub basis: Vec<BasisRecord>,
    pub tail: Vec<TailRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisRecord {
    pub gen: GeneratorId,
    #[serde(with = "rational_vec_serde")]
    pub coeffs: Vec<Rational>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn denominator_cleared_when_divisible() {
        let eta = q("1");
        let e = ReducedExpr::generator_times(&eta, GeneratorId::I01, PolyH::h()).div_h();
        assert_eq!(e, ReducedExpr::generator(&eta, GeneratorId::I01));
        assert_eq!(e.denom_power(), 0);
    }

    #[test]
    fn add_lifts_denominators() {
        let eta = q("2");
        let a = ReducedExpr::generator(&eta, GeneratorId::I01).div_h();
        let b = ReducedExpr::generator(&eta, GeneratorId::I20);
        let s = a.add(&b);
        assert_eq!(s.denom_power(), 1);
        assert_eq!(s.coeff(GeneratorId::I20), PolyH::h());
        let v = s.eval(-0.1_f64, |g| Ok(if g == GeneratorId::I01 { 2.0 } else { 3.0 })).unwrap();
        assert!((v - (2.0 / -0.1 + 3.0)).abs() < 1e-14);
    }

    #[test]
    fn cancellation_gives_canonical_zero() {
        let eta = q("1/2");
        let a = ReducedExpr::tail_term(&eta, 3, q("2/3")).div_h();
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.sub(&a), ReducedExpr::zero(&eta));
    }

    #[test]
    fn tail_is_canonicalized() {
        let eta = q("1");
        // (h + 1/2)^1 == h + 1/2
        let a = ReducedExpr::tail_term(&eta, 2, q("1"));
        let b = ReducedExpr::from_tail(&eta, Tail::term(0, PolyH::from_coeffs(vec![q("1/2"), q("1")])));
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip() {
        let eta = q("3/2");
        let e = ReducedExpr::generator_times(&eta, GeneratorId::J11, PolyH::from_coeffs(vec![q("1/3"), q("-2")]))
            .add(&ReducedExpr::tail_term(&eta, 1, q("5/7")))
            .div_h();
        let s = serde_json::to_string(&e.to_json()).unwrap();
        let back: ReducedExprJson = serde_json::from_str(&s).unwrap();
        assert_eq!(ReducedExpr::from_json(&back).unwrap(), e);
        assert!(s.contains("\"gen\":\"J11\""));
    }

    #[test]
    fn zero_division_rejected() {
        let eta = q("1");
        let e = ReducedExpr::generator(&eta, GeneratorId::I01).div_h();
        assert!(e.eval(0.0_f64, |_| Ok(1.0)).is_err());
    }
}
