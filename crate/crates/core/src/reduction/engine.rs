use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::{Arc, GeneratorId, IntegralId, ReducedExpr, Side};
use crate::algebra::{Poly, Rational};
use crate::algebra::rational::{frac, int, pow_int};
use crate::error::{Error, Result};

/// Arc families on which the recurrences are run directly. Sides 3, 4 and
/// `Γ̃` are obtained from these by the reflection `x -> -x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Family {
    L1,
    L2,
    Gamma,
    Upsilon,
    UpsilonTilde,
}

#[derive(Clone, Copy)]
enum Slot {
    E01,
    E20,
    O10,
    O11,
}

impl Family {
    fn arc(self) -> Arc {
        match self {
            Family::L1 => Arc::Side(Side::One),
            Family::L2 => Arc::Side(Side::Two),
            Family::Gamma => Arc::Gamma,
            Family::Upsilon => Arc::Upsilon,
            Family::UpsilonTilde => Arc::UpsilonTilde,
        }
    }

    fn generator(self, slot: Slot) -> GeneratorId {
        use GeneratorId::*;
        match (self, slot) {
            (Family::L1, Slot::E01) => I01,
            (Family::L1, Slot::E20) => I20,
            (Family::L1, Slot::O10) => I10,
            (Family::L1, Slot::O11) => I11,
            (Family::L2, Slot::E01) => J01,
            (Family::L2, Slot::E20) => J20,
            (Family::L2, Slot::O10) => J10,
            (Family::L2, Slot::O11) => J11,
            (Family::Gamma, Slot::E01) => U01,
            (Family::Gamma, Slot::E20) => U20,
            (Family::Gamma, Slot::O10) => U10,
            (Family::Gamma, Slot::O11) => U11,
            (Family::Upsilon, Slot::O10) => V10,
            (Family::Upsilon, Slot::O11) => V11,
            (Family::UpsilonTilde, Slot::O10) => Vt10,
            (Family::UpsilonTilde, Slot::O11) => Vt11,
            (f, _) => unreachable!("{f:?} has no even-index generators"),
        }
    }

    /// Arcs symmetric under `x -> -x` carry no even-`i` integrals.
    fn even_vanishes(self) -> bool {
        matches!(self, Family::Upsilon | Family::UpsilonTilde)
    }
}

/// `(-1)^{i+1}`.
fn reflection_sign(i: u32) -> i64 {
    if i % 2 == 0 {
        -1
    } else {
        1
    }
}

/// Memoizing reducer for one value of η.
pub struct Reducer {
    eta: Rational,
    memo: HashMap<(Family, u32, i32), ReducedExpr>,
}

impl Reducer {
    pub fn new(eta: &Rational) -> Result<Self> {
        if !(*eta > Rational::zero()) {
            return Err(Error::Domain(format!("η must be positive, got {eta}")));
        }
        Ok(Reducer { eta: eta.clone(), memo: HashMap::new() })
    }

    pub fn eta(&self) -> &Rational {
        &self.eta
    }

    /// `∫_arc x^i y^{j-3} dy` in the generator basis of the arc.
    pub fn reduce(&mut self, arc: Arc, i: u32, j: i32) -> Result<ReducedExpr> {
        if j < -1 {
            return Err(Error::InvalidIndex(format!("j must be >= -1, got {j}")));
        }
        let reflected = |family, reducer: &mut Reducer| -> Result<ReducedExpr> {
            Ok(reducer.family(family, i, j)?.scale(&int(reflection_sign(i))))
        };
        match arc {
            Arc::Side(Side::One) => self.family(Family::L1, i, j),
            Arc::Side(Side::Two) => self.family(Family::L2, i, j),
            Arc::Side(Side::Three) => reflected(Family::L2, self),
            Arc::Side(Side::Four) => reflected(Family::L1, self),
            Arc::Gamma => self.family(Family::Gamma, i, j),
            Arc::GammaTilde => reflected(Family::Gamma, self),
            Arc::Upsilon => self.family(Family::Upsilon, i, j),
            Arc::UpsilonTilde => self.family(Family::UpsilonTilde, i, j),
        }
    }

    /// `∫_arc x^i y^exponent dx` through the exact differential
    /// `d(x^{i+1} y^e) = (i+1) x^i y^e dx + e x^{i+1} y^{e-1} dy`:
    ///
    /// `∫ x^i y^e dx = -(e/(i+1)) ∫ x^{i+1} y^{e-1} dy + [x^{i+1} y^e]/(i+1)`.
    ///
    /// The identity holds for every integer exponent since `y > 0` on the
    /// oval; the reduction side needs `exponent >= -3`.
    pub fn convert_dx(&mut self, arc: Arc, i: u32, exponent: i32) -> Result<ReducedExpr> {
        if exponent < -3 {
            return Err(Error::InvalidIndex(format!("exponent must be >= -3, got {exponent}")));
        }
        let eta = self.eta.clone();
        let area = self
            .reduce(arc, i + 1, exponent + 2)?
            .scale(&-frac(exponent as i64, i as i64 + 1));
        let w = arc.boundary_weight(i + 1);
        let segment = if w == 0 {
            ReducedExpr::zero(&eta)
        } else {
            let c = int(w) * pow_int(&eta, i as i64 + 1 + exponent as i64) * frac(1, i as i64 + 1);
            ReducedExpr::tail_term(&eta, i + 1, c)
        };
        Ok(area.add(&segment))
    }

    fn family(&mut self, fam: Family, i: u32, j: i32) -> Result<ReducedExpr> {
        if fam.even_vanishes() && i % 2 == 0 {
            return Ok(ReducedExpr::zero(&self.eta));
        }
        if let Some(e) = self.memo.get(&(fam, i, j)) {
            return Ok(e.clone());
        }
        let e = self.derive(fam, i, j)?;
        self.memo.insert((fam, i, j), e.clone());
        Ok(e)
    }

    fn derive(&mut self, fam: Family, i: u32, j: i32) -> Result<ReducedExpr> {
        let eta = self.eta.clone();
        let gen = |slot| ReducedExpr::generator(&eta, fam.generator(slot));
        let h = Poly::h();
        let w = fam.arc().boundary_weight(i);
        let e = match (i, j) {
            (0, 1) => gen(Slot::E01),
            (2, 0) => gen(Slot::E20),
            (1, 0) => gen(Slot::O10),
            (1, 1) => gen(Slot::O11),
            // The differential identity at (i+2, j) with i+j = 0 has a vanishing
            // left side and solves for K[i,j]:
            // K[i,j] = η⁻¹ K[i,j+1] + 2w/((i+2)η) (h+1/(2η))^{(i+2)/2}.
            (0, 0) | (1, -1) => {
                let upper = self.family(fam, i, j + 1)?.scale(&eta.recip());
                let c = frac(2 * w, i as i64 + 2) * eta.recip();
                upper.add(&ReducedExpr::tail_term(&eta, i + 2, c))
            }
            // Elimination of K[0,-1] between the two identities.
            (2, -1) => {
                let coeff = Poly::from_coeffs(vec![eta.recip() * frac(1, 3), frac(2, 3)]);
                ReducedExpr::generator_times(&eta, fam.generator(Slot::E01), coeff)
            }
            // h K[0,1] = K[2,-1] - K[0,0] + (η/2) K[0,-1]
            (0, -1) => {
                let k01 = gen(Slot::E01).mul_poly(&h);
                let k2m1 = self.family(fam, 2, -1)?;
                let k00 = self.family(fam, 0, 0)?;
                k01.sub(&k2m1).add(&k00).scale(&(int(2) * eta.recip()))
            }
            // h K[1,1] = K[3,-1] - K[1,0] + (η/2) K[1,-1]
            (3, -1) => {
                let k1m1 = self.family(fam, 1, -1)?;
                gen(Slot::O11)
                    .mul_poly(&h)
                    .add(&gen(Slot::O10))
                    .sub(&k1m1.scale(&(eta.clone() * frac(1, 2))))
            }
            (i, j) if i >= 2 => {
                let d = i as i64 + j as i64 - 2;
                debug_assert!(d >= 1);
                let a = self.family(fam, i - 2, j + 1)?.scale(&int(i as i64));
                let b = self.family(fam, i - 2, j)?.scale(&(int(i as i64) * eta.clone()));
                let mut out = a.sub(&b);
                if w != 0 {
                    let c = int(2 * w) * pow_int(&eta, d);
                    out = out.add(&ReducedExpr::tail_term(&eta, i, c));
                }
                out.scale(&frac(1, 2 * d))
            }
            (i, j) => {
                debug_assert!(i <= 1 && j >= 2);
                let a = self.family(fam, i + 2, j - 2)?;
                let b = self.family(fam, i, j - 1)?;
                let c = self.family(fam, i, j - 2)?.scale(&(eta.clone() * frac(1, 2)));
                a.sub(&b).add(&c).div_h()
            }
        };
        Ok(e)
    }
}

/// Reduces a single integral with a fresh memo table.
pub fn reduce_integral(id: IntegralId, eta: &Rational) -> Result<ReducedExpr> {
    Reducer::new(eta)?.reduce(Arc::Side(id.side), id.i, id.j)
}

/// `Ĩ[i,j] = (-1)^{i+1} I[i,j]` and `J̃[i,j] = (-1)^{i+1} J[i,j]`.
///
/// Maps side 4 to side 1 and side 3 to side 2; sides 1 and 2 are returned
/// unchanged with sign `+1`.
pub fn apply_symmetry(id: IntegralId) -> (IntegralId, i64) {
    let side = match id.side {
        Side::Three => Side::Two,
        Side::Four => Side::One,
        s => return (IntegralId { side: s, ..id }, 1),
    };
    (IntegralId { side, ..id }, reflection_sign(id.i))
}

/// `∫_{L^side} x^i y^exponent dx` reduced to the generator basis.
pub fn convert_dx(i: u32, exponent: i32, side: Side, eta: &Rational) -> Result<ReducedExpr> {
    Reducer::new(eta)?.convert_dx(Arc::Side(side), i, exponent)
}

/// The low-order identities every reduction bottoms out in, for sides 1
/// and 2.
pub fn base_identities(eta: &Rational) -> Result<BTreeMap<IntegralId, ReducedExpr>> {
    const BASE: [(u32, i32); 10] =
        [(0, 0), (1, -1), (0, 2), (3, -1), (2, -1), (0, 3), (1, 2), (2, 1), (3, 0), (4, -1)];
    let mut reducer = Reducer::new(eta)?;
    let mut out = BTreeMap::new();
    for side in [Side::One, Side::Two] {
        for (i, j) in BASE {
            out.insert(IntegralId { side, i, j }, reducer.reduce(Arc::Side(side), i, j)?);
        }
    }
    Ok(out)
}
