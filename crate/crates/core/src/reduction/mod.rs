//! Reduction of Abelian integrals `∫ x^i y^{j-3} dy` over oval arcs to a
//! four-element generator basis.
//!
//! Two identities drive everything. Differentiating `x^i y^{j-2}` along the
//! level curve gives
//!
//! ```text
//! 2(i+j-2) K[i,j] = i K[i-2,j+1] - iη K[i-2,j] + 2 w(i) η^{i+j-2} (h+1/(2η))^{i/2}
//! ```
//!
//! where `w(i)` is the signed boundary weight of the arc (the endpoint
//! values of `x^i y^{j-2}`), and multiplying the first integral by
//! `x^i y^{j-3}` gives the boundary-free
//!
//! ```text
//! h K[i,j] = K[i+2,j-2] - K[i,j-1] + (η/2) K[i,j-2].
//! ```
//!
//! Generator coefficients never depend on `w`; only tails do. This is what
//! lets the same engine serve single sides, the union `Γ = L¹ ∪ L²` (weight
//! zero, no tail) and the upper/lower halves `Υ`, `Υ̃`.

mod engine;
mod expr;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use engine::{apply_symmetry, base_identities, convert_dx, reduce_integral, Reducer};
pub use expr::{BasisRecord, ReducedExpr, ReducedExprJson};

use crate::error::{Error, Result};

/// One of the four arcs `L^k_h` of the oval, traversed clockwise:
/// 1 = A→B (x>0, y>η), 2 = B→C (x>0, y<η), 3 = C→D (x<0, y<η),
/// 4 = D→A (x<0, y>η).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Side {
    One,
    Two,
    Three,
    Four,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::One, Side::Two, Side::Three, Side::Four];

    pub fn index(self) -> u8 {
        match self {
            Side::One => 1,
            Side::Two => 2,
            Side::Three => 3,
            Side::Four => 4,
        }
    }

    /// `true` on the half-plane `x > 0`.
    pub fn right(self) -> bool {
        matches!(self, Side::One | Side::Two)
    }

    /// `true` on the half-plane `y > η`.
    pub fn upper(self) -> bool {
        matches!(self, Side::One | Side::Four)
    }
}

impl TryFrom<u8> for Side {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Side::One),
            2 => Ok(Side::Two),
            3 => Ok(Side::Three),
            4 => Ok(Side::Four),
            _ => Err(Error::InvalidIndex(format!("side must be 1..=4, got {k}"))),
        }
    }
}

impl From<Side> for u8 {
    fn from(s: Side) -> u8 {
        s.index()
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// `∫_{L^side} x^i y^{j-3} dy`; `I` on side 1, `J` on 2, `J̃` on 3, `Ĩ` on 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegralId {
    pub side: Side,
    pub i: u32,
    pub j: i32,
}

impl IntegralId {
    pub fn new(side: Side, i: u32, j: i32) -> Result<Self> {
        if j < -1 {
            return Err(Error::InvalidIndex(format!("j must be >= -1, got {j}")));
        }
        Ok(IntegralId { side, i, j })
    }
}

impl fmt::Display for IntegralId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.side {
            Side::One => "I",
            Side::Two => "J",
            Side::Three => "J~",
            Side::Four => "I~",
        };
        write!(f, "{name}[{},{}]", self.i, self.j)
    }
}

/// Basis integrals. `I*`/`J*` live on sides 1/2, `U*` on `Γ = L¹ ∪ L²`,
/// `V*` on `Υ = L¹ ∪ L⁴` and `Vt*` on `Υ̃ = L² ∪ L³`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorId {
    I01,
    I20,
    I10,
    I11,
    J01,
    J20,
    J10,
    J11,
    U01,
    U20,
    U10,
    U11,
    V10,
    V11,
    Vt10,
    Vt11,
}

impl GeneratorId {
    pub const ALL: [GeneratorId; 16] = [
        GeneratorId::I01,
        GeneratorId::I20,
        GeneratorId::I10,
        GeneratorId::I11,
        GeneratorId::J01,
        GeneratorId::J20,
        GeneratorId::J10,
        GeneratorId::J11,
        GeneratorId::U01,
        GeneratorId::U20,
        GeneratorId::U10,
        GeneratorId::U11,
        GeneratorId::V10,
        GeneratorId::V11,
        GeneratorId::Vt10,
        GeneratorId::Vt11,
    ];

    pub fn name(self) -> &'static str {
        use GeneratorId::*;
        match self {
            I01 => "I01",
            I20 => "I20",
            I10 => "I10",
            I11 => "I11",
            J01 => "J01",
            J20 => "J20",
            J10 => "J10",
            J11 => "J11",
            U01 => "U01",
            U20 => "U20",
            U10 => "U10",
            U11 => "U11",
            V10 => "V10",
            V11 => "V11",
            Vt10 => "Vt10",
            Vt11 => "Vt11",
        }
    }

    /// Index pair `(i, j)` of the integral.
    pub fn indices(self) -> (u32, i32) {
        use GeneratorId::*;
        match self {
            I01 | J01 | U01 => (0, 1),
            I20 | J20 | U20 => (2, 0),
            I10 | J10 | U10 | V10 | Vt10 => (1, 0),
            I11 | J11 | U11 | V11 | Vt11 => (1, 1),
        }
    }

    /// The arc the generator integrates over.
    pub fn arc(self) -> Arc {
        use GeneratorId::*;
        match self {
            I01 | I20 | I10 | I11 => Arc::Side(Side::One),
            J01 | J20 | J10 | J11 => Arc::Side(Side::Two),
            U01 | U20 | U10 | U11 => Arc::Gamma,
            V10 | V11 => Arc::Upsilon,
            Vt10 | Vt11 => Arc::UpsilonTilde,
        }
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorId::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown generator {s:?}")))
    }
}

impl Serialize for GeneratorId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for GeneratorId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A path of integration: a single side or one of the unions used when
/// pieces of the perturbation coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arc {
    Side(Side),
    /// `L¹ ∪ L²` (right half, `x > 0`).
    Gamma,
    /// `L³ ∪ L⁴` (left half).
    GammaTilde,
    /// `L¹ ∪ L⁴` (upper half, `y > η`).
    Upsilon,
    /// `L² ∪ L³` (lower half).
    UpsilonTilde,
}

impl Arc {
    pub fn sides(self) -> &'static [Side] {
        match self {
            Arc::Side(Side::One) => &[Side::One],
            Arc::Side(Side::Two) => &[Side::Two],
            Arc::Side(Side::Three) => &[Side::Three],
            Arc::Side(Side::Four) => &[Side::Four],
            Arc::Gamma => &[Side::One, Side::Two],
            Arc::GammaTilde => &[Side::Three, Side::Four],
            Arc::Upsilon => &[Side::One, Side::Four],
            Arc::UpsilonTilde => &[Side::Two, Side::Three],
        }
    }

    /// `[x^i · ψ]_{start}^{end} / (η^{...} (h+1/(2η))^{i/2})` for `i >= 1`:
    /// the signed count of arc endpoints at `B` (`x = +x_B`) and `D`
    /// (`x = -x_B`), the corners on `x = 0` contributing nothing.
    pub fn boundary_weight(self, i: u32) -> i64 {
        let odd = if i % 2 == 0 { 1 } else { -1 }; // (-1)^i
        self.sides()
            .iter()
            .map(|s| match s {
                Side::One => 1,
                Side::Two => -1,
                Side::Three => odd,
                Side::Four => -odd,
            })
            .sum()
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arc::Side(s) => write!(f, "L{s}"),
            Arc::Gamma => f.write_str("Gamma"),
            Arc::GammaTilde => f.write_str("GammaTilde"),
            Arc::Upsilon => f.write_str("Upsilon"),
            Arc::UpsilonTilde => f.write_str("UpsilonTilde"),
        }
    }
}

impl From<Side> for Arc {
    fn from(s: Side) -> Self {
        Arc::Side(s)
    }
}
