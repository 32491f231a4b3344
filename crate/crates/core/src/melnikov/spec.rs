use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{format_rational, parse_rational, Coefficient, Rational};
use crate::error::{Error, Result};
use crate::reduction::Side;
use crate::scalar::Real;

/// Which pieces of the perturbation coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    /// Four independent pieces.
    General,
    /// Pieces 1 = 2 and 3 = 4: one switching line `x = 0`.
    Thm2,
    /// Pieces 1 = 4 and 2 = 3: one switching line `y = η`.
    Thm3,
    /// All four pieces equal.
    Smooth,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::General, Case::Thm2, Case::Thm3, Case::Smooth];

    pub fn name(self) -> &'static str {
        match self {
            Case::General => "general",
            Case::Thm2 => "thm2",
            Case::Thm3 => "thm3",
            Case::Smooth => "smooth",
        }
    }

    /// Pairs of pieces (1-based) that must carry identical tables.
    fn tied(self) -> &'static [(usize, usize)] {
        match self {
            Case::General => &[],
            Case::Thm2 => &[(1, 2), (3, 4)],
            Case::Thm3 => &[(1, 4), (2, 3)],
            Case::Smooth => &[(1, 2), (1, 3), (1, 4)],
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Case::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown case {s:?} (general, thm2, thm3, smooth)")))
    }
}

/// Coefficients of `f^k` and `g^k` in one region, keyed by `(i, j)` for `x^i y^j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Piece {
    pub f: BTreeMap<(u32, u32), Rational>,
    pub g: BTreeMap<(u32, u32), Rational>,
}

impl Piece {
    pub fn is_zero(&self) -> bool {
        self.f.is_empty() && self.g.is_empty()
    }

    fn eval_table<F: Real>(table: &BTreeMap<(u32, u32), Rational>, x: F, y: F) -> F {
        table
            .iter()
            .map(|(&(i, j), c)| c.to_real::<F>() * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }

    pub fn eval_f<F: Real>(&self, x: F, y: F) -> F {
        Self::eval_table(&self.f, x, y)
    }

    pub fn eval_g<F: Real>(&self, x: F, y: F) -> F {
        Self::eval_table(&self.g, x, y)
    }
}

/// Piecewise polynomial perturbation `ε(f^k, g^k)` of degree `n`; piece
/// `k` acts in region `k` (1: `x>0, y>η`; 2: `x>0, y<η`; 3: `x<0, y<η`;
/// 4: `x<0, y>η`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbationSpec {
    pub eta: Rational,
    pub n: u32,
    pub case: Case,
    pub pieces: [Piece; 4],
}

type TermList = Vec<(u32, u32, String)>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    eta: String,
    n: u32,
    case: Case,
    #[serde(default)]
    f: BTreeMap<String, TermList>,
    #[serde(default)]
    g: BTreeMap<String, TermList>,
}

impl PerturbationSpec {
    pub fn zero(eta: Rational, n: u32, case: Case) -> Self {
        PerturbationSpec { eta, n, case, pieces: Default::default() }
    }

    pub fn piece(&self, side: Side) -> &Piece {
        &self.pieces[side.index() as usize - 1]
    }

    /// Adds `c·x^i y^j` to `f^k` for every piece `k` in `pieces`.
    pub fn add_f(&mut self, pieces: &[usize], i: u32, j: u32, c: &Rational) {
        for &k in pieces {
            accumulate(&mut self.pieces[k - 1].f, i, j, c);
        }
    }

    /// Adds `c·x^i y^j` to `g^k` for every piece `k` in `pieces`.
    pub fn add_g(&mut self, pieces: &[usize], i: u32, j: u32, c: &Rational) {
        for &k in pieces {
            accumulate(&mut self.pieces[k - 1].g, i, j, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(Piece::is_zero)
    }

    /// Checks positivity of η, `n >= 1`, degrees and the case's piece ties.
    pub fn validate(&self) -> Result<()> {
        if !self.eta.is_positive() {
            return Err(Error::Spec(format!("eta must be positive, got {}", format_rational(&self.eta))));
        }
        if self.n == 0 {
            return Err(Error::Spec("n must be at least 1".into()));
        }
        for (k, piece) in self.pieces.iter().enumerate() {
            for (name, table) in [("f", &piece.f), ("g", &piece.g)] {
                for &(i, j) in table.keys() {
                    if i + j > self.n {
                        return Err(Error::Spec(format!(
                            "{name}^{}: term x^{i} y^{j} exceeds degree n = {}",
                            k + 1,
                            self.n
                        )));
                    }
                }
            }
        }
        self.check_case(self.case)
    }

    /// Whether the piece tables satisfy the ties of `case`.
    pub fn check_case(&self, case: Case) -> Result<()> {
        for &(a, b) in case.tied() {
            if self.pieces[a - 1] != self.pieces[b - 1] {
                return Err(Error::Spec(format!("case {case} requires pieces {a} and {b} to be identical")));
            }
        }
        Ok(())
    }

    /// Termwise sum; the result keeps `self`'s case and the larger degree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.eta != other.eta {
            return Err(Error::Spec("adding specs with different eta".into()));
        }
        let mut out = self.clone();
        out.n = self.n.max(other.n);
        for k in 0..4 {
            for (&(i, j), c) in &other.pieces[k].f {
                accumulate(&mut out.pieces[k].f, i, j, c);
            }
            for (&(i, j), c) in &other.pieces[k].g {
                accumulate(&mut out.pieces[k].g, i, j, c);
            }
        }
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
        let eta = parse_rational(&file.eta).map_err(|e| Error::Spec(format!("eta: {e}")))?;
        let mut spec = PerturbationSpec::zero(eta, file.n, file.case);
        for (name, tables) in [("f", &file.f), ("g", &file.g)] {
            for (key, terms) in tables {
                let k: usize = key
                    .parse()
                    .ok()
                    .filter(|k| (1..=4).contains(k))
                    .ok_or_else(|| Error::Spec(format!("{name}: piece key {key:?} must be 1..4")))?;
                let table = if name == "f" { &mut spec.pieces[k - 1].f } else { &mut spec.pieces[k - 1].g };
                for (i, j, c) in terms {
                    let c = parse_rational(c).map_err(|e| Error::Spec(format!("{name}^{k} x^{i} y^{j}: {e}")))?;
                    if table.contains_key(&(*i, *j)) {
                        return Err(Error::Spec(format!("{name}^{k}: duplicate term x^{i} y^{j}")));
                    }
                    if !c.is_zero() {
                        table.insert((*i, *j), c);
                    }
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let dump = |pick: fn(&Piece) -> &BTreeMap<(u32, u32), Rational>| {
            let mut out = BTreeMap::new();
            for (k, piece) in self.pieces.iter().enumerate() {
                let table = pick(piece);
                if !table.is_empty() {
                    let terms = table.iter().map(|(&(i, j), c)| (i, j, format_rational(c))).collect();
                    out.insert((k + 1).to_string(), terms);
                }
            }
            out
        };
        let file = SpecFile {
            eta: format_rational(&self.eta),
            n: self.n,
            case: self.case,
            f: dump(|p| &p.f),
            g: dump(|p| &p.g),
        };
        serde_json::to_string_pretty(&file).expect("spec serializes")
    }

    /// Random spec of degree `n` honouring the ties of `case`: each
    /// coefficient is nonzero with probability 1/2 and then a fraction
    /// `p/q` with `|p| <= 5`, `1 <= q <= 4`.
    pub fn random<R: Rng>(rng: &mut R, eta: Rational, n: u32, case: Case) -> Self {
        let mut spec = PerturbationSpec::zero(eta, n, case);
        let groups: &[&[usize]] = match case {
            Case::General => &[&[1], &[2], &[3], &[4]],
            Case::Thm2 => &[&[1, 2], &[3, 4]],
            Case::Thm3 => &[&[1, 4], &[2, 3]],
            Case::Smooth => &[&[1, 2, 3, 4]],
        };
        for group in groups {
            for deg in 0..=n {
                for i in 0..=deg {
                    let j = deg - i;
                    for is_f in [true, false] {
                        if rng.gen_bool(0.5) {
                            let p: i64 = rng.gen_range(-5..=5);
                            let q: i64 = rng.gen_range(1..=4);
                            let c = Rational::new(p.into(), q.into());
                            if is_f {
                                spec.add_f(group, i, j, &c);
                            } else {
                                spec.add_g(group, i, j, &c);
                            }
                        }
                    }
                }
            }
        }
        spec
    }
}

fn accumulate(table: &mut BTreeMap<(u32, u32), Rational>, i: u32, j: u32, c: &Rational) {
    let v = table.get(&(i, j)).cloned().unwrap_or_else(Rational::zero) + c;
    if v.is_zero() {
        table.remove(&(i, j));
    } else {
        table.insert((i, j), v);
    }
}
