use serde::{Deserialize, Serialize};

use super::spec::Case;
use crate::reduction::{GeneratorId, ReducedExpr};

/// Maximum number of zeros of `M` on the annulus: `41n − 23`, `9n − 4`,
/// `9n − 6` and `n` for the four cases.
pub fn theoretical_bound(n: u32, case: Case) -> u64 {
    let n = n as u64;
    match case {
        Case::General => (41 * n).saturating_sub(23),
        Case::Thm2 => (9 * n).saturating_sub(4),
        Case::Thm3 => (9 * n).saturating_sub(6),
        Case::Smooth => n,
    }
}

/// One checked polynomial; a bound of `None` means it must vanish.
///
/// `lemma_bound` is the published table. For `n > 3` it only holds when
/// every monomial degree has the parity of `n`: a monomial of degree `n − 1`
/// brings a coefficient of degree `n − 2` on `h^(n−3)`, one more after
/// lifting to `h^(n−2)`. `bound` allows that (`deg α, deg δ <= n − 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeEntry {
    pub name: String,
    pub degree: Option<usize>,
    pub bound: Option<usize>,
    pub pass: bool,
    pub lemma_bound: Option<usize>,
    pub lemma_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub n: u32,
    pub case: Case,
    /// Power of `h` in the denominator the numerators are lifted to.
    pub denom_power: u32,
    pub denom_ok: bool,
    pub entries: Vec<DegreeEntry>,
    pub pass: bool,
    pub lemma_pass: bool,
}

#[derive(Clone, Copy)]
struct Table {
    p: u32,
    alpha: usize,
    beta: usize,
    gamma: usize,
    delta: usize,
    phi: Option<usize>,
    psi: Option<usize>,
}

impl Table {
    fn relaxed(self, n: u32) -> Table {
        if n <= 3 {
            return self;
        }
        let top = n as usize - 1;
        Table { alpha: self.alpha.max(top), delta: self.delta.max(top), ..self }
    }
}

fn table(n: u32, case: Case) -> Table {
    let n = n as i64;
    if n <= 3 {
        let tail = |phi, psi| match case {
            Case::General | Case::Thm3 => (Some(phi), Some(psi)),
            Case::Thm2 | Case::Smooth => (None, None),
        };
        let (phi, psi) = tail(3, 2);
        return Table { p: 1, alpha: 2, beta: 1, gamma: 1, delta: 2, phi, psi };
    }
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let (phi, psi) = match case {
        Case::General | Case::Thm3 => {
            (Some(((6 * n - 7 - sign) / 4) as usize), Some(((6 * n - 9 + sign) / 4) as usize))
        }
        Case::Thm2 | Case::Smooth => (None, None),
    };
    Table {
        p: (n - 2) as u32,
        alpha: (n - (3 + sign) / 2) as usize,
        beta: (n - 2) as usize,
        gamma: (n - 2) as usize,
        delta: (n - (3 - sign) / 2) as usize,
        phi,
        psi,
    }
}

fn allowed(case: Case) -> &'static [GeneratorId] {
    use GeneratorId::*;
    match case {
        Case::General => &[I01, I20, I10, I11, J01, J20, J10, J11],
        Case::Thm2 | Case::Smooth => &[U01, U20, U10, U11],
        Case::Thm3 => &[V10, V11, Vt10, Vt11],
    }
}

/// Checks the denominator power, the basis and the degree of every
/// coefficient polynomial against the structure tables for `n` and `case`
/// (tables for `n <= 3` use the denominator `h`, larger `n` use
/// `h^(n−2)`; the numerator is lifted to that power first).
pub fn structure_check(expr: &ReducedExpr, n: u32, case: Case) -> StructureReport {
    let lemma = table(n, case);
    let relaxed = lemma.relaxed(n);
    let within = |degree: Option<usize>, bound: Option<usize>| match (degree, bound) {
        (None, _) => true,
        (Some(d), Some(b)) => d <= b,
        (Some(_), None) => false,
    };
    let mut entries = Vec::new();
    let mut push = |name: String, degree: Option<usize>, pick: &dyn Fn(&Table) -> Option<usize>| {
        let (bound, lemma_bound) = (pick(&relaxed), pick(&lemma));
        entries.push(DegreeEntry {
            name,
            degree,
            bound,
            pass: within(degree, bound),
            lemma_bound,
            lemma_pass: within(degree, lemma_bound),
        });
    };
    let lifted = expr.numerator_at(lemma.p);
    let denom_ok = lifted.is_some();
    if let Some((basis, tail)) = lifted {
        for (g, c) in &basis {
            let ok = allowed(case).contains(g);
            let slot = g.indices();
            let pick = move |t: &Table| {
                ok.then_some(match slot {
                    (0, 1) => t.alpha,
                    (2, 0) => t.beta,
                    (1, 0) => t.gamma,
                    _ => t.delta,
                })
            };
            push(format!("coeff[{g}]"), c.degree(), &pick);
        }
        let (phi, psi) = tail.split(expr.eta());
        push("phi".into(), phi.degree(), &|t: &Table| t.phi);
        push("psi".into(), psi.degree(), &|t: &Table| t.psi);
    }
    let pass = denom_ok && entries.iter().all(|e| e.pass);
    let lemma_pass = denom_ok && entries.iter().all(|e| e.lemma_pass);
    StructureReport { n, case, denom_power: lemma.p, denom_ok, entries, pass, lemma_pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;
    use crate::melnikov::{assemble, PerturbationSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bounds() {
        assert_eq!(theoretical_bound(1, Case::General), 18);
        assert_eq!(theoretical_bound(2, Case::Thm2), 14);
        assert_eq!(theoretical_bound(2, Case::Thm3), 12);
        assert_eq!(theoretical_bound(2, Case::Smooth), 2);
        assert_eq!(theoretical_bound(1, Case::Thm3), 3);
    }

    #[test]
    fn zero_expr_passes() {
        let r = structure_check(&ReducedExpr::zero(&int(1)), 4, Case::General);
        assert!(r.pass && r.lemma_pass);
    }

    #[test]
    fn small_n_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for case in Case::ALL {
            for n in 1..=3 {
                for _ in 0..5 {
                    let s = PerturbationSpec::random(&mut rng, int(1), n, case);
                    let r = structure_check(&assemble(&s).unwrap(), n, case);
                    assert!(r.pass && r.lemma_pass, "{r:?}");
                    assert_eq!(r.denom_power, 1);
                }
            }
        }
    }

    #[test]
    fn n4_table_values() {
        let t = table(4, Case::General);
        assert_eq!((t.p, t.alpha, t.beta, t.gamma, t.delta), (2, 2, 2, 2, 3));
        let r = t.relaxed(4);
        assert_eq!((r.alpha, r.delta), (3, 3));
    }

    #[test]
    fn mixed_parity_lift() {
        // Only g¹ = x² at n = 5: M = ½·I10 + h·I11.
        let mut s = PerturbationSpec::zero(int(1), 5, Case::General);
        s.add_g(&[1], 2, 0, &int(1));
        let m = assemble(&s).unwrap();
        let r = structure_check(&m, 5, Case::General);
        assert!(r.pass);
        assert!(!r.lemma_pass);
        let bad: Vec<_> = r.entries.iter().filter(|e| !e.lemma_pass).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].name, "coeff[I11]");
        assert_eq!((bad[0].degree, bad[0].lemma_bound), (Some(4), Some(3)));
    }

    #[test]
    fn same_parity_meets_lemma() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in Case::ALL {
            for n in 4..=6 {
                let mut s = PerturbationSpec::random(&mut rng, int(1), n, case);
                for p in s.pieces.iter_mut() {
                    p.f.retain(|&(i, j), _| (i + j) % 2 == n % 2);
                    p.g.retain(|&(i, j), _| (i + j) % 2 == n % 2);
                }
                let r = structure_check(&assemble(&s).unwrap(), n, case);
                assert!(r.pass && r.lemma_pass, "{r:?}");
            }
        }
    }
}
