use super::spec::{Case, PerturbationSpec, Piece};
use crate::algebra::{Coefficient, Rational};
use crate::error::{Error, Result};
use crate::generators::{closed_form, GeneratorConstants};
use crate::quadrature::line_integral;
use crate::reduction::{Arc, ReducedExpr, Reducer, Side};
use crate::scalar::Real;

/// `∫_arc y⁻³ (g dx − f dy)` for one piece, in the arc's generator basis.
fn piece_integral(reducer: &mut Reducer, arc: Arc, piece: &Piece) -> Result<ReducedExpr> {
    let mut out = ReducedExpr::zero(reducer.eta());
    for (&(i, j), a) in &piece.f {
        out = out.sub(&reducer.reduce(arc, i, j as i32)?.scale(a));
    }
    for (&(i, j), b) in &piece.g {
        out = out.add(&reducer.convert_dx(arc, i, j as i32 - 3)?.scale(b));
    }
    Ok(out)
}

/// Assembles `M(h)` along the route of the spec's own case.
pub fn assemble(spec: &PerturbationSpec) -> Result<ReducedExpr> {
    spec.validate()?;
    assemble_via(spec, spec.case)
}

/// Assembles `M(h)` along the route of `route`:
///
/// * `General`: all four sides, basis `I*, J*` plus tail;
/// * `Thm2` and `Smooth`: `Γ = L¹ ∪ L²` and its mirror, basis `U*`;
/// * `Thm3`: `Υ = L¹ ∪ L⁴` and `Υ̃ = L² ∪ L³`, basis `V*, Vt*` plus tail.
///
/// The spec's pieces must satisfy the ties of `route`.
pub fn assemble_via(spec: &PerturbationSpec, route: Case) -> Result<ReducedExpr> {
    spec.check_case(route)?;
    let mut reducer = Reducer::new(&spec.eta)?;
    let parts: Vec<(Arc, &Piece)> = match route {
        Case::General => [Side::One, Side::Two, Side::Three, Side::Four]
            .into_iter()
            .map(|s| (Arc::Side(s), spec.piece(s)))
            .collect(),
        Case::Thm2 | Case::Smooth => {
            vec![(Arc::Gamma, spec.piece(Side::One)), (Arc::GammaTilde, spec.piece(Side::Three))]
        }
        Case::Thm3 => vec![(Arc::Upsilon, spec.piece(Side::One)), (Arc::UpsilonTilde, spec.piece(Side::Two))],
    };
    let mut m = ReducedExpr::zero(&spec.eta);
    for (arc, piece) in parts {
        m = m.add(&piece_integral(&mut reducer, arc, piece)?);
    }
    Ok(m)
}

fn check_constants(expr: &ReducedExpr, k: &GeneratorConstants) -> Result<()> {
    if expr.eta() != &k.eta {
        return Err(Error::Domain(format!(
            "constants calibrated for eta = {} used with eta = {}",
            k.eta,
            expr.eta()
        )));
    }
    Ok(())
}

fn check_h<F: Real>(h: F, eta: &Rational) -> Result<()> {
    let lo = -(F::lit(0.5) / eta.to_real::<F>());
    if !(h >= lo && h < F::zero()) {
        return Err(Error::Domain(format!("h = {h} outside the annulus [{lo}, 0)")));
    }
    Ok(())
}

/// `M(h)` from a reduced expression and calibrated closed forms.
pub fn eval_m<F: Real>(expr: &ReducedExpr, k: &GeneratorConstants, h: F) -> Result<F> {
    Ok(eval_m_with_scale(expr, k, h)?.0)
}

/// `M(h)` together with the rounding scale of
/// [`ReducedExpr::eval_with_scale`].
pub fn eval_m_with_scale<F: Real>(expr: &ReducedExpr, k: &GeneratorConstants, h: F) -> Result<(F, F)> {
    check_constants(expr, k)?;
    check_h(h, expr.eta())?;
    expr.eval_with_scale(h, |g| closed_form(g, k, h))
}

/// `M(h) = Σ_k ∫_{L^k} y⁻³ (g^k dx − f^k dy)` by quadrature alone.
pub fn melnikov_quadrature<F: Real>(spec: &PerturbationSpec, h: F, tol: F) -> Result<F> {
    let eta = spec.eta.to_real::<F>();
    check_h(h, &spec.eta)?;
    let mut total = F::zero();
    for side in [Side::One, Side::Two, Side::Three, Side::Four] {
        let piece = spec.piece(side);
        if piece.is_zero() {
            continue;
        }
        total = total
            + line_integral(side, h, eta, tol, |x, y| {
                let w = y.powi(-3);
                (w * piece.eval_g(x, y), -w * piece.eval_f(x, y))
            })?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{frac, int};
    use crate::algebra::Poly;
    use crate::generators::constants_for;
    use crate::reduction::GeneratorId;
    use crate::Tail;

    #[test]
    fn zero_spec_gives_zero() {
        for case in Case::ALL {
            let s = PerturbationSpec::zero(int(1), 2, case);
            assert!(assemble(&s).unwrap().is_zero());
        }
    }

    #[test]
    fn constant_g_on_first_side() {
        let mut s = PerturbationSpec::zero(int(1), 1, Case::General);
        s.add_g(&[1], 0, 0, &int(1));
        let m = assemble(&s).unwrap();
        assert_eq!(m.denom_power(), 0);
        assert_eq!(m.basis().len(), 1);
        assert_eq!(m.coeff(GeneratorId::I10), Poly::constant(int(3)));
        let mut tail = Tail::term(3, Poly::constant(int(2)));
        tail.add_term(1, Poly::constant(int(1)));
        assert_eq!(m.tail().canonical(&int(1)), tail.canonical(&int(1)));

        let k = constants_for(&int(1)).unwrap();
        let h = -0.25;
        let direct = line_integral(Side::One, h, 1.0, 1e-13, |_, y: f64| (y.powi(-3), 0.0)).unwrap();
        assert!((eval_m(&m, &k, h).unwrap() - direct).abs() < 1e-8);
        assert!((melnikov_quadrature(&s, h, 1e-13).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn thm3_even_f_cancels() {
        let mut s = PerturbationSpec::zero(int(2), 3, Case::Thm3);
        for (i, j, c) in [(0, 0, int(1)), (0, 2, frac(-3, 2)), (2, 1, int(5)), (2, 0, frac(1, 3))] {
            s.add_f(&[1, 4], i, j, &c);
            s.add_f(&[2, 3], i, j, &(c * int(2)));
        }
        let m = assemble(&s).unwrap();
        assert!(m.is_zero(), "{m}");
        assert!(melnikov_quadrature(&s, -0.1_f64, 1e-12).unwrap().abs() < 1e-10);
    }

    #[test]
    fn thm3_even_g_boundary_tail() {
        let mut s = PerturbationSpec::zero(int(2), 2, Case::Thm3);
        s.add_g(&[1, 4], 0, 2, &int(1));
        let m = assemble(&s).unwrap();
        assert!(!m.tail().is_zero(), "{m}");
        assert!(m.basis().keys().all(|g| matches!(g, GeneratorId::V11 | GeneratorId::Vt11)));
        let k = constants_for(&int(2)).unwrap();
        for h in [-0.2_f64, -0.1, -0.01] {
            let a = eval_m(&m, &k, h).unwrap();
            let b = melnikov_quadrature(&s, h, 1e-13).unwrap();
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn i01_at_quarter() {
        let k = constants_for(&int(1)).unwrap();
        let m = ReducedExpr::generator(&int(1), GeneratorId::I01);
        let v = eval_m(&m, &k, -0.25).unwrap();
        assert!((v + 0.5_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn eval_domain() {
        let k = constants_for(&int(1)).unwrap();
        let m = ReducedExpr::generator(&int(1), GeneratorId::I01);
        for h in [0.0, 0.1, -0.6] {
            assert!(matches!(eval_m(&m, &k, h), Err(Error::Domain(_))));
        }
        let other = ReducedExpr::generator(&int(2), GeneratorId::I01);
        assert!(matches!(eval_m(&other, &k, -0.1), Err(Error::Domain(_))));
        assert_eq!(eval_m(&ReducedExpr::zero(&int(1)), &k, -0.3).unwrap(), 0.0);
    }

    #[test]
    fn route_must_match_ties() {
        let mut s = PerturbationSpec::zero(int(1), 1, Case::General);
        s.add_f(&[1], 1, 0, &int(1));
        assert!(assemble_via(&s, Case::Thm2).is_err());
    }
}
