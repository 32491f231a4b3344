use switchline::quadrature::{arc_integral_dy, generator_quadrature};
use switchline::algebra::parse_rational;
use switchline::{Arc, GeneratorId, Rational, ReducedExpr, Reducer, Side};
use switchline::algebra::Coefficient;

const SIDES: [Side; 4] = [Side::One, Side::Two, Side::Three, Side::Four];

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn eval_with_oracle(e: &ReducedExpr, h: f64, eta: f64) -> f64 {
    e.eval(h, |g| generator_quadrature(g, h, eta, 1e-13)).unwrap()
}

#[test]
fn reduction_matches_quadrature() {
    for eta_s in ["1/2", "1", "2"] {
        let eta_q = q(eta_s);
        let eta: f64 = eta_q.to_real();
        let mut reducer = Reducer::new(&eta_q).unwrap();
        for k in 1..=5 {
            let h = -0.5 / eta * k as f64 / 6.0;
            for arc in SIDES.map(Arc::Side).into_iter().chain([Arc::Gamma, Arc::Upsilon, Arc::UpsilonTilde]) {
                for j in -1..=6 {
                    for i in 0..=(6 - j) as u32 {
                        let e = reducer.reduce(arc, i, j).unwrap();
                        let got = eval_with_oracle(&e, h, eta);
                        let want = arc_integral_dy(arc, i, j, h, eta, 1e-13).unwrap();
                        let err = (got - want).abs() / want.abs().max(1e-300);
                        assert!(
                            err < 1e-8 || (got - want).abs() < 1e-12,
                            "{arc} [{i},{j}] eta={eta} h={h}: {got} vs {want}"
                        );
                    }
                }
            }
        }
    }
}

fn lifted_degrees(e: &ReducedExpr, p: u32) -> (Vec<(GeneratorId, Option<usize>)>, Option<usize>, Option<usize>) {
    let (basis, tail) = e.numerator_at(p).expect("denominator within bound");
    let (phi, psi) = tail.split(e.eta());
    (basis.into_iter().map(|(g, c)| (g, c.degree())).collect(), phi.degree(), psi.degree())
}

#[test]
fn single_integral_degree_bounds() {
    for eta_s in ["1/2", "1", "3"] {
        let eta = q(eta_s);
        let mut reducer = Reducer::new(&eta).unwrap();
        for n in 3..=10i32 {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let alpha = (n - (3 + sign) / 2) as usize;
            let delta = (n - (3 - sign) / 2) as usize;
            let beta = (n - 2) as usize;
            let phi_max = ((6 * n - 7 - sign) / 4) as usize;
            let psi_max = ((6 * n - 9 + sign) / 4) as usize;
            for side in [Side::One, Side::Two] {
                for i in 0..=(n + 1) as u32 {
                    let j = n - i as i32;
                    let e = reducer.reduce(Arc::Side(side), i, j).unwrap();
                    assert!(e.denom_power() <= (n - 2) as u32);
                    let (basis, phi, psi) = lifted_degrees(&e, (n - 2) as u32);
                    for (g, d) in basis {
                        let bound = match g.indices() {
                            (0, 1) => alpha,
                            (2, 0) | (1, 0) => beta,
                            _ => delta,
                        };
                        assert!(d.unwrap() <= bound, "{side} [{i},{j}] {g}: deg {d:?} > {bound}");
                    }
                    if i % 2 == 0 {
                        assert!(psi.is_none(), "even i with sqrt tail");
                        assert!(phi.is_none_or(|d| d <= phi_max), "[{i},{j}] phi {phi:?} > {phi_max}");
                    } else {
                        assert!(phi.is_none(), "odd i with polynomial tail");
                        assert!(psi.is_none_or(|d| d <= psi_max), "[{i},{j}] psi {psi:?} > {psi_max}");
                    }
                }
            }
        }
    }
}
