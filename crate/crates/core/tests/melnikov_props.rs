use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use switchline::algebra::{parse_rational, Coefficient};
use switchline::generators::constants_for;
use switchline::melnikov::{
    assemble, assemble_via, count_zeros, eval_m, melnikov_quadrature, theoretical_bound, Case, PerturbationSpec,
    ScanParams,
};
use switchline::{Error, Rational};

fn etas() -> Vec<Rational> {
    ["1/2", "1", "2"].iter().map(|s| parse_rational(s).unwrap()).collect()
}

fn h_samples(eta: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| -0.5 / eta * k as f64 / (count + 1) as f64).collect()
}

#[test]
fn assembly_matches_line_integral() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for eta in etas() {
        let k = constants_for(&eta).unwrap();
        let eta_f: f64 = eta.to_real();
        for case in Case::ALL {
            for n in 1..=3 {
                let spec = PerturbationSpec::random(&mut rng, eta.clone(), n, case);
                let m = assemble(&spec).unwrap();
                let hs = h_samples(eta_f, 10);
                let want: Vec<f64> = hs.iter().map(|&h| melnikov_quadrature(&spec, h, 1e-13).unwrap()).collect();
                let scale = want.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
                for (&h, &w) in hs.iter().zip(&want) {
                    let got = eval_m(&m, &k, h).unwrap();
                    assert!(
                        (got - w).abs() <= 1e-7 * w.abs().max(1e-3 * scale) + 1e-11,
                        "{case} n={n} eta={eta} h={h}: {got} vs {w}\n{}",
                        spec.to_json()
                    );
                }
            }
        }
    }
}

#[test]
fn smooth_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for eta in etas() {
        let k = constants_for(&eta).unwrap();
        let eta_f: f64 = eta.to_real();
        for n in 1..=4 {
            let spec = PerturbationSpec::random(&mut rng, eta.clone(), n, Case::Smooth);
            let general = assemble_via(&spec, Case::General).unwrap();
            let thm2 = assemble_via(&spec, Case::Thm2).unwrap();
            for h in h_samples(eta_f, 7) {
                let a = eval_m(&general, &k, h).unwrap();
                let b = eval_m(&thm2, &k, h).unwrap();
                assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "n={n} h={h}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn assembly_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for eta in etas() {
        let k = constants_for(&eta).unwrap();
        let eta_f: f64 = eta.to_real();
        for case in Case::ALL {
            let s1 = PerturbationSpec::random(&mut rng, eta.clone(), 3, case);
            let s2 = PerturbationSpec::random(&mut rng, eta.clone(), 3, case);
            let (m1, m2) = (assemble(&s1).unwrap(), assemble(&s2).unwrap());
            let sum = assemble(&s1.add(&s2).unwrap()).unwrap();
            assert_eq!(sum, m1.add(&m2));
            for h in h_samples(eta_f, 5) {
                let a = eval_m(&sum, &k, h).unwrap();
                let b = eval_m(&m1, &k, h).unwrap() + eval_m(&m2, &k, h).unwrap();
                assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
            }
        }
    }
}

#[test]
fn zero_counts_within_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let eta = Rational::from_integer(1.into());
    let k = constants_for(&eta).unwrap();
    let scan = ScanParams { samples: 2000, ..Default::default() };
    for case in Case::ALL {
        for n in 1..=3 {
            for _ in 0..10 {
                let spec = PerturbationSpec::random(&mut rng, eta.clone(), n, case);
                let m = assemble(&spec).unwrap();
                match count_zeros(&m, &k, &scan, theoretical_bound(n, case)) {
                    Ok(r) => assert!(r.within_bound, "{case} n={n}: {} zeros\n{}", r.count, spec.to_json()),
                    Err(Error::PossiblyZero { .. }) => assert!(m.is_zero() || spec.is_zero()),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}
