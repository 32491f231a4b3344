use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use switchline::generators::constants_for;
use switchline::melnikov::{assemble, eval_m, Case, PerturbationSpec};
use switchline::quadrature::hamiltonian;
use switchline::simulate::{
    default_grid, find_limit_cycles, integrate_orbit, poincare_displacement, PhaseState, SimConfig, Stop,
};
use switchline::Rational;

fn one() -> Rational {
    Rational::from_integer(1.into())
}

fn one_cycle_spec() -> PerturbationSpec {
    let mut spec = PerturbationSpec::zero(one(), 1, Case::General);
    spec.add_f(&[1], 0, 0, &Rational::from_integer(4.into()));
    spec.add_f(&[1], 0, 1, &Rational::from_integer((-3).into()));
    spec
}

#[test]
fn energy_drift_per_revolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for eta_i in [1, 2] {
        let eta = eta_i as f64;
        let spec = PerturbationSpec::zero(Rational::from_integer(eta_i.into()), 1, Case::General);
        let cfg = SimConfig::new(&spec, 0.0);
        for _ in 0..20 {
            let y0 = eta * (1.0 + rng.gen_range(0.01..9.0));
            let h0 = hamiltonian(0.0, y0, eta);
            let traj = integrate_orbit(PhaseState::on_region(0.0, y0, 1).unwrap(), &cfg, &spec, Stop::Events(4)).unwrap();
            let worst = traj.samples.iter().map(|s| (hamiltonian(s.x, s.y, eta) - h0).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-9, "y0 = {y0}: drift {worst:e}");
            assert!(traj.events.iter().all(|e| e.residual < 1e-12));
        }
    }
}

#[test]
fn displacement_sign_follows_melnikov() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for case in [Case::General, Case::Thm2, Case::Thm3] {
        let spec = PerturbationSpec::random(&mut rng, one(), 2, case);
        let m = assemble(&spec).unwrap();
        let k = constants_for(&spec.eta).unwrap();
        let grid = default_grid(1.0, 40);
        let values: Vec<f64> = grid.iter().map(|&y| eval_m(&m, &k, hamiltonian(0.0, y, 1.0)).unwrap()).collect();
        let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let mut checked = 0;
        for (&y, &mv) in grid.iter().zip(&values) {
            if mv.abs() < 0.05 * scale || checked == 20 {
                continue;
            }
            checked += 1;
            for eps in [1e-4, 1e-3] {
                let cfg = SimConfig::new(&spec, eps);
                let d = match poincare_displacement(y, &cfg, &spec) {
                    Ok(d) => d,
                    Err(e) => panic!("{case} y0 = {y}: {e}\n{}", spec.to_json()),
                };
                assert_eq!(d > 0.0, mv > 0.0, "{case} y0 = {y} eps = {eps}: d = {d:e}, M = {mv:e}");
            }
        }
        assert!(checked >= 10);
    }
}

#[test]
fn single_cycle_bifurcates() {
    let spec = one_cycle_spec();
    let cfg = SimConfig::new(&spec, 1e-3);
    let report = find_limit_cycles(&cfg, &spec, &default_grid(1.0, 60)).unwrap();
    assert_eq!(report.cycles.len(), 1, "{report:?}");
    assert_eq!(report.melnikov_zeros.len(), 1);
    assert!((report.melnikov_zeros[0] + 0.375).abs() < 1e-10);
    let m = report.matches[0];
    assert!(m.delta_h < 10.0 * cfg.eps, "{m:?}");
    assert!((report.cycles[0].h + 0.375).abs() < 10.0 * cfg.eps);
}
