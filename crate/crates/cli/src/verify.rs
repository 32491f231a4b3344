use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use switchline::algebra::{rational_serde, Coefficient};
use switchline::generators::{calibrate, closed_form, cross_check_bases, default_samples, printed_form};
use switchline::quadrature::{arc_integral_dy, generator_quadrature, green_residual, pf_residual, PfSystem, ReportRow};
use switchline::{Arc, GeneratorId, Rational, Reducer, Result, Side};

const ORACLE_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Reduction,
    Pf,
    Closedform,
    Bases,
    Green,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Reduction => "reduction",
            Suite::Pf => "pf",
            Suite::Closedform => "closedform",
            Suite::Bases => "bases",
            Suite::Green => "green",
        }
    }

    pub fn default_threshold(self) -> f64 {
        match self {
            Suite::Pf => 1e-6,
            Suite::Green => 1e-10,
            _ => 1e-8,
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Suite::Reduction | Suite::Bases | Suite::Green => 5,
            Suite::Pf => 10,
            Suite::Closedform => 20,
        }
    }
}

/// Outcome of one suite. A row fails when its residual exceeds
/// `threshold · max(1, |reference|)`; `informational` rows never fail.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: &'static str,
    #[serde(with = "rational_serde")]
    pub eta: Rational,
    pub seed: Option<u64>,
    pub threshold: f64,
    pub samples: Vec<f64>,
    pub checked: usize,
    pub max_scaled_residual: f64,
    pub pass: bool,
    pub failures: Vec<ReportRow>,
    pub informational: Vec<ReportRow>,
    pub rows: Vec<ReportRow>,
}

fn scaled(r: &ReportRow) -> f64 {
    r.residual / r.reference.abs().max(1.0)
}

/// Energies strictly inside the annulus: evenly spread, or uniform random
/// when a seed is given.
fn energies(eta: f64, count: usize, seed: Option<u64>) -> Vec<f64> {
    let h0 = -0.5 / eta;
    match seed {
        None => (1..=count).map(|k| h0 * (1.0 - k as f64 / (count + 1) as f64)).collect(),
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut h: Vec<f64> = (0..count).map(|_| h0 * rng.gen_range(0.02..0.98)).collect();
            h.sort_by(f64::total_cmp);
            h
        }
    }
}

pub fn run(
    suite: Suite,
    eta: &Rational,
    seed: Option<u64>,
    samples: Option<usize>,
    threshold: Option<f64>,
) -> Result<VerifyReport> {
    let eta_f: f64 = eta.to_real();
    let hs = energies(eta_f, samples.unwrap_or(suite.default_samples()), seed);
    let threshold = threshold.unwrap_or(suite.default_threshold());
    let (rows, informational) = match suite {
        Suite::Reduction => (reduction_rows(eta, &hs)?, Vec::new()),
        Suite::Pf => (pf_rows(eta_f, &hs)?, Vec::new()),
        Suite::Closedform => closedform_rows(eta, &hs)?,
        Suite::Bases => bases_rows(eta, &hs)?,
        Suite::Green => (green_rows(eta_f, &hs)?, Vec::new()),
    };
    let failures: Vec<ReportRow> = rows.iter().filter(|r| !(scaled(r) <= threshold)).cloned().collect();
    Ok(VerifyReport {
        suite: suite.name(),
        eta: eta.clone(),
        seed,
        threshold,
        samples: hs,
        checked: rows.len(),
        max_scaled_residual: rows.iter().map(scaled).fold(0.0, f64::max),
        pass: failures.is_empty(),
        failures,
        informational,
        rows,
    })
}

/// Every `x^i y^(j−3) dy` with `i + j <= 6`, `j >= −1` on the four sides,
/// reduced and evaluated with quadrature-supplied generators.
fn reduction_rows(eta: &Rational, hs: &[f64]) -> Result<Vec<ReportRow>> {
    let eta_f: f64 = eta.to_real();
    let mut reducer = Reducer::new(eta)?;
    let mut exprs = Vec::new();
    for side in Side::ALL {
        for j in -1..=6 {
            for i in 0..=(6 - j) as u32 {
                exprs.push((side, i, j, reducer.reduce(Arc::Side(side), i, j)?));
            }
        }
    }
    let jobs: Vec<_> = hs.iter().flat_map(|&h| exprs.iter().map(move |e| (h, e))).collect();
    jobs.par_iter()
        .map(|&(h, (side, i, j, e))| {
            let value = e.eval(h, |g| generator_quadrature(g, h, eta_f, ORACLE_TOL))?;
            let reference = arc_integral_dy(*side, *i, *j, h, eta_f, ORACLE_TOL)?;
            Ok(ReportRow::new(h, format!("L{side} x^{i} y^({j}-3) dy"), value, reference))
        })
        .collect()
}

fn pf_rows(eta: f64, hs: &[f64]) -> Result<Vec<ReportRow>> {
    let jobs: Vec<_> = PfSystem::ALL.iter().flat_map(|&s| hs.iter().map(move |&h| (s, h))).collect();
    let rows: Vec<Vec<ReportRow>> = jobs
        .par_iter()
        .map(|&(sys, h)| {
            let r = pf_residual(sys, h, eta, switchline::quadrature::DEFAULT_STEP, ORACLE_TOL)?;
            Ok(vec![
                ReportRow::new(h, format!("{} first", sys.name()), r[0], 0.0),
                ReportRow::new(h, format!("{} second", sys.name()), r[1], 0.0),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

fn closedform_rows(eta: &Rational, hs: &[f64]) -> Result<(Vec<ReportRow>, Vec<ReportRow>)> {
    let eta_f: f64 = eta.to_real();
    let k = calibrate(eta, &default_samples(eta))?;
    let jobs: Vec<_> = GeneratorId::ALL.iter().flat_map(|&g| hs.iter().map(move |&h| (g, h))).collect();
    let pairs: Vec<(ReportRow, Option<ReportRow>)> = jobs
        .par_iter()
        .map(|&(g, h)| {
            let q = generator_quadrature(g, h, eta_f, ORACLE_TOL)?;
            let row = ReportRow::new(h, format!("{g} closed vs quadrature"), closed_form(g, &k, h)?, q);
            let printed = printed_form(g, &k, h)?.map(|p| ReportRow::new(h, format!("{g} printed vs quadrature"), p, q));
            Ok((row, printed))
        })
        .collect::<Result<_>>()?;
    let (rows, printed): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok((rows, printed.into_iter().flatten().collect()))
}

fn bases_rows(eta: &Rational, hs: &[f64]) -> Result<(Vec<ReportRow>, Vec<ReportRow>)> {
    let k = switchline::generators::constants_for(eta)?;
    let mut rows = Vec::new();
    let mut info = Vec::new();
    for &h in hs {
        let report = cross_check_bases(&k, h)?;
        for r in report.rows {
            if r.quantity.contains("printed") {
                info.push(r);
            } else {
                rows.push(r);
            }
        }
    }
    Ok((rows, info))
}

/// Integration by parts `∫x^i y^e dx` against its `dy` form, `i <= 4`,
/// `e ∈ [−3, 2]`, on every side.
fn green_rows(eta: f64, hs: &[f64]) -> Result<Vec<ReportRow>> {
    let mut jobs = Vec::new();
    for &h in hs {
        for side in Side::ALL {
            for i in 0..=4 {
                for e in -3..=2 {
                    jobs.push((h, side, i, e));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|&(h, side, i, e)| {
            let r = green_residual(side, i, e, h, eta, ORACLE_TOL)?;
            Ok(ReportRow::new(h, format!("L{side} x^{i} y^{e} dx"), r, 0.0))
        })
        .collect()
}
