mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use switchline::algebra::{format_rational, parse_rational, Coefficient};
use switchline::generators::{calibrate, constants_for, default_samples};
use switchline::melnikov::{
    assemble, count_zeros, eval_m, structure_check, theoretical_bound, Case, PerturbationSpec, ScanParams,
    StructureReport,
};
use switchline::reduction::ReducedExprJson;
use switchline::simulate::{default_grid, find_limit_cycles, integrate_orbit, PhaseState, SimConfig, Stop};
use switchline::{Arc, Error, Rational, Reducer, Side};

#[derive(Parser, Debug)]
#[command(name = "switchline", version, about = "Melnikov functions and limit cycles of a quadratic global center with two switching lines")]
struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Pass threshold of verification suites (rational or decimal).
    #[arg(long, global = true, env = "SWITCHLINE_TOL")]
    tol: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce ∫ x^i y^(j-3) dy over an arc to the generator basis.
    Reduce {
        /// 1-4, or gamma, gamma~, upsilon, upsilon~ for the half-ovals.
        #[arg(long)]
        side: String,
        #[arg(long)]
        i: u32,
        #[arg(long, allow_hyphen_values = true)]
        j: i32,
        #[arg(long)]
        eta: String,
    },
    /// Assemble M(h) of a perturbation spec and check its degree structure.
    Assemble {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        eta: Option<String>,
    },
    /// Evaluate M(h).
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long)]
        eta: Option<String>,
    },
    /// Count zeros of M on the period annulus.
    Zeros {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        /// Also write the (h, M) scan samples as CSV.
        #[arg(long)]
        samples_csv: Option<PathBuf>,
        #[arg(long)]
        eta: Option<String>,
    },
    /// Upper bound on the number of zeros of M.
    Bound {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        case: String,
    },
    /// Compare reductions, Picard-Fuchs systems or closed forms against quadrature.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        #[arg(long)]
        eta: String,
        /// Draw the energies at random from this seed instead of an even grid.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Integrate the perturbed system and look for limit cycles.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "1e-3")]
        eps: String,
        /// Number of section ordinates scanned.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long)]
        eta: Option<String>,
        /// Dump one revolution from (0, y0) as CSV to this path.
        #[arg(long, requires = "y0")]
        trajectory: Option<PathBuf>,
        #[arg(long)]
        y0: Option<String>,
    },
    /// Calibrate the closed-form constants for one η.
    Calibrate {
        #[arg(long)]
        eta: String,
    },
}

/// Exit status 1: a check ran and failed. Status 2: bad input.
enum Failure {
    Check(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Calibration { .. } => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn rational(s: &str) -> std::result::Result<Rational, Failure> {
    Ok(parse_rational(s)?)
}

fn real(s: &str) -> std::result::Result<f64, Failure> {
    Ok(rational(s)?.to_real())
}

fn load_spec(path: &Path, eta: Option<&str>) -> std::result::Result<PerturbationSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut spec = PerturbationSpec::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if let Some(eta) = eta {
        spec.eta = rational(eta)?;
        spec.validate()?;
    }
    Ok(spec)
}

fn parse_arc(s: &str) -> std::result::Result<Arc, Failure> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "gamma" => Arc::Gamma,
        "gamma~" | "gammatilde" => Arc::GammaTilde,
        "upsilon" => Arc::Upsilon,
        "upsilon~" | "upsilontilde" => Arc::UpsilonTilde,
        other => {
            let k: u8 = other.parse().map_err(|_| Failure::Usage(format!("unknown side {s:?}")))?;
            Arc::Side(Side::try_from(k)?)
        }
    })
}

/// Destination of the primary output.
fn sink(path: &Option<PathBuf>) -> std::result::Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn no_csv(format: Format, what: &str) -> Outcome {
    if format == Format::Csv {
        return Err(Failure::Usage(format!("{what} has no CSV output")));
    }
    Ok(())
}

/// Formats a float without a trailing `.0` and without a negative zero.
fn plain(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

#[derive(Serialize)]
struct ReduceOut {
    arc: String,
    i: u32,
    j: i32,
    expr: ReducedExprJson,
    display: String,
}

#[derive(Serialize)]
struct AssembleOut {
    #[serde(with = "switchline::algebra::rational_serde")]
    eta: Rational,
    n: u32,
    case: Case,
    expr: ReducedExprJson,
    display: String,
    structure: StructureReport,
}

#[derive(Serialize)]
struct EvalOut {
    h: f64,
    value: f64,
}

#[derive(Serialize)]
struct BoundOut {
    n: u32,
    case: Case,
    bound: u64,
}

fn run(cli: Cli) -> Outcome {
    let threshold = cli.tol.as_deref().map(real).transpose()?;
    match cli.command {
        Command::Reduce { side, i, j, eta } => {
            let format = cli.format.unwrap_or(Format::Json);
            no_csv(format, "reduce")?;
            let arc = parse_arc(&side)?;
            let mut reducer = Reducer::new(&rational(&eta)?)?;
            let e = reducer.reduce(arc, i, j)?;
            let mut out = sink(&cli.output)?;
            if format == Format::Text {
                writeln!(out, "{e}")?;
            } else {
                emit_json(&mut out, &ReduceOut { arc: arc.to_string(), i, j, expr: e.to_json(), display: e.to_string() })?;
            }
        }
        Command::Assemble { config, eta } => {
            let format = cli.format.unwrap_or(Format::Json);
            no_csv(format, "assemble")?;
            let spec = load_spec(&config, eta.as_deref())?;
            let m = assemble(&spec)?;
            let structure = structure_check(&m, spec.n, spec.case);
            let mut out = sink(&cli.output)?;
            if format == Format::Text {
                writeln!(out, "{m}")?;
            } else {
                emit_json(
                    &mut out,
                    &AssembleOut {
                        eta: spec.eta.clone(),
                        n: spec.n,
                        case: spec.case,
                        expr: m.to_json(),
                        display: m.to_string(),
                        structure,
                    },
                )?;
            }
        }
        Command::Eval { config, h, eta } => {
            let format = cli.format.unwrap_or(Format::Text);
            no_csv(format, "eval")?;
            let spec = load_spec(&config, eta.as_deref())?;
            let h = real(&h)?;
            let m = assemble(&spec)?;
            let k = constants_for(&spec.eta)?;
            let value = eval_m(&m, &k, h)?;
            let mut out = sink(&cli.output)?;
            match format {
                Format::Text => writeln!(out, "{}", plain(value))?,
                _ => emit_json(&mut out, &EvalOut { h, value })?,
            }
        }
        Command::Zeros { config, samples, samples_csv, eta } => {
            let format = cli.format.unwrap_or(Format::Json);
            let spec = load_spec(&config, eta.as_deref())?;
            let m = assemble(&spec)?;
            let k = constants_for(&spec.eta)?;
            let scan = ScanParams { samples: samples.unwrap_or(ScanParams::default().samples), ..Default::default() };
            let report = count_zeros(&m, &k, &scan, theoretical_bound(spec.n, spec.case))?;
            if let Some(path) = samples_csv {
                report.write_samples_csv(File::create(&path)?)?;
            }
            let mut out = sink(&cli.output)?;
            match format {
                Format::Csv => report.write_samples_csv(&mut out)?,
                Format::Text => {
                    for z in &report.zeros {
                        writeln!(out, "{}", plain(z.h))?;
                    }
                }
                Format::Json => emit_json(&mut out, &report)?,
            }
            out.flush()?;
            if !report.within_bound {
                return Err(Failure::Check(format!("{} zeros exceed the bound {}", report.count, report.bound)));
            }
        }
        Command::Bound { n, case } => {
            let format = cli.format.unwrap_or(Format::Text);
            no_csv(format, "bound")?;
            if n == 0 {
                return Err(Failure::Usage("n must be at least 1".into()));
            }
            let case: Case = case.parse()?;
            let bound = theoretical_bound(n, case);
            let mut out = sink(&cli.output)?;
            match format {
                Format::Text => writeln!(out, "{bound}")?,
                _ => emit_json(&mut out, &BoundOut { n, case, bound })?,
            }
        }
        Command::Verify { suite, eta, seed, samples } => {
            let format = cli.format.unwrap_or(Format::Json);
            let eta = rational(&eta)?;
            if !(eta > Rational::from_integer(0.into())) {
                return Err(Failure::Usage(format!("eta must be positive, got {}", format_rational(&eta))));
            }
            let report = verify::run(suite, &eta, seed, samples, threshold)?;
            let mut out = sink(&cli.output)?;
            match format {
                Format::Csv => switchline::quadrature::write_csv(&report.rows, &mut out)?,
                Format::Text => {
                    let status = if report.pass { "PASS" } else { "FAIL" };
                    writeln!(
                        out,
                        "{status} {}: {} rows, max scaled residual {:e} (threshold {:e})",
                        report.suite, report.checked, report.max_scaled_residual, report.threshold
                    )?;
                }
                Format::Json => emit_json(&mut out, &report)?,
            }
            out.flush()?;
            if let Some(row) = report.failures.first() {
                return Err(Failure::Check(format!(
                    "{} at h = {}: {} vs {} (residual {:e})",
                    row.quantity, row.h, row.value, row.reference, row.residual
                )));
            }
        }
        Command::Simulate { config, eps, grid, eta, trajectory, y0 } => {
            let format = cli.format.unwrap_or(Format::Json);
            no_csv(format, "simulate")?;
            let spec = load_spec(&config, eta.as_deref())?;
            let cfg = SimConfig::new(&spec, real(&eps)?);
            if let (Some(path), Some(y0)) = (trajectory, y0) {
                let y0 = real(&y0)?;
                let start = PhaseState::on_region(0.0, y0, 1)?;
                if !(y0 > cfg.eta) {
                    return Err(Failure::Usage(format!("y0 must exceed eta = {}", cfg.eta)));
                }
                let traj = integrate_orbit(start, &cfg, &spec, Stop::Events(4))?;
                traj.write_csv(File::create(&path)?)?;
            }
            let report = find_limit_cycles(&cfg, &spec, &default_grid(cfg.eta, grid))?;
            let mut out = sink(&cli.output)?;
            emit_json(&mut out, &report)?;
        }
        Command::Calibrate { eta } => {
            let format = cli.format.unwrap_or(Format::Json);
            no_csv(format, "calibrate")?;
            let eta = rational(&eta)?;
            if !(eta > Rational::from_integer(0.into())) {
                return Err(Failure::Usage(format!("eta must be positive, got {}", format_rational(&eta))));
            }
            let k = calibrate(&eta, &default_samples(&eta))?;
            let mut out = sink(&cli.output)?;
            emit_json(&mut out, &k)?;
        }
    }
    Ok(())
}
