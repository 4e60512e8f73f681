//! `apspec`: factor, construct, verify and analyze band-limited almost
//! periodic functions from the command line.
//!
//! Exit codes: 0 success, 1 malformed input, 2 a method precondition failed,
//! 3 a check failed.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use apspec_core::ap_core::{auto_grid_step, certified_infimum, TrigPoly};
use apspec_core::cepstral_factor::{
    almost_period_test, arg_decompose, cepstral_factorize, conjugate_boundary, half_log,
    AlmostPeriodReport, SampledFunction, Window,
};
use apspec_core::counterexample::{
    assemble, verify_construction, wiener_growth_table, ConstructionParams, ConstructionResult,
    MarginPolicy,
};
use apspec_core::entire_products::{factorize_zeros, ZeroSet};
use apspec_core::periodic_factor::fejer_riesz;
use apspec_core::verify::{rerun_checks, Check, Factor, FactorizationReport};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Precondition(apspec_core::Error),
    #[error("{0} check(s) failed")]
    Checks(usize),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Precondition(_) => 2,
            CliError::Checks(_) => 3,
        }
    }
}

impl From<apspec_core::Error> for CliError {
    fn from(e: apspec_core::Error) -> Self {
        use apspec_core::Error as E;
        match e {
            E::Parse(_) | E::InvalidArgument(_) => CliError::Input(e.to_string()),
            other => CliError::Precondition(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "apspec", version, about = "Spectral factorization of almost periodic functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Roots,
    Cepstral,
    Zeros,
}

#[derive(clap::Args, Debug)]
struct WindowArgs {
    /// Half-width L of the sampling window [−L, L]; defaults to 256π.
    #[arg(long)]
    halfwidth: Option<f64>,
    /// Grid step; defaults to min(0.05, 0.25/τ).
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factor f = |s|² and write a report.
    Factor {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// TrigPoly JSON (roots, cepstral) or zero-set JSON (zeros).
        #[arg(long)]
        input: PathBuf,
        /// Lower bound m for the cepstral route; the certified infimum when omitted.
        #[arg(long)]
        m: Option<f64>,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Samples of the factor on the window.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        allow_large: bool,
    },
    /// Build the positive function with divergent Fourier series and its factor.
    Construct {
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 2)]
        blocks: usize,
        #[arg(long = "oracle-n", default_value_t = 4096)]
        oracle_n: usize,
        /// Comma-separated primes for the dilations.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        /// Subtract the oracle safety margin from every target.
        #[arg(long)]
        strict_margin: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run every check of a stored factorization report or construction.
    Verify {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split the phase of the outer factor into c·x + θ(x) and test θ for almost periods.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Samples of θ.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        allow_large: bool,
    },
    /// Wiener norms of the Cesàro means p_n as CSV.
    GrowthTable {
        #[arg(long, value_delimiter = ',', default_values_t = vec![4usize, 16, 256, 4096, 65536])]
        n: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.code());
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("APSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("APSPEC_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Factor {
            method,
            input,
            m,
            window,
            out,
            csv,
            allow_large,
        } => factor(method, &input, m, &window, out.as_deref(), csv.as_deref(), allow_large),
        Command::Construct {
            m,
            blocks,
            oracle_n,
            primes,
            strict_margin,
            out,
        } => {
            let params = ConstructionParams {
                m,
                blocks,
                oracle_n,
                primes,
                margin: if strict_margin {
                    MarginPolicy::Strict
                } else {
                    MarginPolicy::Report
                },
            };
            let result = assemble(&params)?;
            write_json(out.as_deref(), &result)?;
            require_pass(&result.certificates)
        }
        Command::Verify { report, out } => verify(&report, out.as_deref()),
        Command::Analyze {
            input,
            m,
            epsilon,
            window,
            out,
            csv,
            allow_large,
        } => analyze(&input, m, epsilon, &window, out.as_deref(), csv.as_deref(), allow_large),
        Command::GrowthTable { n, out } => growth_table(&n, out.as_deref()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let file = File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_reader(io::BufReader::new(file))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Input(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::Input(e.to_string()))
}

fn require_pass(checks: &[Check]) -> CliResult<()> {
    let failed = checks.iter().filter(|c| !c.pass).count();
    for c in checks.iter().filter(|c| !c.pass) {
        eprintln!("check failed: {} (value {:e})", c.name, c.value);
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Checks(failed))
    }
}

fn window_for(f: Option<&TrigPoly>, args: &WindowArgs) -> CliResult<Window> {
    let halfwidth = args.halfwidth.unwrap_or(256.0 * std::f64::consts::PI);
    let tau = f.map(|f| f.exponential_type()).unwrap_or(0.0);
    let step = args
        .step
        .unwrap_or(if tau > 0.0 { (0.25 / tau).min(0.05) } else { 0.05 });
    Ok(Window::new(halfwidth, step)?)
}

/// The lower bound used by the cepstral route when none is given.
fn default_m(f: &TrigPoly, m: Option<f64>) -> CliResult<f64> {
    if let Some(m) = m {
        return Ok(m);
    }
    let lb = certified_infimum(f, auto_grid_step(f, 1 << 22))?;
    if lb > 0.0 {
        Ok(lb)
    } else {
        Err(CliError::Precondition(apspec_core::Error::NotBoundedBelow(format!(
            "certified infimum {lb:e} is not positive"
        ))))
    }
}

fn write_samples(path: &Path, s: &SampledFunction, allow_large: bool) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(s.write_csv(BufWriter::new(file), allow_large)?)
}

fn factor(
    method: MethodArg,
    input: &Path,
    m: Option<f64>,
    window: &WindowArgs,
    out: Option<&Path>,
    csv: Option<&Path>,
    allow_large: bool,
) -> CliResult<()> {
    let report = match method {
        MethodArg::Roots => fejer_riesz(&read_json::<TrigPoly>(input)?)?,
        MethodArg::Cepstral => {
            let f: TrigPoly = read_json(input)?;
            let m = default_m(&f, m)?;
            cepstral_factorize(&f, m, window_for(Some(&f), window)?)?
        }
        MethodArg::Zeros => {
            let zs: ZeroSet = read_json(input)?;
            factorize_zeros(&zs, window_for(None, window)?)?
        }
    };
    if let Some(path) = csv {
        let samples = match &report.factor {
            Factor::Sampled(s) => s.clone(),
            Factor::Poly(s) => {
                let w = window_for(Some(s), window)?;
                let xs = w.xs();
                SampledFunction::from_values(w, s.sample(&xs))?
            }
        };
        write_samples(path, &samples, allow_large)?;
    }
    write_json(out, &report)?;
    require_pass(&report.checks)
}

#[derive(Serialize)]
struct VerifyOutput {
    kind: &'static str,
    pass: bool,
    checks: Vec<Check>,
}

fn verify(path: &Path, out: Option<&Path>) -> CliResult<()> {
    let value: serde_json::Value = read_json(path)?;
    let (kind, checks) = if value.get("n_seq").is_some() {
        let result: ConstructionResult =
            serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))?;
        ("construction", verify_construction(&result)?)
    } else {
        let report: FactorizationReport =
            serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))?;
        ("factorization", rerun_checks(&report)?.checks)
    };
    let pass = checks.iter().all(|c| c.pass);
    write_json(out, &VerifyOutput { kind, pass, checks: checks.clone() })?;
    require_pass(&checks)
}

#[derive(Serialize)]
struct AnalyzeOutput {
    m: f64,
    window_halfwidth: f64,
    step: f64,
    /// Mean drift of the phase.
    c: f64,
    fit_residual: f64,
    almost_period: AlmostPeriodReport,
}

fn analyze(
    input: &Path,
    m: Option<f64>,
    epsilon: f64,
    window: &WindowArgs,
    out: Option<&Path>,
    csv: Option<&Path>,
    allow_large: bool,
) -> CliResult<()> {
    let f: TrigPoly = read_json(input)?;
    let m = default_m(&f, m)?;
    let w = window_for(Some(&f), window)?;
    let v = conjugate_boundary(&half_log(&f, m, w)?);
    let dec = arg_decompose(&v);
    let almost_period = almost_period_test(&dec.theta, epsilon)?;
    if let Some(path) = csv {
        write_samples(path, &dec.theta, allow_large)?;
    }
    write_json(
        out,
        &AnalyzeOutput {
            m,
            window_halfwidth: w.halfwidth,
            step: w.step,
            c: dec.c,
            fit_residual: dec.fit_residual,
            almost_period,
        },
    )
}

fn growth_table(ns: &[usize], out: Option<&Path>) -> CliResult<()> {
    let table = wiener_growth_table(ns)?;
    let mut w = csv::Writer::from_writer(output(out)?);
    let io_err = |e: csv::Error| CliError::Input(e.to_string());
    w.write_record(["n", "wiener_norm"]).map_err(io_err)?;
    for (n, norm) in table {
        w.serialize((n, norm)).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::Input(e.to_string()))
}
