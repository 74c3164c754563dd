//! Command-line front end for the correlation toolkit.
//!
//! Subcommands: `measures` (full report for one state), `thresholds`
//! (critical-p curves over the asymmetry), `gap-table` (widest threshold
//! bands per criterion pair), `tomo` (simulate counts, reconstruct, fit,
//! report), and `regimes` (batch classification of `(p, q)` points).
//!
//! Single results print as JSON, sweeps as CSV with a `# schema:` header;
//! both are byte-identical across runs given the same flags and seed.
//! Exit codes: 0 success, 2 usage or unparsable input, 3 invalid state,
//! 4 numerical or solver failure.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use qcorr::hierarchy::{gap_table, threshold, Measure};
use qcorr::linalg::{fidelity, ComplexMatrix};
use qcorr::report::correlation_report;
use qcorr::states::{gws, werner, GwsParams};
use qcorr::tomography::{fit_pq, mle_reconstruct, simulate_counts, CountRecord, PqFit};
use qcorr::{CorrelationReport64, DensityMatrix64};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Correlation measures for noisy two-qubit states"
)]
struct Cli {
    /// Progress notes on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every correlation measure for one state.
    Measures(MeasuresArgs),
    /// Critical mixing weights p(q) for selected measures, as CSV.
    Thresholds(ThresholdsArgs),
    /// Widest threshold band per ordered criterion pair, as CSV.
    GapTable(GapTableArgs),
    /// Simulate tomography counts, reconstruct, fit parameters, report.
    Tomo(TomoArgs),
    /// Classify a CSV batch of (p, q) points.
    Regimes(RegimesArgs),
}

/// Exactly one way of naming the input state.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct StateSource {
    /// Symmetric family member with mixing weight P.
    #[arg(long, value_name = "P")]
    werner: Option<f64>,
    /// Family member with mixing weight P and asymmetry Q.
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    gws: Option<Vec<f64>>,
    /// Density-matrix JSON file: {"dim": 4, "re": [[..]], "im": [[..]]}.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct MeasuresArgs {
    #[command(flatten)]
    source: StateSource,
}

#[derive(Args)]
struct ThresholdsArgs {
    #[arg(long, default_value_t = 0.01)]
    q_min: f64,
    #[arg(long, default_value_t = 0.5)]
    q_max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Comma-separated subset of N, S3, S2, B.
    #[arg(long, default_value = "N,S3,S2,B", value_delimiter = ',')]
    measures: Vec<String>,
    /// Bisection tolerance for the solver-based measures.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Worker threads for the sweep (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Write CSV here instead of stdout.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GapTableArgs {
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TomoArgs {
    #[command(flatten)]
    source: StateSource,
    /// Mean events per projector at unit probability.
    #[arg(long)]
    exposure: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    mle_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    mle_tol: f64,
    /// Also write the raw counts as CSV.
    #[arg(long, value_name = "FILE")]
    counts_out: Option<PathBuf>,
}

#[derive(Args)]
struct RegimesArgs {
    /// CSV of points: header `p,q`, one point per row.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Lib(qcorr::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) if e.is_invalid_input() => 3,
            CliError::Lib(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<qcorr::Error> for CliError {
    fn from(e: qcorr::Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Measures(args) => cmd_measures(args),
        Command::Thresholds(args) => cmd_thresholds(args, cli.verbose),
        Command::GapTable(args) => cmd_gap_table(args, cli.verbose),
        Command::Tomo(args) => cmd_tomo(args, cli.verbose),
        Command::Regimes(args) => cmd_regimes(args),
    }
}

// ---------------------------------------------------------------- states

/// Mirror of the density-matrix JSON layout, parsed here so that a
/// malformed file (exit 2) stays distinguishable from a well-formed file
/// describing an invalid state (exit 3).
#[derive(serde::Deserialize)]
struct RawState {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl StateSource {
    fn load(&self) -> CliResult<DensityMatrix64> {
        if let Some(p) = self.werner {
            return Ok(werner(p)?);
        }
        if let Some(pq) = &self.gws {
            return Ok(gws(GwsParams::new(pq[0], pq[1])?));
        }
        let path = self
            .json
            .as_ref()
            .expect("clap group guarantees one source");
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let raw: RawState = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))?;
        if raw.dim != 4
            || raw.re.len() != 4
            || raw.im.len() != 4
            || raw.re.iter().chain(&raw.im).any(|row| row.len() != 4)
        {
            return Err(CliError::Usage(format!(
                "{}: expected dim 4 with 4x4 re/im grids",
                path.display()
            )));
        }
        let mat =
            ComplexMatrix::from_fn(4, 4, |i, j| qcorr::Complex::new(raw.re[i][j], raw.im[i][j]));
        Ok(DensityMatrix64::new(mat)?)
    }
}

// ---------------------------------------------------------------- output

/// Six significant digits, fixed-point within a sane range; stable across
/// runs so CSV fixtures can be compared bytewise.
fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        format!("{:.5e}", x)
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<S: serde::Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn thread_pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

// -------------------------------------------------------------- commands

#[derive(serde::Serialize)]
struct MeasuresOutput {
    schema_version: u32,
    #[serde(flatten)]
    report: CorrelationReport64,
}

fn cmd_measures(args: MeasuresArgs) -> CliResult<()> {
    let rho = args.source.load()?;
    let report = correlation_report(&rho)?;
    let out = MeasuresOutput {
        schema_version: SCHEMA_VERSION,
        report,
    };
    emit(&to_json(&out), None)
}

fn parse_measures(names: &[String]) -> CliResult<Vec<Measure>> {
    names
        .iter()
        .map(|s| {
            Measure::from_str(s)
                .map_err(|_| CliError::Usage(format!("unknown measure {s:?}: use N, S3, S2 or B")))
        })
        .collect()
}

fn cmd_thresholds(args: ThresholdsArgs, verbose: bool) -> CliResult<()> {
    if !(args.step > 0.0 && args.q_min > 0.0 && args.q_min <= args.q_max && args.q_max < 1.0) {
        return Err(CliError::Usage(
            "need 0 < q-min <= q-max < 1 and step > 0".into(),
        ));
    }
    let measures = parse_measures(&args.measures)?;
    let mut qs = Vec::new();
    let mut k = 0usize;
    loop {
        let q = args.q_min + args.step * k as f64;
        if q > args.q_max + args.step * 1e-9 {
            break;
        }
        qs.push(q.min(args.q_max));
        k += 1;
    }

    let jobs: Vec<(Measure, f64)> = measures
        .iter()
        .flat_map(|&m| qs.iter().map(move |&q| (m, q)))
        .collect();
    let pool = thread_pool(args.jobs)?;
    let results: Result<Vec<f64>, qcorr::Error> = pool.install(|| {
        jobs.par_iter()
            .map(|&(m, q)| threshold(m, q, args.tol))
            .collect()
    });
    let results = results?;

    let mut csv = String::new();
    csv.push_str("# schema: thresholds/1\n");
    csv.push_str("measure,q,p_threshold,method\n");
    for ((m, q), p) in jobs.iter().zip(&results) {
        let method = match m {
            Measure::Negativity | Measure::Bell => "analytic",
            Measure::S3 | Measure::S2 => "bisection",
        };
        let _ = writeln!(csv, "{m},{},{},{method}", fmt_sig(*q), fmt_sig(*p));
    }
    if verbose {
        eprintln!(
            "thresholds: {} measures x {} points",
            measures.len(),
            qs.len()
        );
    }
    emit(&csv, args.output.as_ref())
}

fn cmd_gap_table(args: GapTableArgs, verbose: bool) -> CliResult<()> {
    let rows = gap_table::<f64>()?;
    let mut csv = String::new();
    csv.push_str("# schema: gap-table/1\n");
    csv.push_str("transition,q_opt,p_initial,p_final,gap_at_opt,gap_at_half,advantage\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.transition,
            fmt_sig(r.q_opt),
            fmt_sig(r.p_initial),
            fmt_sig(r.p_final),
            fmt_sig(r.gap_at_opt),
            fmt_sig(r.gap_at_half),
            fmt_sig(r.advantage),
        );
    }
    if verbose {
        eprintln!("gap-table: {} transitions", rows.len());
    }
    emit(&csv, args.output.as_ref())
}

#[derive(serde::Serialize)]
struct TomoOutput {
    schema_version: u32,
    counts: CountRecord<f64>,
    reconstruction: DensityMatrix64,
    reconstruction_fidelity: f64,
    fit: PqFit<f64>,
    report: CorrelationReport64,
}

fn cmd_tomo(args: TomoArgs, verbose: bool) -> CliResult<()> {
    let rho = args.source.load()?;
    let counts = simulate_counts(&rho, args.exposure, args.seed)?;
    let reconstruction = mle_reconstruct(&counts, args.mle_iters, args.mle_tol)?;
    let reconstruction_fidelity = fidelity(&reconstruction, &rho)?;
    if verbose {
        eprintln!("tomo: reconstruction fidelity {reconstruction_fidelity:.6}");
    }
    let fit = fit_pq(&reconstruction)?;
    let report = correlation_report(&reconstruction)?;
    if let Some(path) = &args.counts_out {
        emit(&counts.to_csv(), Some(path))?;
    }
    let out = TomoOutput {
        schema_version: SCHEMA_VERSION,
        counts,
        reconstruction,
        reconstruction_fidelity,
        fit,
        report,
    };
    emit(&to_json(&out), None)
}

fn cmd_regimes(args: RegimesArgs) -> CliResult<()> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.input.display())))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "p,q" {
            continue;
        }
        let mut parts = line.split(',');
        let (p, q) = match (parts.next(), parts.next(), parts.next()) {
            (Some(p), Some(q), None) => (p.trim(), q.trim()),
            _ => {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected two comma-separated values",
                    args.input.display(),
                    lineno + 1
                )))
            }
        };
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| {
                CliError::Usage(format!("{}:{}: {e}", args.input.display(), lineno + 1))
            })
        };
        points.push((parse(p)?, parse(q)?));
    }

    let pool = thread_pool(args.jobs)?;
    let reports: Result<Vec<CorrelationReport64>, qcorr::Error> = pool.install(|| {
        points
            .par_iter()
            .map(|&(p, q)| correlation_report(&gws(GwsParams::new(p, q)?)))
            .collect()
    });
    let reports = reports?;

    let mut csv = String::new();
    csv.push_str("# schema: regimes/1\n");
    csv.push_str("p,q,negativity,concurrence,bell,s2,s3,regime\n");
    for ((p, q), r) in points.iter().zip(&reports) {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            fmt_sig(*p),
            fmt_sig(*q),
            fmt_sig(r.negativity),
            fmt_sig(r.concurrence),
            fmt_sig(r.bell),
            fmt_sig(r.s2),
            fmt_sig(r.s3),
            r.regime.id,
        );
    }
    emit(&csv, args.output.as_ref())
}
