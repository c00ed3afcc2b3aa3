//! Command-line front end for `hypcert`: reads JSON symbol files, runs the
//! classification / time-function / certification pipeline and writes
//! key-sorted JSON or text reports.
//!
//! Exit codes: 0 certified, 1 failed or not applicable, 2 marginal, 3 usage
//! error (bad arguments, unreadable or invalid input).

pub mod format;
pub mod frame;
pub mod pipeline;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypcert_core::normal_form::{Cutoff, ExtendedQ, Variant};
use hypcert_core::symbolic::{check_frame, parse_rational, PhasePoint};
use hypcert_core::verifier::minimize_q;
use serde::Serialize;

pub use format::{parse_symbol_file, parse_symbol_str, FormatError, SymbolFile};
pub use pipeline::{run_classify, run_pipeline};
pub use report::{emit_report, OutputFormat, Report, Status};

pub const EXIT_USAGE: i32 = 3;
pub const THREADS_ENV: &str = "HYPCERT_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Format(FormatError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Format(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Format(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "hypcert", version, about = "Effective hyperbolicity classification and time-function certification")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Grid points per axis (overrides the file's region.points).
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,
    /// Spectral tolerance (default 1e-9 (1 + |F|)).
    #[arg(long, global = true, value_name = "T")]
    tol: Option<f64>,
    /// Slack for the kappa target, an exact rational such as 1/100.
    #[arg(long, global = true, value_name = "S")]
    slack: Option<String>,
    /// Region half widths `t_max,x_half,xi_half`.
    #[arg(long, global = true, value_name = "T,X,XI")]
    region: Option<String>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Singular-point check and Hamilton-map classification.
    Classify { file: PathBuf },
    /// Full pipeline: classification, side conditions, time function, certificates.
    Certify { file: PathBuf },
    /// Minimize the extended quadratic form Q(., theta) of the file's normal form.
    Minimize {
        file: PathBuf,
        /// Comma-separated theta; zeros when omitted.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        /// Cutoff width delta.
        #[arg(long, default_value_t = 0.5)]
        cutoff: f64,
    },
    /// Check a candidate symplectic frame file.
    CheckFrame { file: PathBuf },
}

fn apply_overrides(file: &mut SymbolFile, g: &Global) -> Result<(), CliError> {
    if let Some(n) = g.grid {
        file.region.points = n;
    }
    if let Some(t) = g.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Usage(format!("--tol {t} must be positive")));
        }
        file.options.tol = Some(t);
    }
    if let Some(s) = &g.slack {
        parse_rational(s).map_err(|e| CliError::Usage(format!("--slack: {e}")))?;
        file.options.slack = s.clone();
    }
    if let Some(r) = &g.region {
        let v = parse_floats(r).map_err(|e| CliError::Usage(format!("--region: {e}")))?;
        if v.len() != 3 {
            return Err(CliError::Usage("--region takes t_max,x_half,xi_half".into()));
        }
        file.region.t_max = v[0];
        file.region.x_half = v[1];
        file.region.xi_half = v[2];
    }
    file.region
        .region()
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(())
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
        .collect()
}

#[derive(Serialize)]
struct MinimizeOut {
    tool: report::Tool,
    input_sha256: String,
    form: &'static str,
    cutoff_delta: f64,
    w_layout: Vec<String>,
    theta_layout: Vec<String>,
    theta: Vec<f64>,
    m: f64,
    w_bar: Vec<f64>,
    grad_norm: f64,
    hessian_cond: f64,
    iterations: usize,
    constant_part_minimum: f64,
}

fn layouts(eq: &ExtendedQ, variant: Variant, p: usize, d: usize) -> (Vec<String>, Vec<String>) {
    let ys = match variant {
        Variant::Form1 => p,
        Variant::Form2 => p.saturating_sub(1),
    };
    let mut w: Vec<String> = (1..=ys).map(|j| format!("y{j}")).collect();
    w.extend((1..=p).map(|j| format!("eta{j}")));
    debug_assert_eq!(w.len(), eq.w_dim());
    let mut th = vec!["t".to_string()];
    th.extend((p + 1..=d).map(|j| format!("x{j}")));
    th.extend((p + 1..=d).map(|j| if j == d { format!("xi{j}-1") } else { format!("xi{j}") }));
    if variant == Variant::Form2 {
        th.push(format!("x{p}"));
    }
    th.push("eps".to_string());
    (w, th)
}

fn run_minimize(file: &SymbolFile, input: &[u8], theta: Option<&str>, cutoff: f64) -> Result<(String, i32), CliError> {
    let nf = file
        .normal_form
        .as_ref()
        .ok_or_else(|| CliError::Usage("minimize needs a normal_form block".into()))?;
    let spec = pipeline::build_spec(nf, file.dim).map_err(|e| CliError::Usage(e.to_string()))?;
    let cut = Cutoff::new(cutoff).ok_or_else(|| CliError::Usage("--cutoff must be positive".into()))?;
    let eq = ExtendedQ::new(&spec, cut).map_err(|e| CliError::Usage(e.to_string()))?;
    let theta = match theta {
        Some(s) => parse_floats(s).map_err(|e| CliError::Usage(format!("--theta: {e}")))?,
        None => vec![0.0; eq.theta_dim()],
    };
    if theta.len() != eq.theta_dim() {
        return Err(CliError::Usage(format!(
            "--theta has {} entries, this normal form needs {}",
            theta.len(),
            eq.theta_dim()
        )));
    }
    let (w_layout, theta_layout) = layouts(&eq, spec.variant(), spec.p(), spec.dim());
    match minimize_q(&eq, &theta, None) {
        Ok(m) => {
            let out = MinimizeOut {
                tool: report::Tool::default(),
                input_sha256: pipeline::sha256_hex(input),
                form: spec.variant().as_str(),
                cutoff_delta: cutoff,
                w_layout,
                theta_layout,
                theta,
                m: m.m,
                // avoid printing -0
                w_bar: m.w_bar.iter().map(|v| v + 0.0).collect(),
                grad_norm: m.grad_norm,
                hessian_cond: m.hessian_cond,
                iterations: m.iterations,
                constant_part_minimum: eq.constant_part().minimum,
            };
            Ok((report::to_sorted_json(&out), 0))
        }
        Err(e) => Ok((format!("minimization failed: {e}\n"), 1)),
    }
}

fn threads_from_env(value: Option<String>) -> Result<Option<usize>, CliError> {
    match value {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV}={s} is not a positive integer"))),
        },
    }
}

fn execute(cli: Cli) -> Result<(Vec<u8>, i32), CliError> {
    let g = cli.global.clone();
    let fmt = match g.format {
        FormatArg::Json => OutputFormat::Json,
        FormatArg::Text => OutputFormat::Text,
    };
    let load = |path: &PathBuf| -> Result<(SymbolFile, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| CliError::Io(format!("{}: not UTF-8", path.display())))?;
        let mut file = parse_symbol_str(text)?;
        apply_overrides(&mut file, &g)?;
        Ok((file, bytes))
    };
    match &cli.verb {
        Verb::Classify { file } => {
            let (f, bytes) = load(file)?;
            let r = run_classify(&f, &bytes);
            Ok((emit_report(&r, fmt), r.status.exit_code()))
        }
        Verb::Certify { file } => {
            let (f, bytes) = load(file)?;
            let r = run_pipeline(&f, &bytes);
            Ok((emit_report(&r, fmt), r.status.exit_code()))
        }
        Verb::Minimize { file, theta, cutoff } => {
            let (f, bytes) = load(file)?;
            let (s, code) = run_minimize(&f, &bytes, theta.as_deref(), *cutoff)?;
            Ok((s.into_bytes(), code))
        }
        Verb::CheckFrame { file } => {
            let text = std::fs::read_to_string(file).map_err(|e| CliError::Io(format!("{}: {e}", file.display())))?;
            let frame = frame::parse_frame_str(&text)?;
            let rep = check_frame(&frame);
            let out = frame::FrameOut::new(&rep, frame.base != PhasePoint::base(frame.base.dim()));
            let bytes = match fmt {
                OutputFormat::Json => report::to_sorted_json(&out).into_bytes(),
                OutputFormat::Text => out.text().into_bytes(),
            };
            Ok((bytes, if rep.passed() { 0 } else { 1 }))
        }
    }
}

/// Runs the CLI on `args` (including the program name). `threads` is the
/// value of `HYPCERT_THREADS`, if set.
pub fn run<I, T>(args: I, threads: Option<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let out_path = cli.global.out.clone();
    let result = threads_from_env(threads).and_then(|n| {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = n {
            b = b.num_threads(n);
        }
        let pool = b.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        pool.install(|| execute(cli))
    });
    match result {
        Ok((bytes, code)) => {
            let written = match &out_path {
                Some(p) => std::fs::write(p, &bytes).map_err(|e| format!("{}: {e}", p.display())),
                None => stdout.write_all(&bytes).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "i/o error: {e}");
                return EXIT_USAGE;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            EXIT_USAGE
        }
    }
}
