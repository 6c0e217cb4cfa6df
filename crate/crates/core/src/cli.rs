//! Batch front-end behind the `hardy-lab` binary.
//!
//! Exit codes: 0 when every certification passes, 1 on a failed
//! certification or IO error, 2 on parameter errors, 3 when a numerical
//! method does not converge.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::asymptotics::{default_k_grid, default_t_grid, heat_trace, weyl_trace, AsymptoticsTrace};
use crate::bounds::{
    certification_tolerance, certify, reports_to_csv, reports_to_json, yang_inequality_gap, BoundInputs, BoundKind,
    BoundReport, CertificationSummary, SigmaVariant,
};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Shape};
use crate::spectrum::{compute_spectrum, fmt17, Method, Spectrum};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "HARDY_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hardy-lab", version, about = "Dirichlet eigenvalues of −Δ + μ/|x|² and certified eigenvalue bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Compute the k smallest eigenvalues and write a spectrum document.
    Spectrum(JobArgs),
    /// Certify every applicable bound for k = 1..k_max.
    Bounds(JobArgs),
    /// Yang's inequality (k, lhs, rhs, factor) for k = 1..k_max−1.
    Yang(JobArgs),
    /// Weyl ratios λ_k k^{−2/N}/(c_N|Ω|^{−2/N}).
    Weyl(JobArgs),
    /// Heat-trace ratios t^{N/2}Z(t)(4π)^{N/2}/|Ω|.
    HeatTrace(JobArgs),
    /// Lower bounds, eigenvalue and upper bounds side by side.
    Report(JobArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct JobArgs {
    /// `ball:N=3,R=1` or `box:N=2,sides=1x1,center=0.001x0`.
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Number of eigenvalues.
    #[arg(long = "k", default_value_t = 100)]
    pub k_max: usize,
    /// Cells per radius (radial) or per side (Cartesian).
    #[arg(long)]
    pub mesh: Option<usize>,
    /// ball_oracle | radial_fd | cartesian_fd (aliases oracle, radial, cartesian).
    #[arg(long)]
    pub method: Option<String>,
    /// Write here (atomically) instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Treat passes that rely on the tolerance as failures.
    #[arg(long)]
    pub strict: bool,
    /// Read the spectrum from a document written by `spectrum`.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Heat-trace times (comma separated); default 1e-1 … 1e-3.
    #[arg(long = "t", value_delimiter = ',')]
    pub times: Vec<f64>,
    /// Use ω_{N−1} instead of ω_{N−1}^{2/N} in the Hardy branch of σ_μ.
    #[arg(long)]
    pub sigma_omega_first_power: bool,
}

/// What a job produced.
#[derive(Debug, Clone, PartialEq)]
pub struct JobOutput {
    pub text: String,
    pub passed: bool,
    /// Human-readable notes for stderr.
    pub notes: Vec<String>,
}

pub fn default_mesh(domain: &DomainSpec, method: Method) -> usize {
    match (method, domain.shape()) {
        (_, Shape::Ball { .. }) => 4000,
        (_, Shape::Box { sides, .. }) => match sides.len() {
            2 => 200,
            3 => 40,
            _ => 12,
        },
    }
}

fn default_method(domain: &DomainSpec) -> Method {
    if domain.is_ball() {
        Method::BallOracle
    } else {
        Method::CartesianFd
    }
}

fn obtain_spectrum(args: &JobArgs) -> Result<Spectrum> {
    if let Some(path) = &args.spectrum {
        let s = Spectrum::from_json(&std::fs::read_to_string(path)?)?;
        if let Some(d) = &args.domain {
            let d: DomainSpec = d.parse()?;
            if d != s.domain {
                return Err(Error::Inconsistent(format!("--domain {d} differs from the spectrum file's {}", s.domain)));
            }
        }
        if let Some(mu) = args.mu {
            if mu != s.mu {
                return Err(Error::Inconsistent(format!("--mu {mu} differs from the spectrum file's {}", s.mu)));
            }
        }
        if args.k_max > s.k_max() {
            return Err(Error::InsufficientSpectrum { needed: args.k_max, available: s.k_max() });
        }
        return Ok(Spectrum { values: s.values[..args.k_max].to_vec(), ..s });
    }
    let domain: DomainSpec = args
        .domain
        .as_deref()
        .ok_or(Error::Restriction("--domain is required unless --spectrum is given".into()))?
        .parse()?;
    let mu = args.mu.ok_or(Error::Restriction("--mu is required unless --spectrum is given".into()))?;
    let method = match &args.method {
        Some(m) => m.parse()?,
        None => default_method(&domain),
    };
    let mesh = args.mesh.unwrap_or_else(|| default_mesh(&domain, method));
    compute_spectrum(&domain, mu, args.k_max, method, mesh)
}

fn bound_inputs(args: &JobArgs, spectrum: &Spectrum) -> Result<BoundInputs> {
    let method = if spectrum.domain.is_ball() { Method::RadialFd } else { Method::CartesianFd };
    let mesh = args.mesh.unwrap_or_else(|| default_mesh(&spectrum.domain, method));
    let mut inputs = BoundInputs::from_domain(&spectrum.domain, spectrum.mu, mesh)?;
    if args.sigma_omega_first_power {
        inputs.sigma_variant = SigmaVariant::OmegaFirstPower;
    }
    Ok(inputs)
}

fn spectrum_notes(s: &Spectrum) -> Vec<String> {
    s.warnings.iter().map(|w| format!("warning: {w}")).collect()
}

fn summary_note(summary: &CertificationSummary) -> String {
    format!(
        "{} checks, {} failed, {} passed only within tolerance",
        summary.total, summary.failed, summary.warned
    )
}

fn trace_json(trace: &AsymptoticsTrace) -> String {
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"schema_version\": {},", crate::spectrum::SCHEMA_VERSION);
    let _ = writeln!(s, "  \"kind\": \"{}\",", trace.kind.as_str());
    let _ = writeln!(s, "  \"target\": {},", fmt17(trace.target));
    s.push_str("  \"samples\": [");
    for (i, (x, r)) in trace.samples.iter().enumerate() {
        s.push_str(if i == 0 { "\n    " } else { ",\n    " });
        let _ = write!(s, "[{}, {}]", fmt17(*x), fmt17(*r));
    }
    s.push_str(if trace.samples.is_empty() { "]\n" } else { "\n  ]\n" });
    s.push_str("}\n");
    s
}

fn run_spectrum(args: &JobArgs) -> Result<JobOutput> {
    let s = obtain_spectrum(args)?;
    let text = match args.format.unwrap_or(Format::Json) {
        Format::Json => s.to_json(),
        Format::Csv => {
            let mut t = String::from("k,lambda\n");
            for (i, v) in s.values.iter().enumerate() {
                let _ = writeln!(t, "{},{v:.11e}", i + 1);
            }
            t
        }
    };
    Ok(JobOutput { text, passed: true, notes: spectrum_notes(&s) })
}

fn run_bounds(args: &JobArgs) -> Result<JobOutput> {
    let s = obtain_spectrum(args)?;
    let inputs = bound_inputs(args, &s)?;
    let ks: Vec<usize> = (1..=s.k_max()).collect();
    let reports = certify(&s, &inputs, &ks)?;
    let summary = CertificationSummary::of(&reports);
    let text = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => reports_to_csv(&reports),
        Format::Json => reports_to_json(&s, certification_tolerance(&s, &inputs), &reports),
    };
    let mut notes = spectrum_notes(&s);
    notes.push(summary_note(&summary));
    Ok(JobOutput { text, passed: summary.passed(args.strict), notes })
}

fn run_yang(args: &JobArgs) -> Result<JobOutput> {
    let s = obtain_spectrum(args)?;
    let tol = s.est_rel_error.max(crate::bounds::MIN_TOL_REL);
    let mut rows = Vec::new();
    for k in 1..s.k_max() {
        let g = yang_inequality_gap(&s, k)?;
        rows.push((k, g, BoundReport::new(BoundKind::YangInequality, k, g.rhs, g.lhs, tol)));
    }
    let summary = CertificationSummary::of(&rows.iter().map(|r| r.2).collect::<Vec<_>>());
    let text = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = String::from("k,lhs,rhs,factor\n");
            for (k, g, _) in &rows {
                let _ = writeln!(t, "{k},{:.11e},{:.11e},{:.11e}", g.lhs, g.rhs, g.factor);
            }
            t
        }
        Format::Json => {
            let mut t = String::from("{\n");
            let _ = writeln!(t, "  \"schema_version\": {},", crate::spectrum::SCHEMA_VERSION);
            t.push_str("  \"rows\": [");
            for (i, (k, g, r)) in rows.iter().enumerate() {
                t.push_str(if i == 0 { "\n    " } else { ",\n    " });
                let _ = write!(
                    t,
                    "{{\"k\": {k}, \"lhs\": {}, \"rhs\": {}, \"factor\": {}, \"pass\": {}}}",
                    fmt17(g.lhs),
                    fmt17(g.rhs),
                    fmt17(g.factor),
                    r.pass
                );
            }
            t.push_str(if rows.is_empty() { "]\n" } else { "\n  ]\n" });
            t.push_str("}\n");
            t
        }
    };
    let mut notes = spectrum_notes(&s);
    notes.push(summary_note(&summary));
    Ok(JobOutput { text, passed: summary.passed(args.strict), notes })
}

fn trace_output(args: &JobArgs, s: &Spectrum, trace: AsymptoticsTrace) -> JobOutput {
    let text = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => trace.to_csv(),
        Format::Json => trace_json(&trace),
    };
    let mut notes = spectrum_notes(s);
    for t in &trace.refused {
        notes.push(format!("refused t = {t:e}: the truncated spectrum cannot bound the tail; raise --k"));
    }
    JobOutput { text, passed: true, notes }
}

fn run_weyl(args: &JobArgs) -> Result<JobOutput> {
    let s = obtain_spectrum(args)?;
    let trace = weyl_trace(&s, &default_k_grid(s.k_max()))?;
    Ok(trace_output(args, &s, trace))
}

fn run_heat_trace(args: &JobArgs) -> Result<JobOutput> {
    let s = obtain_spectrum(args)?;
    let ts = if args.times.is_empty() { default_t_grid() } else { args.times.clone() };
    let trace = heat_trace(&s, &ts)?;
    Ok(trace_output(args, &s, trace))
}

const REPORT_COLUMNS: [BoundKind; 6] = [
    BoundKind::LiYauKLower,
    BoundKind::KarachaliosLower,
    BoundKind::CombinedLower,
    BoundKind::ChengYangUpper,
    BoundKind::TestFunctionUpperV1,
    BoundKind::TestFunctionUpperV2,
];

fn run_report(args: &JobArgs) -> Result<JobOutput> {
    let s = obtain_spectrum(args)?;
    let inputs = bound_inputs(args, &s)?;
    let ks: Vec<usize> = (1..=s.k_max()).collect();
    let reports = certify(&s, &inputs, &ks)?;
    let mut rows: Vec<(usize, [Option<f64>; 6], bool)> = ks.iter().map(|&k| (k, [None; 6], true)).collect();
    let mut shown = Vec::new();
    for r in &reports {
        if let Some(col) = REPORT_COLUMNS.iter().position(|&c| c == r.kind) {
            let row = &mut rows[r.k - 1];
            row.1[col] = Some(r.bound);
            row.2 &= r.pass && !(args.strict && r.warning);
            shown.push(*r);
        }
    }
    let summary = CertificationSummary::of(&shown);
    let cell = |v: Option<f64>, json: bool| match (v, json) {
        (Some(x), false) => format!("{x:.11e}"),
        (Some(x), true) => fmt17(x),
        (None, false) => String::new(),
        (None, true) => "null".into(),
    };
    let text = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = String::from("k,spectral");
            for c in REPORT_COLUMNS {
                let _ = write!(t, ",{c}");
            }
            t.push_str(",pass\n");
            for (k, cols, pass) in &rows {
                let _ = write!(t, "{k},{:.11e}", s.values[k - 1]);
                for c in cols {
                    let _ = write!(t, ",{}", cell(*c, false));
                }
                let _ = writeln!(t, ",{pass}");
            }
            t
        }
        Format::Json => {
            let mut t = String::from("{\n");
            let _ = writeln!(t, "  \"schema_version\": {},", crate::spectrum::SCHEMA_VERSION);
            let _ = writeln!(t, "  \"domain\": {},", serde_json::to_string(&s.domain).expect("domain serializes"));
            let _ = writeln!(t, "  \"mu\": {},", fmt17(s.mu));
            t.push_str("  \"rows\": [");
            for (i, (k, cols, pass)) in rows.iter().enumerate() {
                t.push_str(if i == 0 { "\n    " } else { ",\n    " });
                let _ = write!(t, "{{\"k\": {k}, \"spectral\": {}", fmt17(s.values[k - 1]));
                for (c, v) in REPORT_COLUMNS.iter().zip(cols) {
                    let _ = write!(t, ", \"{c}\": {}", cell(*v, true));
                }
                let _ = write!(t, ", \"pass\": {pass}}}");
            }
            t.push_str(if rows.is_empty() { "]\n" } else { "\n  ]\n" });
            t.push_str("}\n");
            t
        }
    };
    let mut notes = spectrum_notes(&s);
    notes.push(summary_note(&summary));
    Ok(JobOutput { text, passed: summary.passed(args.strict), notes })
}

/// Runs one job in process.
pub fn run(command: &Command) -> Result<JobOutput> {
    match command {
        Command::Spectrum(a) => run_spectrum(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Yang(a) => run_yang(a),
        Command::Weyl(a) => run_weyl(a),
        Command::HeatTrace(a) => run_heat_trace(a),
        Command::Report(a) => run_report(a),
    }
}

fn job_args(command: &Command) -> &JobArgs {
    match command {
        Command::Spectrum(a)
        | Command::Bounds(a)
        | Command::Yang(a)
        | Command::Weyl(a)
        | Command::HeatTrace(a)
        | Command::Report(a) => a,
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().ok_or_else(|| Error::Restriction(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.join(tmp_name);
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_parameter_error() {
        2
    } else if err.is_numerical_error() {
        3
    } else {
        1
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer, got `{value}`"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be a positive integer, got `{value}`"));
    }
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args`, runs the job, writes the artifact and returns the exit
/// code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    let out = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    for n in &out.notes {
        eprintln!("{n}");
    }
    let written = match &job_args(&cli.command).output {
        Some(path) => write_atomically(path, &out.text),
        None => std::io::stdout().write_all(out.text.as_bytes()).map_err(Error::from),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    if out.passed {
        0
    } else {
        eprintln!("certification failed");
        1
    }
}
