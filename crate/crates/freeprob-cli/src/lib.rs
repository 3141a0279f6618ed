//! `freeprob` command line: free sums and products of measures, transform
//! evaluations, support search, matrix-model sampling and quadrature
//! convergence tables.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 when the command
//! line cannot be parsed. Warnings go to standard error and never change the
//! exit code.

mod measure_arg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use freeprob::freeconv::{self, additive_tables, find_support_additive, find_support_multiplicative, multiplicative_tables};
use freeprob::measures::MeasureSpec;
use freeprob::recovery::cumulative;
use freeprob::spectra::{free_combine_spectra, ks_distance_to_cdf, sample_matrix_spectrum, CombineOp};
use freeprob::transforms::{default_points, eval_transform, verify_exponential_convergence, TransformKind};
use freeprob::{ContourConfig, ConvolutionResult, C64};
use serde::Serialize;

pub use measure_arg::{parse_complex, parse_measure};

#[derive(Parser, Debug)]
#[command(name = "freeprob", version, about = "Numerical free convolution of compactly supported measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Density of the free sum μ₁ ⊞ μ₂.
    Add(ConvolveArgs),
    /// Density of the free product μ₁ ⊠ μ₂ (positive supports).
    Mul(ConvolveArgs),
    /// One value of G, G′, T or T′.
    Transform(TransformArgs),
    /// Support endpoints of μ₁ ⊞ μ₂ or μ₁ ⊠ μ₂, printed as `a,b`.
    Support(SupportArgs),
    /// Eigenvalues of a matrix model, optionally compared with a density CSV.
    Sample(SampleArgs),
    /// Quadrature error of G against the reference value, as `N,error` rows.
    Convergence(ConvergenceArgs),
}

#[derive(Args, Debug, Clone)]
struct Tuning {
    /// Power-series coefficients kept.
    #[arg(long = "m", default_value_t = 20)]
    m: usize,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Table radius; defaults to 1 − epsilon.
    #[arg(long)]
    r_a: Option<f64>,
    /// Quadrature points; defaults to 400 or 4000 by regularity.
    #[arg(long)]
    n_quad: Option<usize>,
    /// Points on the r_A and r_B circles.
    #[arg(long)]
    n_contour: Option<usize>,
    /// Density grid size after zero padding.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = 1e-12)]
    support_tol: f64,
    #[arg(long, default_value_t = 1e-3)]
    radius_tol: f64,
    #[arg(long, default_value_t = 64)]
    criterion_samples: usize,
    /// Use quadrature even for measures with closed-form transforms.
    #[arg(long)]
    quadrature: bool,
}

impl Tuning {
    fn config(&self) -> ContourConfig {
        ContourConfig {
            n_quad: self.n_quad,
            n_contour: self.n_contour,
            m_coeffs: self.m,
            epsilon: self.epsilon,
            r_a: self.r_a,
            support_tol: self.support_tol,
            radius_tol: self.radius_tol,
            criterion_samples: self.criterion_samples,
            grid_size: self.grid,
        }
    }
}

#[derive(Args, Debug)]
struct ConvolveArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu1: String,
    #[arg(long, allow_hyphen_values = true)]
    mu2: String,
    #[command(flatten)]
    tuning: Tuning,
    /// Density CSV; `-` writes to standard output.
    #[arg(long, default_value = "-")]
    out: String,
    /// JSON sidecar; defaults to the CSV path with a `.json` extension.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Kind {
    #[value(name = "G")]
    G,
    #[value(name = "dG")]
    DG,
    #[value(name = "T")]
    T,
    #[value(name = "dT")]
    DT,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long, allow_hyphen_values = true)]
    measure: String,
    #[arg(long, value_enum, default_value = "G")]
    kind: Kind,
    /// `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Quadrature points; defaults by regularity.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    quadrature: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Op {
    Add,
    Mul,
}

#[derive(Args, Debug)]
struct SupportArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu1: String,
    #[arg(long, allow_hyphen_values = true)]
    mu2: String,
    #[arg(long, value_enum, default_value = "add")]
    op: Op,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu1: String,
    /// Second measure; when given the spectrum is the free combination.
    #[arg(long, allow_hyphen_values = true)]
    mu2: Option<String>,
    #[arg(long, value_enum, default_value = "add")]
    op: Op,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Eigenvalue CSV; `-` writes to standard output.
    #[arg(long, default_value = "-")]
    out: String,
    /// Density CSV (`x,density`) to compare against; prints `ks,<distance>`.
    #[arg(long)]
    density: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[arg(long, allow_hyphen_values = true)]
    measure: String,
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long, default_value = "25,50,100,200,400,800")]
    n_list: String,
    #[arg(long, default_value = "-")]
    out: String,
}

/// Failure of a command after parsing.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<freeprob::Error> for Failure {
    fn from(e: freeprob::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

/// Seventeen significant digits, enough to round-trip an `f64`.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct Sidecar<'a> {
    kind: &'a str,
    support: [f64; 2],
    xi_a: f64,
    xi_b: f64,
    #[serde(rename = "r_B")]
    r_b: f64,
    #[serde(rename = "r_C")]
    r_c: f64,
    m_points: usize,
    coefficients: Vec<[f64; 2]>,
    max_clamp: f64,
    warnings: &'a [String],
}

fn sidecar(r: &ConvolutionResult) -> Sidecar<'_> {
    Sidecar {
        kind: match r.kind {
            freeconv::ConvolutionKind::Additive => "additive",
            freeconv::ConvolutionKind::Multiplicative => "multiplicative",
        },
        support: [r.support.a, r.support.b],
        xi_a: r.xi_a,
        xi_b: r.xi_b,
        r_b: r.r_b,
        r_c: r.r_c,
        m_points: r.m_points,
        coefficients: r.coefficients.g.iter().map(|c| [c.re, c.im]).collect(),
        max_clamp: r.max_clamp,
        warnings: &r.warnings,
    }
}

fn measure(spec: &str, quadrature: bool) -> Result<MeasureSpec, Failure> {
    // a measure with impossible parameters is bad input, not a failed computation
    let m = parse_measure(spec).map_err(Failure::Usage)?.build().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(if quadrature { m.without_closed_forms() } else { m })
}

fn emit(target: &str, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    if target == "-" {
        out.write_all(text.as_bytes())?;
    } else {
        std::fs::write(target, text)?;
    }
    Ok(())
}

fn warn(err: &mut dyn Write, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

fn convolve(a: &ConvolveArgs, op: Op, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let json_path = match (&a.json, a.out.as_str()) {
        (Some(p), _) => Some(p.clone()),
        (None, "-") => None,
        (None, o) => Some(Path::new(o).with_extension("json")),
    };
    if let Some(p) = &json_path {
        let inputs = [&a.mu1, &a.mu2].map(|s| s.strip_prefix("json:").map(PathBuf::from));
        if inputs.iter().flatten().any(|i| i == p) {
            return Err(Failure::Usage(format!("sidecar {} would overwrite an input measure; pass --json", p.display())));
        }
    }
    let mu1 = measure(&a.mu1, a.tuning.quadrature)?;
    let mu2 = measure(&a.mu2, a.tuning.quadrature)?;
    let cfg = a.tuning.config();
    let r = match op {
        Op::Add => freeconv::additive_convolve(&mu1, &mu2, &cfg)?,
        Op::Mul => freeconv::multiplicative_convolve(&mu1, &mu2, &cfg)?,
    };
    warn(err, &r.warnings);
    let mut csv = String::from("x,density\n");
    for (x, f) in &r.density_grid {
        csv.push_str(&format!("{},{}\n", fmt_f(*x), fmt_f(*f)));
    }
    emit(&a.out, &csv, out)?;
    if let Some(p) = json_path {
        let text = serde_json::to_string_pretty(&sidecar(&r)).map_err(|e| Failure::Compute(e.to_string()))?;
        std::fs::write(p, text + "\n")?;
    }
    Ok(())
}

fn transform(a: &TransformArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let m = measure(&a.measure, a.quadrature)?;
    let z = parse_complex(&a.point).map_err(Failure::Usage)?;
    let kind = match a.kind {
        Kind::G => TransformKind::Cauchy,
        Kind::DG => TransformKind::CauchyDeriv,
        Kind::T => TransformKind::TTransform,
        Kind::DT => TransformKind::TTransformDeriv,
    };
    let n = a.n.unwrap_or_else(|| default_points(&m));
    let v = eval_transform(&m, kind, z, n)?;
    writeln!(out, "{},{}", fmt_f(v.re), fmt_f(v.im))?;
    Ok(())
}

fn support(a: &SupportArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let mu1 = measure(&a.mu1, a.tuning.quadrature)?;
    let mu2 = measure(&a.mu2, a.tuning.quadrature)?;
    let cfg = a.tuning.config();
    let s = match a.op {
        Op::Add => {
            let (t1, t2) = additive_tables(&mu1, &mu2, &cfg)?;
            find_support_additive(&t1, &t2, &cfg)?
        }
        Op::Mul => {
            let (t1, t2) = multiplicative_tables(&mu1, &mu2, &cfg)?;
            find_support_multiplicative(&t1, &t2, &cfg)?
        }
    };
    warn(err, &s.warnings);
    writeln!(out, "{},{}", fmt_f(s.a), fmt_f(s.b))?;
    Ok(())
}

fn read_density_csv(path: &Path) -> Result<Vec<(f64, f64)>, Failure> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))?;
    let mut pts = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))?;
        let num = |i: usize| -> Result<f64, Failure> {
            rec.get(i)
                .and_then(|t| t.trim().parse::<f64>().ok())
                .ok_or_else(|| Failure::Compute(format!("{}: bad row {:?}", path.display(), rec)))
        };
        pts.push((num(0)?, num(1)?));
    }
    if pts.len() < 2 {
        return Err(Failure::Compute(format!("{}: need at least two density rows", path.display())));
    }
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pts)
}

fn sample(a: &SampleArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mu1 = measure(&a.mu1, false)?;
    let s1 = sample_matrix_spectrum(&mu1, a.n, a.seed)?;
    let spec = match &a.mu2 {
        None => s1,
        Some(m2) => {
            let mu2 = measure(m2, false)?;
            let s2 = sample_matrix_spectrum(&mu2, a.n, a.seed.wrapping_add(1))?;
            let op = if a.op == Op::Add { CombineOp::Add } else { CombineOp::Mul };
            free_combine_spectra(&s1, &s2, op, a.seed.wrapping_add(2))?
        }
    };
    let mut csv = String::from("eigenvalue\n");
    for x in &spec.eigenvalues {
        csv.push_str(&fmt_f(*x));
        csv.push('\n');
    }
    let ks = match &a.density {
        Some(p) => {
            // endpoints of the support are implied zeros of the density
            let mut pts = read_density_csv(p)?;
            let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
            let h = (hi - lo) / (pts.len() - 1) as f64;
            pts.insert(0, (lo - h, 0.0));
            pts.push((hi + h, 0.0));
            Some(ks_distance_to_cdf(&spec.eigenvalues, &cumulative(&pts)))
        }
        None => None,
    };
    if a.out == "-" {
        out.write_all(csv.as_bytes())?;
    } else {
        std::fs::write(&a.out, csv)?;
    }
    if let Some(d) = ks {
        writeln!(out, "ks,{}", fmt_f(d))?;
    }
    Ok(())
}

fn convergence(a: &ConvergenceArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let m = measure(&a.measure, false)?;
    let z: C64 = parse_complex(&a.point).map_err(Failure::Usage)?;
    let ns = measure_arg::parse_list(&a.n_list).map_err(Failure::Usage)?;
    let errs = verify_exponential_convergence(&m, z, &ns)?;
    let mut csv = String::from("N,error\n");
    for (n, e) in errs {
        csv.push_str(&format!("{n},{}\n", fmt_f(e)));
    }
    emit(&a.out, &csv, out)
}

/// Runs one command line, writing to the given streams, and returns the
/// process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let res = match &cli.command {
        Command::Add(a) => convolve(a, Op::Add, out, err),
        Command::Mul(a) => convolve(a, Op::Mul, out, err),
        Command::Transform(a) => transform(a, out),
        Command::Support(a) => support(a, out, err),
        Command::Sample(a) => sample(a, out),
        Command::Convergence(a) => convergence(a, out),
    };
    match res {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Compute(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
