//! The `moran` command-line tool.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2/3 certificate verdicts
//! (conditions failed / inconclusive), 64 usage error, 65 malformed system or
//! computation error, 66 unreadable input or unwritable output.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;

use crate::certificates::{certify, CertifyOptions};
use crate::corpus;
use crate::density::{density_histogram, density_verdict, minimal_window, support_cover, tiling_check};
use crate::error::Error;
use crate::hadamard::{construct_l, is_hadamard, unitarity_residual};
use crate::spectrum::{check_orthogonal, level_spectrum, q_partial, q_sum_finite, Sigma};
use crate::system::{parse_system, DigitSet, MoranSystem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_FILE: i32 = 66;

#[derive(Debug, Parser)]
#[command(name = "moran", version, about = "Spectral analysis of Moran measures on the line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify every level of a system.
    Validate(FileArg),
    /// List the candidate spectrum Lambda_n.
    Spectrum(SpectrumArgs),
    /// Check pairwise orthogonality of Lambda_n exactly.
    Ortho(SpectrumArgs),
    /// Tabulate the Q-sum on a grid of xi.
    Qsum(QsumArgs),
    /// Build and verify Hadamard companion sets.
    Hadamard(HadamardArgs),
    /// Run the spectrality certificate.
    Certify(CertifyArgs),
    /// Histogram the density of mu_n and test uniformity.
    Density(DensityArgs),
    /// Test whether the support cover tiles the line by Z.
    Tiling(TilingArgs),
    /// Run the built-in example corpus against its expected results.
    Examples(ExamplesArgs),
}

#[derive(Debug, Args)]
struct FileArg {
    /// System description file.
    file: PathBuf,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    level: u64,
    /// Sign prefix such as `+-+` or `1,-1,1`; later levels use +1.
    #[arg(long, default_value = "", allow_hyphen_values = true, value_parser = parse_sigma)]
    sigma: Sigma,
    /// Write CSV here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QsumArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    level: u64,
    #[arg(long, default_value = "", allow_hyphen_values = true, value_parser = parse_sigma)]
    sigma: Sigma,
    /// Number of grid points.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    grid: u64,
    /// Grid spans [-range, range].
    #[arg(long, default_value_t = 5.0, value_parser = parse_positive)]
    range: f64,
    /// Use the measure itself (tail truncated at this depth) instead of mu_n.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    depth: Option<u64>,
    #[arg(long, default_value_t = 1e-9, value_parser = parse_positive)]
    tol: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HadamardArgs {
    /// System file; every distinct level is checked.
    #[arg(required_unless_present = "p", conflicts_with_all = ["p", "digits"])]
    file: Option<PathBuf>,
    #[arg(long, requires = "digits", value_parser = clap::value_parser!(u64).range(2..))]
    p: Option<u64>,
    /// Comma-separated digits, e.g. `0,1,2`.
    #[arg(long, requires = "p", value_delimiter = ',')]
    digits: Option<Vec<u64>>,
    #[arg(long, default_value_t = 1e-12, value_parser = parse_positive)]
    tol: f64,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    file: PathBuf,
    #[arg(long, default_value = "", allow_hyphen_values = true, value_parser = parse_sigma)]
    sigma: Sigma,
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Largest level scanned for the subsequence n_k.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    scan: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct DensityArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    level: u64,
    #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(1..))]
    bins: u64,
    /// Relative tolerance for uniformity.
    #[arg(long, default_value_t = 0.1, value_parser = parse_positive)]
    tol: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TilingArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    level: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Translates k with |k| <= window are counted; defaults to the diameter rounded up.
    #[arg(long, value_parser = clap::value_parser!(i64).range(0..))]
    window: Option<i64>,
}

#[derive(Debug, Args)]
struct ExamplesArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_sigma(s: &str) -> Result<Sigma, Error> {
    if s.trim().is_empty() {
        Ok(Sigma::positive())
    } else {
        s.parse()
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a positive number")),
    }
}

/// Decimal with 15 significant digits.
pub fn format_sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        format!("{:.*}", (14 - exp).max(0) as usize, x)
    } else {
        format!("{x:.14e}")
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn data(e: Error) -> Self {
        Failure {
            code: EXIT_DATA,
            message: e.to_string(),
        }
    }

    fn file(path: &std::path::Path, e: std::io::Error) -> Self {
        Failure {
            code: EXIT_FILE,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::data(e)
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn load(path: &std::path::Path) -> std::result::Result<MoranSystem, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::file(path, e))?;
    parse_system(&text).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })
}

fn usage(message: String) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message,
    }
}

/// Checks that `level` exists in the system.
fn level_of(system: &MoranSystem, level: u64) -> std::result::Result<usize, Failure> {
    let n = level as usize;
    match system.len() {
        Some(len) if n > len => Err(usage(format!("--level {n} exceeds the {len} levels of a finite system"))),
        _ => Ok(n),
    }
}

/// CSV goes to `output` when given, otherwise to `out`.
fn emit_csv(
    out: &mut dyn Write,
    output: Option<&PathBuf>,
    header: &str,
    rows: impl Iterator<Item = String>,
) -> std::result::Result<(), Failure> {
    let mut text = String::from(header);
    text.push('\n');
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::file(path, e)),
        None => {
            let _ = out.write_all(text.as_bytes());
            Ok(())
        }
    }
}

/// Run the tool on `argv` (including the program name) and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate(a) => cmd_validate(a, out),
        Command::Spectrum(a) => cmd_spectrum(a, out),
        Command::Ortho(a) => cmd_ortho(a, out),
        Command::Qsum(a) => cmd_qsum(a, out, err),
        Command::Hadamard(a) => cmd_hadamard(a, out),
        Command::Certify(a) => cmd_certify(a, out),
        Command::Density(a) => cmd_density(a, out, err),
        Command::Tiling(a) => cmd_tiling(a, out),
        Command::Examples(a) => cmd_examples(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "moran: {}", f.message);
            f.code
        }
    }
}

fn cmd_validate(a: FileArg, out: &mut dyn Write) -> CmdResult {
    let system = load(&a.file)?;
    let _ = writeln!(out, "{:<10} {:<6} {:<24} {:<8} {:<4} notes", "level", "p", "digits", "class", "Phi");
    let pre = system.preamble().len();
    let mut admissible = true;
    for (idx, level) in system.distinct_levels().enumerate() {
        let label = if idx < pre {
            format!("{}", idx + 1)
        } else {
            format!("c{}", idx - pre + 1)
        };
        let c = &level.classification;
        admissible &= c.class.is_admissible();
        let notes: Vec<&str> = c
            .violations
            .iter()
            .chain(c.warnings.iter())
            .map(String::as_str)
            .collect();
        let _ = writeln!(
            out,
            "{:<10} {:<6} {:<24} {:<8} {:<4} {}",
            label,
            level.p,
            level.digits.to_string(),
            c.class.label(),
            level.phi(),
            notes.join("; ")
        );
    }
    let _ = writeln!(
        out,
        "system: {}",
        if admissible { "admissible" } else { "not admissible" }
    );
    Ok(EXIT_OK)
}

fn cmd_spectrum(a: SpectrumArgs, out: &mut dyn Write) -> CmdResult {
    let system = load(&a.file)?;
    let n = level_of(&system, a.level)?;
    let spectrum = level_spectrum(&system, n, &a.sigma)?;
    let rows = spectrum
        .points()
        .iter()
        .zip(spectrum.points_f64())
        .map(|(x, f)| format!("{x},{}", format_sig15(*f)));
    emit_csv(out, a.output.as_ref(), "lambda_exact,lambda", rows)?;
    if a.output.is_some() {
        let _ = writeln!(out, "Lambda_{n} (sigma {}): {} points", a.sigma, spectrum.len());
    }
    Ok(EXIT_OK)
}

fn cmd_ortho(a: SpectrumArgs, out: &mut dyn Write) -> CmdResult {
    let system = load(&a.file)?;
    let n = level_of(&system, a.level)?;
    let spectrum = level_spectrum(&system, n, &a.sigma)?;
    let report = check_orthogonal(&system, n, spectrum.points());
    let _ = writeln!(
        out,
        "Lambda_{n} (sigma {}): {} points, {} pairs, {} not orthogonal",
        a.sigma,
        spectrum.len(),
        report.pairs_checked,
        report.failure_count
    );
    for (x, y) in &report.failures {
        let _ = writeln!(out, "  not orthogonal: {x}, {y}");
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_qsum(a: QsumArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let system = load(&a.file)?;
    let n = level_of(&system, a.level)?;
    let spectrum = level_spectrum(&system, n, &a.sigma)?;
    let pts = spectrum.points_f64();
    let grid = a.grid as usize;
    let xs: Vec<f64> = (0..grid)
        .map(|i| {
            if grid == 1 {
                0.0
            } else {
                -a.range + 2.0 * a.range * i as f64 / (grid - 1) as f64
            }
        })
        .collect();
    let qs: Vec<f64> = {
        use rayon::prelude::*;
        xs.par_iter()
            .map(|&xi| match a.depth {
                Some(d) => q_partial(&system, pts, d as usize, xi),
                None => q_sum_finite(&system, n, pts, xi),
            })
            .collect()
    };
    let rows = xs
        .iter()
        .zip(&qs)
        .map(|(x, q)| format!("{},{}", format_sig15(*x), format_sig15(*q)));
    emit_csv(out, a.output.as_ref(), "xi,Q", rows)?;
    let (ok, summary) = match a.depth {
        None => {
            let worst = qs.iter().map(|q| (q - 1.0).abs()).fold(0.0, f64::max);
            (
                worst <= a.tol,
                format!("max |Q - 1| = {worst:.3e} over {grid} points (tol {:e})", a.tol),
            )
        }
        Some(d) => {
            let worst = qs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (
                worst <= 1.0 + a.tol,
                format!("max Q = {worst:.12} with tail depth {d} (Bessel bound 1 + {:e})", a.tol),
            )
        }
    };
    let sink: &mut dyn Write = if a.output.is_some() { out } else { err };
    let _ = writeln!(sink, "{summary}");
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn hadamard_row(out: &mut dyn Write, p: u64, digits: &DigitSet, tol: f64) -> std::result::Result<bool, Failure> {
    match construct_l(p, digits) {
        Ok(l) => {
            let residual = unitarity_residual(p, digits.digits(), &l)?;
            let exact = is_hadamard(p, digits, &l)?;
            let ok = exact && residual < tol;
            let l: Vec<String> = l.iter().map(i64::to_string).collect();
            let _ = writeln!(
                out,
                "({p},{digits})  L = {{{}}}  residual {residual:.2e}  exact {}  {}",
                l.join(","),
                if exact { "yes" } else { "no" },
                if ok { "ok" } else { "FAIL" }
            );
            Ok(ok)
        }
        Err(e) => {
            let _ = writeln!(out, "({p},{digits})  no companion set: {e}");
            Ok(false)
        }
    }
}

fn cmd_hadamard(a: HadamardArgs, out: &mut dyn Write) -> CmdResult {
    let mut ok = true;
    match (a.file, a.p, a.digits) {
        (Some(file), _, _) => {
            let system = load(&file)?;
            for level in system.distinct_levels() {
                ok &= hadamard_row(out, level.p, &level.digits, a.tol)?;
            }
        }
        (None, Some(p), Some(d)) => {
            let digits = DigitSet::new(d).map_err(|e| usage(e.to_string()))?;
            ok = hadamard_row(out, p, &digits, a.tol)?;
        }
        _ => return Err(usage("give a system file or both --p and --digits".into())),
    }
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_certify(a: CertifyArgs, out: &mut dyn Write) -> CmdResult {
    let system = load(&a.file)?;
    let opts = CertifyOptions {
        sigma: a.sigma,
        depth: a.depth as usize,
        samples: a.samples as usize,
        scan_levels: a.scan as usize,
        seed: a.seed,
    };
    let cert = certify(&system, &opts);
    let _ = write!(out, "{cert}");
    Ok(cert.verdict.exit_code())
}

fn cmd_density(a: DensityArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let system = load(&a.file)?;
    let n = level_of(&system, a.level)?;
    let hist = density_histogram(&system, n, a.bins as usize)?;
    let rows = hist
        .centers()
        .into_iter()
        .zip(&hist.densities)
        .map(|(c, d)| format!("{},{}", format_sig15(c), format_sig15(*d)));
    emit_csv(out, a.output.as_ref(), "center,density", rows)?;
    let sink: &mut dyn Write = if a.output.is_some() { out } else { err };
    let _ = writeln!(
        sink,
        "level {n}: {} atoms in {} bins on [{}, {}]",
        hist.atom_count,
        hist.bins(),
        hist.lo,
        hist.hi
    );
    let _ = writeln!(
        sink,
        "mass {:.12}  integral {:.6}  cv {:.4}  empty bins {:.1}%",
        hist.total_mass(),
        hist.integral(),
        hist.coefficient_of_variation(),
        100.0 * hist.empty_fraction()
    );
    for w in hist.warnings() {
        let _ = writeln!(sink, "warning: {w}");
    }
    let _ = writeln!(sink, "verdict: {}", density_verdict(&hist, a.tol));
    Ok(EXIT_OK)
}

fn cmd_tiling(a: TilingArgs, out: &mut dyn Write) -> CmdResult {
    let system = load(&a.file)?;
    let n = level_of(&system, a.level)?;
    let cover = support_cover(&system, n)?;
    let window = a.window.unwrap_or_else(|| minimal_window(&cover));
    let report = tiling_check(&cover, window, a.samples as usize).map_err(|e| usage(e.to_string()))?;
    let _ = writeln!(
        out,
        "support cover at level {n}: {} intervals, total length {} (~{:.6})",
        cover.intervals().len(),
        cover.total_length(),
        cover.total_length().to_f64().unwrap_or(f64::NAN)
    );
    let _ = writeln!(out, "{report}");
    Ok(if report.tiles { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_examples(a: ExamplesArgs, out: &mut dyn Write) -> CmdResult {
    let opts = CertifyOptions {
        seed: a.seed,
        ..CertifyOptions::default()
    };
    let _ = writeln!(out, "seed: {}", a.seed);
    let _ = writeln!(
        out,
        "{:<20} {:<10} {:<38} {:<38} status",
        "example", "quantity", "expected", "observed"
    );
    let mut all_ok = true;
    for entry in corpus::entries() {
        for check in corpus::run_entry(&entry, &opts)? {
            all_ok &= check.ok();
            let _ = writeln!(out, "{check}");
        }
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}
