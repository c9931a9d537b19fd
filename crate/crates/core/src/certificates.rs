//! Quantitative lower bounds on mask polynomials and tail products, and their
//! assembly into a spectrality certificate.
//!
//! The certificate follows the sufficient condition for spectrality: find
//! levels `n_k` and `eps > 0` with `|hat(mu_{>n_k})(xi + lambda)| > eps` for all
//! `|xi| < 1` and `lambda in Lambda_{n_k}`. When the cycle contains a level with
//! `Phi >= 3` the bound is chained as `eps = C_0 * eps'`, where `C_0` bounds the
//! levels from `n_k + 2` on and `eps'` bounds the single level `n_k + 1`; the
//! chained bound is then confirmed on sampled `(xi, lambda)` pairs. When only
//! two-digit levels recur, the certificate checks the finite head exactly and
//! the divisibility condition on the tail.

use std::f64::consts::PI;
use std::fmt;

use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hadamard::is_hadamard;
use crate::measure::fourier_tail;
use crate::spectrum::{check_orthogonal, factor_sets, lambda_norm_ratio, level_spectrum, q_sum_finite, Sigma};
use crate::system::{DigitClass, MoranSystem};
use crate::Rational;

/// Bounds below this are treated as numerically indistinguishable from zero.
pub const DEGENERATE_BOUND: f64 = 1e-9;

/// Smallest `n_k` for which the tail-product estimate holds.
pub const MIN_SUBSEQUENCE_LEVEL: usize = 7;

/// `h(k, n) = prod_{i=k+1}^{n-1} 1/Phi(i) * (prod_{j=1}^{k} 1/Phi(j) + 1)`.
pub fn h_bound(system: &MoranSystem, k: usize, n: usize) -> Result<Rational> {
    if k == 0 || k >= n {
        return Err(Error::Precondition(format!("h_bound needs 1 <= k < n (k = {k}, n = {n})")));
    }
    let inv_phi = |i: usize| -> Result<Rational> {
        let phi = system.try_level(i)?.phi();
        Ok(Rational::new(1.into(), phi.into()))
    };
    let mut head = Rational::one();
    for j in 1..=k {
        head *= inv_phi(j)?;
    }
    let mut middle = Rational::one();
    for i in k + 1..n {
        middle *= inv_phi(i)?;
    }
    Ok(middle * (head + Rational::one()))
}

/// `max_{lambda in Lambda_k} |lambda| / P_k`; at most 1 for admissible systems.
pub fn lambda_norm_check(system: &MoranSystem, k: usize, sigma: &Sigma) -> Result<Rational> {
    lambda_norm_ratio(system, k, sigma)
}

/// Parameters of the class-specific lower bound for `|m_D(x / P)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaskBound {
    Consecutive { n: u64, scale: f64 },
    TwoPoint { d: u64, scale: f64 },
    ThreeDigit { a: u64, b: u64, scale: f64 },
}

impl MaskBound {
    pub fn for_class(class: DigitClass, scale: f64) -> Result<Self> {
        match class {
            DigitClass::T1 { n } => Ok(MaskBound::Consecutive { n, scale }),
            DigitClass::T2 { a, b } => Ok(MaskBound::ThreeDigit { a, b, scale }),
            DigitClass::T3 { d, .. } => Ok(MaskBound::TwoPoint { d, scale }),
            DigitClass::Invalid => Err(Error::Precondition("no mask bound for an invalid level".into())),
        }
    }

    /// Lower bound for `|m_D(x / scale)|`:
    ///
    /// * consecutive: `1 - (1/6) (N pi x / P)^2`
    /// * two-point: `1 - (1/2) (pi d x / P)^2`
    /// * three-digit: `(1/3) |cos(pi (a+b) x / P) + 2 cos(pi (a-b) x / P)|`
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            MaskBound::Consecutive { n, scale } => 1.0 - (n as f64 * PI * x / scale).powi(2) / 6.0,
            MaskBound::TwoPoint { d, scale } => 1.0 - 0.5 * (PI * d as f64 * x / scale).powi(2),
            MaskBound::ThreeDigit { a, b, scale } => {
                let s = PI * (a + b) as f64 * x / scale;
                let t = PI * (a as f64 - b as f64) * x / scale;
                (s.cos() + 2.0 * t.cos()).abs() / 3.0
            }
        }
    }
}

pub fn mask_lower_bound(bound: &MaskBound, x: f64) -> f64 {
    bound.eval(x)
}

/// `f(x, y) = cos x cos y cos(x - y)`.
pub fn f_eval(x: f64, y: f64) -> f64 {
    x.cos() * y.cos() * (x - y).cos()
}

/// Global minimum `-1/8` of `f` and its eight minimizers in `(-pi, pi]^2`.
pub fn f_min_points() -> (f64, [(f64, f64); 8]) {
    let (a, b) = (PI / 3.0, 2.0 * PI / 3.0);
    (
        -0.125,
        [
            (-b, b),
            (-a, a),
            (a, -a),
            (b, -b),
            (b, a),
            (a, b),
            (-b, -a),
            (-a, -b),
        ],
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMinimum {
    pub value: f64,
    /// One representative (the best grid point) per cluster of near-minimal points.
    pub argmins: Vec<(f64, f64)>,
}

/// Brute-force minimization of `f` on a `resolution x resolution` grid over `(-pi, pi]^2`.
///
/// Grid points within `cluster_tol` of the minimum are grouped by periodic
/// distance; each group contributes its best point.
pub fn f_grid_minimum(resolution: usize, cluster_tol: f64) -> GridMinimum {
    use rayon::prelude::*;
    let step = 2.0 * PI / resolution as f64;
    let coord = |i: usize| -PI + (i + 1) as f64 * step;
    let rows: Vec<Vec<(f64, f64, f64)>> = (0..resolution)
        .into_par_iter()
        .map(|i| {
            let x = coord(i);
            (0..resolution)
                .map(|j| {
                    let y = coord(j);
                    (f_eval(x, y), x, y)
                })
                .collect()
        })
        .collect();
    let value = rows
        .iter()
        .flatten()
        .map(|p| p.0)
        .fold(f64::INFINITY, f64::min);
    let wrap = |d: f64| {
        let d = d.abs() % (2.0 * PI);
        d.min(2.0 * PI - d)
    };
    let mut clusters: Vec<(f64, f64, f64)> = Vec::new();
    for &(v, x, y) in rows.iter().flatten().filter(|p| p.0 <= value + cluster_tol) {
        match clusters
            .iter_mut()
            .find(|c| wrap(c.1 - x) < 0.5 && wrap(c.2 - y) < 0.5)
        {
            Some(c) if v < c.0 => *c = (v, x, y),
            Some(_) => {}
            None => clusters.push((v, x, y)),
        }
    }
    GridMinimum {
        value,
        argmins: clusters.into_iter().map(|(_, x, y)| (x, y)).collect(),
    }
}

/// `C_0(n_k) = prod_{i >= n_k + 2} (1 - (1/2) (43 pi / (96 * 2^{i-9}))^2)`.
///
/// Only defined for `n_k >= 7`, where every factor is positive. The product is
/// evaluated until the factors reach `1 - 1e-15`.
pub fn tail_constant(n_k: usize) -> Result<f64> {
    if n_k < MIN_SUBSEQUENCE_LEVEL {
        return Err(Error::Precondition(format!("tail_constant needs n_k >= 7 (got {n_k})")));
    }
    let c = 43.0 * PI / 96.0;
    let mut product = 1.0;
    let mut i = n_k as i32 + 2;
    loop {
        let defect = 0.5 * (c / 2f64.powi(i - 9)).powi(2);
        if defect < 1e-15 {
            break;
        }
        product *= 1.0 - defect;
        i += 1;
    }
    Ok(product)
}

/// T1 next-level constant `1 - (1/6)(3 pi / 4)^2`.
pub fn t1_next_level_bound() -> f64 {
    1.0 - (3.0 * PI / 4.0).powi(2) / 6.0
}

const T2_GRID: usize = 801;

/// Certified lower bound for `|m_{D_{n_k+1}}((xi + lambda)/P_{n_k+1})|` over
/// `|xi| < 1`, `lambda in Lambda_{n_k}`.
///
/// For a three-digit level `{0, a, b}` the squared modulus is `(1 + 8 f(w1, w2)) / 9`
/// with `w1 = pi a t`, `w2 = pi b t` of the same sign, where
/// `|t| <= (1 + 1/P_{n_k}) / p`. The minimum over the box
/// `[0, W1] x [0, W2]` is taken on a grid and lowered by the Lipschitz slack
/// `4 (h1 + h2)` of `1 + 8f`.
pub fn epsilon_next_level(system: &MoranSystem, n_k: usize) -> Result<f64> {
    let next = system.try_level(n_k + 1)?;
    match next.class() {
        DigitClass::T1 { .. } => Ok(t1_next_level_bound()),
        DigitClass::T2 { a, b } => {
            let reach = (1.0 + 1.0 / system.scale_f64(n_k)) / next.p as f64;
            Ok(three_digit_box_bound(PI * a as f64 * reach, PI * b as f64 * reach))
        }
        DigitClass::T3 { .. } => Err(Error::Precondition(format!(
            "subsequence must select Phi >= 3 (Phi({}) = 2)",
            n_k + 1
        ))),
        DigitClass::Invalid => Err(Error::NotAdmissible {
            level: n_k + 1,
            reason: next.classification.violations.join("; "),
        }),
    }
}

/// `sqrt(min (1 + 8 f) / 9)` over `[0, w1_max] x [0, w2_max]`, certified.
pub fn three_digit_box_bound(w1_max: f64, w2_max: f64) -> f64 {
    let (_, minimizers) = f_min_points();
    if minimizers
        .iter()
        .any(|&(x, y)| x >= 0.0 && y >= 0.0 && x <= w1_max && y <= w2_max)
    {
        return 0.0;
    }
    let h1 = w1_max / (T2_GRID - 1) as f64;
    let h2 = w2_max / (T2_GRID - 1) as f64;
    let mut min = f64::INFINITY;
    for i in 0..T2_GRID {
        for j in 0..T2_GRID {
            min = min.min(1.0 + 8.0 * f_eval(i as f64 * h1, j as f64 * h2));
        }
    }
    let certified = (min - 4.0 * (h1 + h2)).max(0.0);
    (certified / 9.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    ConditionsFailed,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::ConditionsFailed => 2,
            Verdict::Inconclusive => 3,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::ConditionsFailed => "CONDITIONS_FAILED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "PASS" => Ok(Verdict::Pass),
            "CONDITIONS_FAILED" => Ok(Verdict::ConditionsFailed),
            "INCONCLUSIVE" => Ok(Verdict::Inconclusive),
            other => Err(Error::Precondition(format!("unknown verdict '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralCase {
    /// Infinitely many levels with `Phi >= 3`.
    RecurringLarge,
    /// Only two-digit levels recur (or the system is finite).
    EventuallyTwoDigit,
}

/// Chained bound at one subsequence level.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsequenceBound {
    pub n_k: usize,
    pub lambda_norm: f64,
    pub tail_constant: f64,
    pub epsilon_next: f64,
    /// `tail_constant * epsilon_next`.
    pub epsilon: f64,
    pub samples: usize,
    /// Smallest certified `|hat(mu_{>n_k})(xi + lambda)|` seen while sampling.
    pub min_observed: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    pub sigma: Sigma,
    pub depth: usize,
    pub samples: usize,
    pub scan_levels: usize,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            sigma: Sigma::positive(),
            depth: 30,
            samples: 200,
            scan_levels: 12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub case: Option<SpectralCase>,
    pub sigma: Sigma,
    pub seed: u64,
    pub subsequence: Vec<SubsequenceBound>,
    pub diagnostics: Vec<String>,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict)?;
        if let Some(case) = self.case {
            let label = match case {
                SpectralCase::RecurringLarge => "infinitely many levels with Phi >= 3",
                SpectralCase::EventuallyTwoDigit => "finitely many levels with Phi >= 3",
            };
            writeln!(f, "case: {label}")?;
        }
        writeln!(f, "sigma: {}", self.sigma)?;
        writeln!(f, "seed: {}", self.seed)?;
        if !self.subsequence.is_empty() {
            writeln!(f, "n_k  |lambda|/P  C0          eps'        eps         min sampled  violations")?;
            for b in &self.subsequence {
                writeln!(
                    f,
                    "{:<4} {:<11.6} {:<11.4e} {:<11.4e} {:<11.4e} {:<12.6} {}",
                    b.n_k, b.lambda_norm, b.tail_constant, b.epsilon_next, b.epsilon, b.min_observed, b.violations
                )?;
            }
        }
        for d in &self.diagnostics {
            writeln!(f, "note: {d}")?;
        }
        Ok(())
    }
}

/// Assemble a spectrality certificate; every outcome is a verdict, never an error.
pub fn certify(system: &MoranSystem, opts: &CertifyOptions) -> Certificate {
    let mut cert = Certificate {
        verdict: Verdict::Inconclusive,
        case: None,
        sigma: opts.sigma.clone(),
        seed: opts.seed,
        subsequence: Vec::new(),
        diagnostics: Vec::new(),
    };

    let mut failed = false;
    let mut warned = false;
    let pre_len = system.preamble().len();
    for (idx, level) in system.distinct_levels().enumerate() {
        let where_ = if idx < pre_len {
            format!("level {}", idx + 1)
        } else {
            format!("cycle entry {} (first at level {})", idx - pre_len + 1, idx + 1)
        };
        let c = &level.classification;
        for v in &c.violations {
            failed = true;
            cert.diagnostics.push(format!("{where_} ({},{}): {v}", level.p, level.digits));
        }
        for w in &c.warnings {
            warned = true;
            cert.diagnostics.push(format!(
                "{where_} ({},{}): warning {w}: b/p = 2/3 is outside the strict T2 condition",
                level.p, level.digits
            ));
        }
    }
    if failed {
        cert.verdict = Verdict::ConditionsFailed;
        return cert;
    }

    let ok = if system.has_recurring_large_level() {
        cert.case = Some(SpectralCase::RecurringLarge);
        certify_recurring(system, opts, &mut cert)
    } else {
        cert.case = Some(SpectralCase::EventuallyTwoDigit);
        certify_two_digit_tail(system, opts, &mut cert)
    };
    cert.verdict = if ok && !warned {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    cert
}

fn certify_recurring(system: &MoranSystem, opts: &CertifyOptions, cert: &mut Certificate) -> bool {
    let candidates: Vec<usize> = (MIN_SUBSEQUENCE_LEVEL..=opts.scan_levels)
        .filter(|&n| system.phi(n + 1).is_some_and(|phi| phi >= 3))
        .collect();
    if candidates.is_empty() {
        cert.diagnostics.push(format!(
            "no n_k in [{MIN_SUBSEQUENCE_LEVEL}, {}] with Phi(n_k + 1) >= 3",
            opts.scan_levels
        ));
        return false;
    }
    // C_0(7) bounds the tail factors for every n_k >= 7
    let c0 = tail_constant(MIN_SUBSEQUENCE_LEVEL).expect("n_k = 7 is in range");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut ok = true;
    for n_k in candidates {
        let bound = match subsequence_bound(system, opts, n_k, c0, &mut rng) {
            Ok(b) => b,
            Err(e) => {
                cert.diagnostics.push(format!("n_k = {n_k}: {e}"));
                ok = false;
                continue;
            }
        };
        if bound.lambda_norm > 1.0 {
            cert.diagnostics
                .push(format!("n_k = {n_k}: max |lambda|/P exceeds 1 ({})", bound.lambda_norm));
            ok = false;
        }
        if bound.epsilon < DEGENERATE_BOUND {
            cert.diagnostics.push(format!(
                "n_k = {n_k}: chained bound {:.3e} is below {DEGENERATE_BOUND:e}",
                bound.epsilon
            ));
            ok = false;
        }
        if bound.violations > 0 {
            cert.diagnostics.push(format!(
                "n_k = {n_k}: {} sampled points fell below the chained bound",
                bound.violations
            ));
            ok = false;
        }
        cert.subsequence.push(bound);
    }
    ok
}

fn subsequence_bound(
    system: &MoranSystem,
    opts: &CertifyOptions,
    n_k: usize,
    c0: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SubsequenceBound> {
    let epsilon_next = epsilon_next_level(system, n_k)?;
    let epsilon = c0 * epsilon_next;
    let lambda_norm = lambda_norm_check(system, n_k, &opts.sigma)?
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let factors = factor_sets(system, n_k, &opts.sigma)?;

    let sum_of = |pick: &dyn Fn(&[Rational]) -> Rational| -> f64 {
        factors
            .iter()
            .map(|f| pick(f))
            .fold(Rational::from_integer(0.into()), |a, b| a + b)
            .to_f64()
            .unwrap_or(f64::NAN)
    };
    let lambda_max = sum_of(&|f| f.iter().max().cloned().unwrap_or_default());
    let lambda_min = sum_of(&|f| f.iter().min().cloned().unwrap_or_default());
    let edge = 1.0 - 1e-9;
    let mut pairs = vec![(edge, lambda_max), (-edge, lambda_min), (-edge, lambda_max), (edge, lambda_min)];
    for _ in 0..opts.samples {
        let xi: f64 = rng.gen_range(-1.0..1.0);
        let lambda = factors
            .iter()
            .map(|f| f[rng.gen_range(0..f.len())].clone())
            .fold(Rational::from_integer(0.into()), |a, b| a + b)
            .to_f64()
            .unwrap_or(f64::NAN);
        pairs.push((xi, lambda));
    }

    let mut min_observed = f64::INFINITY;
    let mut violations = 0;
    for &(xi, lambda) in &pairs {
        let lb = fourier_tail(system, n_k, xi + lambda, opts.depth)?.lower_bound();
        min_observed = min_observed.min(lb);
        if lb <= epsilon {
            violations += 1;
        }
    }
    Ok(SubsequenceBound {
        n_k,
        lambda_norm,
        tail_constant: c0,
        epsilon_next,
        epsilon,
        samples: pairs.len(),
        min_observed,
        violations,
    })
}

/// Finite head checked level by level (and pairwise when small); the recurring
/// two-digit tail carries the divisibility condition.
fn certify_two_digit_tail(system: &MoranSystem, opts: &CertifyOptions, cert: &mut Certificate) -> bool {
    const MAX_HEAD_POINTS: usize = 5000;
    let head = system.preamble().len().max(1);
    let mut ok = match head_hadamard_levels(system, head, &opts.sigma) {
        Ok(bad) if bad.is_empty() => true,
        Ok(bad) => {
            for i in bad {
                cert.diagnostics
                    .push(format!("level {i}: spectrum factor is not a Hadamard companion set"));
            }
            false
        }
        Err(e) => {
            cert.diagnostics.push(format!("Lambda_{head}: {e}"));
            return false;
        }
    };
    if system.atom_count(head) <= MAX_HEAD_POINTS {
        ok &= check_head_exactly(system, head, opts, cert);
    } else {
        cert.diagnostics.push(format!(
            "Lambda_{head} has {} points: verified through per-level Hadamard triples only",
            system.atom_count(head)
        ));
    }
    for level in system.cycle() {
        if !matches!(level.class(), DigitClass::T3 { .. }) {
            ok = false;
            cert.diagnostics.push(format!(
                "cycle level ({},{}) is not a two-digit T3 level",
                level.p, level.digits
            ));
        }
    }
    if system.is_finite() {
        cert.diagnostics
            .push("finite system: the measure is mu_n itself".to_string());
    } else {
        cert.diagnostics.push(format!(
            "tail of {} recurring two-digit levels satisfies 2 | p/gcd(d,p)",
            system.cycle().len()
        ));
    }
    ok
}

/// Levels `i <= head` whose factor set, divided by `P_{i-1}`, is not a companion set for `(p_i, D_i)`.
fn head_hadamard_levels(system: &MoranSystem, head: usize, sigma: &Sigma) -> Result<Vec<usize>> {
    let factors = factor_sets(system, head, sigma)?;
    let mut bad = Vec::new();
    let mut prev_scale = num_bigint::BigInt::from(1);
    for (idx, factor) in factors.iter().enumerate() {
        let level = system.try_level(idx + 1)?;
        let companions: Option<Vec<i64>> = factor
            .iter()
            .map(|f| {
                let c = f / Rational::from_integer(prev_scale.clone());
                if c.is_integer() {
                    c.to_integer().to_i64()
                } else {
                    None
                }
            })
            .collect();
        let hadamard = match companions {
            Some(c) => is_hadamard(level.p, &level.digits, &c)?,
            None => false,
        };
        if !hadamard {
            bad.push(idx + 1);
        }
        prev_scale *= level.p;
    }
    Ok(bad)
}

fn check_head_exactly(system: &MoranSystem, head: usize, opts: &CertifyOptions, cert: &mut Certificate) -> bool {
    let spectrum = match level_spectrum(system, head, &opts.sigma) {
        Ok(s) => s,
        Err(e) => {
            cert.diagnostics.push(format!("Lambda_{head}: {e}"));
            return false;
        }
    };
    let mut ok = true;
    let report = check_orthogonal(system, head, spectrum.points());
    if !report.passed() {
        ok = false;
        cert.diagnostics.push(format!(
            "Lambda_{head}: {} of {} pairs are not orthogonal",
            report.failure_count, report.pairs_checked
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let worst = (0..opts.samples.max(1))
        .map(|_| {
            let xi: f64 = rng.gen_range(-5.0..5.0);
            (q_sum_finite(system, head, spectrum.points_f64(), xi) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    if worst > 1e-9 {
        ok = false;
        cert.diagnostics
            .push(format!("Lambda_{head}: |Q - 1| reached {worst:.3e} on sampled xi"));
    }
    cert.diagnostics.push(format!(
        "Lambda_{head} is a spectrum of mu_{head}: {} points, {} pairs orthogonal, max |Q - 1| = {worst:.1e}",
        spectrum.len(),
        report.pairs_checked
    ));
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::parse_system;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn h_bound_examples() {
        let sys = parse_system("cycle: (2,{0,1})").unwrap();
        assert_eq!(h_bound(&sys, 1, 3).unwrap(), r(3, 4));
        assert_eq!(h_bound(&sys, 1, 2).unwrap(), r(3, 2));
        assert!(h_bound(&sys, 2, 2).is_err());
        let mixed = parse_system("cycle: (9,{0,1,2}) (4,{0,2}) (12,{0,1,2,3})").unwrap();
        for k in 1..5 {
            for n in k + 1..9 {
                let phi = mixed.phi(n).unwrap() as i64;
                assert_eq!(
                    h_bound(&mixed, k, n + 1).unwrap(),
                    h_bound(&mixed, k, n).unwrap() / r(phi, 1)
                );
            }
        }
    }

    #[test]
    fn mask_bound_examples() {
        let t3 = MaskBound::TwoPoint { d: 1, scale: 4.0 };
        let lb = t3.eval(1.0);
        assert!((lb - (1.0 - PI * PI / 32.0)).abs() < 1e-15);
        assert!(lb <= (PI / 4.0).cos());
        assert_eq!(MaskBound::Consecutive { n: 5, scale: 20.0 }.eval(0.0), 1.0);
        assert_eq!(MaskBound::ThreeDigit { a: 1, b: 2, scale: 3.0 }.eval(0.0), 1.0);
        assert!(MaskBound::for_class(DigitClass::Invalid, 2.0).is_err());
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_eval(0.0, 0.0), 1.0);
        assert!((f_eval(PI / 3.0, -PI / 3.0) + 0.125).abs() < 1e-15);
        let (v, pts) = f_min_points();
        for (x, y) in pts {
            assert!((f_eval(x, y) - v).abs() < 1e-15);
        }
    }

    #[test]
    fn tail_constant_examples() {
        let c7 = tail_constant(7).unwrap();
        assert!(c7 > 0.0 && c7 < 1.0);
        assert!((c7 - 6.9e-3).abs() < 1e-4, "C0(7) = {c7}");
        assert!(tail_constant(8).unwrap() > c7);
        assert!(tail_constant(6).is_err());
        let first = 1.0 - 0.5 * (43.0 * PI / 96.0).powi(2);
        assert!(first > 0.0 && (first - 0.0099).abs() < 1e-4);
    }

    #[test]
    fn epsilon_next_examples() {
        assert!((t1_next_level_bound() - 0.0747).abs() < 1e-4);
        let t1 = parse_system("cycle: (4,{0,2}) (12,{0,1,2,3})").unwrap();
        assert_eq!(epsilon_next_level(&t1, 7).unwrap(), t1_next_level_bound());
        assert!(epsilon_next_level(&t1, 8).is_err());

        // b/p = 1/3: on [0, pi/3]^2 every cosine is >= 1/2, so f >= 1/8
        let t2 = parse_system("cycle: (6,{0,1,2}) (4,{0,2})").unwrap();
        let eps = epsilon_next_level(&t2, 8).unwrap();
        assert!(eps >= (2.0f64 / 9.0).sqrt() - 1e-12, "eps = {eps}");

        // b/p = 2/3: the box reaches the minimizer (pi/3, 2pi/3)
        let boundary = parse_system("cycle: (3,{0,1,2}) (2,{0,1})").unwrap();
        assert!(epsilon_next_level(&boundary, 8).unwrap() < DEGENERATE_BOUND);
    }

    #[test]
    fn box_bound_is_below_true_minimum() {
        for &(w1, w2) in &[(0.3, 0.7), (1.0, 1.5), (0.5, 2.0)] {
            let bound = three_digit_box_bound(w1, w2);
            let mut truth = f64::INFINITY;
            for i in 0..=300 {
                for j in 0..=300 {
                    let (x, y) = (w1 * i as f64 / 300.0, w2 * j as f64 / 300.0);
                    truth = truth.min(((1.0 + 8.0 * f_eval(x, y)) / 9.0).max(0.0).sqrt());
                }
            }
            assert!(bound <= truth + 1e-12, "({w1}, {w2}): {bound} > {truth}");
        }
    }

    #[test]
    fn verdict_strings_round_trip() {
        for v in [Verdict::Pass, Verdict::ConditionsFailed, Verdict::Inconclusive] {
            assert_eq!(v.as_str().parse::<Verdict>().unwrap(), v);
        }
        assert_eq!(
            [Verdict::Pass, Verdict::ConditionsFailed, Verdict::Inconclusive].map(|v| v.exit_code()),
            [0, 2, 3]
        );
    }

    #[test]
    fn certify_small_scan_is_inconclusive() {
        let sys = parse_system("cycle: (9,{0,1,2}) (4,{0,2})").unwrap();
        let opts = CertifyOptions {
            scan_levels: 6,
            ..CertifyOptions::default()
        };
        assert_eq!(certify(&sys, &opts).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn certify_boundary_ratio_is_inconclusive() {
        let sys = parse_system("cycle: (2,{0,1}) (3,{0,1,2})").unwrap();
        let c = certify(&sys, &CertifyOptions::default());
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(c.diagnostics.iter().any(|d| d.contains("boundary-ratio")));
    }
}
