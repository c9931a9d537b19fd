//! Generator sequences `{(p_n, D_n)}` and their per-level admissibility classes.
//!
//! A system is stored as a finite preamble followed by a cycle that repeats
//! forever, so `level(n)` is O(1) and every quantity that depends on the whole
//! infinite tail (maximum digit, minimum scale) is a finite computation.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::Rational;

/// Finite set of nonnegative integer digits containing 0, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitSet {
    digits: Vec<u64>,
}

impl DigitSet {
    pub fn new(digits: impl IntoIterator<Item = u64>) -> Result<Self> {
        let raw: Vec<u64> = digits.into_iter().collect();
        let set: BTreeSet<u64> = raw.iter().copied().collect();
        if set.is_empty() {
            return Err(Error::Structural("empty digit set".into()));
        }
        if set.len() != raw.len() {
            return Err(Error::Structural(format!("duplicate digits in {raw:?}")));
        }
        if !set.contains(&0) {
            return Err(Error::Structural(format!("digit set {raw:?} does not contain 0")));
        }
        Ok(DigitSet {
            digits: set.into_iter().collect(),
        })
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn max(&self) -> u64 {
        *self.digits.last().expect("digit set is never empty")
    }

    /// `{0, 1, ..., N-1}` for some `N`.
    pub fn is_consecutive(&self) -> bool {
        self.digits.iter().enumerate().all(|(i, &d)| d == i as u64)
    }

    /// Which closed-form description of the zeros of the mask polynomial applies.
    ///
    /// This depends only on the digits, not on `p`: `{0, d}` vanishes on
    /// `(2Z+1)/(2d)`, `{0, a, b}` with `gcd(a, b) = 1` and `{a, b} = {1, 2} mod 3`
    /// vanishes exactly on `(Z \ 3Z)/3`, and `{0, ..., N-1}` on `(Z \ NZ)/N`.
    pub fn zero_family(&self) -> Option<ZeroFamily> {
        match self.digits.as_slice() {
            [_, d] => Some(ZeroFamily::TwoPoint { d: *d }),
            [_, a, b] if a.gcd(b) == 1 && is_mod3_pair(*a, *b) => {
                Some(ZeroFamily::ThreeDigit { a: *a, b: *b })
            }
            _ if self.is_consecutive() => Some(ZeroFamily::Consecutive {
                n: self.digits.len() as u64,
            }),
            _ => None,
        }
    }
}

impl fmt::Display for DigitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "}}")
    }
}

fn is_mod3_pair(a: u64, b: u64) -> bool {
    let (ra, rb) = (a % 3, b % 3);
    (ra == 1 && rb == 2) || (ra == 2 && rb == 1)
}

/// Shape of the zero set of a mask polynomial; see [`DigitSet::zero_family`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroFamily {
    TwoPoint { d: u64 },
    ThreeDigit { a: u64, b: u64 },
    Consecutive { n: u64 },
}

impl ZeroFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ZeroFamily::TwoPoint { .. } => "two-point (2Z+1)/2d",
            ZeroFamily::ThreeDigit { .. } => "three-digit (3Z+{1,2})/3",
            ZeroFamily::Consecutive { .. } => "consecutive (Z\\NZ)/N",
        }
    }

    /// Exact test `m_D(x) = 0` for rational `x = num / den` (`den > 0`).
    pub fn vanishes_at(&self, num: &BigInt, den: &BigInt) -> bool {
        // x in (kZ \ jZ)/k  <=>  k*x is an integer not divisible by j
        let (scale, modulus): (u64, u64) = match *self {
            ZeroFamily::TwoPoint { d } => {
                // d*x in Z + 1/2  <=>  2d*x is an odd integer
                (2 * d, 2)
            }
            ZeroFamily::ThreeDigit { .. } => (3, 3),
            ZeroFamily::Consecutive { n } => (n, n),
        };
        let scaled = num * BigInt::from(scale);
        let (q, r) = scaled.div_rem(den);
        r == BigInt::from(0) && !q.is_multiple_of(&BigInt::from(modulus))
    }
}

/// Admissibility class of a single level `(p, D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DigitClass {
    /// `D = {0, ..., N-1}`, `N > 3`, `N | p`, `p > N`.
    T1 { n: u64 },
    /// `D = {0, a, b}`, `gcd(a, b) = 1`, `{a, b} = {1, 2} mod 3`, `3 | p`, `b/p < 2/3`.
    T2 { a: u64, b: u64 },
    /// `D = {0, d}`, `0 < d < p`, `d = 2^l * odd`, `2 | p / gcd(d, p)`.
    T3 { d: u64, l: u32, odd: u64 },
    Invalid,
}

impl DigitClass {
    pub fn label(&self) -> &'static str {
        match self {
            DigitClass::T1 { .. } => "T1",
            DigitClass::T2 { .. } => "T2",
            DigitClass::T3 { .. } => "T3",
            DigitClass::Invalid => "Invalid",
        }
    }

    pub fn is_admissible(&self) -> bool {
        !matches!(self, DigitClass::Invalid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub class: DigitClass,
    /// Violated clauses; non-empty iff `class` is `Invalid`.
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

pub const BOUNDARY_RATIO_WARNING: &str = "boundary-ratio";

/// Classify `(p, D)` against T1, T2, T3.
///
/// Candidates are chosen by cardinality (2 -> T3, 3 -> T2, >= 4 -> T1), so at
/// most one class can match. A T2 level with `b/p = 2/3` exactly is accepted
/// with a `boundary-ratio` warning.
pub fn classify_level(p: u64, digits: &DigitSet) -> Classification {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    let class = match digits.digits() {
        [_] => {
            violations.push("a digit set needs at least two elements".to_string());
            DigitClass::Invalid
        }
        [_, d] => {
            let d = *d;
            if d >= p {
                violations.push(format!("T3 needs 0 < d < p (d = {d}, p = {p})"));
            }
            if (p / d.gcd(&p)) % 2 != 0 {
                violations.push(format!("T3 needs 2 | p/gcd(d,p) (p/gcd = {})", p / d.gcd(&p)));
            }
            let l = d.trailing_zeros();
            DigitClass::T3 { d, l, odd: d >> l }
        }
        [_, a, b] => {
            let (a, b) = (*a, *b);
            if a.gcd(&b) != 1 {
                violations.push(format!("T2 needs gcd(a,b) = 1 (gcd = {})", a.gcd(&b)));
            }
            if !is_mod3_pair(a, b) {
                violations.push(format!(
                    "T2 needs {{a,b}} = {{1,2}} mod 3 (got {{{},{}}})",
                    a % 3,
                    b % 3
                ));
            }
            if p % 3 != 0 {
                violations.push(format!("T2 needs 3 | p (p = {p})"));
            }
            // b/p against 2/3 by cross-multiplication
            match (3 * b as u128).cmp(&(2 * p as u128)) {
                std::cmp::Ordering::Greater => {
                    violations.push(format!("T2 needs b/p < 2/3 (b/p = {b}/{p})"))
                }
                std::cmp::Ordering::Equal => warnings.push(BOUNDARY_RATIO_WARNING.to_string()),
                std::cmp::Ordering::Less => {}
            }
            DigitClass::T2 { a, b }
        }
        ds => {
            let n = ds.len() as u64;
            if !digits.is_consecutive() {
                violations.push(format!("T1 needs D = {{0,...,{}}}", n - 1));
            }
            if p % n != 0 {
                violations.push(format!("T1 needs N | p (N = {n}, p = {p})"));
            }
            if p <= n {
                violations.push(format!("T1 needs p > N (N = {n}, p = {p})"));
            }
            DigitClass::T1 { n }
        }
    };
    if violations.is_empty() {
        Classification {
            class,
            violations,
            warnings,
        }
    } else {
        Classification {
            class: DigitClass::Invalid,
            violations,
            warnings,
        }
    }
}

/// Make `p` positive and all nonzero digits positive.
///
/// Returns `(|p|, D + gamma)` with `gamma = 0` when every nonzero digit is
/// already positive and `gamma = max |D|` otherwise. The modulus of the Fourier
/// transform is unchanged by this move.
pub fn normalize_level(p: i64, digits: &[i64]) -> Result<(u64, Vec<u64>)> {
    if p == 0 {
        return Err(Error::Structural("p = 0".into()));
    }
    if !digits.contains(&0) {
        return Err(Error::Structural(format!("digit set {digits:?} does not contain 0")));
    }
    let gamma = if digits.iter().all(|&d| d >= 0) {
        0
    } else {
        digits.iter().map(|d| d.unsigned_abs()).max().unwrap_or(0) as i64
    };
    let shifted: Vec<i64> = digits.iter().map(|&d| d + gamma).collect();
    if !shifted.contains(&0) {
        return Err(Error::Structural(format!(
            "digit set {digits:?} shifted by {gamma} no longer contains 0"
        )));
    }
    Ok((p.unsigned_abs(), shifted.into_iter().map(|d| d as u64).collect()))
}

/// One generator `(p_n, D_n)` together with its classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub p: u64,
    pub digits: DigitSet,
    pub classification: Classification,
}

impl Level {
    pub fn new(p: u64, digits: DigitSet) -> Result<Self> {
        if p <= 1 {
            return Err(Error::Structural(format!("p = {p} must be > 1")));
        }
        let classification = classify_level(p, &digits);
        Ok(Level {
            p,
            digits,
            classification,
        })
    }

    pub fn class(&self) -> DigitClass {
        self.classification.class
    }

    /// `Phi(n) = #D_n`.
    pub fn phi(&self) -> usize {
        self.digits.len()
    }
}

/// Eventually periodic generator sequence: `preamble` then `cycle` repeated forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoranSystem {
    preamble: Vec<Level>,
    cycle: Vec<Level>,
}

impl MoranSystem {
    pub fn new(preamble: Vec<Level>, cycle: Vec<Level>) -> Result<Self> {
        if preamble.is_empty() && cycle.is_empty() {
            return Err(Error::Structural("system has no levels".into()));
        }
        Ok(MoranSystem { preamble, cycle })
    }

    /// Convenience constructor from raw `(p, digits)` pairs.
    pub fn from_pairs(preamble: &[(u64, &[u64])], cycle: &[(u64, &[u64])]) -> Result<Self> {
        let build = |pairs: &[(u64, &[u64])]| -> Result<Vec<Level>> {
            pairs
                .iter()
                .map(|&(p, ds)| Level::new(p, DigitSet::new(ds.iter().copied())?))
                .collect()
        };
        MoranSystem::new(build(preamble)?, build(cycle)?)
    }

    pub fn preamble(&self) -> &[Level] {
        &self.preamble
    }

    pub fn cycle(&self) -> &[Level] {
        &self.cycle
    }

    pub fn is_finite(&self) -> bool {
        self.cycle.is_empty()
    }

    /// Number of levels for a finite system, `None` when the cycle repeats forever.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.preamble.len())
    }

    /// Level `n` (1-based).
    pub fn level(&self, n: usize) -> Option<&Level> {
        if n == 0 {
            return None;
        }
        if n <= self.preamble.len() {
            return Some(&self.preamble[n - 1]);
        }
        if self.cycle.is_empty() {
            return None;
        }
        let k = (n - 1 - self.preamble.len()) % self.cycle.len();
        Some(&self.cycle[k])
    }

    pub fn try_level(&self, n: usize) -> Result<&Level> {
        self.level(n).ok_or(Error::LevelOutOfRange {
            level: n,
            available: self.preamble.len(),
        })
    }

    /// Levels `1..=n` that exist (a finite system stops early).
    pub fn levels_upto(&self, n: usize) -> impl Iterator<Item = (usize, &Level)> + '_ {
        (1..=n).map_while(move |i| self.level(i).map(|l| (i, l)))
    }

    /// Every distinct level description: the preamble followed by one copy of the cycle.
    pub fn distinct_levels(&self) -> impl Iterator<Item = &Level> + '_ {
        self.preamble.iter().chain(self.cycle.iter())
    }

    /// `P_n = p_1 ... p_n`, exact.
    pub fn scale(&self, n: usize) -> BigInt {
        self.levels_upto(n)
            .fold(BigInt::from(1), |acc, (_, l)| acc * BigInt::from(l.p))
    }

    pub fn scale_f64(&self, n: usize) -> f64 {
        self.levels_upto(n).fold(1.0, |acc, (_, l)| acc * l.p as f64)
    }

    pub fn phi(&self, n: usize) -> Option<usize> {
        self.level(n).map(Level::phi)
    }

    /// `#atoms(mu_n) = prod_{i<=n} Phi(i)`.
    pub fn atom_count(&self, n: usize) -> usize {
        self.levels_upto(n).map(|(_, l)| l.phi()).product()
    }

    pub fn is_admissible(&self) -> bool {
        self.distinct_levels().all(|l| l.class().is_admissible())
    }

    /// Largest digit over all levels `> n`; `None` when no such level exists.
    pub fn max_digit_after(&self, n: usize) -> Option<u64> {
        self.tail_levels(n).map(|l| l.digits.max()).max()
    }

    /// Smallest `p` over all levels `> n`.
    pub fn min_p_after(&self, n: usize) -> Option<u64> {
        self.tail_levels(n).map(|l| l.p).min()
    }

    /// One representative of every level description occurring after level `n`.
    fn tail_levels(&self, n: usize) -> impl Iterator<Item = &Level> + '_ {
        let pre = self.preamble.iter().skip(n);
        pre.chain(self.cycle.iter())
    }

    pub fn max_digit(&self) -> u64 {
        self.distinct_levels().map(|l| l.digits.max()).max().unwrap_or(0)
    }

    /// Whether the cycle contains a level with `Phi >= 3`, i.e. infinitely many such levels.
    pub fn has_recurring_large_level(&self) -> bool {
        self.cycle.iter().any(|l| l.phi() >= 3)
    }

    /// `R_n = sum_{i>n} max(D_i)/P_i`, summed exactly (geometric over the cycle).
    pub fn tail_radius(&self, n: usize) -> Rational {
        let mut sum = Rational::from_integer(0.into());
        let mut scale = self.scale(n);
        let pre_len = self.preamble.len();
        let mut i = n + 1;
        while i <= pre_len {
            let l = &self.preamble[i - 1];
            scale *= BigInt::from(l.p);
            sum += Rational::new(BigInt::from(l.digits.max()), scale.clone());
            i += 1;
        }
        if self.cycle.is_empty() {
            return sum;
        }
        // one full period starting at level i
        let mut period_sum = Rational::from_integer(0.into());
        let mut period_scale = BigInt::from(1);
        for j in 0..self.cycle.len() {
            let l = self.level(i + j).expect("cycle is non-empty");
            scale *= BigInt::from(l.p);
            period_scale *= BigInt::from(l.p);
            period_sum += Rational::new(BigInt::from(l.digits.max()), scale.clone());
        }
        let q = Rational::from_integer(period_scale);
        let one = Rational::from_integer(1.into());
        sum + period_sum * q.clone() / (q - one)
    }
}

impl fmt::Display for MoranSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let section = |f: &mut fmt::Formatter<'_>, name: &str, levels: &[Level]| {
            write!(f, "{name}:")?;
            for l in levels {
                write!(f, " ({},{})", l.p, l.digits)?;
            }
            writeln!(f)
        };
        section(f, "preamble", &self.preamble)?;
        section(f, "cycle", &self.cycle)
    }
}

impl FromStr for MoranSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_system(s)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Preamble,
    Cycle,
}

/// Parse the plain-text system description.
///
/// ```text
/// # comment
/// preamble: (4,{0,2})
/// cycle:    (9,{0,1,2}) (4,{0,2})
/// ```
///
/// Whitespace is insignificant and entries may span lines. Negative `p` or
/// digits are normalized with [`normalize_level`] before validation.
pub fn parse_system(text: &str) -> Result<MoranSystem> {
    let mut preamble = Vec::new();
    let mut cycle = Vec::new();
    let mut section = Section::None;

    // strip comments and whitespace, remembering the source line of each character
    let mut chars: Vec<(char, usize)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        chars.extend(
            content
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| (c, lineno + 1)),
        );
    }

    let syntax = |line: usize, message: String| Error::Syntax { line, message };
    let mut pos = 0;
    while pos < chars.len() {
        let (c, line) = chars[pos];
        if c.is_ascii_alphabetic() {
            let start = pos;
            while pos < chars.len() && chars[pos].0.is_ascii_alphabetic() {
                pos += 1;
            }
            let word: String = chars[start..pos].iter().map(|(c, _)| *c).collect();
            if pos >= chars.len() || chars[pos].0 != ':' {
                return Err(syntax(line, format!("expected ':' after '{word}'")));
            }
            pos += 1;
            section = match word.as_str() {
                "preamble" => Section::Preamble,
                "cycle" => Section::Cycle,
                other => return Err(syntax(line, format!("unknown section '{other}'"))),
            };
        } else if c == '(' {
            if section == Section::None {
                return Err(syntax(line, "entry before 'preamble:' or 'cycle:'".into()));
            }
            let (p, digits, next) = parse_entry(&chars, pos)?;
            pos = next;
            let (p, digits) = normalize_level(p, &digits)?;
            let level = Level::new(p, DigitSet::new(digits)?)?;
            match section {
                Section::Preamble => preamble.push(level),
                Section::Cycle => cycle.push(level),
                Section::None => unreachable!(),
            }
        } else {
            return Err(syntax(line, format!("unexpected character '{c}'")));
        }
    }
    MoranSystem::new(preamble, cycle)
}

fn parse_entry(chars: &[(char, usize)], mut pos: usize) -> Result<(i64, Vec<i64>, usize)> {
    let line = chars[pos].1;
    let err = |message: &str| Error::Syntax {
        line,
        message: message.to_string(),
    };
    let expect = |pos: &mut usize, want: char| -> Result<()> {
        match chars.get(*pos) {
            Some((c, _)) if *c == want => {
                *pos += 1;
                Ok(())
            }
            Some((c, l)) => Err(Error::Syntax {
                line: *l,
                message: format!("expected '{want}', found '{c}'"),
            }),
            None => Err(err(&format!("expected '{want}', found end of input"))),
        }
    };
    let integer = |pos: &mut usize| -> Result<i64> {
        let start = *pos;
        if matches!(chars.get(*pos), Some(('-', _)) | Some(('+', _))) {
            *pos += 1;
        }
        while matches!(chars.get(*pos), Some((c, _)) if c.is_ascii_digit()) {
            *pos += 1;
        }
        let text: String = chars[start..*pos].iter().map(|(c, _)| *c).collect();
        text.parse::<i64>()
            .map_err(|_| err(&format!("expected an integer, found '{text}'")))
    };

    expect(&mut pos, '(')?;
    let p = integer(&mut pos)?;
    expect(&mut pos, ',')?;
    expect(&mut pos, '{')?;
    let mut digits = Vec::new();
    if matches!(chars.get(pos), Some(('}', _))) {
        return Err(Error::Structural("empty digit set".into()));
    }
    loop {
        digits.push(integer(&mut pos)?);
        match chars.get(pos) {
            Some((',', _)) => pos += 1,
            Some(('}', _)) => {
                pos += 1;
                break;
            }
            _ => return Err(err("expected ',' or '}' in digit set")),
        }
    }
    expect(&mut pos, ')')?;
    let unique: BTreeSet<i64> = digits.iter().copied().collect();
    if unique.len() != digits.len() {
        return Err(Error::Structural(format!("duplicate digits in {digits:?}")));
    }
    Ok((p, digits, pos))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(d: &[u64]) -> DigitSet {
        DigitSet::new(d.iter().copied()).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_level(12, &ds(&[0, 1, 2, 3])).class, DigitClass::T1 { n: 4 });
        let c = classify_level(8, &ds(&[0, 5, 6]));
        assert_eq!(c.class, DigitClass::Invalid);
        assert!(c.violations.iter().any(|v| v.contains("mod 3")));
        assert_eq!(
            classify_level(4, &ds(&[0, 2])).class,
            DigitClass::T3 { d: 2, l: 1, odd: 1 }
        );
    }

    #[test]
    fn boundary_ratio_is_a_warning() {
        let c = classify_level(3, &ds(&[0, 1, 2]));
        assert_eq!(c.class, DigitClass::T2 { a: 1, b: 2 });
        assert_eq!(c.warnings, vec![BOUNDARY_RATIO_WARNING.to_string()]);
        assert_eq!(classify_level(6, &ds(&[0, 1, 2])).warnings.len(), 0);
        assert_eq!(classify_level(3, &ds(&[0, 1, 5])).class, DigitClass::Invalid);
    }

    #[test]
    fn t3_divisibility_clause() {
        // 9 / gcd(2, 9) = 9 is odd
        assert_eq!(classify_level(9, &ds(&[0, 2])).class, DigitClass::Invalid);
        assert_eq!(
            classify_level(16, &ds(&[0, 4])).class,
            DigitClass::T3 { d: 4, l: 2, odd: 1 }
        );
        assert_eq!(classify_level(12, &ds(&[0, 4])).class, DigitClass::Invalid);
        assert_eq!(classify_level(4, &ds(&[0, 4])).class, DigitClass::Invalid);
    }

    #[test]
    fn t1_requires_more_than_three_digits_and_p_greater_than_n() {
        assert_eq!(classify_level(4, &ds(&[0, 1, 2, 3])).class, DigitClass::Invalid);
        assert_eq!(classify_level(10, &ds(&[0, 1, 2, 3])).class, DigitClass::Invalid);
        assert_eq!(classify_level(8, &ds(&[0, 1, 2, 4])).class, DigitClass::Invalid);
    }

    #[test]
    fn normalize() {
        assert_eq!(normalize_level(-2, &[0, -3]).unwrap(), (2, vec![3, 0]));
        assert_eq!(normalize_level(2, &[0, 3]).unwrap(), (2, vec![0, 3]));
        assert_eq!(normalize_level(-4, &[0, 2]).unwrap(), (4, vec![0, 2]));
        assert!(normalize_level(3, &[0, 2, -1]).is_err());
        assert!(normalize_level(3, &[1, 2]).is_err());
    }

    #[test]
    fn parse_final_example() {
        let sys = parse_system("cycle: (2,{0,1}) (3,{0,1,2})").unwrap();
        let phis: Vec<usize> = (1..=6).map(|n| sys.phi(n).unwrap()).collect();
        assert_eq!(phis, vec![2, 3, 2, 3, 2, 3]);
        assert_eq!(sys.scale(4), BigInt::from(36));
    }

    #[test]
    fn parse_preamble_only() {
        let sys = parse_system("preamble: (4,{0,2})").unwrap();
        let l = sys.level(1).unwrap();
        assert_eq!((l.p, l.digits.digits()), (4, &[0u64, 2][..]));
        assert!(sys.level(2).is_none());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_system("cycle: (1,{0,1})"), Err(Error::Structural(_))));
        assert!(matches!(parse_system("cycle: (3,{})"), Err(Error::Structural(_))));
        assert!(matches!(parse_system("cycle: (3,{0,1,1})"), Err(Error::Structural(_))));
        assert!(matches!(parse_system("cycle: (3,{0,1}"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_system("loop: (3,{0,1})"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_system("(3,{0,1})"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_system("# nothing\n"), Err(Error::Structural(_))));
    }

    #[test]
    fn parse_comments_and_multiline() {
        let text = "# example\npreamble:\n  (4, {0, 2})   # first\ncycle:\n  (9, {0,1,2})\n  (4, {0,2})\n";
        let sys = parse_system(text).unwrap();
        assert_eq!(sys.preamble().len(), 1);
        assert_eq!(sys.cycle().len(), 2);
        assert_eq!(sys.level(4).unwrap().p, 9);
    }

    #[test]
    fn parse_normalizes_signs() {
        let sys = parse_system("cycle: (-2,{0,-3})").unwrap();
        let l = sys.level(1).unwrap();
        assert_eq!((l.p, l.digits.digits()), (2, &[0u64, 3][..]));
    }

    #[test]
    fn tail_radius_is_exact() {
        // final example: sum_{i>n} (p_i - 1)/P_i telescopes to 1/P_n
        let sys = parse_system("cycle: (2,{0,1}) (3,{0,1,2})").unwrap();
        for n in 0..6 {
            assert_eq!(
                sys.tail_radius(n),
                Rational::new(1.into(), sys.scale(n)),
                "n = {n}"
            );
        }
        // digits {0,3} at base 2 after two levels: sum_{i>=3} 3/2^i = 3/4
        let ex = parse_system("preamble: (2,{0,1,2}) (2,{0,5,6}) cycle: (2,{0,3})").unwrap();
        assert_eq!(ex.tail_radius(2), Rational::new(3.into(), 4.into()));
        assert_eq!(ex.tail_radius(0), Rational::new(13.into(), 4.into()));
    }

    #[test]
    fn zero_family_shapes() {
        assert_eq!(ds(&[0, 3]).zero_family(), Some(ZeroFamily::TwoPoint { d: 3 }));
        assert_eq!(
            ds(&[0, 1, 5]).zero_family(),
            Some(ZeroFamily::ThreeDigit { a: 1, b: 5 })
        );
        assert_eq!(ds(&[0, 5, 6]).zero_family(), None);
        assert_eq!(
            ds(&[0, 1, 2, 3]).zero_family(),
            Some(ZeroFamily::Consecutive { n: 4 })
        );
    }
}
