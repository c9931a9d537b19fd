//! Built-in example systems, each paired with its expected results.

use std::collections::HashMap;
use std::fmt;

use crate::certificates::{certify, CertifyOptions, Verdict};
use crate::density::{density_histogram, density_verdict, support_cover, tiling_check, minimal_window, DensityVerdict, UNIFORMITY_TOL};
use crate::error::{Error, Result};
use crate::system::{parse_system, MoranSystem};

#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub verdict: Verdict,
    /// `(level, bins, verdict)`.
    pub density: Option<(usize, usize, DensityVerdict)>,
    /// `(level, tiles)`.
    pub tiling: Option<(usize, bool)>,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub expected: Expected,
}

impl CorpusEntry {
    pub fn system(&self) -> Result<MoranSystem> {
        parse_system(self.source)
    }
}

macro_rules! entry {
    ($name:literal) => {
        (
            $name,
            include_str!(concat!("../corpus/", $name, ".moran")),
            include_str!(concat!("../corpus/", $name, ".expected")),
        )
    };
}

const RAW: [(&str, &str, &str); 6] = [
    entry!("nonuniform_overlap"),
    entry!("odd_quotient"),
    entry!("growing_blocks"),
    entry!("unit_interval"),
    entry!("alternating"),
    entry!("pure_t3"),
];

pub fn entries() -> Vec<CorpusEntry> {
    RAW.iter()
        .map(|&(name, source, expected)| CorpusEntry {
            name,
            source,
            expected: parse_expected(expected).expect("built-in sidecars are well formed"),
        })
        .collect()
}

pub fn entry(name: &str) -> Option<CorpusEntry> {
    entries().into_iter().find(|e| e.name == name)
}

fn parse_density_verdict(s: &str) -> Result<DensityVerdict> {
    [
        DensityVerdict::Uniform,
        DensityVerdict::NotSpectralByUniformity,
        DensityVerdict::NotAbsolutelyContinuous,
    ]
    .into_iter()
    .find(|v| v.as_str() == s)
    .ok_or_else(|| Error::Precondition(format!("unknown density verdict '{s}'")))
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_expected(text: &str) -> Result<Expected> {
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Syntax {
            line: i + 1,
            message: "expected 'key = value'".into(),
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| map.get(k).map(String::as_str);
    let number = |k: &str| -> Result<usize> {
        get(k)
            .ok_or_else(|| Error::Precondition(format!("missing '{k}'")))?
            .parse()
            .map_err(|_| Error::Precondition(format!("'{k}' is not a number")))
    };
    let verdict = get("verdict")
        .ok_or_else(|| Error::Precondition("missing 'verdict'".into()))?
        .parse()?;
    let density = match get("density") {
        Some(v) => Some((number("density_level")?, number("density_bins")?, parse_density_verdict(v)?)),
        None => None,
    };
    let tiling = match get("tiling") {
        Some(v) => Some((
            number("tiling_level")?,
            match v {
                "yes" => true,
                "no" => false,
                other => return Err(Error::Precondition(format!("tiling must be yes or no, not '{other}'"))),
            },
        )),
        None => None,
    };
    Ok(Expected {
        verdict,
        density,
        tiling,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub example: String,
    pub quantity: String,
    pub expected: String,
    pub observed: String,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.expected == self.observed
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<20} {:<10} {:<38} {:<38} {}",
            self.example,
            self.quantity,
            self.expected,
            self.observed,
            if self.ok() { "ok" } else { "MISMATCH" }
        )
    }
}

/// Recompute every expected quantity of `entry`.
pub fn run_entry(entry: &CorpusEntry, opts: &CertifyOptions) -> Result<Vec<Check>> {
    let system = entry.system()?;
    let check = |quantity: &str, expected: String, observed: String| Check {
        example: entry.name.to_string(),
        quantity: quantity.to_string(),
        expected,
        observed,
    };
    let mut out = vec![check(
        "verdict",
        entry.expected.verdict.to_string(),
        certify(&system, opts).verdict.to_string(),
    )];
    if let Some((level, bins, want)) = entry.expected.density {
        let hist = density_histogram(&system, level, bins)?;
        out.push(check(
            "density",
            want.to_string(),
            density_verdict(&hist, UNIFORMITY_TOL).to_string(),
        ));
    }
    if let Some((level, want)) = entry.expected.tiling {
        let cover = support_cover(&system, level)?;
        let report = tiling_check(&cover, minimal_window(&cover), 10_000)?;
        let yes_no = |b: bool| if b { "yes" } else { "no" }.to_string();
        out.push(check("tiling", yes_no(want), yes_no(report.tiles)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses() {
        let all = entries();
        assert_eq!(all.len(), RAW.len());
        for e in &all {
            e.system().unwrap();
        }
    }

    #[test]
    fn sidecar_errors() {
        assert!(parse_expected("density = uniform on its support").is_err());
        assert!(parse_expected("verdict = MAYBE").is_err());
        assert!(parse_expected("verdict PASS").is_err());
        let e = parse_expected("# c\nverdict = PASS\ntiling = no\ntiling_level = 3").unwrap();
        assert_eq!(e.tiling, Some((3, false)));
    }

    #[test]
    fn growing_blocks_first_companions() {
        let sys = entry("growing_blocks").unwrap().system().unwrap();
        let l = sys.level(1).unwrap();
        assert_eq!(crate::hadamard::construct_l(l.p, &l.digits).unwrap(), vec![0, 1]);
        assert_eq!(sys.len(), Some(12));
    }
}
