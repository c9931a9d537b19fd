//! Hadamard triples `(p, D, L)`: companion sets making
//! `H = N^{-1/2} [e^{-2 pi i d l / p}]_{d in D, l in L}` unitary.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::system::{classify_level, DigitClass, DigitSet};

#[derive(Debug, Clone, PartialEq)]
pub struct HadamardTriple {
    pub p: u64,
    pub digits: DigitSet,
    pub companions: Vec<i64>,
    /// `max |(H^* H - I)_{jk}|`.
    pub residual: f64,
}

/// Build the triple for an admissible level and record its unitarity residual.
pub fn hadamard_triple(p: u64, digits: &DigitSet) -> Result<HadamardTriple> {
    let companions = construct_l(p, digits)?;
    let residual = unitarity_residual(p, digits.digits(), &companions)?;
    Ok(HadamardTriple {
        p,
        digits: digits.clone(),
        companions,
        residual,
    })
}

/// Canonical companion set for each class.
///
/// * T1, `D = {0..N-1}`: `L = (p/N) {0, 1, ..., N-1}`.
/// * T2, `D = {0, a, b}`: `L = (p/3) {0, 1, -1}`.
/// * T3, `D = {0, d}`: with `g = gcd(d, p)`, `p = 2mg`, `d = g d''`, `L = {0, l}`
///   where `l = m (d'')^{-1} mod 2m`.
pub fn construct_l(p: u64, digits: &DigitSet) -> Result<Vec<i64>> {
    let c = classify_level(p, digits);
    let p = p as i64;
    match c.class {
        DigitClass::T1 { n } => {
            let step = p / n as i64;
            Ok((0..n as i64).map(|k| k * step).collect())
        }
        DigitClass::T2 { .. } => {
            let step = p / 3;
            Ok(vec![0, step, -step])
        }
        DigitClass::T3 { d, .. } => {
            let d = d as i64;
            let g = d.gcd(&p);
            let two_m = p / g;
            let m = two_m / 2;
            let d2 = d / g;
            let inv = mod_inverse(d2, two_m).expect("gcd(d'', 2m) = 1 for T3 levels");
            Ok(vec![0, (m * inv).rem_euclid(two_m)])
        }
        DigitClass::Invalid => Err(Error::NotAdmissible {
            level: 0,
            reason: format!("({p}, {digits}) is not admissible: {}", c.violations.join("; ")),
        }),
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

/// `max |(H^* H - I)_{jk}|` with `H = N^{-1/2} [e^{-2 pi i d l / p}]`.
///
/// Phases are reduced modulo `p` in integer arithmetic before evaluation.
pub fn unitarity_residual(p: u64, digits: &[u64], companions: &[i64]) -> Result<f64> {
    let n = digits.len();
    if companions.len() != n {
        return Err(Error::CardinalityMismatch {
            digits: n,
            companions: companions.len(),
        });
    }
    let p = p as i128;
    let scale = 1.0 / (n as f64).sqrt();
    let h: Vec<Vec<Complex64>> = digits
        .iter()
        .map(|&d| {
            companions
                .iter()
                .map(|&l| {
                    let phase = (d as i128 * l as i128).rem_euclid(p) as f64 / p as f64;
                    Complex64::from_polar(scale, -2.0 * PI * phase)
                })
                .collect()
        })
        .collect();
    let mut residual: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let entry: Complex64 = (0..n).map(|r| h[r][j].conj() * h[r][k]).sum();
            let target = if j == k { 1.0 } else { 0.0 };
            residual = residual.max((entry - target).norm());
        }
    }
    Ok(residual)
}

/// Exact test: `m_D((l - l')/p) = 0` for every pair of distinct companions.
pub fn is_hadamard(p: u64, digits: &DigitSet, companions: &[i64]) -> Result<bool> {
    if companions.len() != digits.len() {
        return Err(Error::CardinalityMismatch {
            digits: digits.len(),
            companions: companions.len(),
        });
    }
    let family = digits
        .zero_family()
        .ok_or_else(|| Error::UnsupportedDigits(digits.digits().to_vec()))?;
    let den = BigInt::from(p);
    for (i, &l) in companions.iter().enumerate() {
        for &m in &companions[i + 1..] {
            if !family.vanishes_at(&BigInt::from(l - m), &den) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(d: &[u64]) -> DigitSet {
        DigitSet::new(d.iter().copied()).unwrap()
    }

    #[test]
    fn construct_examples() {
        assert_eq!(construct_l(4, &ds(&[0, 2])).unwrap(), vec![0, 1]);
        assert_eq!(construct_l(3, &ds(&[0, 1, 2])).unwrap(), vec![0, 1, -1]);
        assert_eq!(construct_l(12, &ds(&[0, 1, 2, 3])).unwrap(), vec![0, 3, 6, 9]);
        assert!(construct_l(8, &ds(&[0, 5, 6])).is_err());
    }

    #[test]
    fn residual_examples() {
        assert!(unitarity_residual(4, &[0, 2], &[0, 1]).unwrap() < 1e-15);
        assert!(unitarity_residual(3, &[0, 1, 2], &[0, 1, 2]).unwrap() < 1e-15);
        assert!(unitarity_residual(4, &[0, 2], &[0, 2]).unwrap() >= 1.0 - 1e-15);
        assert!(matches!(
            unitarity_residual(4, &[0, 2], &[0]),
            Err(Error::CardinalityMismatch { .. })
        ));
    }

    #[test]
    fn exact_examples() {
        assert!(is_hadamard(4, &ds(&[0, 2]), &[0, 1]).unwrap());
        assert!(is_hadamard(9, &ds(&[0, 1, 2]), &[0, 3, 6]).unwrap());
        assert!(!is_hadamard(4, &ds(&[0, 2]), &[0, 2]).unwrap());
        assert!(is_hadamard(4, &ds(&[0, 2]), &[0, 1, 2]).is_err());
    }

    #[test]
    fn mod_inverse_basics() {
        assert_eq!(mod_inverse(3, 10), Some(7));
        assert_eq!(mod_inverse(-3, 10), Some(3));
        assert_eq!(mod_inverse(4, 10), None);
        assert_eq!(mod_inverse(1, 2), Some(1));
    }

    #[test]
    fn t3_companion_is_in_range() {
        for p in 2..=64u64 {
            for d in 1..p {
                let digits = ds(&[0, d]);
                if let Ok(l) = construct_l(p, &digits) {
                    let two_m = (p / d.gcd(&p)) as i64;
                    assert!(l[1] >= 1 && l[1] < two_m);
                    assert!(is_hadamard(p, &digits, &l).unwrap());
                }
            }
        }
    }
}
