//! Finite-level measures `mu_n`, mask polynomials, Fourier transforms and the
//! exact zero set of the Fourier transform.
//!
//! Sign convention: `hat(mu)(xi) = int e^{-2 pi i x xi} dmu(x)` everywhere,
//! including the mask polynomials.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::system::{DigitSet, MoranSystem, ZeroFamily};
use crate::Rational;

/// `m_D(xi) = (1/#D) sum_{d in D} e^{-2 pi i d xi}`.
pub fn mask_eval(digits: &DigitSet, xi: f64) -> Complex64 {
    let sum: Complex64 = digits
        .digits()
        .iter()
        .map(|&d| Complex64::from_polar(1.0, -2.0 * PI * d as f64 * xi))
        .sum();
    sum / digits.len() as f64
}

/// `mu_n`: equal-weight atoms `k / P_n` stored by their integer numerators.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    level: usize,
    numerators: Vec<BigInt>,
    denominator: BigInt,
}

impl DiscreteMeasure {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    /// Common weight `1 / #atoms`.
    pub fn weight(&self) -> Rational {
        Rational::new(1.into(), BigInt::from(self.len()))
    }

    /// Common denominator `P_n` of every atom.
    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.numerators
    }

    /// Atom positions, sorted ascending.
    pub fn atoms(&self) -> Vec<Rational> {
        self.numerators
            .iter()
            .map(|k| Rational::new(k.clone(), self.denominator.clone()))
            .collect()
    }

    pub fn atoms_f64(&self) -> Vec<f64> {
        let den = self.denominator.to_f64().unwrap_or(f64::INFINITY);
        self.numerators
            .iter()
            .map(|k| k.to_f64().unwrap_or(f64::NAN) / den)
            .collect()
    }

    /// Fourier transform by direct summation over atoms.
    pub fn fourier(&self, xi: f64) -> Complex64 {
        let w = 1.0 / self.len() as f64;
        self.atoms_f64()
            .iter()
            .map(|&x| Complex64::from_polar(w, -2.0 * PI * x * xi))
            .sum()
    }
}

/// `mu_n = delta_{P_1^{-1} D_1} * ... * delta_{P_n^{-1} D_n}`.
///
/// Fails with [`Error::AtomCollision`] when two digit paths land on the same
/// point; colliding atoms are never merged.
pub fn atoms(system: &MoranSystem, n: usize) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::Precondition("atoms needs n >= 1".into()));
    }
    let mut numerators = vec![BigInt::zero()];
    let mut denominator = BigInt::from(1);
    for i in 1..=n {
        let level = system.try_level(i)?;
        let p = BigInt::from(level.p);
        denominator *= &p;
        let mut next = Vec::with_capacity(numerators.len() * level.phi());
        for k in &numerators {
            let base = k * &p;
            for &d in level.digits.digits() {
                next.push(&base + BigInt::from(d));
            }
        }
        numerators = next;
    }
    numerators.sort();
    if numerators.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::AtomCollision { level: n });
    }
    Ok(DiscreteMeasure {
        level: n,
        numerators,
        denominator,
    })
}

/// `hat(mu_n)(xi) = prod_{i<=n} m_{D_i}(xi / P_i)`; `n = 0` gives 1.
///
/// A finite system contributes no factors past its last level.
pub fn fourier_level(system: &MoranSystem, n: usize, xi: f64) -> Complex64 {
    let mut scale = 1.0;
    let mut acc = Complex64::new(1.0, 0.0);
    for (_, level) in system.levels_upto(n) {
        scale *= level.p as f64;
        acc *= mask_eval(&level.digits, xi / scale);
    }
    acc
}

/// Truncated tail product with a rigorous bound on the omitted factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    /// `prod_{i=n+1}^{n+depth} m_{D_i}(xi / P_i)`.
    pub value: Complex64,
    /// `tau` such that the omitted product `T` satisfies `1 - tau <= |T| <= 1`.
    /// A value `>= 1` certifies nothing.
    pub error_bound: f64,
}

impl TailEstimate {
    /// Certified lower bound on the modulus of the full (untruncated) tail.
    pub fn lower_bound(&self) -> f64 {
        (self.value.norm() * (1.0 - self.error_bound)).max(0.0)
    }
}

/// `hat(mu_{>n})(xi)` truncated after `depth` factors.
///
/// The omitted factors obey `|1 - m_D(x)| <= 2 pi max(D) |x|`, and
/// `sum_{i>M} 1/P_i <= 1 / (P_M (p_min - 1))`, giving
/// `tau = 2 pi max(D) |xi| / (P_M (p_min - 1))` with `M = n + depth`.
pub fn fourier_tail(system: &MoranSystem, n: usize, xi: f64, depth: usize) -> Result<TailEstimate> {
    if depth == 0 {
        return Err(Error::Precondition("fourier_tail needs depth >= 1".into()));
    }
    let mut scale = system.scale_f64(n);
    let mut value = Complex64::new(1.0, 0.0);
    for i in n + 1..=n + depth {
        let Some(level) = system.level(i) else { break };
        scale *= level.p as f64;
        value *= mask_eval(&level.digits, xi / scale);
    }
    let last = n + depth;
    let error_bound = match (system.max_digit_after(last), system.min_p_after(last)) {
        (Some(dmax), Some(pmin)) if xi != 0.0 => {
            2.0 * PI * dmax as f64 * xi.abs() / (scale * (pmin - 1) as f64)
        }
        _ => 0.0,
    };
    Ok(TailEstimate { value, error_bound })
}

/// Which level and family placed a point in the zero set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroWitness {
    pub level: usize,
    pub family: ZeroFamily,
}

/// Exact membership of `xi` in the zero set of `hat(mu)`.
///
/// `xi` is a zero iff `xi / P_i` is a zero of `m_{D_i}` for some level `i`.
/// Only finitely many levels need checking: every zero contributed by level `i`
/// has modulus at least `P_i / (2 max D)`.
pub fn zero_set_contains(system: &MoranSystem, xi: &Rational) -> Option<ZeroWitness> {
    zero_set_contains_upto(system, xi, None)
}

/// As [`zero_set_contains`] but restricted to levels `<= max_level` (the zero set of `hat(mu_n)`).
pub fn zero_set_contains_upto(
    system: &MoranSystem,
    xi: &Rational,
    max_level: Option<usize>,
) -> Option<ZeroWitness> {
    if xi.is_zero() {
        return None;
    }
    let num = xi.numer();
    let den = xi.denom();
    // level i can only contribute when P_i <= 2 |xi| max(D)
    let cutoff = xi.abs() * Rational::from_integer(BigInt::from(2 * system.max_digit().max(1)));
    let mut scale = BigInt::from(1);
    let mut i = 1;
    loop {
        if max_level.is_some_and(|m| i > m) {
            return None;
        }
        let level = system.level(i)?;
        scale *= BigInt::from(level.p);
        if Rational::from_integer(scale.clone()) > cutoff {
            return None;
        }
        if let Some(family) = level.digits.zero_family() {
            // xi / P_i = num / (den * P_i)
            if family.vanishes_at(num, &(den * &scale)) {
                return Some(ZeroWitness { level: i, family });
            }
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::parse_system;

    fn final_example() -> MoranSystem {
        parse_system("cycle: (2,{0,1}) (3,{0,1,2})").unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn mask_zeros_and_one() {
        let d01 = DigitSet::new([0, 1]).unwrap();
        let d012 = DigitSet::new([0, 1, 2]).unwrap();
        assert!(mask_eval(&d01, 0.5).norm() < 1e-15);
        assert!(mask_eval(&d012, 1.0 / 3.0).norm() < 1e-15);
        assert!((mask_eval(&d012, 0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mask_sign_convention() {
        // m_{0,1}(1/4) = (1 + e^{-i pi/2}) / 2 = (1 - i)/2
        let m = mask_eval(&DigitSet::new([0, 1]).unwrap(), 0.25);
        assert!((m - Complex64::new(0.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn atoms_examples() {
        let bin = parse_system("cycle: (2,{0,1})").unwrap();
        let mu = atoms(&bin, 2).unwrap();
        assert_eq!(mu.atoms(), vec![r(0, 1), r(1, 4), r(1, 2), r(3, 4)]);
        assert_eq!(mu.weight(), r(1, 4));

        let mu = atoms(&final_example(), 1).unwrap();
        assert_eq!(mu.atoms(), vec![r(0, 1), r(1, 2)]);
        assert_eq!(mu.weight(), r(1, 2));
    }

    #[test]
    fn atoms_report_collisions() {
        // {0,1,2}/2 + {0,2}/4 hits 1 twice
        let sys = parse_system("preamble: (2,{0,1,2}) (2,{0,2})").unwrap();
        assert_eq!(atoms(&sys, 2), Err(Error::AtomCollision { level: 2 }));
    }

    #[test]
    fn fourier_examples() {
        let bin = parse_system("cycle: (2,{0,1})").unwrap();
        assert!(fourier_level(&bin, 1, 1.0).norm() < 1e-15);
        assert_eq!(fourier_level(&bin, 0, 0.7), Complex64::new(1.0, 0.0));
        assert!((fourier_level(&final_example(), 5, 0.0).norm() - 1.0).abs() < 1e-15);
        assert!(fourier_level(&final_example(), 2, 3.0).norm() < 1e-15);
    }

    #[test]
    fn tail_matches_cosine_product() {
        let bin = parse_system("cycle: (2,{0,1})").unwrap();
        let t = fourier_tail(&bin, 0, 1.0 / 3.0, 20).unwrap();
        let oracle: f64 = (1..=20)
            .map(|i| (PI / (3.0 * 2f64.powi(i))).cos())
            .product();
        assert!((t.value.norm() - oracle).abs() < 1e-14);
        let z = fourier_tail(&bin, 3, 0.0, 5).unwrap();
        assert_eq!((z.value, z.error_bound), (Complex64::new(1.0, 0.0), 0.0));
    }

    #[test]
    fn tail_bound_shrinks_with_depth() {
        let sys = final_example();
        let mut prev = f64::INFINITY;
        for depth in 1..25 {
            let t = fourier_tail(&sys, 2, 7.3, depth).unwrap();
            assert!(t.error_bound < prev);
            prev = t.error_bound;
        }
        assert!(fourier_tail(&sys, 2, 7.3, 0).is_err());
    }

    #[test]
    fn tail_bound_is_rigorous() {
        let sys = parse_system("preamble: (4,{0,2}) cycle: (9,{0,1,2}) (4,{0,2})").unwrap();
        for &xi in &[0.3, -2.7, 11.0, 123.4] {
            let deep = fourier_tail(&sys, 1, xi, 40).unwrap().value.norm();
            for depth in 1..10 {
                let t = fourier_tail(&sys, 1, xi, depth).unwrap();
                assert!(t.lower_bound() <= deep + 1e-12);
                assert!(t.value.norm() >= deep - 1e-12);
            }
        }
    }

    #[test]
    fn zero_set_examples() {
        let sys = final_example();
        let w = zero_set_contains(&sys, &r(1, 1)).unwrap();
        assert_eq!(w.level, 1);
        let w = zero_set_contains(&sys, &r(2, 1)).unwrap();
        assert_eq!(w.level, 2);
        assert!(matches!(w.family, ZeroFamily::ThreeDigit { .. }));
        assert!(zero_set_contains(&sys, &r(0, 1)).is_none());
        assert!(zero_set_contains(&sys, &r(1, 2)).is_none());
        assert!(zero_set_contains_upto(&sys, &r(2, 1), Some(1)).is_none());
        // every nonzero integer is a zero of the final example
        for k in (-50..=50).filter(|&k| k != 0) {
            assert!(zero_set_contains(&sys, &r(k, 1)).is_some(), "k = {k}");
        }
    }

    #[test]
    fn zeros_vanish_numerically() {
        let sys = parse_system("preamble: (4,{0,2}) cycle: (9,{0,1,2}) (12,{0,1,2,3})").unwrap();
        for num in -200..200 {
            for den in [1, 2, 3, 4, 8, 12] {
                let xi = r(num, den);
                if let Some(w) = zero_set_contains(&sys, &xi) {
                    let v = fourier_level(&sys, w.level + 2, xi.to_f64().unwrap());
                    assert!(v.norm() < 1e-12, "xi = {xi}, witness = {w:?}");
                }
            }
        }
    }
}
