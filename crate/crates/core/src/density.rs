//! Support covers, density histograms, uniformity and tiling by the integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::atoms;
use crate::system::MoranSystem;
use crate::Rational;

/// Finite union of closed intervals with exact endpoints, kept sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntervalUnion {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalUnion {
    /// Normalizes arbitrary (possibly overlapping) intervals; touching intervals merge.
    pub fn new(intervals: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        let mut v: Vec<(Rational, Rational)> = intervals.into_iter().collect();
        if let Some((a, b)) = v.iter().find(|(a, b)| a > b) {
            return Err(Error::Precondition(format!("interval [{a}, {b}] is reversed")));
        }
        v.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            match merged.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        Ok(IntervalUnion { intervals: merged })
    }

    pub fn interval(a: Rational, b: Rational) -> Result<Self> {
        Self::new([(a, b)])
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::zero(), |acc, (a, b)| acc + (b - a))
    }

    pub fn min(&self) -> Option<&Rational> {
        self.intervals.first().map(|i| &i.0)
    }

    pub fn max(&self) -> Option<&Rational> {
        self.intervals.last().map(|i| &i.1)
    }

    pub fn diameter(&self) -> Rational {
        match (self.min(), self.max()) {
            (Some(a), Some(b)) => b - a,
            _ => Rational::zero(),
        }
    }

    pub fn translate(&self, t: &Rational) -> Self {
        IntervalUnion {
            intervals: self.intervals.iter().map(|(a, b)| (a + t, b + t)).collect(),
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let i = self.intervals.partition_point(|(_, b)| b < x);
        self.intervals.get(i).is_some_and(|(a, _)| a <= x)
    }

    /// Membership with each interval read as `[a, b)`.
    pub fn contains_half_open(&self, x: &Rational) -> bool {
        let i = self.intervals.partition_point(|(_, b)| b <= x);
        self.intervals.get(i).is_some_and(|(a, _)| a <= x)
    }

    pub fn is_subset_of(&self, other: &IntervalUnion) -> bool {
        self.intervals.iter().all(|(a, b)| {
            let i = other.intervals.partition_point(|(_, d)| d < a);
            other.intervals.get(i).is_some_and(|(c, d)| c <= a && b <= d)
        })
    }

    /// Distance from `x` to the union; `None` when the union is empty.
    pub fn distance_to(&self, x: &Rational) -> Option<Rational> {
        if self.is_empty() {
            return None;
        }
        let i = self.intervals.partition_point(|(_, b)| b < x);
        let mut best: Option<Rational> = None;
        let mut consider = |d: Rational| {
            if best.as_ref().is_none_or(|b| d < *b) {
                best = Some(d);
            }
        };
        if let Some((a, _)) = self.intervals.get(i) {
            consider(if a <= x { Rational::zero() } else { a - x });
        }
        if i > 0 {
            consider(x - &self.intervals[i - 1].1);
        }
        best
    }

    /// Exact Hausdorff distance between two non-empty unions.
    pub fn hausdorff_distance(&self, other: &IntervalUnion) -> Result<Rational> {
        if self.is_empty() || other.is_empty() {
            return Err(Error::Precondition("Hausdorff distance of an empty set".into()));
        }
        Ok(directed_hausdorff(self, other).max(directed_hausdorff(other, self)))
    }
}

/// `sup_{a in from} d(a, to)`: attained at an endpoint of `from` or at a gap midpoint of `to`.
fn directed_hausdorff(from: &IntervalUnion, to: &IntervalUnion) -> Rational {
    let two = Rational::from_integer(2.into());
    let gap_midpoints = to
        .intervals
        .windows(2)
        .map(|w| (&w[0].1 + &w[1].0) / &two)
        .filter(|m| from.contains(m));
    from.intervals
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .chain(gap_midpoints)
        .map(|x| to.distance_to(&x).expect("non-empty"))
        .max()
        .unwrap_or_else(Rational::zero)
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        for (i, (a, b)) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(" U ")?;
            }
            write!(f, "[{a}, {b}]")?;
        }
        Ok(())
    }
}

/// `U_{atoms x of mu_level} [x, x + R_level]`, a superset of the support.
pub fn support_cover(system: &MoranSystem, level: usize) -> Result<IntervalUnion> {
    let measure = atoms(system, level)?;
    let radius = system.tail_radius(level);
    // work over the common denominator D * r_den so merging is integer comparison
    let den = measure.denominator() * radius.denom();
    let width = radius.numer() * measure.denominator();
    let mut merged: Vec<(BigInt, BigInt)> = Vec::new();
    for k in measure.numerators() {
        let a = k * radius.denom();
        let b = &a + &width;
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = b,
            _ => merged.push((a, b)),
        }
    }
    Ok(IntervalUnion {
        intervals: merged
            .into_iter()
            .map(|(a, b)| (Rational::new(a, den.clone()), Rational::new(b, den.clone())))
            .collect(),
    })
}

/// Mean density below which an interior bin is reported as under-resolved.
pub const MIN_ATOMS_PER_BIN: u64 = 20;

/// Exact-atom histogram of `mu_level` on `[min atom, max atom + R_level]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityHistogram {
    pub level: usize,
    pub lo: Rational,
    pub hi: Rational,
    pub atom_count: usize,
    pub counts: Vec<u64>,
    /// `count / q / bin width` per bin.
    pub densities: Vec<f64>,
}

impl DensityHistogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        ((&self.hi - &self.lo) / Rational::from_integer(self.bins().into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    pub fn centers(&self) -> Vec<f64> {
        let lo = self.lo.to_f64().unwrap_or(f64::NAN);
        let w = self.bin_width();
        (0..self.bins()).map(|i| lo + (i as f64 + 0.5) * w).collect()
    }

    /// Sum of bin masses; 1 up to rounding.
    pub fn total_mass(&self) -> f64 {
        self.counts.iter().sum::<u64>() as f64 / self.atom_count as f64
    }

    /// Riemann sum of the density estimate.
    pub fn integral(&self) -> f64 {
        self.densities.iter().sum::<f64>() * self.bin_width()
    }

    /// Average density over the bins lying entirely inside `[a, b]`.
    pub fn mean_density_over(&self, a: f64, b: f64) -> Option<f64> {
        let lo = self.lo.to_f64()?;
        let w = self.bin_width();
        let inside: Vec<f64> = (0..self.bins())
            .filter(|&i| lo + i as f64 * w >= a && lo + (i + 1) as f64 * w <= b)
            .map(|i| self.densities[i])
            .collect();
        (!inside.is_empty()).then(|| inside.iter().sum::<f64>() / inside.len() as f64)
    }

    /// Coefficient of variation of the bin densities over the whole box.
    pub fn coefficient_of_variation(&self) -> f64 {
        let n = self.bins() as f64;
        let mean = self.densities.iter().sum::<f64>() / n;
        let var = self.densities.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
        var.sqrt() / mean
    }

    /// Fraction of empty bins.
    pub fn empty_fraction(&self) -> f64 {
        self.counts.iter().filter(|&&c| c == 0).count() as f64 / self.bins() as f64
    }

    /// Mass concentrating on few bins indicates a singular measure.
    pub fn is_singular_suspect(&self) -> bool {
        self.empty_fraction() > 0.5 || self.coefficient_of_variation() > 2.0
    }

    /// Smallest count over bins whose neighbours are both non-empty.
    pub fn min_interior_count(&self) -> Option<u64> {
        interior_indices(&self.counts.iter().map(|&c| c as f64).collect::<Vec<_>>())
            .map(|i| self.counts[i])
            .min()
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if let Some(m) = self.min_interior_count() {
            if m < MIN_ATOMS_PER_BIN {
                w.push(format!(
                    "an interior bin holds only {m} atoms (fewer than {MIN_ATOMS_PER_BIN}); raise the level or lower the bin count"
                ));
            }
        }
        w
    }
}

pub fn density_histogram(system: &MoranSystem, level: usize, bins: usize) -> Result<DensityHistogram> {
    if bins == 0 {
        return Err(Error::Precondition("degenerate bin width: zero bins".into()));
    }
    let measure = atoms(system, level)?;
    let atoms = measure.atoms();
    let lo = atoms.first().cloned().unwrap_or_else(Rational::zero);
    let hi = atoms.last().cloned().unwrap_or_else(Rational::zero) + system.tail_radius(level);
    if hi <= lo {
        return Err(Error::Precondition(
            "degenerate bin width: the support box has zero length".into(),
        ));
    }
    let scale = Rational::from_integer(bins.into()) / (&hi - &lo);
    let last = bins - 1;
    let counts = atoms
        .par_chunks(4096)
        .map(|chunk| {
            let mut local = vec![0u64; bins];
            for x in chunk {
                let idx = ((x - &lo) * &scale).floor().to_integer();
                local[idx.to_usize().unwrap_or(last).min(last)] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let q = atoms.len() as f64;
    let width = (&hi - &lo).to_f64().unwrap_or(f64::NAN) / bins as f64;
    let densities = counts.iter().map(|&c| c as f64 / q / width).collect();
    Ok(DensityHistogram {
        level,
        lo,
        hi,
        atom_count: atoms.len(),
        counts,
        densities,
    })
}

/// Indices of positive entries whose neighbours are also positive.
fn interior_indices(values: &[f64]) -> impl Iterator<Item = usize> + '_ {
    (1..values.len().saturating_sub(1))
        .filter(move |&i| values[i - 1] > 0.0 && values[i] > 0.0 && values[i + 1] > 0.0)
}

/// Default relative tolerance for [`uniformity_check`].
pub const UNIFORMITY_TOL: f64 = 0.1;

/// True iff every interior positive bin lies within `tol` relative deviation of their mean.
pub fn uniformity_check(densities: &[f64], tol: f64) -> bool {
    let interior: Vec<f64> = interior_indices(densities).map(|i| densities[i]).collect();
    if interior.is_empty() {
        return densities.windows(2).all(|w| w[0] == w[1]);
    }
    let mean = interior.iter().sum::<f64>() / interior.len() as f64;
    interior.iter().all(|d| ((d - mean) / mean).abs() <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityVerdict {
    Uniform,
    NotSpectralByUniformity,
    NotAbsolutelyContinuous,
}

impl DensityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            DensityVerdict::Uniform => "uniform on its support",
            DensityVerdict::NotSpectralByUniformity => "not spectral by uniformity criterion",
            DensityVerdict::NotAbsolutelyContinuous => "not absolutely continuous (singular suspect)",
        }
    }
}

impl fmt::Display for DensityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An absolutely continuous spectral measure is uniform on its support.
pub fn density_verdict(hist: &DensityHistogram, tol: f64) -> DensityVerdict {
    if hist.is_singular_suspect() {
        DensityVerdict::NotAbsolutelyContinuous
    } else if uniformity_check(&hist.densities, tol) {
        DensityVerdict::Uniform
    } else {
        DensityVerdict::NotSpectralByUniformity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TilingReport {
    pub tiles: bool,
    pub samples: usize,
    pub window: i64,
    /// First sample point `x` in `[0, 1)` whose translates are not covered exactly once.
    pub first_failure: Option<(Rational, usize)>,
}

impl fmt::Display for TilingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_failure {
            None => write!(
                f,
                "tiles by Z: yes ({} samples, window {})",
                self.samples, self.window
            ),
            Some((x, c)) => write!(
                f,
                "tiles by Z: no (x = {x} is covered {c} times; {} samples, window {})",
                self.samples, self.window
            ),
        }
    }
}

/// Sample `x_j = (2j+1) / (2 samples)` and count `sum_{|k| <= window} 1_T(x_j + k)`
/// with intervals read half-open; `T` tiles by `Z` iff every count is 1.
pub fn tiling_check(t: &IntervalUnion, window: i64, samples: usize) -> Result<TilingReport> {
    let Some(min) = t.min() else {
        return Err(Error::Precondition("tiling check of an empty set".into()));
    };
    if window < 0 || Rational::from_integer(window.into()) < t.diameter() {
        return Err(Error::Precondition(format!(
            "window {window} is smaller than the diameter {} of T",
            t.diameter()
        )));
    }
    if samples == 0 {
        return Err(Error::Precondition("tiling check needs at least one sample".into()));
    }
    let shifted = t.translate(&-min.floor());
    let den = BigInt::from(2 * samples as u64);
    let failure = (0..samples)
        .into_par_iter()
        .map(|j| {
            let x = Rational::new(BigInt::from(2 * j as u64 + 1), den.clone());
            let count = (-window..=window)
                .filter(|&k| shifted.contains_half_open(&(&x + Rational::from_integer(k.into()))))
                .count();
            (j, x, count)
        })
        .filter(|(_, _, c)| *c != 1)
        .min_by_key(|(j, _, _)| *j)
        .map(|(_, x, c)| (x, c));
    Ok(TilingReport {
        tiles: failure.is_none(),
        samples,
        window,
        first_failure: failure,
    })
}

/// Smallest integer window accepted by [`tiling_check`].
pub fn minimal_window(t: &IntervalUnion) -> i64 {
    let d = t.diameter();
    let (q, r) = d.numer().div_rem(d.denom());
    let w = if r.is_positive() { q + 1 } else { q };
    w.to_i64().unwrap_or(i64::MAX)
}
