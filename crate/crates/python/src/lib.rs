//! Python bindings: `import pymoran`.
//!
//! Exact rationals cross the boundary as `fractions.Fraction`; inputs also
//! accept `int` or strings such as `"3/4"`.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyString};

use moran_spectral::certificates::{self, CertifyOptions};
use moran_spectral::density::{self, IntervalUnion};
use moran_spectral::spectrum::{self, Sigma};
use moran_spectral::{corpus, hadamard, measure, system, DigitSet, Error, MoranSystem, Rational};

create_exception!(pymoran, MoranError, PyValueError);

fn err(e: Error) -> PyErr {
    MoranError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, x: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((x.numer().clone(), x.denom().clone()))
}

fn fractions<'py>(py: Python<'py>, xs: &[Rational]) -> PyResult<Bound<'py, PyList>> {
    let items = xs.iter().map(|x| fraction(py, x)).collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(s) = obj.cast::<PyString>() {
        let s = s.to_str()?.trim().to_string();
        let bad = || MoranError::new_err(format!("cannot read '{s}' as a rational"));
        let (n, d) = s.split_once('/').unwrap_or((&s, "1"));
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(i) = obj.extract::<BigInt>() {
        return Ok(Rational::from_integer(i));
    }
    let n: BigInt = obj.getattr("numerator")?.extract()?;
    let d: BigInt = obj.getattr("denominator")?.extract()?;
    Ok(Rational::new(n, d))
}

fn sigma_from(s: &str) -> PyResult<Sigma> {
    if s.trim().is_empty() {
        Ok(Sigma::positive())
    } else {
        s.parse().map_err(err)
    }
}

fn digit_set(digits: Vec<u64>) -> PyResult<DigitSet> {
    DigitSet::new(digits).map_err(err)
}

/// `(p, digits, class, phi, violations, warnings)`.
type LevelRow = (u64, Vec<u64>, String, usize, Vec<String>, Vec<String>);

/// An eventually periodic Moran system.
#[pyclass(module = "pymoran", name = "System", frozen)]
struct PySystem {
    inner: MoranSystem,
}

#[pymethods]
impl PySystem {
    /// Parse the `preamble: ... cycle: ...` text format.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PySystem {
            inner: system::parse_system(text).map_err(err)?,
        })
    }

    /// Build from `[(p, [digits...]), ...]` lists.
    #[staticmethod]
    #[pyo3(signature = (preamble, cycle))]
    fn from_levels(preamble: Vec<(u64, Vec<u64>)>, cycle: Vec<(u64, Vec<u64>)>) -> PyResult<Self> {
        let build = |v: Vec<(u64, Vec<u64>)>| -> PyResult<Vec<system::Level>> {
            v.into_iter()
                .map(|(p, d)| system::Level::new(p, digit_set(d)?).map_err(err))
                .collect()
        };
        Ok(PySystem {
            inner: MoranSystem::new(build(preamble)?, build(cycle)?).map_err(err)?,
        })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("System({:?})", self.inner.to_string())
    }

    /// Number of levels; infinite systems raise `TypeError`.
    fn __len__(&self) -> PyResult<usize> {
        self.inner
            .len()
            .ok_or_else(|| pyo3::exceptions::PyTypeError::new_err("infinite system has no length"))
    }

    #[getter]
    fn is_finite(&self) -> bool {
        self.inner.is_finite()
    }

    #[getter]
    fn is_admissible(&self) -> bool {
        self.inner.is_admissible()
    }

    /// `(p, digits, class, phi, violations, warnings)` for levels `1..=n`.
    fn levels(&self, n: usize) -> Vec<LevelRow> {
        self.inner
            .levels_upto(n)
            .map(|(_, l)| {
                (
                    l.p,
                    l.digits.digits().to_vec(),
                    l.class().label().to_string(),
                    l.phi(),
                    l.classification.violations.clone(),
                    l.classification.warnings.clone(),
                )
            })
            .collect()
    }

    fn scale(&self, n: usize) -> BigInt {
        self.inner.scale(n)
    }

    fn tail_radius<'py>(&self, py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.tail_radius(n))
    }

    /// Atoms of `mu_n` in increasing order.
    fn atoms<'py>(&self, py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyList>> {
        fractions(py, &measure::atoms(&self.inner, n).map_err(err)?.atoms())
    }

    /// `hat(mu_n)(xi)`.
    fn fourier(&self, n: usize, xi: f64) -> (f64, f64) {
        let z = measure::fourier_level(&self.inner, n, xi);
        (z.re, z.im)
    }

    /// `(value, error_bound, lower_bound)` for `hat(mu_{>n})(xi)` truncated at `depth`.
    #[pyo3(signature = (n, xi, depth = 30))]
    fn fourier_tail(&self, n: usize, xi: f64, depth: usize) -> PyResult<((f64, f64), f64, f64)> {
        let t = measure::fourier_tail(&self.inner, n, xi, depth).map_err(err)?;
        Ok(((t.value.re, t.value.im), t.error_bound, t.lower_bound()))
    }

    /// `(level, family)` placing `xi` in the zero set, or `None`.
    #[pyo3(signature = (xi, max_level = None))]
    fn zero_set_contains(&self, xi: &Bound<'_, PyAny>, max_level: Option<usize>) -> PyResult<Option<(usize, String)>> {
        let x = to_rational(xi)?;
        Ok(measure::zero_set_contains_upto(&self.inner, &x, max_level)
            .map(|w| (w.level, w.family.name().to_string())))
    }

    /// Exact points of `Lambda_n`.
    #[pyo3(signature = (n, sigma = ""))]
    fn spectrum<'py>(&self, py: Python<'py>, n: usize, sigma: &str) -> PyResult<Bound<'py, PyList>> {
        let s = spectrum::level_spectrum(&self.inner, n, &sigma_from(sigma)?).map_err(err)?;
        fractions(py, s.points())
    }

    /// `(pairs_checked, failure_count)` for `Lambda_n`.
    #[pyo3(signature = (n, sigma = ""))]
    fn check_orthogonal(&self, n: usize, sigma: &str) -> PyResult<(usize, usize)> {
        let s = spectrum::level_spectrum(&self.inner, n, &sigma_from(sigma)?).map_err(err)?;
        let r = spectrum::check_orthogonal(&self.inner, n, s.points());
        Ok((r.pairs_checked, r.failure_count))
    }

    /// `Q(xi)` for `mu_n` and `Lambda_n`.
    #[pyo3(signature = (n, xi, sigma = ""))]
    fn q_sum(&self, n: usize, xi: f64, sigma: &str) -> PyResult<f64> {
        let s = spectrum::level_spectrum(&self.inner, n, &sigma_from(sigma)?).map_err(err)?;
        Ok(spectrum::q_sum_finite(&self.inner, n, s.points_f64(), xi))
    }

    /// `Q(xi)` for the measure truncated at `depth` levels and `Lambda_n`.
    #[pyo3(signature = (n, xi, depth = 30, sigma = ""))]
    fn q_partial(&self, n: usize, xi: f64, depth: usize, sigma: &str) -> PyResult<f64> {
        let s = spectrum::level_spectrum(&self.inner, n, &sigma_from(sigma)?).map_err(err)?;
        Ok(spectrum::q_partial(&self.inner, s.points_f64(), depth, xi))
    }

    #[pyo3(signature = (k, sigma = ""))]
    fn lambda_norm<'py>(&self, py: Python<'py>, k: usize, sigma: &str) -> PyResult<Bound<'py, PyAny>> {
        fraction(
            py,
            &certificates::lambda_norm_check(&self.inner, k, &sigma_from(sigma)?).map_err(err)?,
        )
    }

    fn h_bound<'py>(&self, py: Python<'py>, k: usize, n: usize) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &certificates::h_bound(&self.inner, k, n).map_err(err)?)
    }

    fn epsilon_next_level(&self, n_k: usize) -> PyResult<f64> {
        certificates::epsilon_next_level(&self.inner, n_k).map_err(err)
    }

    /// Run the spectrality certificate; returns a dict.
    #[pyo3(signature = (sigma = "", depth = 30, samples = 200, scan = 12, seed = 0))]
    fn certify<'py>(
        &self,
        py: Python<'py>,
        sigma: &str,
        depth: usize,
        samples: usize,
        scan: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let opts = CertifyOptions {
            sigma: sigma_from(sigma)?,
            depth,
            samples,
            scan_levels: scan,
            seed,
        };
        let cert = certificates::certify(&self.inner, &opts);
        let d = PyDict::new(py);
        d.set_item("verdict", cert.verdict.as_str())?;
        d.set_item("exit_code", cert.verdict.exit_code())?;
        d.set_item("seed", cert.seed)?;
        d.set_item("diagnostics", cert.diagnostics.clone())?;
        let rows = PyList::empty(py);
        for b in &cert.subsequence {
            let row = PyDict::new(py);
            row.set_item("n_k", b.n_k)?;
            row.set_item("lambda_norm", b.lambda_norm)?;
            row.set_item("tail_constant", b.tail_constant)?;
            row.set_item("epsilon_next", b.epsilon_next)?;
            row.set_item("epsilon", b.epsilon)?;
            row.set_item("min_observed", b.min_observed)?;
            row.set_item("violations", b.violations)?;
            rows.append(row)?;
        }
        d.set_item("subsequence", rows)?;
        d.set_item("report", cert.to_string())?;
        Ok(d)
    }

    /// Support cover at `level` as a list of `(a, b)` fractions.
    fn support_cover<'py>(&self, py: Python<'py>, level: usize) -> PyResult<Bound<'py, PyList>> {
        let cover = density::support_cover(&self.inner, level).map_err(err)?;
        intervals_to_py(py, &cover)
    }

    /// Exact-atom density histogram and its verdict.
    #[pyo3(signature = (level, bins = 4096, tol = density::UNIFORMITY_TOL))]
    fn density<'py>(&self, py: Python<'py>, level: usize, bins: usize, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let h = density::density_histogram(&self.inner, level, bins).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("lo", fraction(py, &h.lo)?)?;
        d.set_item("hi", fraction(py, &h.hi)?)?;
        d.set_item("centers", h.centers())?;
        d.set_item("densities", h.densities.clone())?;
        d.set_item("counts", h.counts.clone())?;
        d.set_item("total_mass", h.total_mass())?;
        d.set_item("coefficient_of_variation", h.coefficient_of_variation())?;
        d.set_item("uniform", density::uniformity_check(&h.densities, tol))?;
        d.set_item("verdict", density::density_verdict(&h, tol).as_str())?;
        d.set_item("warnings", h.warnings())?;
        Ok(d)
    }

    /// Tiling of the level cover by `Z`; returns `(tiles, report)`.
    #[pyo3(signature = (level, samples = 10_000, window = None))]
    fn tiling(&self, level: usize, samples: usize, window: Option<i64>) -> PyResult<(bool, String)> {
        let cover = density::support_cover(&self.inner, level).map_err(err)?;
        let w = window.unwrap_or_else(|| density::minimal_window(&cover));
        let r = density::tiling_check(&cover, w, samples).map_err(err)?;
        Ok((r.tiles, r.to_string()))
    }
}

fn intervals_to_py<'py>(py: Python<'py>, u: &IntervalUnion) -> PyResult<Bound<'py, PyList>> {
    let items = u
        .intervals()
        .iter()
        .map(|(a, b)| Ok((fraction(py, a)?, fraction(py, b)?)))
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

/// `{"class", "violations", "warnings"}` for one generator.
#[pyfunction]
fn classify_level<'py>(py: Python<'py>, p: u64, digits: Vec<u64>) -> PyResult<Bound<'py, PyDict>> {
    let c = system::classify_level(p, &digit_set(digits)?);
    let d = PyDict::new(py);
    d.set_item("class", c.class.label())?;
    d.set_item("violations", c.violations)?;
    d.set_item("warnings", c.warnings)?;
    Ok(d)
}

#[pyfunction]
fn normalize_level(p: i64, digits: Vec<i64>) -> PyResult<(u64, Vec<u64>)> {
    system::normalize_level(p, &digits).map_err(err)
}

/// `m_D(xi)` as `(re, im)`.
#[pyfunction]
fn mask_eval(digits: Vec<u64>, xi: f64) -> PyResult<(f64, f64)> {
    let z = measure::mask_eval(&digit_set(digits)?, xi);
    Ok((z.re, z.im))
}

/// `(L, residual, exact)` for an admissible `(p, D)`.
#[pyfunction]
fn hadamard_triple(p: u64, digits: Vec<u64>) -> PyResult<(Vec<i64>, f64, bool)> {
    let ds = digit_set(digits)?;
    let t = hadamard::hadamard_triple(p, &ds).map_err(err)?;
    let exact = hadamard::is_hadamard(p, &ds, &t.companions).map_err(err)?;
    Ok((t.companions, t.residual, exact))
}

#[pyfunction]
fn is_hadamard(p: u64, digits: Vec<u64>, companions: Vec<i64>) -> PyResult<bool> {
    hadamard::is_hadamard(p, &digit_set(digits)?, &companions).map_err(err)
}

#[pyfunction]
fn f_min_points() -> (f64, Vec<(f64, f64)>) {
    let (v, pts) = certificates::f_min_points();
    (v, pts.to_vec())
}

/// `(minimum, argmins)` of `f` on a grid over `(-pi, pi]^2`.
#[pyfunction]
#[pyo3(signature = (resolution = 2001, cluster_tol = 1e-4))]
fn f_grid_minimum(resolution: usize, cluster_tol: f64) -> (f64, Vec<(f64, f64)>) {
    let g = certificates::f_grid_minimum(resolution, cluster_tol);
    (g.value, g.argmins)
}

#[pyfunction]
fn tail_constant(n_k: usize) -> PyResult<f64> {
    certificates::tail_constant(n_k).map_err(err)
}

/// Tiling of a union of `(a, b)` intervals by `Z`; returns `(tiles, report)`.
#[pyfunction]
#[pyo3(signature = (intervals, window, samples = 10_000))]
fn tiling_check(intervals: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>, window: i64, samples: usize) -> PyResult<(bool, String)> {
    let pairs = intervals
        .iter()
        .map(|(a, b)| Ok((to_rational(a)?, to_rational(b)?)))
        .collect::<PyResult<Vec<_>>>()?;
    let u = IntervalUnion::new(pairs).map_err(err)?;
    let r = density::tiling_check(&u, window, samples).map_err(err)?;
    Ok((r.tiles, r.to_string()))
}

/// Built-in example systems: `{name: (source, expected_verdict)}`.
#[pyfunction]
fn examples<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for e in corpus::entries() {
        d.set_item(e.name, (e.source, e.expected.verdict.as_str()))?;
    }
    Ok(d)
}

#[pymodule]
pub fn pymoran(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MoranError", m.py().get_type::<MoranError>())?;
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(classify_level, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_level, m)?)?;
    m.add_function(wrap_pyfunction!(mask_eval, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_triple, m)?)?;
    m.add_function(wrap_pyfunction!(is_hadamard, m)?)?;
    m.add_function(wrap_pyfunction!(f_min_points, m)?)?;
    m.add_function(wrap_pyfunction!(f_grid_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(tail_constant, m)?)?;
    m.add_function(wrap_pyfunction!(tiling_check, m)?)?;
    m.add_function(wrap_pyfunction!(examples, m)?)?;
    Ok(())
}
