//! Python bindings: the distribution class, monotone maps, circle
//! distributions, the three distances with witnesses, and the verify
//! suites. Exact rationals cross the boundary as strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use kuiper_core::generate::{random_distribution, random_map, trial_rng, DistributionOptions};
use kuiper_core::io;
use kuiper_core::metrics;
use kuiper_core::scalar::{format_rational, parse_rational, ExtReal, Value};
use kuiper_core::transform;
use kuiper_core::{characterize, circle, verify, Distribution, Interval};

fn err(e: kuiper_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn interval_from_args(lo: &str, hi: &str, lo_closed: bool, hi_closed: bool) -> PyResult<Interval> {
    let lo = ExtReal::parse(lo).map_err(err)?;
    let hi = ExtReal::parse(hi).map_err(err)?;
    Interval::new(lo, hi, lo_closed, hi_closed).map_err(err)
}

fn value_tuple(v: &Value) -> (String, f64, bool) {
    (v.to_string(), v.to_f64(), v.is_exact())
}

/// A probability measure on the line: atoms plus Möbius CDF segments.
#[pyclass(name = "Distribution", frozen, eq)]
#[derive(PartialEq)]
struct PyDistribution {
    inner: Distribution,
}

#[pymethods]
impl PyDistribution {
    #[staticmethod]
    fn uniform(lo: &str, hi: &str) -> PyResult<Self> {
        let lo = parse_rational(lo).map_err(err)?;
        let hi = parse_rational(hi).map_err(err)?;
        Ok(PyDistribution {
            inner: Distribution::uniform(lo, hi).map_err(err)?,
        })
    }

    #[staticmethod]
    fn dirac(x: &str) -> PyResult<Self> {
        Ok(PyDistribution {
            inner: Distribution::dirac(parse_rational(x).map_err(err)?),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyDistribution {
            inner: io::parse_distribution(text).map_err(err)?,
        })
    }

    /// Exact convex combination of `(weight, distribution)` pairs.
    #[staticmethod]
    fn mix(py: Python<'_>, parts: Vec<(String, Py<PyDistribution>)>) -> PyResult<Self> {
        let mut owned = Vec::with_capacity(parts.len());
        for (w, d) in &parts {
            owned.push((
                parse_rational(w).map_err(err)?,
                d.bind(py).get().inner.clone(),
            ));
        }
        Ok(PyDistribution {
            inner: Distribution::mix(&owned).map_err(err)?,
        })
    }

    #[staticmethod]
    fn random(seed: u64, atom_free: bool) -> Self {
        let opts = if atom_free {
            DistributionOptions::atom_free()
        } else {
            DistributionOptions {
                allow_tails: true,
                ..Default::default()
            }
        };
        let mut rng = trial_rng(seed, 0x9d, 0);
        PyDistribution {
            inner: random_distribution(&mut rng, &opts),
        }
    }

    fn to_json(&self) -> String {
        io::serialize_distribution(&self.inner)
    }

    fn cdf(&self, t: &str) -> PyResult<String> {
        Ok(format_rational(
            &self.inner.cdf(&parse_rational(t).map_err(err)?),
        ))
    }

    fn cdf_left(&self, t: &str) -> PyResult<String> {
        Ok(format_rational(
            &self.inner.cdf_left(&parse_rational(t).map_err(err)?),
        ))
    }

    fn atom_at(&self, t: &str) -> PyResult<String> {
        Ok(format_rational(
            &self.inner.atom_at(&parse_rational(t).map_err(err)?),
        ))
    }

    fn atoms(&self) -> Vec<(String, String)> {
        self.inner
            .atoms()
            .into_iter()
            .map(|(t, m)| (format_rational(&t), format_rational(&m)))
            .collect()
    }

    #[pyo3(signature = (lo, hi, lo_closed = true, hi_closed = true))]
    fn interval_mass(&self, lo: &str, hi: &str, lo_closed: bool, hi_closed: bool) -> PyResult<String> {
        let iv = interval_from_args(lo, hi, lo_closed, hi_closed)?;
        Ok(format_rational(&self.inner.interval_mass(&iv)))
    }

    #[pyo3(signature = (lo, hi, lo_closed = true, hi_closed = true))]
    fn condition(&self, lo: &str, hi: &str, lo_closed: bool, hi_closed: bool) -> PyResult<Self> {
        let iv = interval_from_args(lo, hi, lo_closed, hi_closed)?;
        Ok(PyDistribution {
            inner: self.inner.condition_on_interval(&iv).map_err(err)?,
        })
    }

    fn quantize(&self, n: u64) -> PyResult<Self> {
        if n == 0 {
            return Err(PyValueError::new_err("quantize needs n >= 1"));
        }
        Ok(PyDistribution {
            inner: self.inner.quantize(n),
        })
    }

    fn is_continuous(&self) -> bool {
        self.inner.is_continuous()
    }

    fn is_dirac(&self) -> bool {
        self.inner.is_dirac()
    }

    fn closed_support(&self) -> Vec<String> {
        self.inner
            .closed_support()
            .iter()
            .map(|iv| iv.to_string())
            .collect()
    }

    /// `(components, hull, bounded_gaps, outer)` of the co-interval support.
    fn co_interval_support(&self) -> (Vec<String>, String, Vec<String>, Vec<String>) {
        let cs = self.inner.co_interval_support();
        (
            cs.components.iter().map(|iv| iv.to_string()).collect(),
            cs.hull.to_string(),
            cs.bounded_gaps.iter().map(|iv| iv.to_string()).collect(),
            cs.outer.iter().map(|iv| iv.to_string()).collect(),
        )
    }

    fn is_absolutely_continuous_wrt(&self, other: &PyDistribution) -> bool {
        self.inner.is_absolutely_continuous_wrt(&other.inner)
    }

    fn quantile(&self, c: &str) -> PyResult<String> {
        let c = parse_rational(c).map_err(err)?;
        Ok(format_rational(&self.inner.quantile(&c)))
    }

    fn __repr__(&self) -> String {
        let atoms = self.inner.atoms().len();
        let pieces = self.inner.pieces().len();
        format!("Distribution(atoms={atoms}, pieces={pieces})")
    }
}

/// A monotone piecewise-Möbius bijection of the compactified line.
#[pyclass(name = "MonotoneMap", frozen, eq)]
#[derive(PartialEq)]
struct PyMonotoneMap {
    inner: transform::MonotoneMap,
}

#[pymethods]
impl PyMonotoneMap {
    #[staticmethod]
    fn identity() -> Self {
        PyMonotoneMap {
            inner: transform::MonotoneMap::identity(),
        }
    }

    /// The inversion `r_x`; pass "inf" for the identity.
    #[staticmethod]
    fn r_map(pole: &str) -> PyResult<Self> {
        Ok(PyMonotoneMap {
            inner: transform::MonotoneMap::r_map(&ExtReal::parse(pole).map_err(err)?),
        })
    }

    #[staticmethod]
    fn affine(slope: &str, intercept: &str) -> PyResult<Self> {
        Ok(PyMonotoneMap {
            inner: transform::MonotoneMap::affine(
                &parse_rational(slope).map_err(err)?,
                &parse_rational(intercept).map_err(err)?,
            )
            .map_err(err)?,
        })
    }

    #[staticmethod]
    fn pwl(knots: Vec<(String, String)>, lo_slope: &str, hi_slope: &str) -> PyResult<Self> {
        let mut parsed = Vec::with_capacity(knots.len());
        for (t, y) in &knots {
            parsed.push((parse_rational(t).map_err(err)?, parse_rational(y).map_err(err)?));
        }
        Ok(PyMonotoneMap {
            inner: transform::MonotoneMap::pwl_map(
                &parsed,
                &parse_rational(lo_slope).map_err(err)?,
                &parse_rational(hi_slope).map_err(err)?,
            )
            .map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyMonotoneMap {
            inner: io::parse_map(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn random(seed: u64) -> Self {
        let mut rng = trial_rng(seed, 0x3a, 0);
        PyMonotoneMap {
            inner: random_map(&mut rng, 4, true),
        }
    }

    fn to_json(&self) -> String {
        io::serialize_map(&self.inner)
    }

    fn compose(&self, inner: &PyMonotoneMap) -> Self {
        PyMonotoneMap {
            inner: transform::compose(&self.inner, &inner.inner),
        }
    }

    fn invert(&self) -> Self {
        PyMonotoneMap {
            inner: self.inner.invert(),
        }
    }

    /// Image of a point; `None` means infinity.
    fn eval(&self, t: &str) -> PyResult<Option<String>> {
        Ok(match self.inner.eval(&parse_rational(t).map_err(err)?) {
            transform::CirclePoint::Finite(v) => Some(format_rational(&v)),
            transform::CirclePoint::Infinity => None,
        })
    }

    fn is_line_bijection(&self) -> bool {
        self.inner.is_line_bijection()
    }

    fn domain_exceptional(&self) -> Option<String> {
        self.inner.domain_exceptional().map(|q| format_rational(&q))
    }

    fn range_exceptional(&self) -> Option<String> {
        self.inner.range_exceptional().map(|q| format_rational(&q))
    }

    fn __repr__(&self) -> String {
        format!("MonotoneMap(pieces={})", self.inner.pieces().len())
    }
}

/// A measure on the circle: atoms plus a piecewise-linear angular CDF.
#[pyclass(name = "CircleDistribution", frozen)]
struct PyCircleDistribution {
    inner: circle::CircleDistribution,
}

#[pymethods]
impl PyCircleDistribution {
    #[staticmethod]
    fn uniform() -> Self {
        PyCircleDistribution {
            inner: circle::CircleDistribution::uniform(),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyCircleDistribution {
            inner: io::parse_circle(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        io::serialize_circle(&self.inner)
    }

    #[pyo3(signature = (start, extent, start_closed = true, end_closed = true))]
    fn arc_mass(&self, start: f64, extent: f64, start_closed: bool, end_closed: bool) -> PyResult<f64> {
        let arc = circle::Arc::new(start, extent, start_closed, end_closed).map_err(err)?;
        Ok(self.inner.arc_mass(&arc))
    }

    fn rotate(&self, theta: f64) -> Self {
        PyCircleDistribution {
            inner: self.inner.rotate(theta),
        }
    }

    fn __repr__(&self) -> String {
        format!("CircleDistribution(nodes={})", self.inner.nodes().len())
    }
}

#[pyfunction]
fn kuiper_distance(a: &PyDistribution, b: &PyDistribution) -> (String, f64, bool) {
    value_tuple(&metrics::kuiper_distance(&a.inner, &b.inner))
}

#[pyfunction]
fn ks_distance(a: &PyDistribution, b: &PyDistribution) -> (String, f64, bool) {
    value_tuple(&metrics::ks_distance(&a.inner, &b.inner))
}

#[pyfunction]
fn tv_distance(a: &PyDistribution, b: &PyDistribution) -> (String, f64, bool) {
    value_tuple(&metrics::tv_distance(&a.inner, &b.inner))
}

/// `(interval, signed_value, distance_float, exact)` of a maximizing
/// interval for the Kuiper distance.
#[pyfunction]
fn kuiper_witness(a: &PyDistribution, b: &PyDistribution) -> (String, String, f64, bool) {
    let (w, d) = metrics::kuiper_witness(&a.inner, &b.inner);
    (
        w.interval.to_string(),
        w.signed_value.to_string(),
        d.to_f64(),
        w.exact,
    )
}

#[pyfunction]
fn dirac_distance(a: &PyDistribution, x: &str) -> PyResult<(String, f64, bool)> {
    let x = parse_rational(x).map_err(err)?;
    Ok(value_tuple(&metrics::dirac_distance(&a.inner, &x)))
}

#[pyfunction]
fn pullback(a: &PyDistribution, map: &PyMonotoneMap) -> PyResult<PyDistribution> {
    Ok(PyDistribution {
        inner: transform::pullback(&a.inner, &map.inner).map_err(err)?,
    })
}

#[pyfunction]
fn is_unit_distant(a: &PyDistribution, b: &PyDistribution) -> bool {
    characterize::is_unit_distant(&a.inner, &b.inner)
}

#[pyfunction]
fn circle_kuiper(a: &PyCircleDistribution, b: &PyCircleDistribution) -> f64 {
    circle::circle_kuiper(&a.inner, &b.inner)
}

#[pyfunction]
fn tau_transport(a: &PyDistribution, eps: f64) -> PyResult<PyCircleDistribution> {
    Ok(PyCircleDistribution {
        inner: circle::tau_transport(&a.inner, eps).map_err(err)?,
    })
}

#[pyfunction]
fn tau_inverse_transport(c: &PyCircleDistribution, eps: f64) -> PyResult<PyDistribution> {
    Ok(PyDistribution {
        inner: circle::tau_inverse_transport(&c.inner, eps).map_err(err)?,
    })
}

/// Runs a verification suite and returns its report as a JSON string.
#[pyfunction]
#[pyo3(signature = (suite, seed = 42, trials = None))]
fn run_verify_suite(suite: &str, seed: u64, trials: Option<u64>) -> PyResult<String> {
    let report = verify::run_suite(suite, seed, trials).map_err(err)?;
    Ok(serde_json::to_string_pretty(&report).expect("report serializes"))
}

#[pymodule]
fn kuiper_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyMonotoneMap>()?;
    m.add_class::<PyCircleDistribution>()?;
    m.add_function(wrap_pyfunction!(kuiper_distance, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance, m)?)?;
    m.add_function(wrap_pyfunction!(tv_distance, m)?)?;
    m.add_function(wrap_pyfunction!(kuiper_witness, m)?)?;
    m.add_function(wrap_pyfunction!(dirac_distance, m)?)?;
    m.add_function(wrap_pyfunction!(pullback, m)?)?;
    m.add_function(wrap_pyfunction!(is_unit_distant, m)?)?;
    m.add_function(wrap_pyfunction!(circle_kuiper, m)?)?;
    m.add_function(wrap_pyfunction!(tau_transport, m)?)?;
    m.add_function(wrap_pyfunction!(tau_inverse_transport, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify_suite, m)?)?;
    Ok(())
}
