//! Python bindings: `import pyprodstat`.

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use prodstat::equilibrium as eq;
use prodstat::fit::{self, CutPolicy, FitOptions};
use prodstat::pipeline::{self, AnalysisOptions, SynthConfig};
use prodstat::superstat;
use prodstat::Error;

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Io { .. } | Error::Csv { .. } | Error::Schema { .. } => PyOSError::new_err(msg),
        Error::Quadrature { .. } | Error::Bracket(_) => PyRuntimeError::new_err(msg),
        Error::DivergentMoment { .. } => PyArithmeticError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for prodstat::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// GB2 distribution with Pareto index `mu`, lower exponent `nu`, shape `q`
/// and scale `c1`.
#[pyclass(name = "Gb2Params", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyGb2 {
    inner: prodstat::Gb2Params,
}

#[pymethods]
impl PyGb2 {
    #[new]
    fn new(mu: f64, nu: f64, q: f64, c1: f64) -> PyResult<Self> {
        Ok(Self {
            inner: prodstat::Gb2Params::new(mu, nu, q, c1).py()?,
        })
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu()
    }
    #[getter]
    fn nu(&self) -> f64 {
        self.inner.nu()
    }
    #[getter]
    fn q(&self) -> f64 {
        self.inner.q()
    }
    #[getter]
    fn c1(&self) -> f64 {
        self.inner.c1()
    }

    fn pdf(&self, c: f64) -> PyResult<f64> {
        self.inner.pdf(c).py()
    }

    fn cdf_upper(&self, c: f64) -> PyResult<f64> {
        self.inner.cdf_upper(c).py()
    }

    fn tail_upper(&self, c: f64) -> PyResult<f64> {
        self.inner.tail_upper(c).py()
    }

    fn tail_scale(&self) -> f64 {
        self.inner.tail_scale()
    }

    fn raw_moment(&self, n: f64) -> PyResult<f64> {
        self.inner.raw_moment(n).py()
    }

    /// `(c_ln, sigma)` of the log-normal approximation near the peak.
    fn lognormal_peak(&self) -> (f64, f64) {
        let l = self.inner.lognormal_peak();
        (l.c_ln, l.sigma)
    }

    fn sample(&self, seed: u64, n: usize) -> PyResult<Vec<f64>> {
        prodstat::gb2::gb2_sample(&self.inner, seed, n).py()
    }

    fn __repr__(&self) -> String {
        let p = self.inner;
        format!(
            "Gb2Params(mu={}, nu={}, q={}, c1={})",
            p.mu(),
            p.nu(),
            p.q(),
            p.c1()
        )
    }
}

/// Distribution of firm productivity levels for the Boltzmann allocation.
#[pyclass(name = "FirmDistribution", frozen)]
struct PyFirm {
    inner: eq::FirmDistribution,
}

#[pymethods]
impl PyFirm {
    #[staticmethod]
    fn gb2(params: PyGb2) -> Self {
        Self {
            inner: eq::FirmDistribution::gb2(params.inner),
        }
    }

    #[staticmethod]
    fn exponential(rate: f64) -> PyResult<Self> {
        Ok(Self {
            inner: eq::FirmDistribution::exponential(rate).py()?,
        })
    }

    #[staticmethod]
    fn empirical(levels: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: eq::FirmDistribution::empirical(&levels).py()?,
        })
    }

    #[getter]
    fn tail_mu(&self) -> f64 {
        self.inner.tail_mu()
    }
    #[getter]
    fn tail_c0(&self) -> f64 {
        self.inner.tail_c0()
    }

    fn partition_function(&self, beta: f64) -> PyResult<f64> {
        eq::partition_function(&self.inner, beta).py()
    }

    fn moment(&self, beta: f64, n: u32) -> PyResult<f64> {
        eq::moment(&self.inner, beta, n).py()
    }

    fn mean_demand(&self, beta: f64) -> PyResult<f64> {
        eq::mean_demand(&self.inner, beta).py()
    }

    fn variance(&self, beta: f64) -> PyResult<f64> {
        eq::variance(&self.inner, beta).py()
    }

    fn invert_demand(&self, d: f64) -> PyResult<f64> {
        eq::invert_demand(&self.inner, d).py()
    }

    fn worker_pdf(&self, beta: f64, c: f64) -> PyResult<f64> {
        eq::worker_pdf(&self.inner, beta, c).py()
    }

    fn demand_small_beta(&self, beta: f64) -> PyResult<f64> {
        eq::demand_small_beta(&self.inner, beta).py()
    }

    fn worker_pdf_super(&self, weight: &PyWeight, c: f64) -> PyResult<f64> {
        superstat::worker_pdf_super(&self.inner, &weight.inner, c).py()
    }
}

/// Distribution of inverse temperatures for superstatistics.
#[pyclass(name = "BetaWeight", frozen)]
struct PyWeight {
    inner: superstat::BetaWeight,
}

#[pymethods]
impl PyWeight {
    #[staticmethod]
    fn point_mass(beta0: f64) -> PyResult<Self> {
        Ok(Self {
            inner: superstat::BetaWeight::point_mass(beta0).py()?,
        })
    }

    #[staticmethod]
    fn power_law(gamma: f64, beta_max: f64) -> PyResult<Self> {
        Ok(Self {
            inner: superstat::BetaWeight::power_law(gamma, beta_max).py()?,
        })
    }

    #[staticmethod]
    fn empirical(betas: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: superstat::BetaWeight::empirical(&betas).py()?,
        })
    }

    fn boltzmann(&self, c: f64) -> PyResult<f64> {
        superstat::generalized_boltzmann(&self.inner, c).py()
    }
}

#[pyclass(name = "FitResult", frozen, get_all)]
struct PyFit {
    params: PyGb2,
    log_likelihood: f64,
    n_used: usize,
    converged: bool,
    se_mu: f64,
}

/// GB2 maximum likelihood, optionally weighted and restricted to `window`.
#[pyfunction]
#[pyo3(signature = (samples, weights=None, window=None, starts=8))]
fn fit_gb2_mle(
    samples: Vec<f64>,
    weights: Option<Vec<f64>>,
    window: Option<(f64, f64)>,
    starts: usize,
) -> PyResult<PyFit> {
    let opts = FitOptions {
        starts,
        window,
        ..FitOptions::default()
    };
    let r = fit::fit_gb2_mle_with(&samples, weights.as_deref(), &opts).py()?;
    Ok(PyFit {
        params: PyGb2 { inner: r.params },
        log_likelihood: r.log_likelihood,
        n_used: r.n_used,
        converged: r.converged,
        se_mu: r.se_mu,
    })
}

#[pyfunction]
#[pyo3(signature = (samples, k=None))]
fn hill_estimator(samples: Vec<f64>, k: Option<usize>) -> PyResult<f64> {
    let k = k.unwrap_or_else(|| fit::default_hill_k(samples.len()));
    fit::hill_estimator(&samples, k).py()
}

#[pyfunction]
fn predict_mu_w(mu_f: f64, delta: f64) -> PyResult<f64> {
    superstat::predict_mu_w(mu_f, delta).py()
}

/// Returns `(delta, consistent)`.
#[pyfunction]
fn infer_delta(mu_f: f64, mu_w: f64) -> PyResult<(f64, bool)> {
    let e = superstat::infer_delta(mu_f, mu_w).py()?;
    Ok((e.delta, e.consistent))
}

#[pyfunction]
fn gamma_from_delta(delta: f64, mu_f: f64) -> PyResult<f64> {
    superstat::gamma_from_delta(delta, mu_f).py()
}

/// Synthetic panel written as CSV to `path`; returns the number of records.
#[pyfunction]
#[pyo3(signature = (path, params, firms=10_000, workers=1_000_000, delta=0.5, periods=200, seed=1, sectors=20, year=2000))]
#[allow(clippy::too_many_arguments)]
fn synth_csv(
    path: &str,
    params: PyGb2,
    firms: usize,
    workers: u64,
    delta: f64,
    periods: usize,
    seed: u64,
    sectors: usize,
    year: i32,
) -> PyResult<usize> {
    let config = SynthConfig {
        firms,
        workers,
        firm_params: params.inner,
        delta,
        periods,
        seed,
        sectors,
        year,
        ..SynthConfig::default()
    };
    let panel = pipeline::synth_generate(&config).py()?;
    pipeline::write_csv(&panel.records, path).py()?;
    Ok(panel.records.len())
}

/// Per-year report of a CSV file, as the key-value text or as JSON.
#[pyfunction]
#[pyo3(signature = (path, cut="top10", worker_tail=None, json=false))]
fn analyze_csv(path: &str, cut: &str, worker_tail: Option<f64>, json: bool) -> PyResult<String> {
    let records = pipeline::ingest_csv(path).py()?.records;
    let opts = AnalysisOptions {
        cut: CutPolicy::parse(cut).py()?,
        worker_tail,
        ..AnalysisOptions::default()
    };
    let a = pipeline::analyze(&records, &opts);
    if json {
        pipeline::render_json(&a).py()
    } else {
        Ok(pipeline::render_text(&a))
    }
}

/// Rank-size points `(c, P>)` of a sample, largest first.
#[pyfunction]
#[pyo3(signature = (values, weights=None))]
fn rank_size(values: Vec<f64>, weights: Option<Vec<f64>>) -> PyResult<Vec<(f64, f64)>> {
    pipeline::rank_size(&values, weights.as_deref()).py()
}

#[pymodule]
fn pyprodstat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGb2>()?;
    m.add_class::<PyFirm>()?;
    m.add_class::<PyWeight>()?;
    m.add_class::<PyFit>()?;
    m.add_function(wrap_pyfunction!(fit_gb2_mle, m)?)?;
    m.add_function(wrap_pyfunction!(hill_estimator, m)?)?;
    m.add_function(wrap_pyfunction!(predict_mu_w, m)?)?;
    m.add_function(wrap_pyfunction!(infer_delta, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_from_delta, m)?)?;
    m.add_function(wrap_pyfunction!(synth_csv, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_csv, m)?)?;
    m.add_function(wrap_pyfunction!(rank_size, m)?)?;
    Ok(())
}
