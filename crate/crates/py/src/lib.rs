//! Python bindings: the main types and operations of the chaos-degree
//! library as a `chaosdeg` extension module.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use chaosdeg_core::circlemap;
use chaosdeg_core::dynamics::{builtin_map, iterate_map, InitialEnsemble, Orbit};
use chaosdeg_core::infodyn::{self, ObservationSpec};
use chaosdeg_core::lyapunov::{lyapunov_1d, lyapunov_md};
use chaosdeg_core::partition::EmpiricalModel;
use chaosdeg_core::quantum;
use chaosdeg_core::sweep::{run_sweep, SweepConfig};

fn err(e: chaosdeg_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn observation(
    cells: Vec<usize>,
    tau: Option<usize>,
    project: Option<Vec<usize>>,
    auto_box: bool,
) -> ObservationSpec {
    let mut obs = ObservationSpec::new();
    if let Some(t) = tau {
        obs = obs.then_time_scale(t);
    }
    if let Some(axes) = project {
        obs = obs.then_project(axes);
    }
    if auto_box {
        obs.then_stage(infodyn::ObsStage::Partition {
            cells_per_axis: cells,
            source: infodyn::BoxSource::Auto,
        })
    } else {
        obs.then_partition(cells)
    }
}

/// Result of a chaos-degree evaluation.
#[pyclass(name = "EcdResult", frozen)]
struct PyEcdResult {
    /// Chaos degree in nats.
    #[pyo3(get)]
    d: f64,
    #[pyo3(get)]
    s_out: f64,
    #[pyo3(get)]
    mutual: f64,
    #[pyo3(get)]
    classification: String,
    #[pyo3(get)]
    observation: String,
    #[pyo3(get)]
    sample_size: u64,
}

#[pymethods]
impl PyEcdResult {
    fn __repr__(&self) -> String {
        format!(
            "EcdResult(d={}, s_out={}, mutual={}, classification='{}')",
            self.d, self.s_out, self.mutual, self.classification
        )
    }
}

fn wrap_result(r: infodyn::EcdResult, epsilon: f64) -> PyEcdResult {
    PyEcdResult {
        d: r.value,
        s_out: r.s_out,
        mutual: r.mutual,
        classification: infodyn::classify(r.value, epsilon).to_string(),
        observation: r.observation,
        sample_size: r.sample_size,
    }
}

/// Iterate a built-in map and return the orbit points.
#[pyfunction]
#[pyo3(signature = (map, params, x0=None, skip=0, n=100))]
fn iterate(
    map: &str,
    params: Vec<f64>,
    x0: Option<Vec<f64>>,
    skip: usize,
    n: usize,
) -> PyResult<Vec<Vec<f64>>> {
    let system = builtin_map(map, &params).map_err(err)?;
    let x0 = x0.unwrap_or_else(|| system.default_x0().to_vec());
    let orbit = iterate_map(&system, &x0, skip, n).map_err(err)?;
    Ok(orbit.points().map(|p| p.to_vec()).collect())
}

/// Chaos degree of a built-in map under an equi-partition observation.
#[pyfunction]
#[pyo3(signature = (map, params, cells, skip=1000, n=100_000, x0=None, tau=None,
                    project=None, auto_box=false, epsilon=1e-6))]
#[allow(clippy::too_many_arguments)]
fn ecd(
    map: &str,
    params: Vec<f64>,
    cells: Vec<usize>,
    skip: usize,
    n: usize,
    x0: Option<Vec<f64>>,
    tau: Option<usize>,
    project: Option<Vec<usize>>,
    auto_box: bool,
    epsilon: f64,
) -> PyResult<PyEcdResult> {
    let system = builtin_map(map, &params).map_err(err)?;
    let x0 = x0.unwrap_or_else(|| system.default_x0().to_vec());
    let obs = observation(cells, tau, project, auto_box);
    let r = infodyn::ecd_of_system(&system, &InitialEnsemble::point(&x0), &obs, skip, n)
        .map_err(err)?;
    Ok(wrap_result(r, epsilon))
}

/// Chaos degree of a scalar series (auto-boxed partition).
#[pyfunction]
#[pyo3(signature = (series, cells, tau=None, epsilon=1e-6))]
fn ecd_of_series(
    series: Vec<f64>,
    cells: usize,
    tau: Option<usize>,
    epsilon: f64,
) -> PyResult<PyEcdResult> {
    let orbit = Orbit::from_series(&series).map_err(err)?;
    let obs = observation(vec![cells], tau, None, true);
    let domain = orbit.bounding_box().map_err(err)?;
    let r = infodyn::ecd_of_orbit(&orbit, &domain, &obs).map_err(err)?;
    Ok(wrap_result(r, epsilon))
}

/// Chaos degree of an explicit sparse joint distribution `[(i, j, mass)]`.
#[pyfunction]
#[pyo3(signature = (joint, n_cells, epsilon=1e-6))]
fn ecd_of_joint(
    joint: Vec<(u32, u32, f64)>,
    n_cells: usize,
    epsilon: f64,
) -> PyResult<PyEcdResult> {
    let model = EmpiricalModel::from_joint_mass(joint, n_cells).map_err(err)?;
    let r = infodyn::ecd_from_model(&model).map_err(err)?;
    Ok(wrap_result(r, epsilon))
}

/// Infimum of the chaos degree over a family of cell counts.
#[pyfunction]
#[pyo3(signature = (map, params, family_cells, skip=1000, n=100_000, x0=None, epsilon=1e-6))]
#[allow(clippy::too_many_arguments)]
fn total_ecd(
    map: &str,
    params: Vec<f64>,
    family_cells: Vec<usize>,
    skip: usize,
    n: usize,
    x0: Option<Vec<f64>>,
    epsilon: f64,
) -> PyResult<(usize, PyEcdResult)> {
    let system = builtin_map(map, &params).map_err(err)?;
    let x0 = x0.unwrap_or_else(|| system.default_x0().to_vec());
    let family: Vec<ObservationSpec> = family_cells
        .into_iter()
        .map(|l| ObservationSpec::partition(vec![l]))
        .collect();
    let (idx, r) =
        infodyn::total_ecd(&system, &InitialEnsemble::point(&x0), &family, skip, n)
            .map_err(err)?;
    Ok((idx, wrap_result(r, epsilon)))
}

/// Lyapunov estimate.
#[pyclass(name = "LyapunovResult", frozen)]
struct PyLyapunovResult {
    #[pyo3(get)]
    lambda_top: f64,
    #[pyo3(get)]
    spectrum: Option<Vec<f64>>,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    n_used: usize,
    #[pyo3(get)]
    history: Vec<(usize, f64)>,
}

#[pymethods]
impl PyLyapunovResult {
    fn __repr__(&self) -> String {
        format!(
            "LyapunovResult(lambda_top={}, converged={})",
            self.lambda_top, self.converged
        )
    }
}

/// Lyapunov exponent of a built-in map (derivative average in 1-D, QR
/// accumulation otherwise).
#[pyfunction]
#[pyo3(signature = (map, params, x0=None, skip=1000, n=100_000, ortho_period=1))]
fn lyapunov(
    map: &str,
    params: Vec<f64>,
    x0: Option<Vec<f64>>,
    skip: usize,
    n: usize,
    ortho_period: usize,
) -> PyResult<PyLyapunovResult> {
    let system = builtin_map(map, &params).map_err(err)?;
    let x0 = x0.unwrap_or_else(|| system.default_x0().to_vec());
    let r = if system.dim() == 1 {
        lyapunov_1d(&system, x0[0], skip, n)
    } else {
        lyapunov_md(&system, &x0, skip, n, ortho_period)
    }
    .map_err(err)?;
    Ok(PyLyapunovResult {
        lambda_top: r.top_exponent,
        spectrum: r.spectrum,
        converged: r.converged,
        n_used: r.n_used,
        history: r.convergence_history,
    })
}

/// One sweep row.
#[pyclass(name = "SweepPoint", frozen)]
struct PySweepPoint {
    #[pyo3(get)]
    param: f64,
    #[pyo3(get)]
    d: f64,
    #[pyo3(get)]
    lambda_top: f64,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    warning: Option<String>,
}

/// Chaos degree + Lyapunov exponent over a parameter grid.
#[pyfunction]
#[pyo3(signature = (map, start, end, step, params=None, param_index=0, cells=None,
                    skip=1000, n=100_000, x0=None))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    map: &str,
    start: f64,
    end: f64,
    step: f64,
    params: Option<Vec<f64>>,
    param_index: usize,
    cells: Option<Vec<usize>>,
    skip: usize,
    n: usize,
    x0: Option<Vec<f64>>,
) -> PyResult<Vec<PySweepPoint>> {
    let base_params = match params {
        Some(p) => p,
        None => builtin_map(map, &[]).map_err(err)?.params().to_vec(),
    };
    let config = SweepConfig {
        map: map.to_string(),
        base_params,
        param_index,
        start,
        end,
        step,
        cells: cells.unwrap_or_else(|| vec![100]),
        skip,
        length: n,
        x0,
    };
    let rows = run_sweep(&config).map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| PySweepPoint {
            param: r.param,
            d: r.d,
            lambda_top: r.lambda,
            converged: r.converged,
            warning: r.warning,
        })
        .collect())
}

/// Continued-fraction expansion of a rotation number.
#[pyclass(name = "ContinuedFraction", frozen)]
struct PyContinuedFraction {
    #[pyo3(get)]
    coefficients: Vec<u64>,
    /// `(numerator, denominator)` pairs with denominators >= 2.
    #[pyo3(get)]
    convergents: Vec<(u64, u64)>,
    #[pyo3(get)]
    rational: bool,
    #[pyo3(get)]
    precision_exhausted: bool,
}

#[pyfunction]
#[pyo3(signature = (v, depth=12))]
fn continued_fraction(v: f64, depth: usize) -> PyResult<PyContinuedFraction> {
    let cf = circlemap::continued_fraction(v, depth).map_err(err)?;
    Ok(PyContinuedFraction {
        coefficients: cf.coefficients.clone(),
        convergents: cf
            .convergents
            .iter()
            .map(|c| (c.numerator, c.denominator))
            .collect(),
        rational: cf.is_rational(),
        precision_exhausted: cf.stop == circlemap::CfStop::Precision,
    })
}

/// Closed-form rotation-map chaos degree `h(l v - floor(l v))`.
#[pyfunction]
fn theoretical_dp(v: f64, l: u64) -> f64 {
    circlemap::theoretical_dp(v, l)
}

/// Binary entropy in nats.
#[pyfunction]
fn binary_entropy(s: f64) -> f64 {
    circlemap::binary_entropy(s)
}

/// One decay-table row.
#[pyclass(name = "DecayRow", frozen)]
struct PyDecayRow {
    #[pyo3(get)]
    j: usize,
    #[pyo3(get)]
    c: u64,
    #[pyo3(get)]
    d_empirical: f64,
    #[pyo3(get)]
    d_theoretical: f64,
    #[pyo3(get)]
    bound: f64,
}

/// Empirical + closed-form chaos degree at each convergent denominator.
#[pyfunction]
#[pyo3(signature = (v, rows=7, theta0=0.5, skip=1000, n=1_000_000))]
fn convergent_decay(
    v: f64,
    rows: usize,
    theta0: f64,
    skip: usize,
    n: usize,
) -> PyResult<Vec<PyDecayRow>> {
    let table = circlemap::convergent_decay(v, rows, theta0, skip, n).map_err(err)?;
    Ok(table
        .rows
        .into_iter()
        .map(|r| PyDecayRow {
            j: r.j,
            c: r.denominator,
            d_empirical: r.d_empirical,
            d_theoretical: r.d_theoretical,
            bound: r.bound,
        })
        .collect())
}

/// Shannon entropy in nats (`0 log 0 = 0`).
#[pyfunction]
fn shannon_entropy(p: Vec<f64>) -> f64 {
    infodyn::shannon_entropy(&p)
}

/// Mutual entropy of a sparse joint `[(i, j, mass)]` against its marginals.
#[pyfunction]
fn mutual_entropy(joint: Vec<(u32, u32, f64)>, p_in: Vec<f64>, p_out: Vec<f64>) -> PyResult<f64> {
    infodyn::mutual_entropy(&joint, &p_in, &p_out).map_err(err)
}

// ---------------------------------------------------------------------------
// quantum
// ---------------------------------------------------------------------------

fn to_cmatrix(rows: Vec<Vec<Complex64>>) -> PyResult<DMatrix<Complex64>> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(PyValueError::new_err("matrix must be square and nonempty"));
    }
    let mut m = DMatrix::zeros(d, d);
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = *z;
        }
    }
    Ok(m)
}

fn from_cmatrix(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// A density operator (Hermitian, PSD, unit trace).
#[pyclass(name = "DensityMatrix", frozen)]
struct PyDensityMatrix {
    inner: quantum::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(matrix: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(Self {
            inner: quantum::DensityMatrix::new(to_cmatrix(matrix)?).map_err(err)?,
        })
    }

    #[staticmethod]
    fn pure(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self {
            inner: quantum::DensityMatrix::pure(&amplitudes).map_err(err)?,
        })
    }

    #[staticmethod]
    fn diagonal(probs: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: quantum::DensityMatrix::from_diagonal(&probs).map_err(err)?,
        })
    }

    #[staticmethod]
    fn maximally_mixed(dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: quantum::DensityMatrix::maximally_mixed(dim).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        from_cmatrix(self.inner.matrix())
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues()
    }

    /// Von Neumann entropy in nats.
    fn entropy(&self) -> f64 {
        quantum::von_neumann_entropy(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={})", self.inner.dim())
    }
}

/// A CPTP map in Kraus form.
#[pyclass(name = "QuantumChannel", frozen)]
struct PyQuantumChannel {
    inner: quantum::QuantumChannel,
}

#[pymethods]
impl PyQuantumChannel {
    #[new]
    fn new(kraus: Vec<Vec<Vec<Complex64>>>) -> PyResult<Self> {
        let ops = kraus
            .into_iter()
            .map(to_cmatrix)
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            inner: quantum::QuantumChannel::new(ops).map_err(err)?,
        })
    }

    #[staticmethod]
    fn identity(dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: quantum::QuantumChannel::identity(dim).map_err(err)?,
        })
    }

    #[staticmethod]
    fn depolarizing_qubit(p: f64) -> PyResult<Self> {
        Ok(Self {
            inner: quantum::QuantumChannel::depolarizing_qubit(p).map_err(err)?,
        })
    }

    #[staticmethod]
    fn unitary(matrix: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(Self {
            inner: quantum::QuantumChannel::unitary(to_cmatrix(matrix)?).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, rho: &PyDensityMatrix) -> PyResult<PyDensityMatrix> {
        Ok(PyDensityMatrix {
            inner: self.inner.apply(&rho.inner).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "QuantumChannel(dim={}, kraus={})",
            self.inner.dim(),
            self.inner.kraus().len()
        )
    }
}

/// A projection-valued measure.
#[pyclass(name = "Pvm", frozen)]
struct PyPvm {
    inner: quantum::Pvm,
}

#[pymethods]
impl PyPvm {
    #[new]
    fn new(projectors: Vec<Vec<Vec<Complex64>>>) -> PyResult<Self> {
        let ps = projectors
            .into_iter()
            .map(to_cmatrix)
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            inner: quantum::Pvm::new(ps).map_err(err)?,
        })
    }

    #[staticmethod]
    fn computational(dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: quantum::Pvm::computational(dim).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }
}

/// Von Neumann entropy of a state, in nats.
#[pyfunction]
fn von_neumann_entropy(rho: &PyDensityMatrix) -> f64 {
    quantum::von_neumann_entropy(&rho.inner)
}

/// Quantum chaos degree over Schatten decompositions (random eigenspace
/// search on degenerate spectra).
#[pyfunction]
#[pyo3(signature = (rho, channel, trials=64, seed=None))]
fn quantum_ecd(
    rho: &PyDensityMatrix,
    channel: &PyQuantumChannel,
    trials: usize,
    seed: Option<u64>,
) -> PyResult<f64> {
    match seed {
        Some(s) => quantum::quantum_ecd_seeded(&rho.inner, &channel.inner, trials, s),
        None => quantum::quantum_ecd(&rho.inner, &channel.inner, trials),
    }
    .map_err(err)
}

/// Projective decoherence `rho -> sum P rho P`.
#[pyfunction]
fn pvm_expectation(rho: &PyDensityMatrix, pvm: &PyPvm) -> PyResult<PyDensityMatrix> {
    Ok(PyDensityMatrix {
        inner: quantum::pvm_expectation(&rho.inner, &pvm.inner).map_err(err)?,
    })
}

/// Schatten decomposition: `(weights, projectors, degenerate)`.
#[pyfunction]
#[pyo3(signature = (rho, degeneracy_tol=1e-10))]
fn schatten_decompose(
    rho: &PyDensityMatrix,
    degeneracy_tol: f64,
) -> (Vec<f64>, Vec<Vec<Vec<Complex64>>>, bool) {
    let d = quantum::schatten_decompose(&rho.inner, degeneracy_tol);
    let projectors = d.projectors.iter().map(from_cmatrix).collect();
    (d.weights, projectors, d.degenerate)
}

/// Observable expectation sequence `x_k = tr(rho_k X)` under channel
/// iteration; feed it to `ecd_of_series`.
#[pyfunction]
fn observable_orbit(
    rho: &PyDensityMatrix,
    channel: &PyQuantumChannel,
    observable: Vec<Vec<Complex64>>,
    n: usize,
) -> PyResult<Vec<f64>> {
    quantum::observable_orbit(&rho.inner, &channel.inner, &to_cmatrix(observable)?, n)
        .map_err(err)
}

#[pymodule]
fn chaosdeg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(iterate, m)?)?;
    m.add_function(wrap_pyfunction!(ecd, m)?)?;
    m.add_function(wrap_pyfunction!(ecd_of_series, m)?)?;
    m.add_function(wrap_pyfunction!(ecd_of_joint, m)?)?;
    m.add_function(wrap_pyfunction!(total_ecd, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(continued_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_dp, m)?)?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(convergent_decay, m)?)?;
    m.add_function(wrap_pyfunction!(shannon_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_ecd, m)?)?;
    m.add_function(wrap_pyfunction!(pvm_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(schatten_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(observable_orbit, m)?)?;
    m.add_class::<PyEcdResult>()?;
    m.add_class::<PyLyapunovResult>()?;
    m.add_class::<PySweepPoint>()?;
    m.add_class::<PyContinuedFraction>()?;
    m.add_class::<PyDecayRow>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyQuantumChannel>()?;
    m.add_class::<PyPvm>()?;
    Ok(())
}
