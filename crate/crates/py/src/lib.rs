//! Python module `pyfbcyclic`.

use num_rational::Ratio;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fbcyclic::presentations as pres;
use fbcyclic::smallcancel::{self, fmt_ratio};
use fbcyclic::stallings;
use fbcyclic::verify;
use fbcyclic::{morse, Alphabet, Generator, WeightMap};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn stable_letter(c: char) -> PyResult<Generator> {
    Generator::new(c).map_err(err)
}

#[pyclass(name = "Word", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyWord(fbcyclic::Word);

#[pymethods]
impl PyWord {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        fbcyclic::Word::parse(text).map(PyWord).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Word('{}')", self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __mul__(&self, other: &PyWord) -> PyWord {
        PyWord(self.0.multiply(&other.0))
    }

    fn inverse(&self) -> PyWord {
        PyWord(self.0.inverse())
    }

    /// `y⁻¹ · self · y`.
    fn conjugate(&self, y: &PyWord) -> PyWord {
        PyWord(self.0.conjugate(&y.0))
    }

    fn pow(&self, n: i64) -> PyWord {
        PyWord(self.0.pow(n))
    }

    fn is_cyclically_reduced(&self) -> bool {
        self.0.is_cyclically_reduced()
    }

    /// Canonical cyclic form over the given alphabet, e.g. "a b t".
    fn cyclic(&self, alphabet: &str) -> PyResult<String> {
        let a = Alphabet::parse(alphabet).map_err(err)?;
        a.check(&self.0).map_err(err)?;
        Ok(a.cyclic(&self.0).to_string())
    }
}

#[pyclass(name = "Presentation", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq)]
struct PyPresentation(pres::Presentation);

#[pymethods]
impl PyPresentation {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        pres::parse(text).map(|pf| PyPresentation(pf.presentation)).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Presentation({:?})", self.0.to_string().trim_end())
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.0.alphabet().generators().iter().map(|g| g.to_string()).collect()
    }

    #[getter]
    fn relators(&self) -> Vec<String> {
        self.0.relators().iter().map(|r| r.to_string()).collect()
    }

    fn euler_characteristic(&self) -> i64 {
        self.0.euler_characteristic()
    }

    /// `(free_rank, torsion)`.
    fn abelianization(&self) -> (usize, Vec<u64>) {
        let ab = pres::abelianization(&self.0);
        (ab.free_rank, ab.torsion)
    }

    #[pyo3(signature = (stable = 't'))]
    fn one_relator_form(&self, stable: char) -> PyResult<PyPresentation> {
        pres::one_relator_form(&self.0, stable_letter(stable)?).map(PyPresentation).map_err(err)
    }

    /// Every state of the replay, starting with this presentation.
    fn replay_tietze(&self, script: &str) -> PyResult<Vec<PyPresentation>> {
        let s = pres::TietzeScript::parse(script).map_err(err)?;
        let states = pres::replay_tietze(&self.0, &s).map_err(err)?;
        Ok(states.into_iter().map(PyPresentation).collect())
    }

    /// Kernel rank certified by the Morse argument. `weights` defaults to
    /// every generator weight 1; a refusal raises `ValueError`.
    #[pyo3(signature = (weights = None))]
    fn kernel_rank(&self, weights: Option<&str>) -> PyResult<u64> {
        let w = match weights {
            Some(text) => WeightMap::parse(self.0.alphabet(), text).map_err(err)?,
            None => WeightMap::uniform(self.0.alphabet(), 1),
        };
        morse::kernel_rank(&self.0, &w).map(|c| c.rank).map_err(err)
    }

    /// Piece analysis and `C'(num/den)`.
    #[pyo3(signature = (num = 1, den = 7, brute_force = false))]
    fn check_metric<'py>(&self, py: Python<'py>, num: i64, den: i64, brute_force: bool) -> PyResult<Bound<'py, PyDict>> {
        if den == 0 {
            return Err(PyValueError::new_err("zero denominator"));
        }
        let m = smallcancel::check_metric(self.0.alphabet(), self.0.relators(), Ratio::new(num, den), brute_force)
            .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("max_piece", m.pieces.max_piece_length)?;
        d.set_item("elements", m.pieces.element_count)?;
        d.set_item("thresholds", m.thresholds.iter().map(fmt_ratio).collect::<Vec<_>>())?;
        d.set_item("holds", m.holds)?;
        if let Some(w) = &m.pieces.witness {
            d.set_item("witness", (w.piece.to_string(), (w.first.element, w.first.offset), (w.second.element, w.second.offset)))?;
        }
        Ok(d)
    }
}

#[pyclass(name = "SubgroupGraph", frozen)]
struct PySubgroupGraph(stallings::SubgroupGraph);

#[pymethods]
impl PySubgroupGraph {
    #[new]
    #[pyo3(signature = (generators, alphabet = "a b"))]
    fn new(generators: Vec<String>, alphabet: &str) -> PyResult<Self> {
        let a = Alphabet::parse(alphabet).map_err(err)?;
        let ws = generators.iter().map(|g| fbcyclic::Word::parse(g)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        stallings::SubgroupGraph::from_generators(&ws, &a).map(PySubgroupGraph).map_err(err)
    }

    fn contains(&self, w: &str) -> PyResult<bool> {
        self.0.contains(&fbcyclic::Word::parse(w).map_err(err)?).map_err(err)
    }

    fn rank(&self) -> PyResult<usize> {
        self.0.rank().map_err(err)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    fn edges(&self) -> Vec<(usize, String, usize)> {
        self.0.edges().iter().map(|e| (e.from, e.label.to_string(), e.to)).collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

#[pyfunction]
fn make_prop1() -> PyPresentation {
    PyPresentation(pres::make_prop1())
}

#[pyfunction]
fn make_prop2_target() -> PyPresentation {
    PyPresentation(pres::make_prop2_target())
}

#[pyfunction]
fn make_gs(s: i64) -> PyResult<PyPresentation> {
    if s < 3 {
        return Err(PyValueError::new_err(format!("s = {s} is below 3")));
    }
    pres::make_gs(s).map(PyPresentation).map_err(err)
}

/// Image rank, injectivity, properness and the missing generator of an
/// endomorphism given as "a=b;b=abA".
#[pyfunction]
fn analyze_endomorphism<'py>(py: Python<'py>, endo: &str) -> PyResult<Bound<'py, PyDict>> {
    let e = pres::FreeEndo::parse(endo).map_err(err)?;
    let r = stallings::analyze_endomorphism(&e).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("image_rank", r.image_rank)?;
    d.set_item("injective", r.injective)?;
    d.set_item("proper", r.proper)?;
    d.set_item("missing_generator", r.missing_generator.map(|w| w.to_string()))?;
    Ok(d)
}

/// `(stable_rank, dilation, classification)` of the direct limit of the
/// abelianized endomorphism.
#[pyfunction]
fn direct_limit(endo: &str) -> PyResult<(usize, u64, String)> {
    let e = pres::FreeEndo::parse(endo).map_err(err)?;
    let d = pres::direct_limit(&pres::abelianized_endo(&e)).map_err(PyValueError::new_err)?;
    Ok((d.stable_rank, d.dilation, d.classification))
}

/// `(lhs, rhs, satisfied)` as exact rationals rendered "p/q".
#[pyfunction]
fn gs_bound_check(s: i64) -> PyResult<(String, String, bool)> {
    let b = smallcancel::gs_bound_check(s).map_err(err)?;
    Ok((fmt_ratio(&b.lhs), fmt_ratio(&b.rhs), b.satisfied))
}

/// Runs a verification ("prop1".."prop4" or "report") and returns
/// `(rendered, exit_status)`.
#[pyfunction]
#[pyo3(signature = (which, s = 9, require_hyperbolic = false, structured = true))]
fn run_verification(which: &str, s: i64, require_hyperbolic: bool, structured: bool) -> PyResult<(String, i32)> {
    let rep = match which {
        "prop1" => verify::cmd_verify_prop1(&Default::default()),
        "prop2" => verify::cmd_verify_prop2(&Default::default()),
        "prop3" => verify::cmd_verify_prop3(&verify::Prop3Options { s, require_hyperbolic, brute_force: false })
            .map_err(PyValueError::new_err)?,
        "prop4" => verify::cmd_verify_prop4(&verify::Prop4Options { s, ..Default::default() })
            .map_err(PyValueError::new_err)?,
        "report" => verify::cmd_report(s).map_err(PyValueError::new_err)?,
        other => return Err(PyValueError::new_err(format!("unknown verification `{other}`"))),
    };
    let text = if structured { rep.render_structured() } else { rep.render_text() };
    Ok((text, rep.exit_status()))
}

#[pymodule]
fn pyfbcyclic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWord>()?;
    m.add_class::<PyPresentation>()?;
    m.add_class::<PySubgroupGraph>()?;
    m.add_function(wrap_pyfunction!(make_prop1, m)?)?;
    m.add_function(wrap_pyfunction!(make_prop2_target, m)?)?;
    m.add_function(wrap_pyfunction!(make_gs, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_endomorphism, m)?)?;
    m.add_function(wrap_pyfunction!(direct_limit, m)?)?;
    m.add_function(wrap_pyfunction!(gs_bound_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    Ok(())
}
