//! Python bindings: `solve`, `cegis`, `random_examples`, `evaluate` and
//! `size`, with programs passed as s-expression strings.

use std::time::{Duration, Instant};

use polygen_core::oracle::LoopOutcome;
use polygen_core::solver::by_name;
use polygen_core::text::{parse_program, serialize_program};
use polygen_core::{
    cegis_loop, program_size, random_loop, Example, GrammarParams, OracleConfig, PbeSolver, PbeTask, Program,
    ProgramSize,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(polygen, SynthesisError, PyRuntimeError, "No program was found within the limits.");

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn grammar(num_vars: usize, const_min: i64, const_max: i64) -> PyResult<GrammarParams> {
    GrammarParams::new(num_vars, const_min, const_max).map_err(value_err)
}

fn solver(name: &str) -> PyResult<Box<dyn PbeSolver>> {
    by_name(name).ok_or_else(|| PyValueError::new_err(format!("unknown solver `{name}`")))
}

fn duration(secs: Option<f64>) -> PyResult<Option<Duration>> {
    secs.map(|s| Duration::try_from_secs_f64(s).map_err(|_| PyValueError::new_err(format!("invalid time cap {s}"))))
        .transpose()
}

fn program(src: &str) -> PyResult<Program> {
    parse_program(src).map_err(value_err)
}

/// Synthesizes a program consistent with `examples`, a list of
/// `(inputs, output)` pairs, and returns it as text.
#[pyfunction]
#[pyo3(signature = (examples, const_min=-1, const_max=1, num_vars=None, solver="polygen", seed=0, time_cap=None))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    examples: Vec<(Vec<i64>, i64)>,
    const_min: i64,
    const_max: i64,
    num_vars: Option<usize>,
    solver: &str,
    seed: u64,
    time_cap: Option<f64>,
) -> PyResult<String> {
    let n = match (num_vars, examples.first()) {
        (Some(n), _) => n,
        (None, Some((i, _))) => i.len(),
        (None, None) => return Err(PyValueError::new_err("num_vars is required without examples")),
    };
    let g = grammar(n, const_min, const_max)?;
    let task = PbeTask::new(g, examples.into_iter().map(|(i, o)| Example::new(i, o))).map_err(value_err)?;
    let s = self::solver(solver)?;
    let deadline = duration(time_cap)?.map(|d| Instant::now() + d);
    let p = py.detach(|| s.solve(&task, seed, deadline)).map_err(|e| SynthesisError::new_err(e.to_string()))?;
    Ok(serialize_program(&p))
}

#[pyfunction]
fn evaluate(program: &str, inputs: Vec<i64>) -> PyResult<i64> {
    self::program(program)?.eval(&inputs).map_err(value_err)
}

/// Size in bits under the grammar with the given variables and constants.
#[pyfunction]
fn size(program: &str, num_vars: usize, const_min: i64, const_max: i64) -> PyResult<u64> {
    program_size(&self::program(program)?, &grammar(num_vars, const_min, const_max)?).map_err(value_err)
}

/// The outcome of one oracle loop.
#[pyclass(frozen, get_all)]
struct Report {
    solver: String,
    model: String,
    seed: u64,
    examples_used: usize,
    wall_time: f64,
    program_size: u64,
    success: bool,
    error: Option<String>,
    program: Option<String>,
    examples: Vec<(Vec<i64>, i64)>,
}

#[pymethods]
impl Report {
    fn __repr__(&self) -> String {
        format!(
            "Report(solver={:?}, model={:?}, seed={}, success={}, examples_used={}, program={:?})",
            self.solver, self.model, self.seed, self.success, self.examples_used, self.program
        )
    }
}

impl From<LoopOutcome> for Report {
    fn from(o: LoopOutcome) -> Self {
        let r = o.report;
        Report {
            solver: r.solver,
            model: r.model.name().to_string(),
            seed: r.seed,
            examples_used: r.examples_used,
            wall_time: r.wall_time,
            program_size: r.program_size,
            success: r.success,
            error: r.error,
            program: o.program.as_ref().map(serialize_program),
            examples: o.examples.into_iter().map(|e| (e.input, e.output)).collect(),
        }
    }
}

type LoopFn = fn(&dyn PbeSolver, &Program, &GrammarParams, &OracleConfig) -> LoopOutcome;

#[allow(clippy::too_many_arguments)]
fn run_loop(
    py: Python<'_>,
    run: LoopFn,
    truth: &str,
    num_vars: usize,
    const_min: i64,
    const_max: i64,
    solver: &str,
    seed: u64,
    example_cap: Option<usize>,
    time_cap: Option<f64>,
) -> PyResult<Report> {
    let g = grammar(num_vars, const_min, const_max)?;
    let truth = program(truth)?;
    truth.check_range(&g).map_err(value_err)?;
    let s = self::solver(solver)?;
    let mut cfg = OracleConfig { rng_seed: seed, ..OracleConfig::default() };
    if let Some(n) = example_cap {
        cfg.example_cap = n;
    }
    if let Some(d) = duration(time_cap)? {
        cfg.time_cap = d;
    }
    Ok(py.detach(|| run(s.as_ref(), &truth, &g, &cfg)).into())
}

/// Counterexample-guided loop against the target program `truth`.
#[pyfunction]
#[pyo3(signature = (truth, num_vars, const_min, const_max, solver="polygen", seed=0, example_cap=None, time_cap=None))]
#[allow(clippy::too_many_arguments)]
fn cegis(
    py: Python<'_>,
    truth: &str,
    num_vars: usize,
    const_min: i64,
    const_max: i64,
    solver: &str,
    seed: u64,
    example_cap: Option<usize>,
    time_cap: Option<f64>,
) -> PyResult<Report> {
    run_loop(py, cegis_loop, truth, num_vars, const_min, const_max, solver, seed, example_cap, time_cap)
}

/// Loop that adds one uniformly random example per failed round.
#[pyfunction]
#[pyo3(signature = (truth, num_vars, const_min, const_max, solver="polygen", seed=0, example_cap=None, time_cap=None))]
#[allow(clippy::too_many_arguments)]
fn random_examples(
    py: Python<'_>,
    truth: &str,
    num_vars: usize,
    const_min: i64,
    const_max: i64,
    solver: &str,
    seed: u64,
    example_cap: Option<usize>,
    time_cap: Option<f64>,
) -> PyResult<Report> {
    run_loop(py, random_loop, truth, num_vars, const_min, const_max, solver, seed, example_cap, time_cap)
}

#[pymodule]
fn polygen(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(size, m)?)?;
    m.add_function(wrap_pyfunction!(cegis, m)?)?;
    m.add_function(wrap_pyfunction!(random_examples, m)?)?;
    m.add_class::<Report>()?;
    m.add("SynthesisError", m.py().get_type::<SynthesisError>())?;
    Ok(())
}
