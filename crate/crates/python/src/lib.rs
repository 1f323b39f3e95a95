//! Python bindings for the gearsynth library.
//!
//! Rationals cross the boundary as `fractions.Fraction`; rational inputs
//! accept `int`, `Fraction`, `str` ("79.4", "41/2") or `float` (read via
//! its shortest decimal form).

use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use gearsynth::rational::rational_from_f64;
use gearsynth::{
    motor_side_speed, peak_output_torque, pitch_diameters, reflected_inertia, specfile, Error, Rational, Residual,
    SolutionSet, SweepParam,
};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::DegenerateRatio(_) => PyZeroDivisionError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn extract_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(i) = obj.extract::<i128>() {
        return Ok(Rational::from_integer(i));
    }
    if let Ok(s) = obj.extract::<String>() {
        return gearsynth::parse_rational(&s).map_err(PyValueError::new_err);
    }
    if obj.hasattr("numerator")? && obj.hasattr("denominator")? && !obj.is_instance_of::<pyo3::types::PyFloat>() {
        let num: i128 = obj.getattr("numerator")?.extract()?;
        let den: i128 = obj.getattr("denominator")?.extract()?;
        if den == 0 {
            return Err(PyZeroDivisionError::new_err("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Ok(x) = obj.extract::<f64>() {
        return rational_from_f64(x).map_err(to_py_err);
    }
    Err(PyValueError::new_err("expected int, float, str or Fraction"))
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((*r.numer(), *r.denom()))
}

/// Five tooth counts, planet count, module and rotor bore of one gearbox.
#[pyclass(name = "GearboxDesign", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGearboxDesign {
    inner: gearsynth::GearboxDesign,
}

#[pymethods]
impl PyGearboxDesign {
    #[new]
    #[pyo3(signature = (z_sun, z_planet_in, z_planet_out, z_ring_fixed, z_ring_out, n_planets=4, module_mm=None, rotor_bore_mm=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        z_sun: u32,
        z_planet_in: u32,
        z_planet_out: u32,
        z_ring_fixed: u32,
        z_ring_out: u32,
        n_planets: u32,
        module_mm: Option<&Bound<'_, PyAny>>,
        rotor_bore_mm: Option<&Bound<'_, PyAny>>,
    ) -> PyResult<Self> {
        let module = module_mm
            .map(extract_rational)
            .transpose()?
            .unwrap_or(Rational::new(3, 5));
        let bore = rotor_bore_mm
            .map(extract_rational)
            .transpose()?
            .unwrap_or(Rational::new(397, 5));
        let teeth = gearsynth::ToothCounts::new(z_sun, z_planet_in, z_planet_out, z_ring_fixed, z_ring_out);
        let inner = gearsynth::GearboxDesign::new(teeth, n_planets, module, bore).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Design with ring counts derived from the sun and planet counts.
    #[staticmethod]
    #[pyo3(signature = (z_sun, z_planet_in, z_planet_out, n_planets=4, module_mm=None, rotor_bore_mm=None))]
    fn from_free(
        z_sun: u32,
        z_planet_in: u32,
        z_planet_out: u32,
        n_planets: u32,
        module_mm: Option<&Bound<'_, PyAny>>,
        rotor_bore_mm: Option<&Bound<'_, PyAny>>,
    ) -> PyResult<Self> {
        let (zf, zo) = gearsynth::derive_rings(z_sun, z_planet_in, z_planet_out);
        Self::new(
            z_sun,
            z_planet_in,
            z_planet_out,
            zf,
            zo,
            n_planets,
            module_mm,
            rotor_bore_mm,
        )
    }

    #[getter]
    fn teeth(&self) -> (u32, u32, u32, u32, u32) {
        let [a, b, c, d, e] = self.inner.teeth().as_array();
        (a, b, c, d, e)
    }

    #[getter]
    fn n_planets(&self) -> u32 {
        self.inner.n_planets()
    }

    #[getter]
    fn module_mm<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.module_mm())
    }

    #[getter]
    fn rotor_bore_mm<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.rotor_bore_mm())
    }

    fn gear_ratio<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let g = gearsynth::gear_ratio(&self.inner).map_err(to_py_err)?;
        fraction(py, &g)
    }

    fn carrier_clearance(&self) -> f64 {
        gearsynth::carrier_clearance(&self.inner)
    }

    fn pitch_diameters(&self) -> [f64; 5] {
        pitch_diameters(&self.inner)
    }

    fn __repr__(&self) -> String {
        let [a, b, c, d, e] = self.inner.teeth().as_array();
        format!(
            "GearboxDesign({a}, {b}, {c}, {d}, {e}, n_planets={}, module_mm='{}', rotor_bore_mm='{}')",
            self.inner.n_planets(),
            self.inner.module_mm(),
            self.inner.rotor_bore_mm()
        )
    }
}

/// Synthesis problem definition; optional fields default as in spec files.
#[pyclass(name = "SynthesisSpec", skip_from_py_object)]
#[derive(Clone)]
struct PySynthesisSpec {
    inner: gearsynth::SynthesisSpec,
}

#[pymethods]
impl PySynthesisSpec {
    #[new]
    #[pyo3(signature = (target_ratio, rotor_bore_mm, module_mm, n_planets=4, min_teeth=(17, 17, 17), alpha_min_rad=0.1, ratio_tolerance=None, top_k=10))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        target_ratio: &Bound<'_, PyAny>,
        rotor_bore_mm: &Bound<'_, PyAny>,
        module_mm: &Bound<'_, PyAny>,
        n_planets: u32,
        min_teeth: (u32, u32, u32),
        alpha_min_rad: f64,
        ratio_tolerance: Option<&Bound<'_, PyAny>>,
        top_k: usize,
    ) -> PyResult<Self> {
        let mut inner = gearsynth::SynthesisSpec::new(
            extract_rational(target_ratio)?,
            extract_rational(rotor_bore_mm)?,
            extract_rational(module_mm)?,
        )
        .with_n_planets(n_planets)
        .with_min_teeth(min_teeth.0, min_teeth.1, min_teeth.2)
        .with_alpha_min_rad(alpha_min_rad)
        .with_top_k(top_k);
        if let Some(tol) = ratio_tolerance {
            inner = inner.with_ratio_tolerance(extract_rational(tol)?);
        }
        inner.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// The D151 knee gearbox instance.
    #[staticmethod]
    fn d151() -> Self {
        Self {
            inner: gearsynth::SynthesisSpec::d151(),
        }
    }

    /// Parses the `key = value` spec-file format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = specfile::parse_spec(text).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn target_ratio<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.target_ratio)
    }

    #[getter]
    fn n_planets(&self) -> u32 {
        self.inner.n_planets
    }

    #[getter]
    fn top_k(&self) -> usize {
        self.inner.top_k
    }

    #[setter]
    fn set_top_k(&mut self, k: usize) -> PyResult<()> {
        if k == 0 {
            return Err(PyValueError::new_err("top_k must be at least 1"));
        }
        self.inner.top_k = k;
        Ok(())
    }

    /// floor(rotor_bore_mm / module_mm).
    fn ring_cap(&self) -> i128 {
        self.inner.ring_cap()
    }

    fn cost(&self, design: &PyGearboxDesign) -> f64 {
        gearsynth::cost(&design.inner, &self.inner)
    }
}

fn residual_to_py<'py>(py: Python<'py>, r: &Residual) -> PyResult<Bound<'py, PyAny>> {
    Ok(match r {
        Residual::Integer(v) => v.into_pyobject(py)?.into_any(),
        Residual::Rational(q) => fraction(py, q)?,
        Residual::Real(x) => x.into_pyobject(py)?.into_any(),
        Residual::DegenerateDenominator => "degenerate-denominator".into_pyobject(py)?.into_any(),
    })
}

/// Validates a design: returns `(feasible, [(constraint, satisfied, residual), ...])`.
#[pyfunction]
fn validate<'py>(
    py: Python<'py>,
    design: &PyGearboxDesign,
    spec: &PySynthesisSpec,
) -> PyResult<(bool, Bound<'py, PyList>)> {
    let report = gearsynth::validate(&design.inner, &spec.inner);
    let entries = PyList::empty(py);
    for e in report.entries() {
        entries.append((e.id.name(), e.satisfied, residual_to_py(py, &e.residual)?))?;
    }
    Ok((report.overall_feasible(), entries))
}

fn solution_set_to_py<'py>(py: Python<'py>, set: &SolutionSet) -> PyResult<Bound<'py, PyDict>> {
    let solutions = PyList::empty(py);
    for s in &set.solutions {
        let d = PyDict::new(py);
        d.set_item("design", PyGearboxDesign { inner: s.design })?;
        d.set_item("teeth", s.design.teeth().as_array())?;
        d.set_item("cost", s.cost)?;
        d.set_item("ratio", fraction(py, &s.ratio)?)?;
        d.set_item("clearance_rad", s.clearance_rad)?;
        solutions.append(d)?;
    }
    let prune = PyDict::new(py);
    for (id, n) in set.prune_counts.iter() {
        prune.set_item(id.name(), n)?;
    }
    let out = PyDict::new(py);
    out.set_item("solutions", solutions)?;
    out.set_item("feasible_count", set.feasible_count)?;
    out.set_item("candidates_examined", set.candidates_examined)?;
    out.set_item("prune_counts", prune)?;
    Ok(out)
}

/// Ranked feasible designs; the result does not depend on `workers`.
#[pyfunction]
#[pyo3(signature = (spec, workers=None))]
fn synthesize<'py>(py: Python<'py>, spec: &PySynthesisSpec, workers: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
    let workers = workers.unwrap_or_else(gearsynth::synthesizer::default_workers).max(1);
    let spec_inner = spec.inner.clone();
    let set = py
        .detach(move || gearsynth::synthesize_with_workers(&spec_inner, workers))
        .map_err(to_py_err)?;
    solution_set_to_py(py, &set)
}

/// Unpruned brute-force reference search.
#[pyfunction]
fn oracle_synthesize<'py>(py: Python<'py>, spec: &PySynthesisSpec) -> PyResult<Bound<'py, PyDict>> {
    let spec_inner = spec.inner.clone();
    let set = py
        .detach(move || gearsynth::oracle_synthesize(&spec_inner))
        .map_err(to_py_err)?;
    solution_set_to_py(py, &set)
}

/// One row per value: `(value, result_dict_or_None, error_or_None)`.
#[pyfunction]
#[pyo3(signature = (spec, param, values, workers=1))]
fn sweep<'py>(
    py: Python<'py>,
    spec: &PySynthesisSpec,
    param: &str,
    values: Vec<String>,
    workers: usize,
) -> PyResult<Bound<'py, PyList>> {
    let param: SweepParam = param.parse().map_err(to_py_err)?;
    let rows = gearsynth::sweep(&spec.inner, param, &values, workers.max(1)).map_err(to_py_err)?;
    let out = PyList::empty(py);
    for row in rows {
        match &row.outcome {
            Ok(set) => out.append((row.value.clone(), Some(solution_set_to_py(py, set)?), None::<String>))?,
            Err(e) => out.append((row.value.clone(), None::<Bound<'_, PyDict>>, Some(e.to_string())))?,
        }
    }
    Ok(out)
}

#[pyfunction]
fn derive_rings(z_sun: u32, z_planet_in: u32, z_planet_out: u32) -> (u32, u32) {
    gearsynth::derive_rings(z_sun, z_planet_in, z_planet_out)
}

/// Motor constants and reduction of one actuator.
#[pyclass(name = "ActuatorSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyActuatorSpec {
    inner: gearsynth::ActuatorSpec,
}

#[pymethods]
impl PyActuatorSpec {
    #[new]
    #[allow(clippy::too_many_arguments)]
    fn new(
        name: String,
        torque_constant_nm_per_a: f64,
        peak_current_a: f64,
        gear_ratio: f64,
        peak_output_speed_rad_s: f64,
        bus_voltage_v: f64,
        rotor_inertia_kg_m2: f64,
        mass_kg: f64,
    ) -> PyResult<Self> {
        let inner = gearsynth::ActuatorSpec::new(
            name,
            torque_constant_nm_per_a,
            peak_current_a,
            gear_ratio,
            peak_output_speed_rad_s,
            bus_voltage_v,
            rotor_inertia_kg_m2,
            mass_kg,
        )
        .map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// The bundled D151 and D110A fixtures.
    #[staticmethod]
    fn bundled() -> PyResult<Vec<Self>> {
        let specs = specfile::parse_actuators(specfile::BUNDLED_ACTUATORS).map_err(to_py_err)?;
        Ok(specs.into_iter().map(|inner| Self { inner }).collect())
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn peak_output_torque(&self) -> f64 {
        peak_output_torque(&self.inner)
    }

    fn motor_side_speed(&self) -> f64 {
        motor_side_speed(&self.inner)
    }

    fn reflected_inertia(&self) -> f64 {
        reflected_inertia(&self.inner)
    }
}

#[pymodule]
#[pyo3(name = "gearsynth")]
fn gearsynth_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGearboxDesign>()?;
    m.add_class::<PySynthesisSpec>()?;
    m.add_class::<PyActuatorSpec>()?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(derive_rings, m)?)?;
    Ok(())
}
