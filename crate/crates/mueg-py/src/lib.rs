//! Python bindings for a few entry points of `mueg`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use mueg::acceptance::{run_criterion as run_one, AcceptanceOptions};
use mueg::config::Config;
use mueg::fields::io::FieldData;
use mueg::kernels::{FermiKernel, ShiftedFermiKernel};
use mueg::tiling::{IndicatorSum, TetraDecomposition};
use mueg::ueg::{gauge_term_scan, DeltaPolicy, Domain};
use mueg::{Error, Point};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn point(v: &[f64]) -> PyResult<Point> {
    match v.len() {
        1..=3 => {
            let mut p = [0.0; 3];
            p[..v.len()].copy_from_slice(v);
            Ok(p)
        }
        n => Err(PyValueError::new_err(format!("expected 1 to 3 coordinates, got {n}"))),
    }
}

/// Free Fermi-gas kernel of density `t` in `dim` dimensions at separation `z`.
#[pyfunction]
fn fermi_kernel(dim: usize, t: f64, z: Vec<f64>) -> PyResult<f64> {
    Ok(FermiKernel::new(dim, t).map_err(py_err)?.value(point(&z)?))
}

/// `(density, current, kinetic_density)` of the Fermi sphere shifted by `u`.
#[pyfunction]
fn shifted_observables(dim: usize, t: f64, u: Vec<f64>) -> PyResult<(f64, Vec<f64>, f64)> {
    let o = ShiftedFermiKernel::new(dim, t, point(&u)?).map_err(py_err)?.observables();
    Ok((o.density, o.current[..dim].to_vec(), o.kinetic_density))
}

#[pyfunction]
fn thomas_fermi_constant(dim: usize) -> PyResult<f64> {
    mueg::kernels::thomas_fermi_constant(dim).map_err(py_err)
}

/// Sum of the tetrahedral indicators at `x`; `None` on a face.
#[pyfunction]
fn indicator_sum(x: Vec<f64>, ell: f64) -> PyResult<Option<f64>> {
    Ok(match TetraDecomposition::build().pou_indicator_sum(point(&x)?, ell) {
        IndicatorSum::Value(v) => Some(v),
        IndicatorSum::OnFace => None,
    })
}

/// Gauge correction per volume over `scales`; returns rows and the fitted exponent.
#[pyfunction]
#[pyo3(signature = (rho0, nu0, scales, domain = "box", delta = 1.0))]
fn gauge_scan(
    rho0: f64,
    nu0: Vec<f64>,
    scales: Vec<f64>,
    domain: &str,
    delta: f64,
) -> PyResult<(Vec<(f64, f64)>, Option<f64>)> {
    let unit = match domain {
        "box" => Domain::Box { half: [0.5; 3] },
        "tetra" => Domain::Tetra { ell: 1.0 },
        other => return Err(PyValueError::new_err(format!("unknown domain '{other}'"))),
    };
    let scan = gauge_term_scan(rho0, point(&nu0)?, unit, DeltaPolicy::Fixed(delta), &scales).map_err(py_err)?;
    Ok((scan.rows, scan.exponent))
}

/// Runs one acceptance criterion; returns `(passed, summary_line)`.
#[pyfunction]
#[pyo3(signature = (id, seed = None))]
fn run_criterion(py: Python<'_>, id: usize, seed: Option<u64>) -> PyResult<(bool, String)> {
    let mut opts = AcceptanceOptions::default();
    if let Some(s) = seed {
        opts.seed = s;
    }
    let o = py.detach(|| run_one(id, &opts)).map_err(py_err)?;
    Ok((o.passed, o.line()))
}

/// `(dim, components, complex, counts, data)` of a field file.
#[pyfunction]
fn read_field(path: &str) -> PyResult<(usize, usize, bool, Vec<usize>, Vec<f64>)> {
    let f = FieldData::read(std::path::Path::new(path)).map_err(py_err)?;
    let counts = f.grid.counts[..f.grid.dim].to_vec();
    Ok((f.grid.dim, f.components, f.complex, counts, f.data))
}

/// Hash the CLI would record for a configuration text.
#[pyfunction]
fn config_hash(text: &str) -> PyResult<String> {
    Ok(Config::parse(text).map_err(py_err)?.hash())
}

#[pymodule]
pub fn mueg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fermi_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(shifted_observables, m)?)?;
    m.add_function(wrap_pyfunction!(thomas_fermi_constant, m)?)?;
    m.add_function(wrap_pyfunction!(indicator_sum, m)?)?;
    m.add_function(wrap_pyfunction!(gauge_scan, m)?)?;
    m.add_function(wrap_pyfunction!(run_criterion, m)?)?;
    m.add_function(wrap_pyfunction!(read_field, m)?)?;
    m.add_function(wrap_pyfunction!(config_hash, m)?)?;
    Ok(())
}
