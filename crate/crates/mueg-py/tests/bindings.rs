use pyo3::prelude::*;
use pyo3::types::PyModule;

fn with_module<R>(f: impl FnOnce(&Bound<'_, PyModule>) -> R) -> R {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "mueg_py").unwrap();
        mueg_py::mueg_py(&m).unwrap();
        f(&m)
    })
}

#[test]
fn kernel_and_constants() {
    with_module(|m| {
        let v: f64 = m.getattr("fermi_kernel").unwrap().call1((3usize, 0.4, vec![0.0, 0.0, 0.0])).unwrap().extract().unwrap();
        assert!((v - 0.4).abs() < 1e-12);
        let tf: f64 = m.getattr("thomas_fermi_constant").unwrap().call1((3usize,)).unwrap().extract().unwrap();
        assert!((tf - 0.6 * (6.0 * std::f64::consts::PI.powi(2)).powf(2.0 / 3.0)).abs() < 1e-12);
    });
}

#[test]
fn errors_become_value_errors() {
    with_module(|m| {
        let err = m.getattr("config_hash").unwrap().call1(("[a]\nbroken\n",)).unwrap_err();
        Python::attach(|py| assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py)));
        assert!(m.getattr("fermi_kernel").unwrap().call1((3usize, -1.0, vec![0.0])).is_err());
        assert!(m.getattr("indicator_sum").unwrap().call1((vec![0.0; 4], 1.0)).is_err());
    });
}

#[test]
fn gauge_scan_exponent() {
    with_module(|m| {
        let (rows, p): (Vec<(f64, f64)>, Option<f64>) = m
            .getattr("gauge_scan")
            .unwrap()
            .call1((1.0, vec![0.0, 0.0, 1.0], vec![4.0, 8.0, 16.0, 32.0]))
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(rows.len(), 4);
        assert!((p.unwrap() - 2.0).abs() <= 0.05);
    });
}
