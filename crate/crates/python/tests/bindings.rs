use pyo3::prelude::*;
use pyo3::types::PyModule;

use pseudoherm_py::pseudoherm_module;

#[test]
fn module_exposes_the_derivation() {
    Python::attach(|py| {
        let m = PyModule::new(py, "pseudoherm").unwrap();
        pseudoherm_module(&m).unwrap();

        let q: String = m.getattr("derive_metric").unwrap().call1((2,)).unwrap().extract().unwrap();
        assert_eq!(q, "(1/3)g x^3");

        let h = m.getattr("hermitian_equivalent").unwrap().call1((1,)).unwrap();
        assert_eq!(h.str().unwrap().to_string(), "p^2 + (1/4)g^2 x^2 - (1/2)g");

        let r = m.getattr("metric_residual").unwrap().call1((3, "symmetrized")).unwrap();
        assert!(r.call_method0("is_zero").unwrap().extract::<bool>().unwrap());

        let op = m.getattr("Operator").unwrap();
        let x = op.call1(("x",)).unwrap();
        let p = op.call1(("p",)).unwrap();
        let c = x.call_method1("commutator", (p,)).unwrap();
        assert_eq!(c.str().unwrap().to_string(), "(1i)");
        assert!(op.call1(("x^",)).is_err());

        let gs = m.getattr("ground_state").unwrap().call1((2, 1.0)).unwrap();
        assert_eq!(gs.get_item("verdict").unwrap().extract::<String>().unwrap(), "non-normalizable");
    });
}
