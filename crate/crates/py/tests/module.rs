use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(code: &str) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "hopx").unwrap();
        hopx::hopx(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("hopx", m).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn linear_closed_form() {
    with_module(
        r#"
f = hopx.Function.linear([1.0])
r = hopx.solve_hop(f, [0.0], sigma=1.0, p=2.0)
assert r.converged
assert abs(r.x[0] + 1.0) < 1e-14, r.x
assert len(r.lambda_norms) == r.iterations + 1
b = hopx.solve_bisection_p2(f, [0.0])
assert abs(b.x[0] + 1.0) < 1e-12
"#,
    );
}

#[test]
fn quadratic_matches_oracle() {
    with_module(
        r#"
a = [[2.0, 0.5, 0.0], [0.5, 1.0, 0.1], [0.0, 0.1, 3.0]]
f = hopx.Function.quadratic(a, [1.0, -2.0, 0.5])
c = [0.3, 0.2, -1.0]
r = hopx.solve_hop(f, c, p=3.0, tol=1e-12)
x, lam, t = hopx.oracle_quadratic_hop(f, c, p=3.0)
assert max(abs(u - v) for u, v in zip(r.x, x)) < 1e-9
assert hopx.kkt_residual(f, c, r.x, p=3.0) < 1e-9
assert hopx.weak_duality_gap(f, c, r.x, r.dual, p=3.0) < 1e-9
"#,
    );
}

#[test]
fn errors_become_value_errors() {
    with_module(
        r#"
try:
    hopx.solve_hop(hopx.Function.l1(2), [0.0, 1.0], sigma=-1.0)
except ValueError as e:
    assert "sigma" in str(e)
else:
    raise AssertionError("expected ValueError")
try:
    hopx.Function.quadratic([[1.0, 0.0], [0.0]], [0.0, 0.0])
except ValueError:
    pass
else:
    raise AssertionError("expected ValueError")
"#,
    );
}
