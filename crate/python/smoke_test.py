"""Smoke test for the compiled extension: build first with `maturin develop` inside crates/python."""

import pseudoherm as ph


def main():
    assert ph.derive_metric(2) == "(1/3)g x^3"
    assert ph.derive_metric(-1) == "g ln(x)"

    h = ph.hermitian_equivalent(2)
    assert str(h) == "p^2 + (1/4)g^2 x^4 - g x", str(h)
    assert ph.metric_residual(1).is_zero()

    x, p = ph.Operator("x"), ph.Operator("p")
    assert str(x.commutator(p)) == "(1i)"
    assert ph.Operator("{x,p}") == x * p + p * x
    assert ph.Operator.hamiltonian(2) == ph.Operator("p^2 + 1i*g*x^2*p")
    try:
        ph.Operator("x^1.5")
    except ValueError:
        pass
    else:
        raise AssertionError("non-integer exponent accepted")

    r = ph.spectrum(1, 2.0, n=1000, l=8.0, k=4)
    assert r["real_spectrum"] and r["verdict"] == "pass", r
    for n, e in enumerate(r["eigenvalues_H"]):
        assert abs(e - 2 * n) < 1e-2, (n, e)

    gs = ph.ground_state(1, 2.0)
    assert gs["verdict"] == "normalizable"
    assert abs(gs["normalization"] - 0.7511) < 1e-4
    assert ph.ground_state(-3, 1.0)["verdict"] == "undefined"

    pairs = ph.polynomial_eigenpairs(1, 2.0, 4)
    assert [pair["eigenvalue"] for pair in pairs] == ["0", "2", "4", "6", "8"]
    assert ph.zero_mode(3)["residual_h"] == "0"
    print("python smoke test passed")


if __name__ == "__main__":
    main()
