"""Smoke tests for the Python bindings.

These only check that the bindings round-trip values and exceptions
faithfully; the numerical behaviour itself is covered by the C++ unit
tests and the verification suite.
"""

import json
import math

import pytest

import nucalc


def test_version_string():
    assert nucalc.__version__ == "1.0.0"


def test_gamma_and_beta():
    assert nucalc.gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)
    assert nucalc.beta_fn(2.0, 3.0) == pytest.approx(1.0 / 12.0, rel=1e-14)
    with pytest.raises(ValueError):
        nucalc.gamma_fn(0.0)


def test_extended_beta_reduces_at_p_zero():
    assert nucalc.extended_beta(2.5, 1.5, 0.0) == pytest.approx(
        nucalc.beta_fn(2.5, 1.5), rel=1e-12
    )


def test_nu_constant_canonical_is_one():
    assert nucalc.nu_constant() == pytest.approx(1.0, rel=1e-12)
    assert nucalc.nu_constant(nucalc.Params()) == pytest.approx(1.0, rel=1e-12)


def test_series_family():
    assert nucalc.ml1(1.0, 1.0).value == pytest.approx(math.e, rel=1e-13)
    r = nucalc.ml3(1.0, 1.0, 1.0, 1.0)
    assert r.value == pytest.approx(math.e, rel=1e-13)
    assert r.terms_used > 5
    assert float(r) == r.value
    # p = 0 collapses the beta-regularized coefficients to the plain series
    assert nucalc.ml_extended(0.7, 1.1, 1.3, 2.4, 0.0, 0.5).value == pytest.approx(
        nucalc.ml3(1.3, 0.7, 1.1, 0.5).value, rel=1e-12
    )


def test_series_divergence_raises():
    with pytest.raises(ArithmeticError):
        nucalc.ml_extended_gen(1.0, 1.0, 1.0, 2.0, 3.0, 0.0, 0.3)


def test_expression_parse_eval():
    f = nucalc.parse("sin(t) + t^2")
    assert f(0.5) == pytest.approx(math.sin(0.5) + 0.25, rel=1e-14)
    assert f.derivative(0.5) == pytest.approx(math.cos(0.5) + 1.0, rel=1e-14)
    assert "t" in str(f)
    with pytest.raises(ValueError):
        nucalc.parse("t + @")


def test_substitute_composes():
    outer = nucalc.parse("exp(t)")
    inner = nucalc.parse("2*t")
    g = nucalc.substitute(outer, inner)
    assert g(0.3) == pytest.approx(math.exp(0.6), rel=1e-14)


def test_deriv_chain_matches_classical_at_mu_one():
    f = nucalc.parse("t^3")
    # mu = 1 at canonical parameters is the ordinary derivative
    assert nucalc.deriv_chain(f, 2.0, 1.0) == pytest.approx(12.0, rel=1e-12)
    # fractional order scales by t^(1-mu)
    assert nucalc.deriv_chain(f, 2.0, 0.5) == pytest.approx(
        12.0 * 2.0**0.5, rel=1e-12
    )


def test_deriv_limit_converges_to_chain():
    f = nucalc.parse("exp(t)")
    chain = nucalc.deriv_chain(f, 1.5, 0.7)
    lim = nucalc.deriv_limit(f, 1.5, 0.7)
    assert lim.value == pytest.approx(chain, abs=1e-6)
    assert len(lim.per_eps) == 5
    assert lim.observed_order == pytest.approx(1.0, abs=0.2)


def test_deriv_limit_rejects_nonzero_p():
    f = nucalc.parse("t^2")
    with pytest.raises(ValueError):
        nucalc.deriv_limit(f, 1.0, 0.5, 1, nucalc.Params(p=0.5))


def test_integral_and_inverse():
    one = nucalc.parse("1")
    # canonical params, mu = 0.5: I(1)(0 -> 1) = 2
    assert nucalc.integral(one, 0.0, 1.0, 0.5) == pytest.approx(2.0, rel=1e-12)
    full = nucalc.integral_full(one, 0.0, 1.0, 0.5)
    assert full.value == pytest.approx(2.0, rel=1e-12)
    assert full.error_estimate < 1e-9
    assert nucalc.integral(one, 0.3, 0.3, 0.5) == 0.0


def test_closed_form_table_consistent():
    t, mu, a = 1.3, 0.6, 0.8
    kind = nucalc.ClosedFormKind.exp_at
    expr = nucalc.parse(nucalc.closed_form_expression(kind, a, mu))
    assert nucalc.closed_form_deriv(kind, a, t, mu) == pytest.approx(
        nucalc.deriv_chain(expr, t, mu), rel=1e-10
    )


def test_series_operators():
    # V of the 2-parameter function at lambda=delta=1 is e^t restated
    assert nucalc.deriv_ml2(1.0, 1.0, 1.0, 1.0) == pytest.approx(math.e, rel=1e-10)
    assert nucalc.integral_power_kernel(1.0, 1.0, 1.0) == pytest.approx(0.5, rel=1e-12)


def test_run_suite_writes_report(tmp_path):
    out = tmp_path / "report.json"
    rep = nucalc.run_suite(7, 2, str(out))
    assert rep.all_passed()
    assert rep.n_failed == 0
    doc = json.loads(out.read_text())
    assert doc["totals"]["cases"] == rep.n_passed
    assert doc["seed"] == 7
    first = rep.cases[0]
    assert first.theorem_id
    assert first.residual <= first.tolerance


def test_run_suite_bad_path_raises():
    with pytest.raises(OSError):
        nucalc.run_suite(7, 1, "/nonexistent-dir/report.json")
