from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as spi
from scipy.special import beta as beta_fn
from scipy.special import roots_jacobi

from subdiff.quadrature import NonFiniteIntegrand, integrate, jacobi_rule, tridiagonal_eigh_first_row


def beta_moment(a, b, p):
    return math.exp(math.lgamma(a + p + 1) + math.lgamma(b + 1) - math.lgamma(a + b + p + 2))


def test_legendre_exactness():
    assert integrate(jacobi_rule(0, 0, 2), lambda s: s**2) == pytest.approx(1 / 3, rel=1e-15)
    assert integrate(jacobi_rule(0, 0, 4), lambda s: s**3) == pytest.approx(1 / 4, rel=1e-15)


def test_singular_constant():
    assert integrate(jacobi_rule(-0.8, 0, 8), lambda s: np.ones_like(s)) == pytest.approx(5.0, rel=1e-13)
    assert integrate(jacobi_rule(0.5, 0, 6), lambda s: 1.0) == pytest.approx(2 / 3, rel=1e-14)


def test_beta_value():
    rule = jacobi_rule(-0.8, 1.2, 16)
    value = integrate(rule, lambda s: 1.0)
    assert value == pytest.approx(beta_fn(0.2, 2.2), rel=1e-13)
    assert value == pytest.approx(4.0720720242361571, rel=1e-13)


def test_exponential_against_adaptive_oracle():
    # scipy's QUADPACK algebraic-weight routine as the independent reference
    ref, _ = spi.quad(np.exp, 0, 1, weight="alg", wvar=(-0.5, 1.0), epsabs=1e-15, epsrel=1e-14)
    got = integrate(jacobi_rule(-0.5, 1, 12), np.exp)
    assert got == pytest.approx(ref, rel=1e-12)
    assert got == pytest.approx(1.6696734092624996, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(-0.95, 2.0),
    st.floats(-0.95, 2.0),
    st.integers(1, 12),
)
def test_polynomial_exactness(a, b, m):
    rule = jacobi_rule(a, b, m)
    for p in range(2 * m):
        got = integrate(rule, lambda s: s**p)
        assert got == pytest.approx(beta_moment(a, b, p), rel=1e-12)


@pytest.mark.parametrize("a, b", [(-0.5, 0.0), (0.3, 1.7), (-0.9, 2.0), (1.5, -0.7)])
def test_weight_sum_is_beta(a, b):
    rule = jacobi_rule(a, b, 64)
    assert rule.weights.sum() == pytest.approx(beta_fn(a + 1, b + 1), rel=1e-13)


@pytest.mark.parametrize("a, b", [(-0.5, 0.0), (0.3, 1.7), (-0.9, 2.0)])
def test_positivity_and_interlacing(a, b):
    previous = None
    for m in range(1, 25):
        rule = jacobi_rule(a, b, m)
        assert len(rule) == m
        assert np.all(rule.weights > 0)
        assert np.all((rule.nodes > 0) & (rule.nodes < 1))
        assert np.all(np.diff(rule.nodes) > 0)
        if previous is not None:
            # each gap of the previous rule holds exactly one new node
            for lo, hi in zip(previous.nodes, previous.nodes[1:]):
                assert np.count_nonzero((rule.nodes > lo) & (rule.nodes < hi)) == 1
        previous = rule


@pytest.mark.parametrize("m", [5, 20, 64])
def test_matches_scipy_nodes(m):
    a, b = -0.3, 1.4
    x, w = roots_jacobi(m, b, a)  # scipy weight (1-x)^alpha (1+x)^beta
    rule = jacobi_rule(a, b, m)
    np.testing.assert_allclose(rule.nodes, (1 + x) / 2, atol=1e-14)
    np.testing.assert_allclose(rule.weights, w / 2 ** (a + b + 1), rtol=1e-11)


@pytest.mark.parametrize("m", [20, 32, 48])
def test_spectral_saturation(m):
    def f(s):
        return np.cos(3 * s) * np.exp(s)

    one = integrate(jacobi_rule(-0.4, 0.9, m), f)
    two = integrate(jacobi_rule(-0.4, 0.9, 2 * m), f)
    assert abs(one - two) < 1e-12


def test_vector_valued_integrand():
    rule = jacobi_rule(0, 0, 8)
    got = integrate(rule, lambda s: np.outer(s, [1.0, 2.0, 3.0]))
    np.testing.assert_allclose(got, [0.5, 1.0, 1.5], rtol=1e-14)


def test_non_finite_is_an_error():
    with pytest.raises(NonFiniteIntegrand):
        integrate(jacobi_rule(0, 0, 4), lambda s: np.where(s > 0.5, np.nan, s))
    with pytest.raises(NonFiniteIntegrand):
        integrate(jacobi_rule(0, 0, 4), lambda s: np.full_like(s, np.inf))


def test_shape_mismatch():
    with pytest.raises(ValueError):
        integrate(jacobi_rule(0, 0, 4), lambda s: np.ones(3))


@pytest.mark.parametrize("a, b, m", [(-1.0, 0.0, 4), (0.0, -1.2, 4), (0.0, 0.0, 0)])
def test_invalid_parameters(a, b, m):
    with pytest.raises(ValueError):
        jacobi_rule(a, b, m)


def test_rule_is_immutable():
    rule = jacobi_rule(0.2, 0.3, 10)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.5


def test_tridiagonal_eigensolver():
    rng = np.random.default_rng(3)
    d = rng.normal(size=12)
    e = rng.normal(size=11)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    vals, z = tridiagonal_eigh_first_row(d, e)
    ref_vals, ref_vecs = np.linalg.eigh(T)
    np.testing.assert_allclose(vals, ref_vals, atol=1e-13)
    np.testing.assert_allclose(np.abs(z), np.abs(ref_vecs[0]), atol=1e-12)
