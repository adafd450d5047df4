from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subdiff.cq import bdf2_power_weights, cq_weights, discrete_convolve


def symbol_coefficients(alpha: float, n: int, m: int = 4096) -> np.ndarray:
    # independent route: sample the symbol on a circle of radius r < 1 and invert the DFT
    r = 0.5
    xi = r * np.exp(2j * np.pi * np.arange(m) / m)
    values = (1.5 - 2.0 * xi + 0.5 * xi**2) ** alpha
    return (np.fft.fft(values) / m).real[: n + 1] / r ** np.arange(n + 1)


def test_alpha_one_is_bdf2_polynomial():
    np.testing.assert_array_equal(cq_weights(1.0, 4), [1.5, -2.0, 0.5, 0.0, 0.0])


def test_constant_term():
    w = cq_weights(0.5, 0)
    assert w.shape == (1,)
    assert w[0] == pytest.approx(math.sqrt(1.5), rel=1e-15)


def test_first_weight_matches_symbol_derivative():
    w = cq_weights(0.5, 1)
    assert w[1] == pytest.approx(-math.sqrt(1.5) * 4 * 0.5 / 3, rel=1e-14)
    assert w[1] == pytest.approx(-0.816496580927726, rel=1e-13)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.7, -0.4, 1.3])
def test_matches_dft_of_symbol(alpha):
    np.testing.assert_allclose(cq_weights(alpha, 20), symbol_coefficients(alpha, 20), atol=1e-12)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7, 0.99])
def test_inverse_property(alpha):
    delta = np.convolve(cq_weights(alpha, 64), cq_weights(-alpha, 64))[:65]
    expected = np.zeros(65)
    expected[0] = 1.0
    np.testing.assert_allclose(delta, expected, rtol=0, atol=1e-12)


def test_integer_consistency():
    np.testing.assert_array_equal(cq_weights(1, 30), bdf2_power_weights(1, 30))
    np.testing.assert_array_equal(cq_weights(0, 10), np.eye(11)[0])


def test_weights_are_cached_and_read_only():
    w = cq_weights(0.37, 50)
    assert w is cq_weights(0.37, 50)
    with pytest.raises(ValueError):
        w[0] = 1.0


def test_negative_n_rejected():
    with pytest.raises(ValueError):
        cq_weights(0.5, -1)


@pytest.mark.parametrize(
    "p, n, expected",
    [
        (1, 3, [1.5, -2.0, 0.5, 0.0]),
        (2, 5, [9 / 4, -6.0, 11 / 2, -2.0, 1 / 4, 0.0]),
        (3, 0, [27 / 8]),
    ],
)
def test_power_weights(p, n, expected):
    np.testing.assert_array_equal(bdf2_power_weights(p, n), expected)


@pytest.mark.parametrize("p", [0, -1, 1.5])
def test_power_weights_reject_bad_order(p):
    with pytest.raises(ValueError):
        bdf2_power_weights(p, 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=5, max_size=32))
def test_composition(values):
    history = np.array(values)
    w1 = bdf2_power_weights(1, len(history))
    once = np.array([discrete_convolve(w1, history, n) for n in range(len(history))])
    twice = np.array([discrete_convolve(w1, once, n) for n in range(len(history))])
    direct = np.array([discrete_convolve(bdf2_power_weights(2, len(history)), history, n) for n in range(len(history))])
    np.testing.assert_allclose(twice, direct, rtol=0, atol=1e-11 * (1 + np.max(np.abs(history))))


def test_convolve_examples():
    assert discrete_convolve([1, 0, 0], [3.0, 4.0, 5.0], 2) == 5.0
    tau = 0.1
    assert discrete_convolve([1.5, -2.0, 0.5], [0.0, tau, 2 * tau], 2) == pytest.approx(tau, rel=1e-14)
    assert discrete_convolve([1.5, -2.0], [0.0, tau], 1) == pytest.approx(1.5 * tau, rel=1e-14)


def test_convolve_vectors_and_mismatch():
    hist = np.arange(12.0).reshape(4, 3)
    np.testing.assert_allclose(discrete_convolve([1.0, 1.0], hist, 1), hist[0] + hist[1])
    with pytest.raises(ValueError):
        discrete_convolve([1.0, 1.0], [np.ones(2), np.ones(3)], 1)
    with pytest.raises(ValueError):
        discrete_convolve([1.0], hist, 2)


def _cq_error(alpha, phi, exact, N):
    tau = 1.0 / N
    t = tau * np.arange(N + 1)
    w = cq_weights(alpha, N)
    approx = np.array([discrete_convolve(w, phi(t), n) for n in range(N + 1)]) / tau**alpha
    return np.abs(approx[1:] - exact(t[1:]))


def _rates(alpha, phi, exact, reduce):
    e = [reduce(_cq_error(alpha, phi, exact, N)) for N in (64, 128, 256, 512)]
    return [math.log2(a / b) for a, b in zip(e, e[1:])]


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_second_order_for_flat_start(alpha):
    # phi = t^3: D^alpha phi = 6 t^(3 - alpha) / Gamma(4 - alpha)
    def exact(t):
        return 6 * t ** (3 - alpha) / math.gamma(4 - alpha)

    rates = _rates(alpha, lambda t: t**3, exact, np.max)
    assert min(rates) >= 1.9


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_order_reduction_for_linear(alpha):
    # phi = t: the first-step error is O(tau^(1 - alpha)) in max norm while
    # the error at a fixed time still decays at second order
    def exact(t):
        return t ** (1 - alpha) / math.gamma(2 - alpha)

    max_rates = _rates(alpha, lambda t: t, exact, np.max)
    end_rates = _rates(alpha, lambda t: t, exact, lambda e: e[-1])
    assert max_rates[-1] == pytest.approx(1 - alpha, abs=0.05)
    assert end_rates[-1] == pytest.approx(2.0, abs=0.05)
