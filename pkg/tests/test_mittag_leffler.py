from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from scipy.special import erfcx

from subdiff.mittag_leffler import MLDomainError, ml


def mp_series(alpha, beta, z, dps=60, terms=600):
    # plain high-precision partial sum as an independent reference
    with mpmath.workdps(dps):
        a, b, x = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(z)
        return float(mpmath.fsum(x**k * mpmath.rgamma(a * k + b) for k in range(terms)))


def test_exponential():
    assert ml(1, 1, 1.0) == pytest.approx(math.e, rel=1e-15)


def test_zero_argument():
    assert ml(0.5, 1, 0.0) == 1.0
    assert ml(0.5, 2.5, 0.0) == pytest.approx(1 / math.gamma(2.5), rel=1e-15)


@pytest.mark.parametrize("z", [-30.0, -12.5, -5.0, -1.0, -0.1, 0.3, 2.0, 5.0])
def test_half_order_error_function_identity(z):
    # E_{1/2,1}(z) = exp(z^2) erfc(-z)
    assert ml(0.5, 1, z) == pytest.approx(float(erfcx(-z)), rel=1e-13)


def test_half_order_at_minus_one():
    assert ml(0.5, 1, -1.0) == pytest.approx(0.427583576155807, rel=1e-14)


@pytest.mark.parametrize("z", [-25.0, -4.0, 4.0, 20.0])
def test_cosh_identity(z):
    # E_{2,1}(z) = cosh(sqrt(z)) for z > 0, cos(sqrt(-z)) for z < 0
    exact = math.cosh(math.sqrt(z)) if z > 0 else math.cos(math.sqrt(-z))
    assert ml(2, 1, z) == pytest.approx(exact, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("alpha", [0.3, 0.7])
@pytest.mark.parametrize("which", ["one", "alpha", "alpha+1"])
def test_recurrence(alpha, which):
    beta = {"one": 1.0, "alpha": alpha, "alpha+1": alpha + 1}[which]
    for z in np.linspace(-10, 5, 13):
        lhs = ml(alpha, beta, z)
        rhs = 1 / math.gamma(beta) + z * ml(alpha, alpha + beta, z)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


@pytest.mark.parametrize("alpha, x_max", [(0.2, 5.0), (0.3, 10.0), (0.5, 12.0), (0.9, 12.0)])
def test_monotone_decay(alpha, x_max):
    values = [ml(alpha, 1, -x) for x in np.linspace(0, x_max, 21)]
    assert all(v > 0 for v in values)
    assert all(b < a for a, b in zip(values, values[1:]))


def test_exp_agreement():
    for z in np.linspace(-20, 3, 47):
        assert abs(ml(1, 1, z) - math.exp(z)) <= 1e-12 * math.exp(abs(z))


@pytest.mark.parametrize(
    "alpha, beta, z",
    [(0.5, 1.0, -3.0), (0.7, 1.7, -6.0), (0.3, 1.0, -2.0), (0.8, 0.5, 2.5), (0.6, 1.9, -8.0)],
)
def test_against_mpmath_series(alpha, beta, z):
    assert ml(alpha, beta, z) == pytest.approx(mp_series(alpha, beta, z), rel=1e-13, abs=1e-15)


def test_non_positive_beta_uses_poles():
    # 1/Gamma vanishes at the poles, so beta = 0 drops the k = 0 term
    assert ml(1, 0, 0.7) == pytest.approx(0.7 * math.exp(0.7), rel=1e-14)


@pytest.mark.parametrize("alpha, z", [(0.0, 1.0), (-0.5, 1.0), (0.5, 30.5), (0.5, -31.0), (0.2, -10.0), (0.1, -30.0)])
def test_domain_errors(alpha, z):
    with pytest.raises(MLDomainError):
        ml(alpha, 1.0, z)
