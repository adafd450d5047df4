"""Quick invariant suite behind ``subdiff selftest`` (no pytest needed)."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .cq import cq_weights
from .mittag_leffler import ml
from .quadrature import integrate, jacobi_rule
from .solver import Scheme, TimeGrid, solve
from .source import Monomial, SourceSpec
from .space import ChebyshevOperator, FiniteDifferenceOperator, eigenpairs


def _cq_inverse() -> float:
    worst = 0.0
    for alpha in (0.3, 0.5, 0.7, 0.99):
        a = cq_weights(alpha, 64)
        b = cq_weights(-alpha, 64)
        delta = np.convolve(a, b)[:65]
        delta[0] -= 1.0
        worst = max(worst, float(np.max(np.abs(delta))))
    return worst


def _jacobi_moments() -> float:
    worst = 0.0
    for a, b in ((-0.5, 0.0), (0.3, 1.7), (-0.9, 2.5)):
        rule = jacobi_rule(a, b, 12)
        for p in range(24):
            exact = math.exp(math.lgamma(a + p + 1) + math.lgamma(b + 1) - math.lgamma(a + b + p + 2))
            worst = max(worst, abs(integrate(rule, lambda s: s**p) - exact) / exact)
    return worst


def _ml_recurrence() -> float:
    worst = 0.0
    for alpha in (0.3, 0.7):
        for beta in (1.0, alpha + 1.0):
            for z in (-10.0, -3.0, -0.5, 0.5, 5.0):
                lhs = ml(alpha, beta, z)
                rhs = 1.0 / math.gamma(beta) + z * ml(alpha, beta + alpha, z)
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return worst


def _cheb_eigen() -> float:
    (lam, phi), = eigenpairs(1)
    worst = 0.0
    for M in (16, 32):
        A = ChebyshevOperator(M)
        w = phi(A.nodes)
        worst = max(worst, float(np.max(np.abs(A.apply(w) + lam * w))))
    return worst


def _fd_symmetry() -> float:
    K = FiniteDifferenceOperator(17).matrix()
    return float(np.max(np.abs(K - K.T)))


def _determinism() -> float:
    A = ChebyshevOperator(16)
    v = np.sin(A.nodes)
    g = SourceSpec(Monomial(-0.5, np.exp(A.nodes)))
    a = solve(Scheme.ID2BDF2, TimeGrid(1.0, 64), A, 0.6, v, g).u()
    b = solve(Scheme.ID2BDF2, TimeGrid(1.0, 64), A, 0.6, v, g).u()
    return 0.0 if a.tobytes() == b.tobytes() else 1.0


CHECKS: list[tuple[str, Callable[[], float], float]] = [
    ("cq inverse-weight convolution", _cq_inverse, 1e-12),
    ("gauss-jacobi beta moments", _jacobi_moments, 1e-12),
    ("mittag-leffler recurrence", _ml_recurrence, 1e-12),
    ("chebyshev eigenfunction identity", _cheb_eigen, 1e-10),
    ("finite-difference symmetry", _fd_symmetry, 0.0),
    ("solver determinism", _determinism, 0.0),
]


def run_selftest(echo: Callable[[str], None] = print) -> bool:
    ok = True
    for name, fn, tol in CHECKS:
        value = fn()
        passed = value <= tol
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name:<36} {value:.3e} (tol {tol:g})")
    return ok
