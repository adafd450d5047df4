"""Gauss-Jacobi quadrature on [0, 1] for the weight ``s^a (1 - s)^b``.

Nodes and weights come from the Golub-Welsch eigenproblem of the symmetric
Jacobi matrix, solved with an implicit-shift QL iteration that only tracks
the first components of the eigenvectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_NODES = 64


class NonFiniteIntegrand(ArithmeticError):
    """Raised when the integrand returns inf or NaN at a quadrature node."""


@dataclass(frozen=True)
class JacobiRule:
    a: float
    b: float
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return self.nodes.size


def log_beta(x: float, y: float) -> float:
    return math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y)


def _jacobi_matrix(alpha: float, beta: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the Jacobi matrix for (1-x)^alpha (1+x)^beta on [-1, 1]."""
    n = np.arange(m, dtype=float)
    ab = alpha + beta
    diag = np.empty(m)
    diag[0] = (beta - alpha) / (ab + 2.0)
    if m > 1:
        s = 2.0 * n[1:] + ab
        diag[1:] = (beta**2 - alpha**2) / (s * (s + 2.0))
    off = np.empty(max(m - 1, 0))
    if m > 1:
        # n = 1 written out: the general formula has 0/0 when alpha + beta = -1
        off[0] = 4.0 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
        k = n[2:]
        s = 2.0 * k + ab
        off[1:] = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s**2 * (s + 1.0) * (s - 1.0))
    return diag, np.sqrt(off)


def tridiagonal_eigh_first_row(diag, off, max_iter: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix.

    Implicit QL with Wilkinson shifts. Returns ``(eigenvalues, z)`` where
    ``z[i]`` is the first component of the unit eigenvector for
    ``eigenvalues[i]``; both sorted by eigenvalue.
    """
    d = np.array(diag, dtype=float)
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = off
    z = np.zeros(n)
    z[0] = 1.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= np.finfo(float).eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                raise np.linalg.LinAlgError("QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    order = np.argsort(d, kind="stable")
    return d[order], z[order]


@lru_cache(maxsize=128)
def _rule(a: float, b: float, m: int) -> JacobiRule:
    # s = (1 + x)/2 turns s^a (1-s)^b into (1+x)^a (1-x)^b, i.e. Jacobi(alpha=b, beta=a)
    diag, off = _jacobi_matrix(b, a, m)
    x, z = tridiagonal_eigh_first_row(diag, off)
    nodes = 0.5 * (1.0 + x)
    weights = math.exp(log_beta(a + 1.0, b + 1.0)) * z**2
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return JacobiRule(a, b, nodes, weights)


def jacobi_rule(a: float, b: float, m: int = DEFAULT_NODES) -> JacobiRule:
    """m-point Gauss-Jacobi rule for the integral of s^a (1-s)^b P(s) over [0, 1].

    Exact for polynomials P of degree <= 2m - 1. Rules are cached and immutable.
    """
    if not a > -1.0 or not b > -1.0:
        raise ValueError(f"Jacobi exponents must exceed -1, got a={a}, b={b}")
    if m < 1:
        raise ValueError(f"node count must be >= 1, got {m}")
    return _rule(float(a), float(b), int(m))


def integrate(rule: JacobiRule, f):
    """Apply ``rule`` to ``f``.

    ``f`` receives the node array and returns values of shape ``(m,)`` or
    ``(m, ...)``; the result drops the leading axis.
    """
    values = np.asarray(f(rule.nodes), dtype=float)
    if values.ndim == 0:
        values = np.full(len(rule), float(values))
    elif values.shape[0] != len(rule):
        raise ValueError(f"integrand returned leading dimension {values.shape[0]}, expected {len(rule)}")
    if not np.all(np.isfinite(values)):
        raise NonFiniteIntegrand(f"integrand is not finite at some node of the ({rule.a}, {rule.b}) rule")
    return np.tensordot(rule.weights, values, axes=1)
