"""BDF2 convolution-quadrature weights and integer discrete derivatives.

The fractional operator on a uniform grid is

    d^alpha_tau phi^n = tau^(-alpha) * sum_{j=0}^{n} w_j phi^(n-j),

where ``w_j`` are the Taylor coefficients of ``(3/2 - 2 xi + xi^2 / 2)^alpha``.
Stored weights never include the ``tau`` scaling.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

BDF2_SYMBOL = (1.5, -2.0, 0.5)


def _binomial_series(alpha: float, n: int, ratio: float) -> np.ndarray:
    # coefficients of (1 - ratio * xi)^alpha
    c = np.empty(n + 1)
    c[0] = 1.0
    for m in range(1, n + 1):
        c[m] = c[m - 1] * (m - 1 - alpha) / m * ratio
    return c


@lru_cache(maxsize=64)
def _cq_weights_cached(alpha: float, n: int) -> np.ndarray:
    # 3/2 - 2 xi + xi^2/2 = (3/2) (1 - xi) (1 - xi/3)
    a = _binomial_series(alpha, n, 1.0)
    b = _binomial_series(alpha, n, 1.0 / 3.0)
    w = np.convolve(a, b)[: n + 1] * 1.5**alpha
    w.flags.writeable = False
    return w


def cq_weights(alpha: float, n: int) -> np.ndarray:
    """Return the BDF2 convolution-quadrature weights ``w_0 .. w_n``.

    Any real ``alpha`` is accepted; negative orders give the weights of the
    discrete fractional integral. The result is cached and read-only.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return _cq_weights_cached(float(alpha), int(n))


def bdf2_power_weights(p: int, n: int) -> np.ndarray:
    """Coefficients of ``(3/2 - 2 xi + xi^2/2)^p`` zero-padded to length ``n + 1``.

    They define ``d^p_tau phi^n = tau^(-p) sum_j w_j phi^(n-j)``.
    """
    if p <= 0 or int(p) != p:
        raise ValueError(f"p must be a positive integer, got {p}")
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    poly = np.array([1.0])
    for _ in range(int(p)):
        poly = np.convolve(poly, BDF2_SYMBOL)
    out = np.zeros(n + 1)
    m = min(n + 1, poly.size)
    out[:m] = poly[:m]
    return out


def discrete_convolve(weights, history, n: int):
    """Return ``sum_{j=0}^{n} w_j phi^(n-j)`` for ``history = [phi^0, ..., phi^n, ...]``.

    ``history`` may be a list of scalars/vectors or a 2-D array with one row
    per time level. No ``tau`` scaling is applied.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.size < n + 1:
        raise ValueError(f"need at least {n + 1} weights, got {weights.size}")
    if len(history) < n + 1:
        raise ValueError(f"history holds {len(history)} levels, need {n + 1}")
    try:
        levels = np.asarray(history[: n + 1], dtype=float)
    except ValueError as exc:
        raise ValueError("history vectors have mismatched dimensions") from exc
    # levels[n - j] pairs with weights[j]
    return np.tensordot(weights[: n + 1], levels[::-1], axes=1)
