"""Discrete Dirichlet Laplacian on (-1, 1).

Three interchangeable operators share one interface: ``nodes``, ``apply``,
``solve_shifted`` (solves ``(c I - A) x = rhs``) and ``l2_norm``. Grid
functions are plain numpy arrays of interior-node values.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import lu_factor, lu_solve


class SpatialOperator:
    """Common surface; subclasses set ``nodes`` and ``quad_weights``."""

    nodes: np.ndarray
    quad_weights: np.ndarray
    label = "abstract"

    def __init__(self) -> None:
        self._factors: dict[float, object] = {}

    @property
    def size(self) -> int:
        return self.nodes.size

    def _check(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.size,):
            raise ValueError(f"grid function has shape {w.shape}, operator expects ({self.size},)")
        return w

    def apply(self, w) -> np.ndarray:
        raise NotImplementedError

    def _factor(self, c: float):
        raise NotImplementedError

    def _solve_factored(self, factor, rhs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def solve_shifted(self, c: float, rhs) -> np.ndarray:
        """Solve ``(c I - A) x = rhs`` for ``c > 0``; factorizations are cached per ``c``."""
        if not c > 0:
            raise ValueError(f"shift must be positive, got {c}")
        rhs = self._check(rhs)
        factor = self._factors.get(c)
        if factor is None:
            factor = self._factors[c] = self._factor(c)
        return self._solve_factored(factor, rhs)

    def l2_norm(self, w) -> float:
        """Quadrature-weighted discrete L2 norm ``sqrt(sum_i q_i w_i^2)``."""
        w = self._check(w)
        return math.sqrt(float(np.dot(self.quad_weights, w * w)))

    def sample(self, fn) -> np.ndarray:
        return np.asarray(fn(self.nodes), dtype=float) * np.ones(self.size)


class ScalarOperator(SpatialOperator):
    """``A = -lam`` acting on 1-vectors."""

    label = "scalar"

    def __init__(self, lam: float) -> None:
        super().__init__()
        if not lam > 0:
            raise ValueError(f"lambda must be positive, got {lam}")
        self.lam = float(lam)
        self.nodes = np.zeros(1)
        self.quad_weights = np.ones(1)

    def apply(self, w) -> np.ndarray:
        return -self.lam * self._check(w)

    def _factor(self, c):
        return c + self.lam

    def _solve_factored(self, factor, rhs):
        return rhs / factor

    def sample(self, fn) -> np.ndarray:
        # one mode, phi == 1
        return np.asarray(fn(np.zeros(1)), dtype=float) * np.ones(1)


class FiniteDifferenceOperator(SpatialOperator):
    """Three-point stencil on ``M`` uniformly spaced interior points, ``h = 2/(M+1)``."""

    label = "fd"

    def __init__(self, M: int) -> None:
        super().__init__()
        if M < 1:
            raise ValueError(f"need at least one interior point, got M={M}")
        self.M = int(M)
        self.h = 2.0 / (M + 1)
        self.nodes = -1.0 + self.h * np.arange(1, M + 1)
        self.quad_weights = np.full(M, self.h)

    def apply(self, w) -> np.ndarray:
        w = self._check(w)
        padded = np.concatenate(([0.0], w, [0.0]))
        return (padded[:-2] - 2.0 * padded[1:-1] + padded[2:]) / self.h**2

    def matrix(self) -> np.ndarray:
        M, h2 = self.M, self.h**2
        return (np.diag(np.full(M, -2.0)) + np.diag(np.ones(M - 1), 1) + np.diag(np.ones(M - 1), -1)) / h2

    def _factor(self, c):
        # Thomas elimination for diag = c + 2/h^2, off = -1/h^2; keep the modified pivots
        M = self.M
        diag = c + 2.0 / self.h**2
        off = -1.0 / self.h**2
        pivots = np.empty(M)
        pivots[0] = diag
        for i in range(1, M):
            pivots[i] = diag - off * off / pivots[i - 1]
        if np.any(pivots == 0.0):
            raise np.linalg.LinAlgError("singular shifted system")
        return off, pivots

    def _solve_factored(self, factor, rhs):
        off, pivots = factor
        M = self.M
        y = np.empty(M)
        y[0] = rhs[0]
        for i in range(1, M):
            y[i] = rhs[i] - off / pivots[i - 1] * y[i - 1]
        x = np.empty(M)
        x[-1] = y[-1] / pivots[-1]
        for i in range(M - 2, -1, -1):
            x[i] = (y[i] - off * x[i + 1]) / pivots[i]
        return x


def chebyshev_differentiation(M: int) -> tuple[np.ndarray, np.ndarray]:
    """First-derivative matrix on the ``M + 1`` Chebyshev-Gauss-Lobatto points (ascending)."""
    if M < 1:
        raise ValueError(f"degree must be >= 1, got {M}")
    j = np.arange(M + 1)
    # sine form: exactly symmetric, midpoint exactly 0 for even M
    x = -np.sin(np.pi * (M - 2 * j) / (2 * M))
    c = np.where((j == 0) | (j == M), 2.0, 1.0) * (-1.0) ** j
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(M + 1))
    # negative-sum trick for the diagonal
    D -= np.diag(D.sum(axis=1))
    return D, x


def clenshaw_curtis_weights(M: int) -> np.ndarray:
    """Clenshaw-Curtis weights on the ``M + 1`` CGL points of [-1, 1]."""
    theta = np.pi * np.arange(M + 1) / M
    w = np.zeros(M + 1)
    inner = np.arange(1, M)
    v = np.ones(M - 1)
    if M % 2 == 0:
        w[0] = w[M] = 1.0 / (M * M - 1)
        for k in range(1, M // 2):
            v -= 2.0 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
        v -= np.cos(M * theta[inner]) / (M * M - 1)
    else:
        w[0] = w[M] = 1.0 / (M * M)
        for k in range(1, (M - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
    w[inner] = 2.0 * v / M
    return w


class ChebyshevOperator(SpatialOperator):
    """Collocation Laplacian of degree ``M``: ``D^2`` with boundary rows and columns removed."""

    label = "cheb"

    def __init__(self, M: int) -> None:
        super().__init__()
        if M < 2:
            raise ValueError(f"degree must be >= 2, got {M}")
        self.M = int(M)
        D, x = chebyshev_differentiation(M)
        self.D2 = (D @ D)[1:-1, 1:-1]
        self.nodes = x[1:-1]
        self.quad_weights = clenshaw_curtis_weights(M)[1:-1]

    def apply(self, w) -> np.ndarray:
        return self.D2 @ self._check(w)

    def matrix(self) -> np.ndarray:
        return self.D2.copy()

    def _factor(self, c):
        return lu_factor(c * np.eye(self.size) - self.D2)

    def _solve_factored(self, factor, rhs):
        return lu_solve(factor, rhs, check_finite=False)


def make_operator(mode: str, resolution: int | float) -> SpatialOperator:
    """Build an operator from a mode name: ``scalar`` (resolution = lambda), ``fd`` or ``cheb``."""
    if mode == "scalar":
        return ScalarOperator(float(resolution))
    if mode == "fd":
        return FiniteDifferenceOperator(int(resolution))
    if mode == "cheb":
        return ChebyshevOperator(int(resolution))
    raise ValueError(f"unknown spatial mode {mode!r}")


def discrete_l2_norm(A: SpatialOperator, w) -> float:
    return A.l2_norm(w)


def nodal_l2_norm(w) -> float:
    """Unweighted Euclidean norm of the nodal vector."""
    return float(np.linalg.norm(np.asarray(w, dtype=float)))


def eigenpairs(k_max: int) -> list[tuple[float, object]]:
    """Dirichlet eigenpairs of d^2/dx^2 on (-1, 1): ``((k pi / 2)^2, sin(k pi (x + 1) / 2))``.

    The operator is ``A = Delta``, so ``A phi_k = -lam_k phi_k``.
    """
    pairs = []
    for k in range(1, k_max + 1):
        lam = (k * math.pi / 2.0) ** 2

        def phi(x, k=k):
            return np.sin(k * math.pi * (np.asarray(x, dtype=float) + 1.0) / 2.0)

        pairs.append((lam, phi))
    return pairs
