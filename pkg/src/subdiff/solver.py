"""Time stepping for  d^alpha_t V - A V = A v + g,  V(0) = 0,  u = V + v.

Every scheme uses the BDF2 convolution quadrature for the fractional
derivative and differs only in the right-hand side:

* ``BDF2``      A v + g^n
* ``CorrBDF2``  A v + g^n, plus (A v + g^0)/2 at the first step
* ``ID1BDF2``   d_tau   (t A v + J^1 g)(t_n)
* ``ID2BDF2``   d_tau^2 (t^2/2 A v + J^2 g)(t_n)
* ``ID3BDF2``   d_tau^3 (t^3/6 A v + J^3 g)(t_n)

where ``d_tau^p`` is the p-th power of the BDF2 difference, applied as a
truncated sum over the available history.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .cq import bdf2_power_weights, cq_weights
from .quadrature import DEFAULT_NODES
from .source import RegularizedSource, SourceSpec, tabulate_regularized
from .space import SpatialOperator


class Scheme(enum.Enum):
    BDF2 = "BDF2"
    CorrBDF2 = "CorrBDF2"
    ID1BDF2 = "ID1BDF2"
    ID2BDF2 = "ID2BDF2"
    ID3BDF2 = "ID3BDF2"

    @property
    def order(self) -> int:
        """Number of time integrations applied to the source."""
        return {"ID1BDF2": 1, "ID2BDF2": 2, "ID3BDF2": 3}.get(self.value, 0)

    @property
    def label(self) -> str:
        return {"CorrBDF2": "Corr-BDF2", "ID1BDF2": "ID1-BDF2", "ID2BDF2": "ID2-BDF2", "ID3BDF2": "ID3-BDF2"}.get(
            self.value, self.value
        )

    @classmethod
    def parse(cls, name: str | Scheme) -> Scheme:
        if isinstance(name, Scheme):
            return name
        key = name.replace("-", "").replace("_", "").lower()
        for s in cls:
            if s.value.lower() == key:
                return s
        raise ValueError(f"unknown scheme {name!r}; choose from {[s.value for s in cls]}")


class IncompatibleScheme(ValueError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    T: float
    N: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"need N >= 2 steps, got {self.N}")
        if not self.T > 0:
            raise ValueError(f"final time must be positive, got {self.T}")

    @property
    def tau(self) -> float:
        return self.T / self.N

    @property
    def times(self) -> np.ndarray:
        t = self.tau * np.arange(self.N + 1)
        t[-1] = self.T
        return t


@dataclass
class SolveResult:
    scheme: Scheme
    grid: TimeGrid
    history: np.ndarray  # V^0 .. V^N, one row per level
    v: np.ndarray
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    wall_time: float = 0.0

    def u(self, n: int | None = None) -> np.ndarray:
        """``u^n = V^n + v``; the final level by default."""
        n = self.grid.N if n is None else n
        return self.history[n] + self.v

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.history)))


def check_compatible(scheme: Scheme, g: SourceSpec) -> None:
    """Raise :class:`IncompatibleScheme` naming the minimal admissible scheme."""
    need = g.min_order()
    if scheme.order < need:
        minimal = {1: "ID1BDF2", 2: "ID2BDF2", 3: "ID3BDF2"}[need]
        raise IncompatibleScheme(
            f"{scheme.value} cannot handle source exponents {g.exponents}; use {minimal} or higher"
        )


def rhs_at_step(
    scheme: Scheme,
    n: int,
    grid: TimeGrid,
    Av: np.ndarray,
    reg: RegularizedSource,
    corr_every_step: bool = False,
) -> np.ndarray:
    """Right-hand side of the scheme at level ``n >= 1``."""
    if n < 1:
        raise ValueError(f"step index must be >= 1, got {n}")
    if reg.k != scheme.order:
        raise ValueError(f"{scheme.value} needs J^{scheme.order} g, got J^{reg.k} g")
    G = reg.values
    if scheme is Scheme.BDF2:
        return Av + G[n]
    if scheme is Scheme.CorrBDF2:
        if n == 1 or corr_every_step:
            return 1.5 * Av + 0.5 * G[0] + G[n]
        return Av + G[n]
    p = scheme.order
    w = bdf2_power_weights(p, 2 * p)
    # the polynomial part in step units: sum_j w_j (n - j)^p / p! is exact
    # (dyadic weights, integer powers), so only J^k g carries cancellation
    js = range(min(n, 2 * p) + 1)
    coef = sum(w[j] * (n - j) ** p for j in js) / math.factorial(p)
    acc = np.zeros_like(Av)
    for j in js:
        acc = acc + w[j] * G[n - j]
    return coef * Av + acc / grid.tau**p


def step(
    A: SpatialOperator,
    n: int,
    grid: TimeGrid,
    alpha: float,
    weights: np.ndarray,
    history: np.ndarray,
    rhs: np.ndarray,
) -> np.ndarray:
    """Solve ``(w_0 tau^-alpha I - A) V^n = rhs - tau^-alpha sum_{j>=1} w_j V^(n-j)``.

    ``history`` rows ``0 .. n-1`` must hold ``V^0 .. V^(n-1)``; row ``n`` is written.
    """
    scale = grid.tau ** (-alpha)
    memory = weights[n:0:-1] @ history[:n]
    x = A.solve_shifted(weights[0] * scale, rhs - scale * memory)
    history[n] = x
    return x


def solve(
    scheme: Scheme | str,
    grid: TimeGrid,
    A: SpatialOperator,
    alpha: float,
    v: np.ndarray,
    g: SourceSpec,
    rule_size: int = DEFAULT_NODES,
    corr_every_step: bool = False,
) -> SolveResult:
    """Advance the scheme from ``V^0 = 0`` to ``t = T``.

    For Corr-BDF2 with a source unbounded at ``t = 0`` the first step sees
    ``g^0 = NaN`` and the whole history comes out NaN; plain BDF2 never
    touches ``g^0``.
    """
    scheme = Scheme.parse(scheme)
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    check_compatible(scheme, g)
    start = time.perf_counter()
    v = np.asarray(v, dtype=float)
    Av = A.apply(v)
    reg = tabulate_regularized(g, scheme.order, grid.times, A.size, rule_size, singular="nan")
    weights = cq_weights(alpha, grid.N)
    history = np.zeros((grid.N + 1, A.size))
    residuals = np.zeros(grid.N + 1)
    shift = weights[0] * grid.tau ** (-alpha)
    with np.errstate(invalid="ignore"):
        for n in range(1, grid.N + 1):
            rhs = rhs_at_step(scheme, n, grid, Av, reg, corr_every_step)
            x = step(A, n, grid, alpha, weights, history, rhs)
            memory = weights[n:0:-1] @ history[:n]
            eff = rhs - grid.tau ** (-alpha) * memory
            residuals[n] = np.linalg.norm(shift * x - A.apply(x) - eff)
    return SolveResult(scheme, grid, history, v, residuals, time.perf_counter() - start)
