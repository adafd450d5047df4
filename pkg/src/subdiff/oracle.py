"""Exact solutions by separation of variables, for monomial sources t^mu q(x).

With ``A phi_k = -lam_k phi_k``, each mode solves the scalar problem
``D^alpha y + lam y = t^mu q_k, y(0) = v_k``, whose solution is

    y(t) = E_{alpha,1}(-lam t^alpha) v_k
           + Gamma(mu + 1) t^(alpha + mu) E_{alpha, alpha + mu + 1}(-lam t^alpha) q_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mittag_leffler import ml
from .space import eigenpairs


@dataclass
class SeparableProblem:
    alpha: float
    mu: float
    v_coeffs: list[float] = field(default_factory=list)
    q_coeffs: list[float] = field(default_factory=list)

    def __post_init__(self):
        if not self.mu > -1:
            raise ValueError(f"exact solution needs mu > -1, got {self.mu}")

    @property
    def k_max(self) -> int:
        return max(len(self.v_coeffs), len(self.q_coeffs))


def scalar_reference(alpha: float, lam: float, mu: float, t: float, v: float = 0.0, q: float = 1.0) -> float:
    """Exact ``y(t)`` for ``D^alpha y + lam y = t^mu q``, ``y(0) = v``."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if t == 0:
        return float(v)
    z = -lam * t**alpha
    out = 0.0
    if v:
        out += ml(alpha, 1.0, z) * v
    if q:
        out += math.gamma(mu + 1.0) * t ** (alpha + mu) * ml(alpha, alpha + mu + 1.0, z) * q
    return out


def exact_solution(p: SeparableProblem, t: float, x) -> np.ndarray:
    """``u(x, t)`` at the points ``x`` (modal sum over the stored coefficients)."""
    x = np.asarray(x, dtype=float)
    u = np.zeros_like(x)
    for k, (lam, phi) in enumerate(eigenpairs(p.k_max)):
        vk = p.v_coeffs[k] if k < len(p.v_coeffs) else 0.0
        qk = p.q_coeffs[k] if k < len(p.q_coeffs) else 0.0
        if vk or qk:
            u = u + scalar_reference(p.alpha, lam, p.mu, t, vk, qk) * phi(x)
    return u
