"""Weakly singular sources and their k-fold time integrals.

A source is a sum of terms, each one of

* ``Monomial(mu, q)``      g = t^mu q(x)
* ``Product(mu, f)``       g = t^mu f(x, t)
* ``Convolution(mu, f)``   g = (t^mu * f)(t) = int_0^t (t - s)^mu f(x, s) ds

Time callables ``f`` take an array of times of shape ``(m,)`` and return
``(m,)`` (spatially constant) or ``(m, nx)`` values. The k-fold integral
``J^k g = t^(k-1)/(k-1)! * g`` is evaluated in closed form for monomials and
with Gauss-Jacobi rules otherwise, the singular factors going into the
Jacobi weight. For exponents below -1 the integrals are Hadamard finite
parts (analytic continuation in ``mu``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .quadrature import DEFAULT_NODES, NonFiniteIntegrand, integrate, jacobi_rule

TimeCallable = Callable[[np.ndarray], np.ndarray]


class SingularAtZero(ArithmeticError):
    """The source itself is unbounded at t = 0."""


class NonIntegrableSource(ValueError):
    """The requested k-fold integral does not exist for this exponent."""


@dataclass(frozen=True)
class Monomial:
    mu: float
    q: np.ndarray | float = 1.0


@dataclass(frozen=True)
class Product:
    mu: float
    f: TimeCallable


@dataclass(frozen=True)
class Convolution:
    mu: float
    f: TimeCallable


Term = Union[Monomial, Product, Convolution]


@dataclass(frozen=True)
class SourceSpec:
    """Additive list of source terms."""

    terms: tuple[Term, ...]

    def __init__(self, terms: Term | Sequence[Term]):
        if isinstance(terms, (Monomial, Product, Convolution)):
            terms = (terms,)
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def exponents(self) -> list[float]:
        return [term.mu for term in self.terms]

    def min_order(self) -> int:
        """Smallest k for which every term has a usable J^k g (k = 0 means raw g)."""
        return max((_min_order(term) for term in self.terms), default=0)


@dataclass
class RegularizedSource:
    k: int
    values: np.ndarray  # shape (N + 1, nx), row n holds J^k g(t_n)


def _rising(mu: float, k: int) -> float:
    return math.prod(mu + i for i in range(1, k + 1))


def _min_order(term: Term) -> int:
    if isinstance(term, Convolution):
        if not term.mu > -1:
            raise NonIntegrableSource(f"convolution exponent must exceed -1, got {term.mu}")
        return 0
    if term.mu > -1:
        return 0
    if not term.mu > -2 or float(term.mu).is_integer():
        raise NonIntegrableSource(f"no finite-part integral for exponent {term.mu}")
    return math.floor(-term.mu) + 1


def _check_order(mu: float, k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not mu + k > 0:
        raise NonIntegrableSource(f"J^{k} t^{mu} is unbounded at t = 0 (need mu + k > 0)")
    if _rising(mu, k) == 0.0:
        raise NonIntegrableSource(f"J^{k} t^{mu} has a pole at mu = {mu}")


def jk_monomial(mu: float, k: int, t: float) -> float:
    """Time factor of ``J^k (t^mu q)``: ``t^(mu+k) / ((mu+1)(mu+2)...(mu+k))``."""
    _check_order(mu, k)
    if t <= 0:
        return 0.0
    return t ** (mu + k) / _rising(mu, k)


def jk_product(mu: float, f: TimeCallable, k: int, t: float, rule_size: int = DEFAULT_NODES):
    """``J^k (s^mu f(s))(t)`` via ``s = t sigma`` and a Jacobi(mu, k-1) rule.

    For ``-2 < mu <= -1`` the finite part is used: ``f(0)`` carries the
    continued Beta factor and ``(f(t sigma) - f(0)) / sigma`` the rest.
    """
    _check_order(mu, k)
    if t <= 0:
        return 0.0 * np.asarray(f(np.zeros(1)), dtype=float)[0]
    scale = t ** (mu + k) / math.factorial(k - 1)
    if mu > -1:
        rule = jacobi_rule(mu, k - 1, rule_size)
        return scale * integrate(rule, lambda s: f(t * s))
    f0 = np.asarray(f(np.zeros(1)), dtype=float)[0]
    # B(mu+1, k) continued past the pole at mu = -1
    beta_fp = math.gamma(mu + 1) * math.gamma(k) / math.gamma(mu + k + 1)
    rule = jacobi_rule(mu + 1, k - 1, rule_size)
    rest = integrate(rule, lambda s: (np.asarray(f(t * s), dtype=float) - f0) / _col(s, f0))
    return scale * (f0 * beta_fp + rest)


def _col(s: np.ndarray, like) -> np.ndarray:
    # broadcast node array against (m,) or (m, nx) integrand values
    return s if np.ndim(like) == 0 else s[:, None]


def jk_convolution(mu: float, f: TimeCallable, k: int, t: float, rule_size: int = DEFAULT_NODES):
    """``J^k (t^mu * f)(t) = Gamma(mu+1)/Gamma(mu+k+1) int_0^t (t-s)^(mu+k) f(s) ds``."""
    if not mu > -1:
        raise NonIntegrableSource(f"convolution exponent must exceed -1, got {mu}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if t <= 0:
        return 0.0 * np.asarray(f(np.zeros(1)), dtype=float)[0]
    rule = jacobi_rule(0.0, mu + k, rule_size)
    factor = math.exp(math.lgamma(mu + 1) - math.lgamma(mu + k + 1)) * t ** (mu + k + 1)
    return factor * integrate(rule, lambda s: f(t * s))


def _eval_term(term: Term, t: float, rule_size: int):
    if isinstance(term, Monomial):
        if t == 0 and term.mu < 0:
            raise SingularAtZero(f"t^{term.mu} is singular at t = 0")
        return (t**term.mu if t > 0 else float(term.mu == 0)) * np.asarray(term.q, dtype=float)
    if isinstance(term, Product):
        if t == 0 and term.mu < 0:
            raise SingularAtZero(f"t^{term.mu} f(t) is singular at t = 0")
        f_t = np.asarray(term.f(np.array([t])), dtype=float)[0]
        return (t**term.mu if t > 0 else float(term.mu == 0)) * f_t
    if isinstance(term, Convolution):
        if not term.mu > -1:
            raise NonIntegrableSource(f"convolution exponent must exceed -1, got {term.mu}")
        if t <= 0:
            return 0.0 * np.asarray(term.f(np.zeros(1)), dtype=float)[0]
        rule = jacobi_rule(0.0, term.mu, rule_size)
        return t ** (term.mu + 1) * integrate(rule, lambda s: term.f(t * s))
    raise TypeError(f"unknown source term {term!r}")


def _jk_term(term: Term, k: int, t: float, rule_size: int):
    if isinstance(term, Monomial):
        return jk_monomial(term.mu, k, t) * np.asarray(term.q, dtype=float)
    if isinstance(term, Product):
        return jk_product(term.mu, term.f, k, t, rule_size)
    if isinstance(term, Convolution):
        return jk_convolution(term.mu, term.f, k, t, rule_size)
    raise TypeError(f"unknown source term {term!r}")


def eval_source(g: SourceSpec, t: float, rule_size: int = DEFAULT_NODES):
    """Pointwise ``g(., t)``, summing the terms. Raises :class:`SingularAtZero` at t = 0 when unbounded."""
    return sum(_eval_term(term, t, rule_size) for term in g.terms)


def eval_regularized(g: SourceSpec, k: int, t: float, rule_size: int = DEFAULT_NODES):
    """``J^k g(t)``; ``k = 0`` is ``g`` itself."""
    if k == 0:
        return eval_source(g, t, rule_size)
    return sum(_jk_term(term, k, t, rule_size) for term in g.terms)


def tabulate_regularized(
    g: SourceSpec,
    k: int,
    times: np.ndarray,
    nx: int,
    rule_size: int = DEFAULT_NODES,
    singular: str = "raise",
) -> RegularizedSource:
    """Tabulate ``J^k g`` at every time node.

    Row 0 is exactly zero for ``k >= 1``. With ``k = 0`` and a source that is
    unbounded at ``t = 0``, ``singular="raise"`` propagates
    :class:`SingularAtZero` and ``singular="nan"`` stores a NaN row instead.
    """
    if k not in (0, 1, 2, 3):
        raise ValueError(f"k must be one of 0..3, got {k}")
    if singular not in ("raise", "nan"):
        raise ValueError(f"singular must be 'raise' or 'nan', got {singular!r}")
    times = np.asarray(times, dtype=float)
    values = np.zeros((times.size, nx))
    for n, t in enumerate(times):
        if k >= 1 and t == 0:
            continue
        try:
            values[n] = eval_regularized(g, k, float(t), rule_size)
        except SingularAtZero:
            if singular == "raise":
                raise
            values[n] = np.nan
        except NonFiniteIntegrand as exc:
            raise NonFiniteIntegrand(f"J^{k} g at t = {t}: {exc}") from exc
    return RegularizedSource(k, values)
