"""Self-convergence and oracle sweeps over (scheme, N).

A sweep solves every scheme at every N of the config plus ``2 * N[-1]``,
keeps ``u^N(T)`` and reports ``||u^N - u^(2N)||`` together with the
empirical rate ``log2(e(N/2) / e(N))``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from .oracle import SeparableProblem, exact_solution, scalar_reference
from .quadrature import DEFAULT_NODES
from .solver import IncompatibleScheme, Scheme, TimeGrid, check_compatible, solve
from .source import Convolution, Monomial, NonIntegrableSource, Product, SourceSpec
from .space import SpatialOperator, ScalarOperator, eigenpairs, make_operator, nodal_l2_norm

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
INCOMPATIBLE = "incompatible"


class ConfigError(ValueError):
    """Invalid experiment config; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass
class ExperimentConfig:
    alpha: float
    mu: float
    N: list[int]
    schemes: list[str]
    T: float = 1.0
    beta: float = 0.0
    operator: str = "product"
    source: str = "benchmark"
    initial: str = "benchmark"
    q: str = "benchmark"
    space: str = "cheb"
    res: float = 32
    norm: str = "nodal"
    nodes: int = DEFAULT_NODES
    corr_every_step: bool = False
    allow_incompatible: bool = False
    workers: int = 1
    format: str = "both"
    name: str = ""
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(unknown[0], "unknown key")
        for key in ("alpha", "mu", "N", "schemes"):
            if key not in data:
                raise ConfigError(key, "missing required key")
        try:
            cfg = cls(**data)
        except TypeError as exc:  # pragma: no cover - guarded by the key checks
            raise ConfigError("config", str(exc)) from exc
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> ExperimentConfig:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"not valid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def validate(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {self.schema_version}")
        if not isinstance(self.alpha, (int, float)) or not 0 < self.alpha < 1:
            raise ConfigError("alpha", f"must lie in (0, 1), got {self.alpha!r}")
        if not isinstance(self.mu, (int, float)):
            raise ConfigError("mu", f"must be a number, got {self.mu!r}")
        if not isinstance(self.T, (int, float)) or not self.T > 0:
            raise ConfigError("T", f"must be positive, got {self.T!r}")
        if not isinstance(self.N, list) or not self.N or not all(isinstance(n, int) and n >= 2 for n in self.N):
            raise ConfigError("N", "must be a non-empty list of integers >= 2")
        if any(b != 2 * a for a, b in zip(self.N, self.N[1:])):
            raise ConfigError("N", f"each entry must double the previous one, got {self.N}")
        if not isinstance(self.schemes, list) or not self.schemes:
            raise ConfigError("schemes", "must be a non-empty list")
        for s in self.schemes:
            try:
                Scheme.parse(s)
            except ValueError as exc:
                raise ConfigError("schemes", str(exc)) from exc
        if self.operator not in ("product", "convolution"):
            raise ConfigError("operator", f"must be 'product' or 'convolution', got {self.operator!r}")
        if self.source not in ("benchmark", "monomial"):
            raise ConfigError("source", f"must be 'benchmark' or 'monomial', got {self.source!r}")
        for key in ("initial", "q"):
            value = getattr(self, key)
            if not (value in ("benchmark", "zero") or re.fullmatch(r"phi[1-9][0-9]*", str(value))):
                raise ConfigError(key, f"must be 'benchmark', 'zero' or 'phi<k>', got {value!r}")
        if self.space not in ("scalar", "fd", "cheb"):
            raise ConfigError("space", f"must be 'scalar', 'fd' or 'cheb', got {self.space!r}")
        if not isinstance(self.res, (int, float)) or not self.res > 0:
            raise ConfigError("res", f"must be positive, got {self.res!r}")
        if self.space == "scalar" and ("benchmark" in (self.initial, self.q)):
            raise ConfigError("space", "scalar mode needs phi<k>/zero data, not benchmark")
        if self.norm not in ("nodal", "quadrature"):
            raise ConfigError("norm", f"must be 'nodal' or 'quadrature', got {self.norm!r}")
        if not isinstance(self.nodes, int) or self.nodes < 1:
            raise ConfigError("nodes", f"must be a positive integer, got {self.nodes!r}")
        if not isinstance(self.beta, (int, float)) or self.beta < 0:
            raise ConfigError("beta", f"must be non-negative, got {self.beta!r}")
        if self.T > 1 and not float(self.beta).is_integer():
            raise ConfigError("T", "(1 - t)^beta with non-integer beta needs T <= 1")
        if self.format not in ("csv", "table", "both"):
            raise ConfigError("format", f"must be 'csv', 'table' or 'both', got {self.format!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers", f"must be a positive integer, got {self.workers!r}")


@dataclass
class ConvergenceTable:
    """Errors ``e(N)`` and rates; ``rates[i]`` belongs to ``Ns[i + 1]``."""

    scheme: str
    Ns: list[int]
    errors: list[float]
    rates: list[float] = field(default_factory=list)
    status: str = "ok"

    def __post_init__(self):
        if not self.rates:
            self.rates = [empirical_rate(a, b) for a, b in zip(self.errors, self.errors[1:])]

    def rows(self):
        for i, (n, e) in enumerate(zip(self.Ns, self.errors)):
            yield n, e, (self.rates[i - 1] if i > 0 else None)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    tables: list[ConvergenceTable]
    expected_nan: dict[str, bool] = field(default_factory=dict)

    def table(self, scheme: str | Scheme) -> ConvergenceTable:
        key = Scheme.parse(scheme).value
        for t in self.tables:
            if t.scheme == key:
                return t
        raise KeyError(key)

    @property
    def unexpected_nonfinite(self) -> list[str]:
        bad = []
        for t in self.tables:
            if t.status == "ok" and not all(math.isfinite(e) for e in t.errors) and not self.expected_nan.get(t.scheme):
                bad.append(t.scheme)
        return bad


def self_difference(A: SpatialOperator | None, uA, uB, weighted: bool = True) -> float:
    """Norm of ``uA - uB`` on a shared grid: quadrature-weighted by default, nodal otherwise."""
    uA = np.asarray(uA, dtype=float)
    uB = np.asarray(uB, dtype=float)
    if uA.shape != uB.shape:
        raise ValueError(f"grid mismatch: {uA.shape} vs {uB.shape}")
    if weighted:
        if A is None:
            raise ValueError("weighted norm needs the spatial operator")
        return A.l2_norm(uA - uB)
    return nodal_l2_norm(uA - uB)


def empirical_rate(e_coarse: float, e_fine: float) -> float:
    """``log2(e_coarse / e_fine)``; NaN in, NaN out."""
    if math.isnan(e_coarse) or math.isnan(e_fine):
        return math.nan
    if e_coarse <= 0 or e_fine <= 0 or math.isinf(e_coarse) or math.isinf(e_fine):
        return math.nan
    return math.log2(e_coarse / e_fine)


# -- problem data -----------------------------------------------------------


def _profile(name: str, x: np.ndarray) -> np.ndarray:
    if name == "zero":
        return np.zeros_like(x)
    if name.startswith("phi"):
        _, phi = eigenpairs(int(name[3:]))[-1]
        return phi(x)
    raise ValueError(name)


def initial_data(cfg: ExperimentConfig, A: SpatialOperator) -> np.ndarray:
    x = A.nodes
    if cfg.initial == "benchmark":
        return np.sin(x) * np.sqrt(1.0 - x**2)
    if isinstance(A, ScalarOperator):
        return np.zeros(1) if cfg.initial == "zero" else np.ones(1)
    return _profile(cfg.initial, x)


def source_profile(cfg: ExperimentConfig, A: SpatialOperator) -> np.ndarray:
    x = A.nodes
    if cfg.q == "benchmark":
        return np.exp(x) * (1.0 + ((x > 0) & (x < 1)))
    if isinstance(A, ScalarOperator):
        return np.zeros(1) if cfg.q == "zero" else np.ones(1)
    return _profile(cfg.q, x)


def build_source(cfg: ExperimentConfig, A: SpatialOperator) -> SourceSpec:
    """``(1 + t^mu + t^(alpha mu)) o (1 - t)^beta q(x)`` or the monomial ``t^mu q(x)``."""
    q = source_profile(cfg, A)
    if cfg.source == "monomial":
        return SourceSpec(Monomial(float(cfg.mu), q))
    beta = float(cfg.beta)

    def f(t, beta=beta, q=q):
        return np.outer((1.0 - np.asarray(t, dtype=float)) ** beta, q)

    term = Product if cfg.operator == "product" else Convolution
    return SourceSpec([term(0.0, f), term(float(cfg.mu), f), term(cfg.alpha * cfg.mu, f)])


def build_operator(cfg: ExperimentConfig) -> SpatialOperator:
    if cfg.space == "scalar":
        modes = [int(s[3:]) for s in (cfg.initial, cfg.q) if s.startswith("phi")]
        if len(set(modes)) > 1:
            raise ConfigError("space", "scalar mode represents a single eigenmode")
        k = modes[0] if modes else 1
        return ScalarOperator(eigenpairs(k)[-1][0])
    return make_operator(cfg.space, cfg.res)


def _singular_at_zero(g: SourceSpec) -> bool:
    return any(isinstance(t, (Monomial, Product)) and t.mu < 0 for t in g.terms)


# -- sweeps -----------------------------------------------------------------


def _final_states(cfg: ExperimentConfig, A, v, g, scheme: Scheme, Ns: list[int]) -> dict[int, np.ndarray]:
    def one(N):
        result = solve(scheme, TimeGrid(cfg.T, N), A, cfg.alpha, v, g, cfg.nodes, cfg.corr_every_step)
        logger.debug("%s N=%d solved in %.3fs", scheme.value, N, result.wall_time)
        return N, result.u()

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return dict(pool.map(one, Ns))
    return dict(map(one, Ns))


def _screen(cfg: ExperimentConfig, g: SourceSpec) -> dict[str, str]:
    status = {}
    for name in cfg.schemes:
        scheme = Scheme.parse(name)
        try:
            check_compatible(scheme, g)
            status[scheme.value] = "ok"
        except (IncompatibleScheme, NonIntegrableSource) as exc:
            if not cfg.allow_incompatible:
                raise ConfigError("schemes", str(exc)) from exc
            status[scheme.value] = INCOMPATIBLE
    return status


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Self-convergence sweep: one :class:`ConvergenceTable` per scheme."""
    A = build_operator(cfg)
    v = initial_data(cfg, A)
    g = build_source(cfg, A)
    status = _screen(cfg, g)
    weighted = cfg.norm == "quadrature"
    Ns = list(cfg.N) + [2 * cfg.N[-1]]
    tables, expected = [], {}
    for name in cfg.schemes:
        scheme = Scheme.parse(name)
        if status[scheme.value] == INCOMPATIBLE:
            tables.append(ConvergenceTable(scheme.value, list(cfg.N), [math.nan] * len(cfg.N), [], INCOMPATIBLE))
            continue
        finals = _final_states(cfg, A, v, g, scheme, Ns)
        errors = [self_difference(A, finals[N], finals[2 * N], weighted) for N in cfg.N]
        tables.append(ConvergenceTable(scheme.value, list(cfg.N), errors))
        expected[scheme.value] = scheme is Scheme.CorrBDF2 and _singular_at_zero(g)
    return ExperimentResult(cfg, tables, expected)


def separable_problem(cfg: ExperimentConfig) -> SeparableProblem:
    if cfg.source != "monomial" or "benchmark" in (cfg.initial, cfg.q):
        raise ConfigError("source", "oracle check needs a monomial source with phi<k>/zero data")

    def coeffs(name):
        if name == "zero":
            return []
        k = int(name[3:])
        return [0.0] * (k - 1) + [1.0]

    return SeparableProblem(cfg.alpha, float(cfg.mu), coeffs(cfg.initial), coeffs(cfg.q))


def run_oracle_check(cfg: ExperimentConfig) -> ExperimentResult:
    """Direct errors ``||u^N(T) - u(T)||`` against the separable exact solution."""
    problem = separable_problem(cfg)
    if not problem.mu > -1:
        raise ConfigError("mu", "oracle check needs mu > -1")
    A = build_operator(cfg)
    v = initial_data(cfg, A)
    g = build_source(cfg, A)
    status = _screen(cfg, g)
    if isinstance(A, ScalarOperator):
        vk = problem.v_coeffs[-1] if problem.v_coeffs else 0.0
        qk = problem.q_coeffs[-1] if problem.q_coeffs else 0.0
        exact = np.array([scalar_reference(cfg.alpha, A.lam, problem.mu, cfg.T, vk, qk)])
    else:
        exact = exact_solution(problem, cfg.T, A.nodes)
    weighted = cfg.norm == "quadrature"
    tables = []
    for name in cfg.schemes:
        scheme = Scheme.parse(name)
        if status[scheme.value] == INCOMPATIBLE:
            tables.append(ConvergenceTable(scheme.value, list(cfg.N), [math.nan] * len(cfg.N), [], INCOMPATIBLE))
            continue
        finals = _final_states(cfg, A, v, g, scheme, list(cfg.N))
        errors = [self_difference(A, finals[N], exact, weighted) for N in cfg.N]
        tables.append(ConvergenceTable(scheme.value, list(cfg.N), errors))
    return ExperimentResult(cfg, tables)


# -- output -----------------------------------------------------------------


def _fmt(x: float | None, spec: str) -> str:
    if x is None:
        return ""
    if math.isnan(x):
        return "NaN"
    return format(x, spec)


def to_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["scheme", "N", "error", "rate"])
    for t in result.tables:
        for n, e, r in t.rows():
            if t.status == INCOMPATIBLE:
                writer.writerow([t.scheme, n, INCOMPATIBLE, ""])
            else:
                writer.writerow([t.scheme, n, _fmt(e, ".10e"), _fmt(r, ".10f")])
    return buf.getvalue()


def to_text(result: ExperimentResult, title: str = "") -> str:
    cfg = result.config
    Ns = cfg.N
    head = f"{'Scheme':<12}{'mu':>8}  " + "".join(f"{'N=' + str(n):>13}" for n in Ns)
    lines = []
    if title:
        lines.append(title)
    lines += [head, "-" * len(head)]
    for t in result.tables:
        label = Scheme.parse(t.scheme).label
        if t.status == INCOMPATIBLE:
            lines.append(f"{label:<12}{cfg.mu:>8g}  " + "".join(f"{INCOMPATIBLE:>13}" for _ in Ns))
            continue
        lines.append(f"{label:<12}{cfg.mu:>8g}  " + "".join(f"{_fmt(e, '.4e'):>13}" for e in t.errors))
        lines.append(f"{'':<12}{'':>8}  {'':>13}" + "".join(f"{_fmt(r, '.4f'):>13}" for r in t.rates))
    return "\n".join(lines) + "\n"


def describe(cfg: ExperimentConfig) -> str:
    if cfg.source == "monomial":
        src = f"t^{cfg.mu:g} {cfg.q}"
    else:
        op = "." if cfg.operator == "product" else "*"
        src = f"(1 + t^mu + t^(alpha mu)) {op} (1 - t)^{cfg.beta:g} q(x)"
    return f"alpha={cfg.alpha:g} mu={cfg.mu:g} T={cfg.T:g} source={src} space={cfg.space}({cfg.res:g}) norm={cfg.norm}"


def write_outputs(result: ExperimentResult, out_dir: str | Path, stem: str) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    fmt = result.config.format
    if fmt in ("csv", "both"):
        path = out / f"{stem}.csv"
        path.write_text(to_csv(result))
        written.append(path)
    if fmt in ("table", "both"):
        path = out / f"{stem}.txt"
        path.write_text(to_text(result, describe(result.config)))
        written.append(path)
    return written
