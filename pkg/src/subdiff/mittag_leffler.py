"""Two-parameter Mittag-Leffler function by direct power series.

    E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta)

For real ``|z| <= 30``. When the terms of the series alternate and grow far
beyond the size of the result (negative ``z``, small ``alpha``), the sum is
carried out in extended precision with enough digits to absorb the
cancellation; otherwise a compensated double-precision sum is used.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath

Z_MAX = 30.0
TERM_RTOL = 1e-16
_LOG_RTOL = math.log(TERM_RTOL) - 3.0
_LOG_ATOL = math.log(1e-22)
MAX_TERMS = 1_000_000
# tolerated digits of cancellation before leaving double precision
_DOUBLE_CANCEL_DIGITS = 1.0
_GUARD_DIGITS = 20
# working precision beyond this is refused rather than ground through
MAX_DIGITS = 2000


class MLDomainError(ValueError):
    """Argument outside the window where the series is used."""


def _log_rgamma_abs(x: float) -> float:
    # log|1/Gamma(x)|, -inf at the poles
    if x <= 0 and x == math.floor(x):
        return -math.inf
    return -math.lgamma(x)


def _rgamma(x: float) -> float:
    if x <= 0 and x == math.floor(x):
        return 0.0
    if x < 171.0:
        return 1.0 / math.gamma(x)
    return 0.0 if x > 1e300 else math.exp(-math.lgamma(x))


def _term_profile(alpha: float, beta: float, z: float) -> tuple[float, int]:
    """(log of the largest |term|, number of terms to sum)."""
    logz = math.log(abs(z))
    # terms shrink once alpha*k + beta exceeds |z|^(1/alpha)
    turn = abs(z) ** (1.0 / alpha)
    peak = -math.inf
    for k in range(MAX_TERMS):
        x = alpha * k + beta
        lt = k * logz + _log_rgamma_abs(x)
        peak = max(peak, lt)
        if x > turn and x > 1.0 and lt < peak + _LOG_RTOL and lt < _LOG_ATOL:
            return peak, k + 1
    raise MLDomainError(f"series for E_({alpha},{beta})({z}) needs more than {MAX_TERMS} terms")


def _sum_double(alpha: float, beta: float, z: float, nterms: int) -> float:
    logz = math.log(abs(z))
    terms = []
    for k in range(nterms):
        x = alpha * k + beta
        if x < 171.0 and k < 300:
            terms.append(z**k * _rgamma(x))
            continue
        sign = -1.0 if (z < 0 and k % 2) else 1.0
        if x < 0:
            sign *= math.copysign(1.0, math.gamma(x))
        terms.append(sign * math.exp(k * logz + _log_rgamma_abs(x)))
    return math.fsum(terms)


def _rational_step(alpha: float) -> Fraction | None:
    frac = Fraction(alpha).limit_denominator(64)
    if abs(float(frac) - alpha) <= 4.0 * math.ulp(alpha):
        return frac
    return None


def _sum_mp(alpha: float, beta: float, z: float, nterms: int, dps: int) -> mpmath.mpf:
    with mpmath.workdps(dps):
        step = _rational_step(alpha)
        a = mpmath.mpf(step.numerator) / step.denominator if step else mpmath.mpf(alpha)
        b = mpmath.mpf(beta)
        zz = mpmath.mpf(z)
        total = mpmath.mpf(0)
        power = mpmath.mpf(1)
        # with a = p/q: Gamma(a(k+q) + b) = Gamma(a k + b) * (a k + b)(a k + b + 1)...(a k + b + p - 1)
        gammas: list = []
        for k in range(nterms):
            x = a * k + b
            prev = gammas[k - step.denominator] if step and k >= step.denominator else None
            if prev is not None:
                g = prev
                y = x - step.numerator
                for i in range(step.numerator):
                    g *= y + i
            elif x <= 0 and x == int(x):
                g = None
            else:
                g = mpmath.gamma(x)
            gammas.append(g)
            if g is not None:
                total += power / g
            power *= zz
        return total


def ml(alpha: float, beta: float, z: float) -> float:
    """Evaluate ``E_{alpha,beta}(z)`` for real ``z`` with ``|z| <= 30``.

    Raises :class:`MLDomainError` for ``|z| > 30``, ``alpha <= 0``, or when
    cancellation would need more than ``MAX_DIGITS`` working digits (small
    ``alpha`` with large negative ``z``, e.g. ``alpha = 0.2, z = -10``).
    """
    if not alpha > 0:
        raise MLDomainError(f"alpha must be positive, got {alpha}")
    if not math.isfinite(z) or abs(z) > Z_MAX:
        raise MLDomainError(f"|z| must be <= {Z_MAX}, got {z}")
    if z == 0.0:
        return _rgamma(beta)
    # the largest term is roughly exp(|z|^(1/alpha)); refuse hopeless cases before scanning
    if z < 0 and math.log(-z) / alpha > math.log(4 * MAX_DIGITS * math.log(10.0)):
        raise MLDomainError(_precision_message(alpha, beta, z))
    peak, nterms = _term_profile(alpha, beta, z)
    if z > 0 and beta > 0 or peak <= _DOUBLE_CANCEL_DIGITS * math.log(10.0):
        return _sum_double(alpha, beta, z, nterms)
    dps = int(peak / math.log(10.0)) + _GUARD_DIGITS
    if dps > MAX_DIGITS:
        raise MLDomainError(_precision_message(alpha, beta, z))
    while True:
        value = _sum_mp(alpha, beta, z, nterms, dps)
        # digits lost to cancellation must stay inside the guard band
        if value != 0:
            lost = peak / math.log(10.0) - float(mpmath.log10(abs(value)))
            if lost < dps - 17:
                return float(value)
        dps *= 2
        if dps > 4 * MAX_DIGITS:
            raise MLDomainError(_precision_message(alpha, beta, z))


def _precision_message(alpha: float, beta: float, z: float) -> str:
    return f"E_({alpha},{beta})({z}) cancels beyond {MAX_DIGITS} digits; outside the series window"
