"""Real-valued special functions used by the density and MGF code.

Everything here works on plain floats; the Bessel routines also accept numpy
arrays for ``x`` so that quadrature nodes can be evaluated in one call.

The hypergeometric series are summed in the log domain whenever every term is
positive, which is the case at all call sites inside the package. Arguments in
the hundreds or thousands (large ``kappa * mu``) are therefore safe.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

__all__ = [
    "DomainError",
    "ln_gamma",
    "bessel_i",
    "log_bessel_i",
    "log_bessel_i_reduced",
    "hyp2f1",
    "log_hyp2f1",
    "hyp1f1",
    "log_hyp1f1",
]

_EPS = np.finfo(float).eps
_CHUNK = 4096
_MAX_TERMS = 20_000_000
_KUMMER_TERMS = 64


class DomainError(ValueError):
    """Argument outside the domain where a special function is implemented."""


def _require_finite(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value!r}")


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

def ln_gamma(x: float) -> float:
    """Return ``log(Gamma(x))`` for ``x > 0``."""
    x = float(x)
    _require_finite(x=x)
    if x <= 0.0:
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


# ---------------------------------------------------------------------------
# Modified Bessel function of the first kind
# ---------------------------------------------------------------------------

def _check_bessel_args(nu: float, x: np.ndarray) -> None:
    _require_finite(nu=nu)
    if nu <= -1.0:
        raise DomainError(f"Bessel order must be > -1, got {nu!r}")
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("Bessel argument must be >= 0")


_HANKEL_FROM = 1e6


def _log_ive_hankel(nu: float, x: np.ndarray) -> np.ndarray:
    """``log(exp(-x) I_nu(x))`` from the large-argument Hankel expansion.

    Used for ``x > 1e6`` (scipy's ``ive`` returns NaN from about 3e9); with
    ``nu <= 50`` the fourth-order truncation error is below 1e-14.
    """
    four_nu2 = 4.0 * nu * nu
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 6):
        term = -term * (four_nu2 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        total = total + term
    return np.log(total) - 0.5 * np.log(2.0 * np.pi * x)


def log_bessel_i_reduced(nu: float, x):
    """Return ``log(x**-nu * I_nu(x))``.

    The reduced function is finite and positive at ``x = 0`` where it equals
    ``2**-nu / Gamma(nu + 1)``, which is what lets a density carry the ``d**nu``
    factor of its prefactor through the ``d -> 0`` limit without ``0 * inf``.
    """
    nu = float(nu)
    xa = np.asarray(x, dtype=float)
    _check_bessel_args(nu, xa)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = np.empty_like(xa)

    small = xa <= 1.0
    if np.any(small):
        # sum_k (x^2/4)^k / (k! Gamma(k+nu+1)), ratio <= 1/(4 k (k+nu)) on x <= 1
        q = 0.25 * xa[small] ** 2
        term = np.ones_like(q)
        total = np.ones_like(q)
        for k in range(1, 40):
            term = term * q / (k * (k + nu))
            total += term
            if np.all(term <= _EPS * total):
                break
        out[small] = np.log(total) - nu * math.log(2.0) - math.lgamma(nu + 1.0)

    big = ~small
    if np.any(big):
        xb = xa[big]
        finite = np.isfinite(xb)
        vals = np.full_like(xb, np.inf)
        xf = xb[finite]
        mid = xf <= _HANKEL_FROM
        xm = xf[mid]
        xl = xf[~mid]
        part = np.empty_like(xf)
        part[mid] = np.log(special.ive(nu, xm))
        part[~mid] = _log_ive_hankel(nu, xl)
        vals[finite] = part + xf - nu * np.log(xf)
        out[big] = vals
    return float(out[0]) if scalar else out


def log_bessel_i(nu: float, x):
    """Return ``log(I_nu(x))``; ``-inf`` where ``I_nu(x) == 0`` (``x = 0``, ``nu > 0``)."""
    nu = float(nu)
    xa = np.asarray(x, dtype=float)
    red = np.asarray(log_bessel_i_reduced(nu, xa), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logx = np.log(xa)
        res = np.where(xa > 0, red + nu * logx, np.nan)
    if np.any(xa == 0):
        at0 = 0.0 if nu == 0 else (-np.inf if nu > 0 else np.inf)
        res = np.where(xa == 0, at0, res)
    return float(res) if res.ndim == 0 else res


def bessel_i(nu: float, x):
    """Modified Bessel function of the first kind ``I_nu(x)`` for ``nu > -1``, ``x >= 0``."""
    res = np.exp(log_bessel_i(nu, x))
    return float(res) if np.ndim(res) == 0 else res


# ---------------------------------------------------------------------------
# Series helpers
# ---------------------------------------------------------------------------

def _log_positive_series(log_ratio, log_ratio_limit: float) -> float:
    """Log of ``sum_k t_k`` with ``t_0 = 1`` and ``log(t_{k+1}/t_k) = log_ratio(k)``.

    ``log_ratio`` is vectorised over integer ``k`` and tends to
    ``log_ratio_limit`` (< 0) as ``k`` grows. All terms must be positive.
    Summation stops when a geometric bound on the tail is below machine
    precision.
    """
    log_sum = -np.inf
    log_t = 0.0
    start = 0
    while start < _MAX_TERMS:
        k = np.arange(start, start + _CHUNK, dtype=float)
        lr = log_ratio(k)
        logs = np.concatenate(([log_t], log_t + np.cumsum(lr[:-1])))
        chunk_max = logs.max()
        chunk = chunk_max + math.log(np.exp(logs - chunk_max).sum())
        log_sum = float(np.logaddexp(log_sum, chunk))
        log_t = logs[-1] + lr[-1]
        start += _CHUNK
        r = max(lr[-1], log_ratio_limit)
        if r < 0:
            tail = log_t - math.log(-math.expm1(r))
            if tail - log_sum < math.log(_EPS * 0.1):
                return log_sum
    raise DomainError("hypergeometric series did not converge within the term budget")


def _signed_series(ratio, max_terms: int = 100_000) -> float:
    """Plain float summation of ``sum_k t_k`` with ``t_0 = 1`` and ``t_{k+1} = t_k * ratio(k)``."""
    total = 1.0
    term = 1.0
    small_run = 0
    for k in range(max_terms):
        term *= ratio(k)
        total += term
        if term == 0.0:
            return total
        if abs(term) <= _EPS * abs(total):
            small_run += 1
            if small_run >= 3:
                return total
        else:
            small_run = 0
    raise DomainError("hypergeometric series did not converge within the term budget")


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1
# ---------------------------------------------------------------------------

def _check_2f1(a: float, b: float, c: float, z: float) -> None:
    _require_finite(a=a, b=b, c=c, z=z)
    if c <= 0:
        raise DomainError(f"hyp2f1 requires c > 0, got {c!r}")
    if not 0.0 <= z < 1.0:
        raise DomainError(f"hyp2f1 requires 0 <= z < 1, got {z!r}")


def _log_hyp2f1_positive(a: float, b: float, c: float, z: float) -> float:
    log_z = math.log(z)

    def log_ratio(k):
        return np.log((a + k) * (b + k) / ((c + k) * (k + 1.0))) + log_z

    return _log_positive_series(log_ratio, log_z)


def _hyp2f1_signed(a: float, b: float, c: float, z: float) -> float:
    return _signed_series(lambda k: (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z)


def log_hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Return ``log(2F1(a, b; c; z))`` for ``c > 0``, ``0 <= z < 1``.

    Requires a positive function value. Exact reductions are used when the
    series collapses: ``2F1(a, b; b; z) = (1 - z)**-a`` (and the symmetric
    case), which covers every closed-form MGF in the package.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    _check_2f1(a, b, c, z)
    if z == 0.0 or a == 0.0 or b == 0.0:
        return 0.0
    if b == c:
        return -a * math.log1p(-z)
    if a == c:
        return -b * math.log1p(-z)
    if a > 0 and b > 0:
        return _log_hyp2f1_positive(a, b, c, z)
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        value = _hyp2f1_signed(a, b, c, z)
    elif _is_nonpositive_integer(c - a) or _is_nonpositive_integer(c - b):
        # Euler: (1-z)^(c-a-b) 2F1(c-a, c-b; c; z), a terminating polynomial
        value = math.exp((c - a - b) * math.log1p(-z)) * _hyp2f1_signed(c - a, c - b, c, z)
    else:
        value = _hyp2f1_signed(a, b, c, z)
    if value <= 0:
        raise DomainError("log_hyp2f1 requires a positive function value")
    return math.log(value)


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` on ``0 <= z < 1``.

    Forward power series with term-ratio updates. Near ``z = 1`` the number
    of terms grows like ``1 / (1 - z)``; terms are accumulated in chunks in
    the log domain so that this stays cheap and overflow-free.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    _check_2f1(a, b, c, z)
    if z == 0.0:
        return 1.0
    if (a > 0 and b > 0) or b == c or a == c:
        return math.exp(log_hyp2f1(a, b, c, z))
    if _is_nonpositive_integer(c - a) or _is_nonpositive_integer(c - b):
        return math.exp((c - a - b) * math.log1p(-z)) * _hyp2f1_signed(c - a, c - b, c, z)
    return _hyp2f1_signed(a, b, c, z)


# ---------------------------------------------------------------------------
# Kummer confluent hypergeometric 1F1
# ---------------------------------------------------------------------------

def log_hyp1f1(a: float, b: float, z: float) -> float:
    """Return ``log(1F1(a; b; z))`` for ``a > 0``, ``b > 0``, ``z >= 0``.

    When ``a - b`` is a small positive integer the Kummer transformation
    gives a terminating polynomial, which is summed exactly.
    """
    a, b, z = float(a), float(b), float(z)
    _require_finite(a=a, b=b, z=z)
    if b <= 0:
        raise DomainError(f"hyp1f1 requires b > 0, got {b!r}")
    if a <= 0 or z < 0:
        raise DomainError("log_hyp1f1 requires a > 0 and z >= 0")
    if z == 0.0:
        return 0.0
    if a == b:
        return z
    n = a - b
    if n == int(n) and 0 < n <= _KUMMER_TERMS:
        # Kummer: e^z 1F1(-n; b; -z), a polynomial with positive terms
        k = np.arange(int(n))
        log_terms = np.concatenate(([0.0], np.cumsum(np.log((n - k) * z / ((b + k) * (k + 1.0))))))
        top = log_terms.max()
        return z + top + math.log(math.fsum(np.exp(log_terms - top)))
    log_z = math.log(z)

    def log_ratio(k):
        return np.log((a + k) / ((b + k) * (k + 1.0))) + log_z

    return _log_positive_series(log_ratio, -np.inf)


def hyp1f1(a: float, b: float, z: float) -> float:
    """Kummer confluent hypergeometric function ``1F1(a; b; z)``.

    For ``a > 0`` and ``z >= 0`` the value comes from the log-domain series.
    Other real ``a`` and negative ``z`` fall back to direct float summation,
    whose relative accuracy degrades roughly like ``exp(2|z|) * eps`` for
    ``z < 0``.
    """
    a, b, z = float(a), float(b), float(z)
    _require_finite(a=a, b=b, z=z)
    if b <= 0:
        raise DomainError(f"hyp1f1 requires b > 0, got {b!r}")
    if z == 0.0:
        return 1.0
    if a == b:
        return math.exp(z)
    if a > 0 and z > 0:
        return math.exp(log_hyp1f1(a, b, z))
    return _signed_series(lambda k: (a + k) / ((b + k) * (k + 1.0)) * z)
