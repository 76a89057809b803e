"""Moment generating functions ``M(s) = E[exp(-s g)]`` of the SNR models.

Three independent routes are provided:

* a numerical oracle integrating the density directly,
* exact closed forms for the eta-lambda-mu family (a rational form and a
  Gauss hypergeometric form),
* approximate closed forms for the alpha families, obtained by replacing the
  stretched exponential ``exp(-s g)`` with a four-term exponential sum in
  ``g**alpha_bar`` (see :mod:`fadingmgf.expfit`).

Closed forms never call quadrature and the oracle never calls a closed form,
so agreement between them is a meaningful check.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from . import expfit, models, specfun
from .models import AlphaKappaMu, AlphaMu, EtaLambdaMu, FadingModel
from .quadrature import (
    DEFAULT_MAX_SUBDIVISIONS,
    QuadResult,
    ToleranceNotMet,
    integrate_semi_infinite,
)

__all__ = [
    "MgfStrategy",
    "InapplicableStrategyError",
    "ORACLE_REL_TOL",
    "mgf_numeric",
    "mgf_numeric_result",
    "mgf_derivative_numeric",
    "mgf_eta_lambda_mu_rational",
    "mgf_eta_lambda_mu_hyp",
    "mgf_alpha_mu_approx",
    "mgf_unified_approx",
    "mgf_approx_unclipped",
    "mgf",
    "resolve_strategy",
    "fit_for",
]

ORACLE_REL_TOL = 1e-10
_CLIP_FLOOR = np.finfo(float).tiny
_SNAP = 16 * np.finfo(float).eps


class MgfStrategy(str, enum.Enum):
    NUMERIC_ORACLE = "numeric_oracle"
    EXACT_CLOSED_FORM = "exact_closed_form"
    APPROX_CLOSED_FORM = "approx_closed_form"
    AUTO = "auto"

    @classmethod
    def parse(cls, value: "str | MgfStrategy") -> "MgfStrategy":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"numeric": cls.NUMERIC_ORACLE, "exact": cls.EXACT_CLOSED_FORM,
                   "approx": cls.APPROX_CLOSED_FORM}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown MGF strategy {value!r}") from None


class InapplicableStrategyError(ValueError):
    """The requested strategy has no formula for the model family."""


def resolve_strategy(model: FadingModel, strategy: "str | MgfStrategy" = MgfStrategy.AUTO) -> MgfStrategy:
    """Resolve ``auto`` and check that the strategy applies to ``model``."""
    strategy = MgfStrategy.parse(strategy)
    exact_family = isinstance(model, EtaLambdaMu)
    if strategy is MgfStrategy.AUTO:
        return MgfStrategy.EXACT_CLOSED_FORM if exact_family else MgfStrategy.APPROX_CLOSED_FORM
    if strategy is MgfStrategy.EXACT_CLOSED_FORM and not exact_family:
        raise InapplicableStrategyError(
            f"no exact closed form for this family in scope ({model.family})")
    if strategy is MgfStrategy.APPROX_CLOSED_FORM and exact_family:
        raise InapplicableStrategyError(
            f"the approximate closed form applies to the alpha families, not {model.family}")
    return strategy


def _check_s(s: float) -> float:
    s = float(s)
    if not s >= 0:
        raise ValueError(f"s must be >= 0 (got {s!r})")
    return s


# ---------------------------------------------------------------------------
# Numerical oracle
# ---------------------------------------------------------------------------

def _log_integrand(cp: models.CompactParams, k: int, s: float):
    # integrand of E[g^k exp(-s g)] in the variable u = log(g)
    def h(u):
        with np.errstate(over="ignore", invalid="ignore"):
            v = cp.log_pdf_at_log(u) + (k + 1) * u
            if s:
                v = v - s * np.exp(u)
        return np.where(np.isnan(v), -np.inf, v)
    return h


def _peak_and_widths(h, centre: float) -> tuple[float, float, float, float]:
    # coarse scan for the mode and the half-widths at which the log integrand
    # has dropped by 2; they set the split point and the mapping scales
    u = np.linspace(centre - 80.0, centre + 12.0, 4601)
    v = h(u)
    j = int(np.argmax(v))
    peak, vmax = float(u[j]), float(v[j])
    if not math.isfinite(vmax):
        raise ArithmeticError("integrand vanishes on the scan grid")
    below = v < vmax - 2.0
    left = np.nonzero(below[:j])[0]
    right = np.nonzero(below[j:])[0]
    step = u[1] - u[0]
    w_left = (j - left[-1]) * step if left.size else 30.0
    w_right = right[0] * step if right.size else 30.0
    return peak, vmax, max(w_left, 1e-3), max(w_right, 1e-3)


def _expectation(model: FadingModel, k: int, s: float, rel_tol: float,
                 max_subdivisions: int) -> QuadResult:
    if math.isinf(s):
        return QuadResult(0.0, 0.0, 0, 0)
    cp = models.compact_params(model)
    h = _log_integrand(cp, k, s)
    centre = math.log(model.gbar) - (math.log1p(s * model.gbar) if s else 0.0)
    peak, vmax, wl, wr = _peak_and_widths(h, centre)

    def left(t):
        return np.exp(h(peak - t) - vmax)

    def right(t):
        return np.exp(h(peak + t) - vmax)

    parts, failed = [], False
    for f, w in ((left, wl), (right, wr)):
        try:
            parts.append(integrate_semi_infinite(f, rel_tol=rel_tol, abs_tol=1e-300,
                                                 scale=w, max_subdivisions=max_subdivisions))
        except ToleranceNotMet as exc:
            parts.append(exc.result)
            failed = True
    scale = math.exp(vmax)
    total = QuadResult(
        (parts[0].value + parts[1].value) * scale,
        (parts[0].error_estimate + parts[1].error_estimate) * scale,
        parts[0].evaluations + parts[1].evaluations,
        parts[0].subdivisions + parts[1].subdivisions,
    )
    if failed:
        raise ToleranceNotMet(f"oracle tolerance {rel_tol:g} not met for {model!r} at s={s!r}", total)
    return total


def mgf_numeric_result(model: FadingModel, s: float, rel_tol: float = ORACLE_REL_TOL,
                       max_subdivisions: int = DEFAULT_MAX_SUBDIVISIONS) -> QuadResult:
    """Oracle MGF with its quadrature diagnostics."""
    return _expectation(model, 0, _check_s(s), rel_tol, max_subdivisions)


def mgf_numeric(model: FadingModel, s: float, rel_tol: float = ORACLE_REL_TOL) -> float:
    """MGF by direct quadrature of ``pdf(g) * exp(-s g)`` over ``(0, inf)``.

    The integral is taken in ``u = log(g)`` with the integrand normalised by
    its peak, which keeps heavy power-law behaviour at the origin and
    deep-tail underflow away from the quadrature.

    Raises
    ------
    ToleranceNotMet
        With the partial value attached.
    """
    return mgf_numeric_result(model, s, rel_tol).value


def mgf_derivative_numeric(model: FadingModel, k: int, s: float,
                           rel_tol: float = ORACLE_REL_TOL) -> float:
    """``k``-th derivative ``(-1)**k * E[g**k exp(-s g)]`` by quadrature, ``0 <= k <= 4``."""
    if int(k) != k or not 0 <= k <= 4:
        raise ValueError(f"derivative order must be an integer in [0, 4] (got {k!r})")
    k = int(k)
    res = _expectation(model, k, _check_s(s), rel_tol, DEFAULT_MAX_SUBDIVISIONS)
    return (-1) ** k * res.value


# ---------------------------------------------------------------------------
# Exact closed forms (eta-lambda-mu)
# ---------------------------------------------------------------------------

def _require_family(model: FadingModel, cls, what: str) -> None:
    if not isinstance(model, cls):
        raise InapplicableStrategyError(f"{what} applies to {cls.family}, not {model.family}")


def mgf_eta_lambda_mu_rational(model: EtaLambdaMu, s: float) -> float:
    """``[4 eta (1-lam^2) b^2 / ((c + s gbar)^2 - d^2)]**mu`` with the
    per-model constants ``b``, ``c``, ``d`` of the in-phase/quadrature
    decomposition."""
    _require_family(model, EtaLambdaMu, "the rational closed form")
    s = _check_s(s)
    if math.isinf(s):
        return 0.0
    diag = models.compact_params(model).diagnostics
    b, c, d = diag["b_bar"], diag["c_bar"], diag["d_bar"]
    eta, lam, mu = model.eta, model.lam, model.mu
    cs = c + s * model.gbar
    log_num = math.log(4.0 * eta) + math.log1p(-lam * lam) + 2.0 * math.log(b)
    log_den = math.log(cs - d) + math.log(cs + d)
    return math.exp(mu * (log_num - log_den))


def mgf_eta_lambda_mu_hyp(model: EtaLambdaMu, s: float) -> float:
    """Gauss hypergeometric closed form from the compact parameters."""
    _require_family(model, EtaLambdaMu, "the hypergeometric closed form")
    s = _check_s(s)
    if math.isinf(s):
        return 0.0
    cp = models.compact_params(model)
    p = cp.beta + s
    if not p > cp.d:
        raise AssertionError(f"beta + s = {p!r} must exceed d = {cp.d!r}; parameter mapping is inconsistent")
    return math.exp(_log_laplace_r1(cp, cp.m, p))


def _snap(x: float, target: float) -> float:
    return target if abs(x - target) <= _SNAP * max(abs(target), 1.0) else x


def _log_laplace_r1(cp: models.CompactParams, q: float, p: float) -> float:
    # log of int_0^inf psi y^(q-1) e^(-p y) I_nu(d y) dy
    nu = cp.nu
    a = q + nu
    c = nu + 1.0
    a2, b2 = 0.5 * a, _snap(0.5 * a + 0.5, c)
    z = (cp.d / p) ** 2
    return (cp.log_psi_dnu - nu * math.log(2.0) + math.lgamma(a) - math.lgamma(c)
            - a * math.log(p) + specfun.log_hyp2f1(a2, b2, c, z))


def _log_laplace_r_half(cp: models.CompactParams, q: float, p: float) -> float:
    # log of int_0^inf psi y^(q-1) e^(-p y) I_nu(d y^(1/2)) dy
    nu = cp.nu
    a = q + 0.5 * nu
    c = _snap(nu + 1.0, a)
    return (cp.log_psi_dnu - nu * math.log(2.0) + math.lgamma(a) - math.lgamma(c)
            - a * math.log(p) + specfun.log_hyp1f1(a, c, cp.d * cp.d / (4.0 * p)))


# ---------------------------------------------------------------------------
# Approximate closed forms (alpha families)
# ---------------------------------------------------------------------------

def fit_for(model: FadingModel, fit: expfit.ExpSumFit | None) -> expfit.ExpSumFit:
    ab = model.alpha_bar
    if fit is None:
        return expfit.get_or_fit(ab, strict=False)
    if abs(fit.alpha_bar - ab) > 1e-12:
        raise ValueError(f"fit is for inner exponent {fit.alpha_bar!r}, model needs {ab!r}")
    return fit


def _signed_sum(a, log_terms) -> float:
    log_terms = np.asarray(log_terms, dtype=float)
    top = log_terms.max()
    if top == -np.inf:
        return 0.0
    return math.exp(top) * math.fsum(ai * math.exp(lt - top) for ai, lt in zip(a, log_terms))


def _approx_terms(model: FadingModel, s: float, fit: expfit.ExpSumFit) -> float:
    cp = models.compact_params(model)
    ab = cp.alpha_bar
    if s == 0:
        theta = np.zeros(4)
    else:
        theta = np.asarray(fit.B) * s ** ab
    # m / alpha_bar is the base-variate exponent, kept exact to preserve the
    # parameter coincidences that reduce the hypergeometric functions
    q = cp.base_m
    logs = []
    for th in theta:
        p = cp.beta + th
        if math.isinf(p):
            logs.append(-math.inf)
            continue
        if cp.nu is None:
            logs.append(cp.log_psi_dnu - math.log(ab) + math.lgamma(q) - q * math.log(p))
        elif cp.r == 1.0:
            if not p > cp.d:
                raise specfun.DomainError(
                    f"d = {cp.d!r} >= beta + theta = {p!r}: outside the convergent parameter regime")
            logs.append(_log_laplace_r1(cp, q, p) - math.log(ab))
        else:
            logs.append(_log_laplace_r_half(cp, q, p) - math.log(ab))
    return _signed_sum(fit.a, logs)


def _clip(x: float) -> float:
    return min(max(x, _CLIP_FLOOR), 1.0)


def mgf_alpha_mu_approx(model: AlphaMu, s: float, fit: expfit.ExpSumFit | None = None) -> float:
    """``sum_i a_i beta^mu Gamma(m/ab) / ((beta + theta_i)^(m/ab) Gamma(mu))``
    with ``theta_i = B_i s**ab``; clipped to ``(0, 1]``."""
    _require_family(model, AlphaMu, "the alpha-mu approximate form")
    s = _check_s(s)
    fit = fit_for(model, fit)
    if math.isinf(s):
        return 0.0
    cp = models.compact_params(model)
    mu = model.mu
    ratio = cp.m / cp.alpha_bar     # equals mu
    log_beta = math.log(cp.beta)
    theta = np.asarray(fit.B) * (s ** cp.alpha_bar if s else 0.0)
    logs = [mu * log_beta + math.lgamma(ratio) - ratio * math.log(cp.beta + th) - math.lgamma(mu)
            for th in theta]
    return _clip(_signed_sum(fit.a, logs))


_UNIFIED = (models.AlphaEtaMu, models.AlphaLambdaMu, models.AlphaLambdaEtaMu, AlphaKappaMu)


def mgf_approx_unclipped(model: FadingModel, s: float, fit: expfit.ExpSumFit | None = None) -> float:
    """Approximate MGF of an alpha family before clipping to ``(0, 1]``."""
    if isinstance(model, EtaLambdaMu):
        raise InapplicableStrategyError("the approximate closed form applies to the alpha families")
    s = _check_s(s)
    fit = fit_for(model, fit)
    if math.isinf(s):
        return 0.0
    return _approx_terms(model, s, fit)


def mgf_unified_approx(model: FadingModel, s: float, fit: expfit.ExpSumFit | None = None) -> float:
    """Approximate MGF of the alpha-eta-mu, alpha-lambda-mu, alpha-lambda-eta-mu
    and alpha-kappa-mu models.

    Each exponential term turns the MGF integral into a Laplace transform of
    ``y^(m/ab - 1) exp(-beta y) I_nu(d y^r)``: a Gauss hypergeometric form
    for ``r = 1`` and a Kummer form for ``r = 1/2``. The result is clipped to
    ``(0, 1]``; see :func:`mgf_approx_unclipped` for the raw value.

    Raises
    ------
    DomainError
        If ``d >= beta + theta_i`` in the ``r = 1`` branch.
    """
    if not isinstance(model, _UNIFIED):
        raise InapplicableStrategyError(
            f"the unified approximate form does not apply to {model.family}")
    return _clip(mgf_approx_unclipped(model, s, fit))


# ---------------------------------------------------------------------------
# Dispatcher
# ---------------------------------------------------------------------------

def mgf(model: FadingModel, s: float, strategy: "str | MgfStrategy" = MgfStrategy.AUTO,
        fit: expfit.ExpSumFit | None = None) -> float:
    """MGF of ``model`` at ``s >= 0`` by the requested strategy.

    ``auto`` uses the exact closed form for eta-lambda-mu and the approximate
    closed form (with a cached exponential fit) for the alpha families.
    Closed-form results are bounded by 1; the individual route functions
    return raw values for auditing.
    """
    strategy = resolve_strategy(model, strategy)
    if strategy is MgfStrategy.NUMERIC_ORACLE:
        return mgf_numeric(model, s)
    if strategy is MgfStrategy.EXACT_CLOSED_FORM:
        # rounding can put M(0) one ulp above 1
        return min(mgf_eta_lambda_mu_rational(model, s), 1.0)
    if isinstance(model, AlphaMu):
        return mgf_alpha_mu_approx(model, s, fit)
    return mgf_unified_approx(model, s, fit)
