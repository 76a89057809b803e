"""Generalized fading models and their unified compact density form.

Every model maps onto

    f(g) = psi * g**(m - 1) * exp(-beta * g**abar) * I_nu(d * g**(r * abar))

(without the Bessel factor for alpha-mu). The mapping is built from one
construction: ``g**abar = scale * X`` where ``X`` is a unit-mean base variate,

* a sum of two independent Gamma(mu) variates (eta-lambda-mu, alpha-eta-mu,
  alpha-lambda-mu, alpha-lambda-eta-mu; Bessel order ``mu - 1/2``, r = 1),
* the kappa-mu power variate (alpha-kappa-mu; order ``mu - 1``, r = 1/2),
* a Gamma(mu) variate (alpha-mu).

``gbar`` is the true mean SNR, ``E[g] = gbar``. For ``alpha = 2`` this makes
``scale = gbar`` and the mapping coincides with the usual tables; for other
``alpha`` the scale carries the factor ``E[X**(1/abar)]**-abar`` so that the
mean audit holds exactly. In the alpha-kappa-mu row this gives
``d = 2 mu sqrt(kappa (1 + kappa)) / scale**(1/2)``, i.e. the exponent on the
SNR scale inside ``d`` is ``abar / 2`` (not ``abar**2 / 2``).

All densities are evaluated in the log domain. The prefactor is stored as
``log(psi * d**nu)`` so the ``d -> 0`` limits (Rayleigh, Nakagami, kappa -> 0,
eta -> 1) are finite.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from . import specfun

__all__ = [
    "FadingModel",
    "EtaLambdaMu",
    "AlphaMu",
    "AlphaEtaMu",
    "AlphaLambdaMu",
    "AlphaKappaMu",
    "AlphaLambdaEtaMu",
    "CompactParams",
    "ModelValidationError",
    "FAMILIES",
    "LIMITS",
    "EXPONENTS",
    "validate",
    "compact_params",
    "pdf",
    "log_pdf",
    "special_case",
    "rayleigh",
    "nakagami_m",
    "weibull",
    "hoyt",
    "eta_mu",
    "kappa_mu",
    "lambda_mu",
    "one_sided_gaussian",
    "to_record",
    "from_record",
    "db_to_linear",
    "linear_to_db",
    "clear_cache",
]


class ModelValidationError(ValueError):
    """Raised when a model has out-of-range parameters; ``violations`` lists them."""

    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = list(violations)


def db_to_linear(db: float) -> float:
    return 10.0 ** (float(db) / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(float(x))


# ---------------------------------------------------------------------------
# Model types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FadingModel:
    """Base class; concrete families add their shape parameters."""

    family: ClassVar[str] = ""
    params: ClassVar[tuple[str, ...]] = ()

    def with_gbar(self, gbar: float) -> "FadingModel":
        return dataclasses.replace(self, gbar=float(gbar))

    @property
    def gbar_db(self) -> float:
        return linear_to_db(self.gbar)

    @property
    def alpha_bar(self) -> float:
        return EXPONENTS["alpha_bar"] * self.alpha if hasattr(self, "alpha") else 1.0

    def shape(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in self.params}

    def pdf(self, g):
        return pdf(self, g)


@dataclass(frozen=True)
class EtaLambdaMu(FadingModel):
    eta: float
    lam: float
    mu: float
    gbar: float = 1.0
    family: ClassVar[str] = "eta_lambda_mu"
    params: ClassVar[tuple[str, ...]] = ("eta", "lam", "mu")


@dataclass(frozen=True)
class AlphaMu(FadingModel):
    alpha: float
    mu: float
    gbar: float = 1.0
    family: ClassVar[str] = "alpha_mu"
    params: ClassVar[tuple[str, ...]] = ("alpha", "mu")


@dataclass(frozen=True)
class AlphaEtaMu(FadingModel):
    alpha: float
    eta: float
    mu: float
    gbar: float = 1.0
    family: ClassVar[str] = "alpha_eta_mu"
    params: ClassVar[tuple[str, ...]] = ("alpha", "eta", "mu")


@dataclass(frozen=True)
class AlphaLambdaMu(FadingModel):
    alpha: float
    lam: float
    mu: float
    gbar: float = 1.0
    family: ClassVar[str] = "alpha_lambda_mu"
    params: ClassVar[tuple[str, ...]] = ("alpha", "lam", "mu")


@dataclass(frozen=True)
class AlphaKappaMu(FadingModel):
    alpha: float
    kappa: float
    mu: float
    gbar: float = 1.0
    family: ClassVar[str] = "alpha_kappa_mu"
    params: ClassVar[tuple[str, ...]] = ("alpha", "kappa", "mu")


@dataclass(frozen=True)
class AlphaLambdaEtaMu(FadingModel):
    alpha: float
    lam: float
    eta: float
    mu: float
    gbar: float = 1.0
    family: ClassVar[str] = "alpha_lambda_eta_mu"
    params: ClassVar[tuple[str, ...]] = ("alpha", "lam", "eta", "mu")


FAMILIES: dict[str, type[FadingModel]] = {
    cls.family: cls
    for cls in (EtaLambdaMu, AlphaMu, AlphaEtaMu, AlphaLambdaMu, AlphaKappaMu, AlphaLambdaEtaMu)
}


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

# (symbol, lower, upper, lower_inclusive) of the mathematical domain and the
# documented library limits (closed intervals).
_DOMAIN = {
    "alpha": ("α", 0.0, math.inf, False),
    "mu": ("μ", 0.0, math.inf, False),
    "eta": ("η", 0.0, math.inf, False),
    "kappa": ("κ", 0.0, math.inf, True),
    "lam": ("λ", 0.0, 1.0, True),
    "gbar": ("γ̄", 0.0, math.inf, False),
}
LIMITS = {
    "alpha": (0.0, 10.0),
    "mu": (0.0, 50.0),
    "eta": (1e-3, 1e3),
    "kappa": (0.0, 50.0),
    "lam": (0.0, 0.999),
    "gbar": (1e-6, 1e9),
}


def validate(model: FadingModel) -> list[str]:
    """Return a list of human-readable range violations (empty when valid)."""
    if not isinstance(model, FadingModel) or type(model) is FadingModel:
        return [f"unknown model type {type(model).__name__}"]
    out = []
    for name in (*model.params, "gbar"):
        value = getattr(model, name)
        sym, lo, hi, lo_inc = _DOMAIN[name]
        try:
            value = float(value)
        except (TypeError, ValueError):
            out.append(f"{sym} must be a real number (got {value!r})")
            continue
        if not math.isfinite(value):
            out.append(f"{sym} must be finite (got {value!r})")
            continue
        if name == "lam":
            if not 0.0 <= value < 1.0:
                out.append(f"λ must lie in [0,1) (got {value!r})")
                continue
        elif (value < lo) if lo_inc else (value <= lo):
            out.append(f"{sym} must be {'>=' if lo_inc else '>'} {lo:g} (got {value!r})")
            continue
        llo, lhi = LIMITS[name]
        if not llo <= value <= lhi:
            out.append(f"{sym} must lie in [{llo:g}, {lhi:g}] (library limit; got {value!r})")
    return out


def _check(model: FadingModel) -> None:
    problems = validate(model)
    if problems:
        raise ModelValidationError(problems)


# ---------------------------------------------------------------------------
# Compact form
# ---------------------------------------------------------------------------

# Exponents of the compact-form mapping. They live in one table so that the
# validation suite can be run against perturbed copies (see
# ``fadingmgf.validation``); production code never modifies them.
EXPONENTS: dict[str, float] = {
    "alpha_bar": 0.5,           # abar = alpha / 2
    "b_bar_correlation": 1.0,   # b = mu (1+eta) / (2 eta (1-lam^2)^1)
    "c_bar_eta": 1.0,           # c = b (1+eta)^1
    "d_bar_root": 0.5,          # d = b ((eta-1)^2 + 4 eta lam^2)^(1/2)
    "eta_mu_inverse": -1.0,     # h = (2 + eta + eta^-1)/4, H = (eta^-1 - eta)/4
    "lambda_mu_inverse": -1.0,  # h = (1-lam^2)^-1, H = lam (1-lam^2)^-1
    "two_gamma_m": 0.5,         # m0 = mu + 1/2
    "two_gamma_nu": -0.5,       # nu = mu - 1/2
    "two_gamma_gap": 1.0,       # (c^2 - d^2)^(mu)
    "two_gamma_two": -0.5,      # 2^(mu - 1/2)
    "kappa_mu_m": 1.0,          # m0 = (mu + 1) / 2
    "kappa_mu_nu": -1.0,        # nu = mu - 1
    "kappa_mu_r": 0.5,          # Bessel argument d x^(1/2)
    "kappa_mu_power": 1.0,      # (1+kappa)^mu
    "kappa_mu_two_mu": -1.0,    # (2 mu)^(mu - 1)
    "alpha_mu_rate": 1.0,       # psi0 = mu^mu / Gamma(mu)
    "scale_rate": 1.0,          # beta = beta0 / scale
    "scale_psi": 1.0,           # psi d^nu carries scale^-(m0 + r nu)
}


@dataclass(frozen=True)
class CompactParams:
    """Compact-form parameters of one model at one mean SNR.

    ``nu`` and ``d`` are ``None`` for alpha-mu, which has no Bessel factor.
    ``log_psi_dnu`` is ``log(psi * d**nu)`` (``log(psi)`` for alpha-mu); use
    :attr:`psi` for ``psi`` itself, which is infinite when ``d == 0`` and
    ``nu > 0``.
    """

    family: str
    alpha_bar: float
    m: float
    beta: float
    nu: float | None
    d: float | None
    r: float
    log_psi_dnu: float
    scale: float
    base_m: float
    log_moment: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def psi(self) -> float:
        if self.nu is None:
            return math.exp(self.log_psi_dnu)
        if self.d == 0.0:
            return math.inf if self.nu > 0 else (math.exp(self.log_psi_dnu) if self.nu == 0 else 0.0)
        return math.exp(self.log_psi_dnu - self.nu * math.log(self.d))

    @property
    def has_bessel(self) -> bool:
        return self.nu is not None

    def log_pdf_at_log(self, u):
        """``log f(g)`` evaluated at ``u = log(g)`` (vectorised)."""
        u = np.asarray(u, dtype=float)
        ab = self.alpha_bar
        with np.errstate(over="ignore", invalid="ignore"):
            y = np.exp(ab * u)
            out = self.log_psi_dnu + (self.m - 1.0) * u - self.beta * y
            if self.nu is not None:
                out = out + self.nu * self.r * ab * u
                arg = self.d * np.exp(self.r * ab * u)
                arg = np.where(np.isfinite(arg), arg, 0.0)
                out = out + specfun.log_bessel_i_reduced(self.nu, arg)
            out = np.where(np.isfinite(y), out, -np.inf)
        return out


def _two_gamma_bar(model: FadingModel) -> dict:
    """Unit-mean two-Gamma base rates (c_bar, d_bar) and the Table II internals."""
    E = EXPONENTS
    mu = model.mu
    if isinstance(model, (EtaLambdaMu, AlphaLambdaEtaMu)):
        eta, lam = model.eta, model.lam
        b = mu * (1.0 + eta) / (2.0 * eta * (1.0 - lam * lam) ** E["b_bar_correlation"])
        c = b * (1.0 + eta) ** E["c_bar_eta"]
        d = b * ((eta - 1.0) ** 2 + 4.0 * eta * lam * lam) ** E["d_bar_root"]
        return {"c_bar": c, "b_bar": b, "d_bar": d}
    if isinstance(model, AlphaEtaMu):
        eta = model.eta
        h = 0.25 * (2.0 + eta + eta ** E["eta_mu_inverse"])
        H = 0.25 * (eta ** E["eta_mu_inverse"] - eta)
    else:
        lam = model.lam
        h = (1.0 - lam * lam) ** E["lambda_mu_inverse"]
        H = lam * (1.0 - lam * lam) ** E["lambda_mu_inverse"]
    # the base density depends on |H| only (I_nu of a negative argument is
    # the same model with the in-phase and quadrature roles swapped)
    return {"c_bar": 2.0 * mu * h, "d_bar": 2.0 * mu * abs(H), "h": h, "H": H}


def _base(model: FadingModel) -> dict:
    """Base variate X (before the power transform) in compact form."""
    E = EXPONENTS
    mu = model.mu
    if isinstance(model, AlphaMu):
        beta0 = mu
        return {
            "m0": mu, "beta0": beta0, "nu": None, "d0": None, "r": 1.0,
            "log_psi_dnu0": E["alpha_mu_rate"] * mu * math.log(beta0) - math.lgamma(mu),
        }
    if isinstance(model, AlphaKappaMu):
        k = model.kappa
        nu = mu + E["kappa_mu_nu"]
        log_pd = (math.log(mu) + E["kappa_mu_power"] * mu * math.log1p(k) - mu * k
                  + (mu + E["kappa_mu_two_mu"]) * math.log(2.0 * mu))
        return {
            "m0": 0.5 * (mu + E["kappa_mu_m"]), "beta0": mu * (1.0 + k), "nu": nu,
            "d0": 2.0 * mu * math.sqrt(k * (1.0 + k)), "r": E["kappa_mu_r"],
            "log_psi_dnu0": log_pd,
        }
    internals = _two_gamma_bar(model)
    c, d = internals["c_bar"], internals["d_bar"]
    gap = (c - d) * (c + d)
    nu = mu + E["two_gamma_nu"]
    log_pd = (0.5 * math.log(math.pi) + E["two_gamma_gap"] * mu * math.log(gap)
              - math.lgamma(mu) - (mu + E["two_gamma_two"]) * math.log(2.0))
    return {
        "m0": mu + E["two_gamma_m"], "beta0": c, "nu": nu, "d0": d, "r": 1.0,
        "log_psi_dnu0": log_pd, **internals,
    }


def _log_base_integral(base: dict, q: float) -> float:
    """``log int x**q f_X(x) dx`` from the compact form of the base density."""
    m0, beta0, nu, d0, r = base["m0"], base["beta0"], base["nu"], base["d0"], base["r"]
    lp = base["log_psi_dnu0"]
    if nu is None:
        return lp + math.lgamma(m0 + q) - (m0 + q) * math.log(beta0)
    if r == 1.0:
        # int x^(m0+q-1) e^(-beta0 x) I_nu(d0 x) dx in 2F1 form
        a = m0 + q + nu
        return (lp - nu * math.log(2.0) + math.lgamma(a) - math.lgamma(nu + 1.0)
                - a * math.log(beta0)
                + specfun.log_hyp2f1(0.5 * a, 0.5 * a + 0.5, nu + 1.0, (d0 / beta0) ** 2))
    # int x^(m0+q-1) e^(-beta0 x) I_nu(d0 x^r) dx in 1F1 form (r = 1/2)
    a = m0 + q + r * nu
    return (lp - nu * math.log(2.0) + math.lgamma(a) - math.lgamma(nu + 1.0)
            - a * math.log(beta0)
            + specfun.log_hyp1f1(a, nu + 1.0, d0 * d0 / (4.0 * beta0)))


def _log_base_moment(model: FadingModel, base: dict, q: float) -> float:
    """``log E[X**q]`` for the base variate.

    Taken as a ratio to the zeroth moment, so that rounding in the
    normalising constant and in ``log(1 - (d/beta)**2)`` (large ``mu``,
    ``d`` close to ``beta``) cancels instead of shifting the SNR scale.
    """
    return _log_base_integral(base, q) - _log_base_integral(base, 0.0)


@functools.lru_cache(maxsize=4096)
def _compact_cached(model: FadingModel) -> CompactParams:
    E = EXPONENTS
    base = _base(model)
    ab = model.alpha_bar
    if not ab > 0:
        raise ModelValidationError([f"inner exponent must be > 0 (got {ab!r})"])
    log_moment = _log_base_moment(model, base, 1.0 / ab)
    log_scale = ab * (math.log(model.gbar) - log_moment)
    scale = math.exp(log_scale)
    nu, r = base["nu"], base["r"]
    m0 = base["m0"]
    beta = base["beta0"] / scale ** E["scale_rate"]
    if nu is None:
        d = None
        log_pd = math.log(ab) + base["log_psi_dnu0"] - E["scale_psi"] * m0 * log_scale
    else:
        d = base["d0"] / scale ** r
        log_pd = (math.log(ab) + base["log_psi_dnu0"]
                  - E["scale_psi"] * (m0 + r * nu) * log_scale)
    diagnostics = {k: base[k] for k in ("c_bar", "b_bar", "d_bar", "h", "H") if k in base}
    return CompactParams(
        family=model.family, alpha_bar=ab, m=ab * m0, beta=beta, nu=nu, d=d, r=r,
        log_psi_dnu=log_pd, scale=scale, base_m=m0, log_moment=log_moment,
        diagnostics=diagnostics,
    )


def compact_params(model: FadingModel) -> CompactParams:
    """Map a model onto the unified compact form.

    Raises
    ------
    ModelValidationError
        Listing every out-of-range parameter.
    """
    _check(model)
    return _compact_cached(model)


def clear_cache() -> None:
    """Drop memoised compact forms (needed after editing ``EXPONENTS``)."""
    _compact_cached.cache_clear()


def log_pdf(model: FadingModel, g):
    """Natural log of the SNR density at ``g > 0`` (vectorised)."""
    cp = compact_params(model)
    ga = np.asarray(g, dtype=float)
    if np.any(~(ga > 0)):
        raise specfun.DomainError("the SNR density is defined for g > 0")
    res = cp.log_pdf_at_log(np.log(ga))
    return float(res) if res.ndim == 0 else res


def pdf(model: FadingModel, g):
    """SNR density at ``g > 0``; underflow returns 0."""
    res = np.exp(log_pdf(model, g))
    return float(res) if np.ndim(res) == 0 else res


# ---------------------------------------------------------------------------
# Named special cases
# ---------------------------------------------------------------------------

def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ModelValidationError([message])


def rayleigh(gbar: float = 1.0) -> AlphaMu:
    return special_case("rayleigh", gbar=gbar)


def nakagami_m(m: float, gbar: float = 1.0) -> AlphaMu:
    return special_case("nakagami_m", m=m, gbar=gbar)


def weibull(alpha: float, gbar: float = 1.0) -> AlphaMu:
    return special_case("weibull", alpha=alpha, gbar=gbar)


def hoyt(q: float, gbar: float = 1.0) -> EtaLambdaMu:
    return special_case("hoyt", q=q, gbar=gbar)


def eta_mu(eta: float, mu: float, gbar: float = 1.0) -> EtaLambdaMu:
    return special_case("eta_mu", eta=eta, mu=mu, gbar=gbar)


def kappa_mu(kappa: float, mu: float, gbar: float = 1.0) -> AlphaKappaMu:
    """kappa-mu fading; Rice with factor K is ``kappa_mu(K, 1)``."""
    return special_case("kappa_mu", kappa=kappa, mu=mu, gbar=gbar)


def lambda_mu(lam: float, mu: float, gbar: float = 1.0) -> EtaLambdaMu:
    return special_case("lambda_mu", lam=lam, mu=mu, gbar=gbar)


def one_sided_gaussian(gbar: float = 1.0) -> AlphaMu:
    return special_case("one_sided_gaussian", gbar=gbar)


_SPECIAL_PARAMS = {
    "rayleigh": (),
    "nakagami_m": ("m",),
    "weibull": ("alpha",),
    "hoyt": ("q",),
    "eta_mu": ("eta", "mu"),
    "kappa_mu": ("kappa", "mu"),
    "lambda_mu": ("lam", "mu"),
    "one_sided_gaussian": (),
}


def special_case(name: str, gbar: float = 1.0, **params: float) -> FadingModel:
    """Build a named classical model as its generalized-model embedding."""
    if name not in _SPECIAL_PARAMS:
        raise ValueError(f"unknown special case {name!r}; expected one of {sorted(_SPECIAL_PARAMS)}")
    expected = set(_SPECIAL_PARAMS[name])
    if set(params) != expected:
        raise TypeError(f"{name} takes parameters {sorted(expected)}, got {sorted(params)}")
    gbar = float(gbar)
    if name == "rayleigh":
        model = AlphaMu(2.0, 1.0, gbar)
    elif name == "nakagami_m":
        _require(params["m"] >= 0.5, f"Nakagami m must be >= 0.5 (got {params['m']!r})")
        model = AlphaMu(2.0, float(params["m"]), gbar)
    elif name == "weibull":
        model = AlphaMu(float(params["alpha"]), 1.0, gbar)
    elif name == "hoyt":
        q = params["q"]
        _require(0.0 < q <= 1.0, f"Hoyt q must lie in (0, 1] (got {q!r})")
        model = EtaLambdaMu(float(q) ** 2, 0.0, 0.5, gbar)
    elif name == "eta_mu":
        model = EtaLambdaMu(float(params["eta"]), 0.0, float(params["mu"]), gbar)
    elif name == "kappa_mu":
        model = AlphaKappaMu(2.0, float(params["kappa"]), float(params["mu"]), gbar)
    elif name == "lambda_mu":
        model = EtaLambdaMu(1.0, float(params["lam"]), float(params["mu"]), gbar)
    else:
        model = AlphaMu(2.0, 0.5, gbar)
    _check(model)
    return model


# ---------------------------------------------------------------------------
# Flat records
# ---------------------------------------------------------------------------

_RECORD_KEYS = {"alpha": "alpha", "eta": "eta", "lam": "lambda", "kappa": "kappa", "mu": "mu"}


def to_record(model: FadingModel) -> dict:
    """Flat key-value description with the mean SNR in dB."""
    rec = {"family": model.family}
    for name in model.params:
        rec[_RECORD_KEYS[name]] = float(getattr(model, name))
    rec["gbar_db"] = model.gbar_db
    return rec


def from_record(record: dict) -> FadingModel:
    """Inverse of :func:`to_record`. Unknown or missing keys raise ``ValueError``."""
    rec = dict(record)
    family = rec.pop("family", None)
    if family not in FAMILIES:
        raise ValueError(f"family: unknown model family {family!r}; expected one of {sorted(FAMILIES)}")
    cls = FAMILIES[family]
    if "gbar_db" not in rec:
        raise ValueError("gbar_db: missing mean SNR (dB)")
    gbar_db = rec.pop("gbar_db")
    kwargs = {}
    for name in cls.params:
        key = _RECORD_KEYS[name]
        if key not in rec:
            raise ValueError(f"{key}: missing parameter for family {family}")
        try:
            kwargs[name] = float(rec.pop(key))
        except (TypeError, ValueError):
            raise ValueError(f"{key}: not a number") from None
    if rec:
        raise ValueError(f"{', '.join(sorted(rec))}: not a parameter of family {family}")
    try:
        gbar = db_to_linear(float(gbar_db))
    except (TypeError, ValueError):
        raise ValueError("gbar_db: not a number") from None
    return cls(gbar=gbar, **kwargs)
