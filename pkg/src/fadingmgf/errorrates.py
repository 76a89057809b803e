"""Average symbol error rates from the MGF.

Every supported scheme is written as a sum of finite single integrals

    P = sum_l E_l * integral_0^theta_l M(phi / (V - 2 Lambda sin^2 theta)) dtheta

with per-scheme constants ``(E_l, theta_l, Lambda, V, phi)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import mgf as mgf_mod
from .models import FadingModel, db_to_linear, to_record
from .mgf import MgfStrategy
from .quadrature import QuadratureError, integrate_adaptive

__all__ = [
    "SCHEMES",
    "ModulationSpec",
    "modulation_spec",
    "SerIntegrityError",
    "SerPoint",
    "SerCurve",
    "AserResult",
    "aser",
    "aser_result",
    "aser_sweep",
    "rayleigh_bpsk_reference",
    "SER_REL_TOL",
    "SER_FLOOR",
    "JSON_SCHEMA",
]

SCHEMES = ("mpsk", "mdpsk", "mpam", "mqam")
SER_REL_TOL = 1e-8
SER_FLOOR = 1e-15
JSON_SCHEMA = "fadingmgf/1"


@dataclass(frozen=True)
class ModulationSpec:
    """Constants of the single-integral error-rate expression for one scheme.

    ``terms`` holds ``(E_l, theta_l)`` pairs; ``Lambda``, ``V`` and ``phi``
    are shared by all terms.
    """

    scheme: str
    M: int
    terms: tuple[tuple[float, float], ...]
    Lambda: float
    V: float
    phi: float
    verification: str = "verified"

    @property
    def N(self) -> int:
        return len(self.terms)

    def argument(self, theta):
        """MGF argument ``phi / (V - 2 Lambda sin^2 theta)``; ``inf`` where the denominator is 0."""
        den = self.V - 2.0 * self.Lambda * np.sin(theta) ** 2
        with np.errstate(divide="ignore"):
            return np.where(den > 0, self.phi / np.where(den > 0, den, 1.0), np.inf)

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "M": self.M, "N": self.N,
                "terms": [{"E": e, "theta": t} for e, t in self.terms],
                "Lambda": self.Lambda, "V": self.V, "phi": self.phi,
                "verification": self.verification}


def modulation_spec(scheme: str, M: int) -> ModulationSpec:
    """Instantiate the constants for ``scheme`` in {mpsk, mdpsk, mpam, mqam} at order ``M``.

    The M-DPSK row carries ``verification='pending'``: at ``M = 2`` it
    evaluates to ``M_g(1)``, twice the textbook binary DPSK average
    ``0.5 * M_g(1)``.

    Raises
    ------
    ValueError
        For an unknown scheme, ``M < 2``, or a non-square QAM order.
    """
    key = str(scheme).strip().lower()
    if key not in SCHEMES:
        raise ValueError(f"scheme: unknown modulation {scheme!r}; expected one of {list(SCHEMES)}")
    if isinstance(M, bool) or int(M) != M or M < 2:
        raise ValueError(f"order: modulation order must be an integer >= 2 (got {M!r})")
    M = int(M)
    pi = math.pi
    if key == "mpsk":
        return ModulationSpec(key, M, ((1.0 / pi, pi * (M - 1) / M),), -0.5, 0.0,
                              math.sin(pi / M) ** 2)
    if key == "mdpsk":
        lam = math.cos(pi / M)
        return ModulationSpec(key, M, ((2.0 / pi, pi * (M - 1) / M),), lam, 1.0 + lam,
                              math.sin(pi / M) ** 2, verification="pending")
    if key == "mpam":
        return ModulationSpec(key, M, ((2.0 * (1.0 - 1.0 / M) / pi, pi / 2),), -0.5, 0.0,
                              3.0 / (M * M - 1.0))
    root = math.isqrt(M)
    if root * root != M or M < 4:
        raise ValueError(f"order: QAM order must be a perfect square >= 4 (got {M})")
    g = 1.0 - 1.0 / root
    return ModulationSpec(key, M, ((4.0 * g / pi, pi / 2), (-4.0 * g * g / pi, pi / 4)),
                          -0.5, 0.0, 1.5 / (M - 1.0))


def rayleigh_bpsk_reference(gbar: float) -> float:
    """Closed-form BPSK error rate over Rayleigh fading, ``0.5 (1 - sqrt(g/(1+g)))``."""
    if not gbar > 0:
        raise ValueError("gbar must be > 0")
    if math.isinf(gbar):
        return 0.0
    # 1 - sqrt(x) written as (1 - x) / (1 + sqrt(x)) to avoid cancellation
    x = gbar / (1.0 + gbar)
    return 0.5 * (1.0 / (1.0 + gbar)) / (1.0 + math.sqrt(x))


class SerIntegrityError(ArithmeticError):
    """The computed error rate is outside ``(0, 1)``."""


@dataclass(frozen=True)
class AserResult:
    value: float
    quad_error: float
    strategy: str
    warnings: tuple[str, ...] = ()


def _mgf_function(model: FadingModel, strategy: MgfStrategy):
    if strategy is MgfStrategy.NUMERIC_ORACLE:
        memo: dict[float, float] = {}

        def numeric(s: float) -> float:
            if s not in memo:
                memo[s] = mgf_mod.mgf_numeric(model, s)
            return memo[s]
        return numeric
    fit = None
    if strategy is MgfStrategy.APPROX_CLOSED_FORM:
        fit = mgf_mod.fit_for(model, None)
    return lambda s: mgf_mod.mgf(model, s, strategy, fit=fit)


def aser_result(model: FadingModel, spec: ModulationSpec,
                strategy: "str | MgfStrategy" = MgfStrategy.AUTO,
                rel_tol: float = SER_REL_TOL) -> AserResult:
    """Error rate with quadrature diagnostics; see :func:`aser`."""
    strategy = mgf_mod.resolve_strategy(model, strategy)
    M_of = _mgf_function(model, strategy)

    def integrand(theta):
        s = spec.argument(theta)
        if np.any(s <= 0):
            raise ValueError(f"non-positive MGF argument for {spec.scheme}-{spec.M}")
        return np.array([0.0 if math.isinf(v) else M_of(float(v)) for v in s])

    total, err = 0.0, 0.0
    for E, theta in spec.terms:
        res = integrate_adaptive(integrand, 0.0, theta, rel_tol=rel_tol, abs_tol=1e-300)
        total += E * res.value
        err += abs(E) * res.error_estimate
    notes = []
    if not 0.0 < total < 1.0:
        raise SerIntegrityError(
            f"error rate {total!r} outside (0, 1) for {model!r} with {spec.scheme}-{spec.M}")
    if total < SER_FLOOR:
        notes.append(f"error rate {total:.3e} is below the numerical floor {SER_FLOOR:g}")
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=2)
    return AserResult(total, err, strategy.value, tuple(notes))


def aser(model: FadingModel, spec: ModulationSpec,
         strategy: "str | MgfStrategy" = MgfStrategy.AUTO, rel_tol: float = SER_REL_TOL) -> float:
    """Average symbol error rate of ``spec`` over ``model``.

    Each term is integrated adaptively to relative tolerance ``rel_tol``.
    With the numeric-oracle strategy, MGF values are memoized for the
    duration of the call.

    Raises
    ------
    SerIntegrityError
        If the result is not strictly between 0 and 1.
    QuadratureError
        If the angle integral (or an oracle MGF) fails to converge.
    """
    return aser_result(model, spec, strategy, rel_tol).value


@dataclass(frozen=True)
class SerPoint:
    gbar_db: float
    ser: float
    quad_error: float
    error: str | None = None
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class SerCurve:
    """Error rate against mean SNR for one model template, scheme and strategy."""

    model: dict
    spec: ModulationSpec
    strategy: str
    points: tuple[SerPoint, ...]
    meta: dict = field(default_factory=dict)

    @property
    def gbar_db(self) -> np.ndarray:
        return np.array([p.gbar_db for p in self.points])

    @property
    def ser(self) -> np.ndarray:
        return np.array([p.ser for p in self.points])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["gbar_db", "ser", "strategy", "quad_error"])
        for p in self.points:
            w.writerow([repr(p.gbar_db), repr(p.ser), self.strategy, repr(p.quad_error)])
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "schema": JSON_SCHEMA,
            "model": self.model,
            "modulation": self.spec.to_dict(),
            "strategy": self.strategy,
            "meta": self.meta,
            "points": [
                {"gbar_db": p.gbar_db, "ser": None if math.isnan(p.ser) else p.ser,
                 "quad_error": None if math.isnan(p.quad_error) else p.quad_error,
                 "error": p.error, "warnings": list(p.warnings)}
                for p in self.points
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


def _sweep_point(model: FadingModel, db: float, spec: ModulationSpec,
                 strategy: MgfStrategy) -> SerPoint:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = aser_result(model.with_gbar(db_to_linear(db)), spec, strategy)
    except (QuadratureError, SerIntegrityError, ArithmeticError, ValueError) as exc:
        return SerPoint(db, math.nan, math.nan, f"{type(exc).__name__}: {exc}")
    return SerPoint(db, res.value, res.quad_error, None, res.warnings)


def aser_sweep(model_template: FadingModel, gbar_db, spec: ModulationSpec,
               strategy: "str | MgfStrategy" = MgfStrategy.AUTO, jobs: int = 1,
               meta: dict | None = None) -> SerCurve:
    """Error rate at each mean SNR in ``gbar_db`` (strictly increasing, dB).

    The mean SNR of ``model_template`` is ignored. Per-point failures are
    recorded in the curve instead of aborting; points run on up to ``jobs``
    threads and are returned in input order.
    """
    dbs = [float(x) for x in gbar_db]
    if not dbs:
        raise ValueError("sweep: empty SNR grid")
    if any(b <= a for a, b in zip(dbs, dbs[1:])):
        raise ValueError("sweep: SNR grid must be strictly increasing")
    strategy = mgf_mod.resolve_strategy(model_template, strategy)
    if strategy is MgfStrategy.APPROX_CLOSED_FORM:
        # fit once up front so that worker threads share it
        mgf_mod.fit_for(model_template, None)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(lambda db: _sweep_point(model_template, db, spec, strategy), dbs))
    else:
        points = [_sweep_point(model_template, db, spec, strategy) for db in dbs]
    record = to_record(model_template)
    record.pop("gbar_db", None)
    return SerCurve(record, spec, strategy.value, tuple(points), dict(meta or {}))
