"""Four-term exponential-sum approximation of a stretched exponential.

``exp(-z**(1/ab)) ~= sum_i a_i exp(-B_i z)`` turns the stretched
exponential in the compact density into something with a closed-form
Laplace transform. Fits are computed by Levenberg-Marquardt least squares
on a fixed grid, cached per inner exponent ``ab`` and persisted in a small
text file so that repeated runs reuse identical parameters.
"""

from __future__ import annotations

import math
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

__all__ = [
    "GridSpec",
    "ExpSumFit",
    "ExpFitError",
    "FitQualityError",
    "FitConvergenceError",
    "DEFAULT_GRID",
    "QUALITY_GATE",
    "GATED_RANGE",
    "ADMISSIBLE_RANGE",
    "DEFAULT_SEED",
    "DEFAULT_STARTS",
    "fit_exp_sum",
    "eval_exp_sum",
    "dense_residual",
    "FitCache",
    "default_cache",
    "set_default_store",
    "get_or_fit",
    "read_store",
    "write_store",
]

QUALITY_GATE = 5e-3
GATED_RANGE = (0.5, 5.0)
ADMISSIBLE_RANGE = (0.25, 10.0)
DEFAULT_SEED = 20240917
DEFAULT_STARTS = 16
STORE_HEADER = "expfit-v1"
_KEY_TOL = 1e-12
_MIN_SEPARATION = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """Log-spaced fitting grid on ``[z_min, z_max]``."""

    z_min: float = 1e-4
    z_max: float = 50.0
    points: int = 400

    def nodes(self) -> np.ndarray:
        return np.logspace(math.log10(self.z_min), math.log10(self.z_max), self.points)

    def denser(self, factor: int = 10) -> "GridSpec":
        return GridSpec(self.z_min, self.z_max, self.points * factor)


DEFAULT_GRID = GridSpec()


class ExpFitError(ArithmeticError):
    """Base class for fitting failures."""


class FitQualityError(ExpFitError):
    """The best fit exceeds the sup-norm quality gate; ``fit`` holds it."""

    def __init__(self, fit: "ExpSumFit") -> None:
        super().__init__(
            f"exponential-sum fit for inner exponent {fit.alpha_bar!r} has max error "
            f"{fit.max_abs_err:.3e} > {QUALITY_GATE:g}")
        self.fit = fit


class FitConvergenceError(ExpFitError):
    """No multi-start run produced an admissible fit."""


@dataclass(frozen=True)
class ExpSumFit:
    """Fitted sum ``sum_i a[i] * exp(-B[i] * z)``.

    ``a`` sums to one by construction (``a[3] = 1 - a[0] - a[1] - a[2]``), so
    the approximation is exact at ``z = 0``. ``max_abs_err`` is the sup-norm
    residual over the fitting grid.
    """

    alpha_bar: float
    a: tuple[float, float, float, float]
    B: tuple[float, float, float, float]
    max_abs_err: float
    grid: GridSpec = DEFAULT_GRID
    optimizer_runs: int = field(default=0, compare=False)

    @property
    def gated(self) -> bool:
        """Whether the quality gate applies to this inner exponent."""
        return GATED_RANGE[0] <= self.alpha_bar <= GATED_RANGE[1]

    @property
    def meets_gate(self) -> bool:
        return not self.gated or self.max_abs_err <= QUALITY_GATE

    def __call__(self, z):
        return eval_exp_sum(self, z)


def eval_exp_sum(fit: ExpSumFit, z):
    """Evaluate the exponential sum at ``z >= 0`` (vectorised)."""
    za = np.asarray(z, dtype=float)
    if np.any(~(za >= 0)):
        raise ValueError("the exponential sum is evaluated for z >= 0")
    out = np.exp(-np.multiply.outer(za, np.asarray(fit.B))) @ np.asarray(fit.a)
    return float(out) if out.ndim == 0 else out


def dense_residual(fit: ExpSumFit, factor: int = 10) -> float:
    """Sup-norm residual on a grid ``factor`` times denser than the fitting grid."""
    z = fit.grid.denser(factor).nodes()
    return float(np.max(np.abs(eval_exp_sum(fit, z) - np.exp(-z ** (1.0 / fit.alpha_bar)))))


def _unpack(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.append(p[:3], 1.0 - p[:3].sum())
    return a, np.exp(p[3:])


def _residual_and_jacobian(z: np.ndarray, target: np.ndarray):
    def residual(p):
        a, B = _unpack(p)
        return np.exp(-np.outer(z, B)) @ a - target

    def jacobian(p):
        a, B = _unpack(p)
        E = np.exp(-np.outer(z, B))
        J = np.empty((z.size, 7))
        J[:, :3] = E[:, :3] - E[:, 3:4]
        J[:, 3:] = -(a * B)[None, :] * z[:, None] * E
        return J

    return residual, jacobian


def _identity_fit(grid: GridSpec) -> ExpSumFit:
    # the target is already a single exponential; unused rates are spread
    # out so that the four rates stay distinct
    return ExpSumFit(1.0, (1.0, 0.0, 0.0, 0.0), (1.0, 0.1, 10.0, 100.0), 0.0, grid)


def fit_exp_sum(
    alpha_bar: float,
    grid: GridSpec = DEFAULT_GRID,
    starts: int = DEFAULT_STARTS,
    seed: int = DEFAULT_SEED,
    strict: bool = True,
) -> ExpSumFit:
    """Fit ``exp(-z**(1/alpha_bar))`` by a four-term exponential sum.

    Parameters
    ----------
    alpha_bar : float
        Inner exponent, in ``[0.25, 10]``. ``alpha_bar == 1`` returns the
        exact single-term representation without optimizing.
    grid : GridSpec
        Fitting grid; the objective is the unweighted sum of squared residuals.
    starts : int
        Number of Levenberg-Marquardt runs. Start 0 uses rates log-spaced on
        ``[1e-2, 1e2]``; the others jitter and permute them with a generator
        seeded by ``seed``.
    strict : bool
        Raise :class:`FitQualityError` when the gate is exceeded.

    Raises
    ------
    FitQualityError
        If ``strict`` and ``max_abs_err > 5e-3`` for ``alpha_bar`` in ``[0.5, 5]``.
    FitConvergenceError
        If every start fails.
    """
    alpha_bar = float(alpha_bar)
    if not ADMISSIBLE_RANGE[0] <= alpha_bar <= ADMISSIBLE_RANGE[1]:
        raise ValueError(
            f"inner exponent must lie in [{ADMISSIBLE_RANGE[0]}, {ADMISSIBLE_RANGE[1]}] "
            f"(got {alpha_bar!r})")
    if alpha_bar == 1.0:
        return _identity_fit(grid)

    z = grid.nodes()
    target = np.exp(-z ** (1.0 / alpha_bar))
    residual, jacobian = _residual_and_jacobian(z, target)
    rng = np.random.default_rng(seed)
    base = np.log(np.logspace(-2.0, 2.0, 4))
    best = None
    for k in range(starts):
        log_b = base if k == 0 else rng.permutation(base + rng.normal(0.0, 0.5, 4))
        p0 = np.concatenate((np.full(3, 0.25), log_b))
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                sol = least_squares(residual, p0, jac=jacobian, method="lm",
                                    xtol=1e-12, ftol=1e-12, max_nfev=4000)
        except (ValueError, FloatingPointError):
            continue
        if not np.all(np.isfinite(sol.x)) or not np.all(np.isfinite(sol.fun)):
            continue
        a, B = _unpack(sol.x)
        order = np.argsort(B)
        a, B = a[order], B[order]
        if np.any(np.diff(B) <= _MIN_SEPARATION * B[1:]):
            continue
        err = float(np.max(np.abs(sol.fun)))
        if best is None or err < best[0]:
            best = (err, a, B)
    if best is None:
        raise FitConvergenceError(f"no admissible fit for inner exponent {alpha_bar!r}")
    err, a, B = best
    # restore the sum constraint exactly after sorting
    a[-1] = 1.0 - math.fsum(a[:-1])
    fit = ExpSumFit(alpha_bar, tuple(float(x) for x in a), tuple(float(x) for x in B),
                    err, grid, optimizer_runs=starts)
    if strict and not fit.meets_gate:
        raise FitQualityError(fit)
    return fit


# ---------------------------------------------------------------------------
# Fit store
# ---------------------------------------------------------------------------

def _format_record(fit: ExpSumFit) -> str:
    g = fit.grid
    fields = [fit.alpha_bar, g.z_min, g.z_max, g.points, *fit.a, *fit.B, fit.max_abs_err]
    return " ".join(repr(float(x)) if not isinstance(x, int) else str(x) for x in fields)


def write_store(path: str | os.PathLike, fits: list[ExpSumFit], seed: int = DEFAULT_SEED) -> None:
    """Write fits sorted by inner exponent; the file is replaced atomically."""
    path = Path(path)
    lines = [STORE_HEADER, f"# seed={seed} starts={DEFAULT_STARTS}"]
    lines += [_format_record(f) for f in sorted(fits, key=lambda f: (f.alpha_bar, f.grid.points))]
    text = "\n".join(lines) + "\n"
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_store(path: str | os.PathLike) -> list[ExpSumFit]:
    """Parse a fit-store file; a missing file is an empty store."""
    path = Path(path)
    if not path.exists():
        return []
    lines = path.read_text(encoding="ascii").splitlines()
    if not lines or lines[0].strip() != STORE_HEADER:
        raise ValueError(f"{path}: not a fit store (expected header {STORE_HEADER!r})")
    fits = []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 13:
            raise ValueError(f"{path}:{lineno}: expected 13 fields, got {len(parts)}")
        try:
            ab, zmin, zmax = (float(x) for x in parts[:3])
            points = int(parts[3])
            vals = [float(x) for x in parts[4:]]
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
        fits.append(ExpSumFit(ab, tuple(vals[:4]), tuple(vals[4:8]), vals[8],
                              GridSpec(zmin, zmax, points)))
    return fits


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------

class FitCache:
    """Thread-safe fit cache with single-flight semantics.

    Concurrent requests for the same inner exponent wait for one optimization;
    requests for other exponents proceed independently. When ``store`` is
    given, existing fits are loaded from it and new fits are appended.
    """

    def __init__(self, store: str | os.PathLike | None = None) -> None:
        self.store = Path(store) if store is not None else None
        self._fits: dict[tuple[float, GridSpec], ExpSumFit] = {}
        self._inflight: dict[tuple[float, GridSpec], threading.Lock] = {}
        self._lock = threading.Lock()
        self._store_lock = threading.Lock()
        self.optimizations = 0
        if self.store is not None:
            for f in read_store(self.store):
                self._fits[(f.alpha_bar, f.grid)] = f

    def _lookup(self, alpha_bar: float, grid: GridSpec) -> ExpSumFit | None:
        hit = self._fits.get((alpha_bar, grid))
        if hit is not None:
            return hit
        for (ab, g), f in self._fits.items():
            if g == grid and abs(ab - alpha_bar) <= _KEY_TOL:
                return f
        return None

    def fits(self) -> list[ExpSumFit]:
        with self._lock:
            return list(self._fits.values())

    def cached(self, alpha_bar: float, grid: GridSpec = DEFAULT_GRID) -> ExpSumFit | None:
        with self._lock:
            return self._lookup(float(alpha_bar), grid)

    def get(self, alpha_bar: float, grid: GridSpec = DEFAULT_GRID, strict: bool = True) -> ExpSumFit:
        alpha_bar = float(alpha_bar)
        key = (alpha_bar, grid)
        with self._lock:
            fit = self._lookup(alpha_bar, grid)
            if fit is None:
                key_lock = self._inflight.setdefault(key, threading.Lock())
        if fit is None:
            with key_lock:
                with self._lock:
                    fit = self._lookup(alpha_bar, grid)
                if fit is None:
                    fit = fit_exp_sum(alpha_bar, grid, strict=False)
                    with self._lock:
                        self._fits[key] = fit
                        if fit.optimizer_runs:
                            self.optimizations += 1
                        self._inflight.pop(key, None)
                    self._persist()
        if strict and not fit.meets_gate:
            raise FitQualityError(fit)
        return fit

    def _persist(self) -> None:
        if self.store is None:
            return
        with self._store_lock:
            write_store(self.store, self.fits())


_default_cache = FitCache()
_default_lock = threading.Lock()


def default_cache() -> FitCache:
    return _default_cache


def set_default_store(store: str | os.PathLike | None) -> FitCache:
    """Replace the process-wide cache with one backed by ``store``."""
    global _default_cache
    with _default_lock:
        _default_cache = FitCache(store)
        return _default_cache


def get_or_fit(alpha_bar: float, cache: FitCache | None = None, strict: bool = True) -> ExpSumFit:
    """Cached front end to :func:`fit_exp_sum`.

    A cached fit is reused when its inner exponent is within 1e-12 of the
    request. ``strict=False`` returns fits that miss the quality gate instead
    of raising.
    """
    return (cache or _default_cache).get(alpha_bar, strict=strict)
