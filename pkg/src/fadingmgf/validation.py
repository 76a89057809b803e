"""Self-validation suite.

Each check compares two independent routes to the same quantity: densities
against textbook formulas written out here without the compact-form mapping,
closed-form MGFs against quadrature, and so on. Gating checks decide the
suite's verdict; informational checks (fit residuals, approximation quality,
the two binary DPSK readings) are reported with their targets but never fail
the run.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gammaln, ive

from . import errorrates, expfit, mgf, models
from .models import (
    AlphaEtaMu,
    AlphaKappaMu,
    AlphaLambdaEtaMu,
    AlphaLambdaMu,
    AlphaMu,
    EtaLambdaMu,
    FadingModel,
)
from .quadrature import QuadratureError, integrate_semi_infinite

__all__ = [
    "CheckResult",
    "Report",
    "random_models",
    "random_eta_lambda_mu",
    "run_suite",
    "TOLERANCES",
]

TOLERANCES = {
    "pdf_normalization": 1e-6,
    "pdf_mean": 1e-4,
    "mgf_normalization": 1e-9,
    "closed_form_equivalence": 1e-10,
    "exact_vs_numeric": 1e-8,
    "reference_density": 1e-9,
    "cross_family": 1e-9,
    "nakagami_exactness": 1e-12,
    "table_identities": 1e-10,
    "rayleigh_bpsk": 1e-6,
    "approx_vs_numeric": 1e-2,
    "fit_gate": expfit.QUALITY_GATE,
}

EQUIVALENCE_S = (0.0, 0.1, 1.0, 10.0, 100.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    tolerance: float
    worst: float
    cases: int
    gating: bool = True
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else ("FAIL" if self.gating else "NOTE")
        return (f"{tag:4}  {self.name:<28} worst={self.worst:.3e}  tol={self.tolerance:.1e}  "
                f"cases={self.cases}{'  ' + self.detail if self.detail else ''}")


@dataclass
class Report:
    checks: list[CheckResult] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    def to_dict(self) -> dict:
        return {
            "schema": errorrates.JSON_SCHEMA,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "info": self.info,
        }


# ---------------------------------------------------------------------------
# Model samples
# ---------------------------------------------------------------------------

def _log_uniform(rng, lo, hi):
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def random_models(n: int, seed: int = 7) -> list[FadingModel]:
    """``n`` in-range models cycling through all six families."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        alpha = float(rng.uniform(0.5, 10.0))
        mu = _log_uniform(rng, 0.05, 50.0)
        eta = _log_uniform(rng, 1e-3, 1e3)
        lam = float(rng.uniform(0.0, 0.999))
        kappa = float(rng.uniform(0.0, 50.0))
        gbar = models.db_to_linear(float(rng.uniform(-5.0, 30.0)))
        out.append([
            EtaLambdaMu(eta, lam, mu, gbar),
            AlphaMu(alpha, mu, gbar),
            AlphaEtaMu(alpha, eta, mu, gbar),
            AlphaLambdaMu(alpha, lam, mu, gbar),
            AlphaKappaMu(alpha, kappa, mu, gbar),
            AlphaLambdaEtaMu(alpha, lam, eta, mu, gbar),
        ][i % 6])
    return out


def random_eta_lambda_mu(n: int, seed: int = 11) -> list[EtaLambdaMu]:
    rng = np.random.default_rng(seed)
    return [EtaLambdaMu(_log_uniform(rng, 1e-2, 1e2), float(rng.uniform(0.0, 0.95)),
                        _log_uniform(rng, 0.1, 10.0),
                        models.db_to_linear(float(rng.uniform(-5.0, 30.0))))
            for _ in range(n)]


# ---------------------------------------------------------------------------
# Reference densities written out independently of the compact mapping
# ---------------------------------------------------------------------------

def _ref_kappa_mu_unit(kappa, mu, w):
    # kappa-mu SNR density with unit mean
    w = np.asarray(w, dtype=float)
    x = 2.0 * mu * np.sqrt(kappa * (1.0 + kappa) * w)
    log_c = math.log(mu) + 0.5 * (mu + 1.0) * math.log1p(kappa) - mu * kappa
    if kappa > 0:
        log_c -= 0.5 * (mu - 1.0) * math.log(kappa)
        log_i = np.log(ive(mu - 1.0, x)) + x
        return np.exp(log_c + 0.5 * (mu - 1.0) * np.log(w) - mu * (1.0 + kappa) * w + log_i)
    # kappa = 0 is the Nakagami-m (Gamma) density
    return np.exp(mu * math.log(mu) - gammaln(mu) + (mu - 1.0) * np.log(w) - mu * w)


def _ref_eta_mu_unit(h, H, mu, w):
    # eta-mu SNR density with unit mean in terms of (h, H)
    w = np.asarray(w, dtype=float)
    if H == 0:
        # Bessel limit: Gamma(2 mu) with rate 2 mu h
        return np.exp(2 * mu * math.log(2 * mu) + mu * math.log(h) - gammaln(2 * mu)
                      + (2 * mu - 1) * np.log(w) - 2 * mu * h * w)
    x = 2.0 * mu * abs(H) * w
    log_c = (math.log(2.0) + 0.5 * math.log(math.pi) + (mu + 0.5) * math.log(mu)
             + mu * math.log(h) - gammaln(mu) - (mu - 0.5) * math.log(abs(H)))
    return np.exp(log_c + (mu - 0.5) * np.log(w) - 2.0 * mu * h * w
                  + np.log(ive(mu - 0.5, x)) + x)


def _power_transform(unit_pdf, alpha, gbar, g):
    # density of g = omega * W**(2/alpha) when W has density unit_pdf, with
    # omega chosen so that E[g] = gbar
    moment = integrate_semi_infinite(
        lambda w: np.where(w > 0, w ** (2.0 / alpha) * unit_pdf(np.maximum(w, 1e-300)), 0.0),
        rel_tol=1e-12).value
    omega = gbar / moment
    w = (np.asarray(g) / omega) ** (alpha / 2.0)
    return unit_pdf(w) * (alpha / 2.0) * w / np.asarray(g)


def reference_pdf(model: FadingModel, g):
    """Density from the classical published forms plus a power transform."""
    g = np.asarray(g, dtype=float)
    if isinstance(model, AlphaMu):
        a, mu, gbar = model.alpha, model.mu, model.gbar
        omega = gbar * math.exp(gammaln(mu) - gammaln(mu + 2.0 / a)) * mu ** (2.0 / a)
        return np.exp(math.log(a / 2.0) + mu * math.log(mu) - gammaln(mu)
                      + (a * mu / 2.0 - 1.0) * np.log(g) - (a * mu / 2.0) * math.log(omega)
                      - mu * (g / omega) ** (a / 2.0))
    if isinstance(model, AlphaKappaMu):
        return _power_transform(lambda w: _ref_kappa_mu_unit(model.kappa, model.mu, w),
                                model.alpha, model.gbar, g)
    if isinstance(model, AlphaEtaMu):
        eta = model.eta
        h, H = (2.0 + 1.0 / eta + eta) / 4.0, (1.0 / eta - eta) / 4.0
        return _power_transform(lambda w: _ref_eta_mu_unit(h, H, model.mu, w),
                                model.alpha, model.gbar, g)
    if isinstance(model, AlphaLambdaMu):
        lam = model.lam
        h, H = 1.0 / (1.0 - lam * lam), lam / (1.0 - lam * lam)
        return _power_transform(lambda w: _ref_eta_mu_unit(h, H, model.mu, w),
                                model.alpha, model.gbar, g)
    raise TypeError(f"no reference density for {model.family}")


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(b), 1e-300)


def _check(name: str, tol: float, fn, gating: bool = True) -> CheckResult:
    """Run ``fn() -> (worst, cases, detail)``; an exception fails the check."""
    try:
        worst, cases, detail = fn()
    except (ArithmeticError, ValueError, TypeError, AssertionError, QuadratureError) as exc:
        return CheckResult(name, False, tol, math.inf, 0, gating, f"{type(exc).__name__}: {exc}")
    passed = bool(worst <= tol)
    return CheckResult(name, passed, tol, float(worst), cases, gating, detail)


def _worst(pairs) -> tuple[float, int, str]:
    worst, n, where = 0.0, 0, ""
    for label, err in pairs:
        n += 1
        if not err <= worst:        # NaN counts as worst
            worst, where = (err if err == err else math.inf), label
    return worst, n, (f"at {where}" if where else "")


def _pdf_audit(sample, which: str):
    def run():
        def gen():
            for m in sample:
                if which == "norm":
                    yield repr(m), abs(mgf.mgf_numeric(m, 0.0) - 1.0)
                else:
                    yield repr(m), _rel(-mgf.mgf_derivative_numeric(m, 1, 0.0), m.gbar)
        return _worst(gen())
    return run


def _equivalence(sample):
    def gen():
        for m in sample:
            for s in EQUIVALENCE_S:
                yield f"{m!r}, s={s}", _rel(mgf.mgf_eta_lambda_mu_hyp(m, s),
                                            mgf.mgf_eta_lambda_mu_rational(m, s))
    return lambda: _worst(gen())


def _exact_vs_numeric(sample):
    def gen():
        for m in sample:
            for s in EQUIVALENCE_S:
                num = mgf.mgf_numeric(m, s)
                for route in (mgf.mgf_eta_lambda_mu_rational, mgf.mgf_eta_lambda_mu_hyp):
                    yield f"{route.__name__} {m!r}, s={s}", _rel(route(m, s), num)
    return lambda: _worst(gen())


def _reference_models(per_family: int, seed: int = 5):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(per_family):
        a = float(rng.uniform(0.6, 8.0))
        mu = _log_uniform(rng, 0.2, 8.0)
        g = models.db_to_linear(float(rng.uniform(-5.0, 20.0)))
        out += [AlphaMu(a, mu, g),
                AlphaKappaMu(a, float(rng.uniform(0.1, 8.0)), mu, g),
                AlphaEtaMu(a, _log_uniform(rng, 0.05, 20.0), mu, g),
                AlphaLambdaMu(a, float(rng.uniform(0.05, 0.9)), mu, g)]
    return out


def _reference_density(sample):
    grid = np.array([0.05, 0.3, 1.0, 2.0, 4.0])

    def gen():
        for m in sample:
            g = grid * m.gbar
            ref = reference_pdf(m, g)
            got = models.pdf(m, g)
            keep = ref > 1e-250      # both underflow in the far tail
            yield repr(m), float(np.max(np.abs(got[keep] / ref[keep] - 1.0)))
    return lambda: _worst(gen())


def _cross_pairs(seed: int = 3, n: int = 4):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        a = float(rng.uniform(0.6, 8.0))
        mu = _log_uniform(rng, 0.2, 8.0)
        eta = _log_uniform(rng, 0.05, 20.0)
        lam = float(rng.uniform(0.05, 0.9))
        g = models.db_to_linear(float(rng.uniform(-5.0, 20.0)))
        pairs += [
            (AlphaEtaMu(a, 1.0, mu, g), AlphaMu(a, 2.0 * mu, g)),
            (AlphaLambdaEtaMu(a, 0.0, eta, mu, g), AlphaEtaMu(a, eta, mu, g)),
            (AlphaLambdaEtaMu(a, lam, 1.0, mu, g), AlphaLambdaMu(a, lam, mu, g)),
            (EtaLambdaMu(eta, lam, mu, g), AlphaLambdaEtaMu(2.0, lam, eta, mu, g)),
            (EtaLambdaMu(eta, 0.0, mu, g), AlphaEtaMu(2.0, eta, mu, g)),
            (EtaLambdaMu(1.0, lam, mu, g), AlphaLambdaMu(2.0, lam, mu, g)),
            (AlphaKappaMu(a, 0.0, mu, g), AlphaMu(a, mu, g)),
        ]
    return pairs


def _cross_family(pairs):
    grid = np.array([0.05, 0.3, 1.0, 2.0, 4.0])

    def gen():
        for m1, m2 in pairs:
            g = grid * m1.gbar
            p1, p2 = models.pdf(m1, g), models.pdf(m2, g)
            keep = p2 > 1e-250
            yield f"{m1!r} vs {m2!r}", float(np.max(np.abs(p1[keep] / p2[keep] - 1.0)))
    return lambda: _worst(gen())


def _approx_normalization(sample):
    def gen():
        for m in sample:
            fit = mgf.fit_for(m, None)
            tol_scale = max(2.0 * fit.max_abs_err, 1e-12)
            yield repr(m), abs(mgf.mgf_approx_unclipped(m, 0.0, fit) - 1.0) / tol_scale
    return lambda: _worst(gen())


def _approx_models(alphas, seed: int = 13):
    rng = np.random.default_rng(seed)
    out = []
    for a in alphas:
        mu = _log_uniform(rng, 0.3, 5.0)
        out += [AlphaMu(a, mu), AlphaKappaMu(a, float(rng.uniform(0.0, 5.0)), mu),
                AlphaEtaMu(a, _log_uniform(rng, 0.1, 10.0), mu),
                AlphaLambdaMu(a, float(rng.uniform(0.0, 0.9)), mu),
                AlphaLambdaEtaMu(a, float(rng.uniform(0.0, 0.9)), _log_uniform(rng, 0.1, 10.0), mu)]
    return out


def _nakagami():
    def gen():
        for m_ in (0.5, 1.0, 2.5, 7.0):
            for gbar in (0.3, 1.0, 10.0):
                model = AlphaMu(2.0, m_, gbar)
                for s in (0.1, 1.0, 10.0, 100.0):
                    ref = (m_ / (m_ + s * gbar)) ** m_
                    yield f"{model!r}, s={s}", _rel(mgf.mgf(model, s, "approx"), ref)
    return lambda: _worst(gen())


def _rayleigh_bpsk():
    spec = errorrates.modulation_spec("mpsk", 2)

    def gen():
        for db in (0.0, 5.0, 10.0, 20.0):
            g = models.db_to_linear(db)
            yield f"{db} dB", _rel(errorrates.aser(models.rayleigh(g), spec),
                                   errorrates.rayleigh_bpsk_reference(g))
    return lambda: _worst(gen())


def _approx_vs_numeric(alphas):
    s_grid = (0.1, 1.0, 10.0, 100.0)

    def gen():
        for m in _approx_models(alphas):
            for s in s_grid:
                yield f"{m!r}, s={s}", _rel(mgf.mgf(m, s, "approx"), mgf.mgf_numeric(m, s))
    return lambda: _worst(gen())


def _fit_gate(alphas):
    def gen():
        for ab in alphas:
            fit = expfit.get_or_fit(ab, strict=False)
            yield f"alpha_bar={ab}", expfit.dense_residual(fit)
    return lambda: _worst(gen())


def _table_identities(sample):
    # the in-phase/quadrature constants must describe a unit-mean base
    # variate: 2 mu c / (c^2 - d^2) = 1, and for eta-lambda-mu also
    # c^2 - d^2 = 4 eta (1 - lam^2) b^2
    def gen():
        for m in sample:
            if isinstance(m, (AlphaMu, AlphaKappaMu)):
                continue
            diag = models.compact_params(m).diagnostics
            c, d = diag["c_bar"], diag["d_bar"]
            gap = (c - d) * (c + d)
            yield f"unit mean {m!r}", abs(2.0 * m.mu * c / gap - 1.0)
            if "b_bar" in diag:
                ref = 4.0 * m.eta * (1.0 - m.lam * m.lam) * diag["b_bar"] ** 2
                yield f"gap {m!r}", _rel(gap, ref)
    return lambda: _worst(gen())


def run_suite(quick: bool = False, progress=None, fail_fast: bool = False) -> Report:
    """Run every check.

    ``quick`` shrinks the samples and skips the informational checks;
    ``fail_fast`` stops at the first failing gating check. Both exist for
    the mutation tests.
    """
    t0 = time.perf_counter()
    report = Report()
    n_models = 30 if quick else 200
    sample = random_models(n_models)
    elm = random_eta_lambda_mu(12 if quick else 100)
    plan = [
        ("table_identities", _table_identities(sample), True),
        ("pdf_normalization", _pdf_audit(sample, "norm"), True),
        ("pdf_mean", _pdf_audit(sample, "mean"), True),
        ("mgf_normalization", lambda: _worst(
            (repr(m), max(abs(mgf.mgf_eta_lambda_mu_rational(m, 0.0) - 1.0),
                          abs(mgf.mgf_eta_lambda_mu_hyp(m, 0.0) - 1.0),
                          abs(mgf.mgf_numeric(m, 0.0) - 1.0)))
            for m in elm), True),
        ("approx_normalization", _approx_normalization(_approx_models((1.5, 2.0, 3.0, 4.0))), True),
        ("closed_form_equivalence", _equivalence(elm), True),
        ("exact_vs_numeric", _exact_vs_numeric(elm[:6] if quick else elm), True),
        ("reference_density", _reference_density(_reference_models(3 if quick else 8)), True),
        ("cross_family", _cross_family(_cross_pairs(n=2 if quick else 6)), True),
        ("nakagami_exactness", _nakagami(), True),
        ("rayleigh_bpsk", _rayleigh_bpsk(), True),
    ]
    tol = dict(TOLERANCES, approx_normalization=1.0)
    for name, fn, gating in plan:
        res = _check(name, tol[name], fn, gating)
        report.checks.append(res)
        if progress:
            progress(res)
        if fail_fast and not res.passed:
            report.info["stopped_early"] = True
            report.info["seconds"] = round(time.perf_counter() - t0, 3)
            return report
    if not quick:
        for name, fn, tol_ in (
            ("fit_gate", _fit_gate((0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0)), TOLERANCES["fit_gate"]),
            ("approx_vs_numeric", _approx_vs_numeric((1.0, 1.5, 2.0, 3.0, 4.0)),
             TOLERANCES["approx_vs_numeric"]),
        ):
            res = _check(name, tol_, fn, gating=False)
            report.checks.append(res)
            if progress:
                progress(res)
    # binary DPSK under both readings, at 10 dB over Rayleigh
    g = models.db_to_linear(10.0)
    as_tabulated = errorrates.aser(models.rayleigh(g), errorrates.modulation_spec("mdpsk", 2))
    m1 = mgf.mgf(models.rayleigh(g), 1.0)
    report.info["binary_dpsk_rayleigh_10db"] = {
        "tabulated_row": as_tabulated, "classical_half_mgf": 0.5 * m1, "mgf_at_1": m1,
        "verification": "pending",
    }
    report.info["tolerances"] = tol
    report.info["models_audited"] = n_models
    report.info["quick"] = quick
    report.info["seconds"] = round(time.perf_counter() - t0, 3)
    return report
