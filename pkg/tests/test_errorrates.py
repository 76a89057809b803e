import json
import math
import warnings

import numpy as np
import pytest
from scipy import integrate, special

from fadingmgf import errorrates, mgf, models
from fadingmgf.errorrates import SerIntegrityError, modulation_spec
from fadingmgf.models import AlphaKappaMu, AlphaMu, EtaLambdaMu


def rayleigh_mpsk(M, g):
    # classical closed form for M-PSK over Rayleigh fading
    a = math.sin(math.pi / M) ** 2 * g
    r = math.sqrt(a / (1.0 + a))
    return ((M - 1) / M) * (1.0 - r * (M / ((M - 1) * math.pi))
                            * (math.pi / 2 + math.atan(r / math.tan(math.pi / M))))


def awgn_average(model, fn):
    # E[P(g)] by direct quadrature of the conditional error rate over the density
    def integrand(g):
        return float(models.pdf(model, g)) * fn(g) if g > 0 else 0.0
    return integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-11, limit=500,
                          points=None)[0]


@pytest.mark.parametrize("db", [0.0, 5.0, 10.0, 20.0])
def test_rayleigh_bpsk(db):
    g = models.db_to_linear(db)
    got = errorrates.aser(models.rayleigh(g), modulation_spec("mpsk", 2))
    assert got == pytest.approx(0.5 * (1.0 - math.sqrt(g / (1.0 + g))), rel=1e-6)
    assert errorrates.rayleigh_bpsk_reference(g) == pytest.approx(
        0.5 * (1.0 - math.sqrt(g / (1.0 + g))), rel=1e-12)


def test_rayleigh_bpsk_ten_db_value():
    assert errorrates.rayleigh_bpsk_reference(10.0) == pytest.approx(2.3269e-2, rel=1e-4)


@pytest.mark.parametrize("M", [4, 8, 16])
def test_rayleigh_mpsk_closed_form(M):
    g = 10.0
    got = errorrates.aser(models.rayleigh(g), modulation_spec("mpsk", M))
    assert got == pytest.approx(rayleigh_mpsk(M, g), rel=1e-8)


@pytest.mark.parametrize("M", [2, 4, 8])
def test_mpam_matches_conditional_average(M):
    model = models.nakagami_m(2.0, 5.0)
    k = 3.0 / (M * M - 1.0)

    def cond(g):
        return 2.0 * (1.0 - 1.0 / M) * 0.5 * special.erfc(math.sqrt(k * g))
    ref = awgn_average(model, cond)
    got = errorrates.aser(model, modulation_spec("mpam", M))
    assert got == pytest.approx(ref, rel=1e-7)


@pytest.mark.parametrize("M", [4, 16, 64])
def test_mqam_matches_conditional_average(M):
    model = EtaLambdaMu(0.5, 0.3, 1.5, 20.0)
    q = 1.0 - 1.0 / math.sqrt(M)

    def cond(g):
        p = q * special.erfc(math.sqrt(1.5 * g / (M - 1.0)))
        return 2.0 * p - p * p
    ref = awgn_average(model, cond)
    got = errorrates.aser(model, modulation_spec("mqam", M))
    assert got == pytest.approx(ref, rel=1e-7)


def test_mdpsk_row_as_tabulated():
    spec = modulation_spec("mdpsk", 2)
    assert spec.verification == "pending"
    g = 10.0
    model = models.rayleigh(g)
    got = errorrates.aser(model, spec)
    # at M = 2 the tabulated constants reduce to M(1), not the classical 0.5 M(1)
    assert got == pytest.approx(mgf.mgf(model, 1.0), rel=1e-8)


def test_mdpsk_other_orders_recorded():
    for M in (4, 8):
        spec = modulation_spec("mdpsk", M)
        assert spec.V == pytest.approx(1.0 + math.cos(math.pi / M))
        assert spec.Lambda == pytest.approx(math.cos(math.pi / M))


def test_strategies_agree_for_exact_family():
    model = EtaLambdaMu(2.0, 0.5, 1.0, 10.0)
    spec = modulation_spec("mpsk", 4)
    exact = errorrates.aser(model, spec, "exact")
    assert errorrates.aser(model, spec, "numeric") == pytest.approx(exact, rel=1e-8)
    assert errorrates.aser(model, spec) == exact


def test_alpha_two_approximation_is_exact():
    model = AlphaKappaMu(2.0, 3.0, 1.5, 10.0)
    spec = modulation_spec("mqam", 16)
    assert errorrates.aser(model, spec, "approx") == pytest.approx(
        errorrates.aser(model, spec, "numeric"), rel=1e-8)


@pytest.mark.parametrize("scheme,M", [("qpsk", 4), ("mpsk", 1), ("mpsk", 2.5), ("mqam", 8),
                                      ("mqam", 2), ("mpsk", True)])
def test_modulation_errors(scheme, M):
    with pytest.raises(ValueError, match="^(scheme|order):"):
        modulation_spec(scheme, M)


def test_spec_constants_and_serialisation():
    spec = modulation_spec("MQAM", 16)
    assert spec.scheme == "mqam" and spec.N == 2
    d = spec.to_dict()
    assert d["terms"][1]["theta"] == pytest.approx(math.pi / 4)
    json.dumps(d)
    # V = 0, Lambda = -1/2: the argument is phi / sin^2(theta), infinite at 0
    got = spec.argument(np.array([0.0, 0.3]))
    assert got[0] == math.inf
    assert got[1] == pytest.approx(spec.phi / math.sin(0.3) ** 2, rel=1e-15)


def test_ser_monotone_in_order_and_snr():
    model = AlphaMu(2.5, 1.5, 10.0)
    psk = [errorrates.aser(model, modulation_spec("mpsk", M)) for M in (2, 4, 8, 16)]
    assert all(a < b for a, b in zip(psk, psk[1:]))
    snr = [errorrates.aser(model.with_gbar(g), modulation_spec("mpam", 4)) for g in (1, 10, 100)]
    assert all(a > b for a, b in zip(snr, snr[1:]))


def test_floor_warning():
    model = models.nakagami_m(20.0, models.db_to_linear(30.0))
    with pytest.warns(RuntimeWarning, match="floor"):
        res = errorrates.aser_result(model, modulation_spec("mpsk", 2))
    assert res.warnings and 0.0 < res.value < errorrates.SER_FLOOR


def test_integrity_error_for_broken_mgf(monkeypatch):
    # a constant MGF of 3 gives (1/pi)(pi/2)(3) = 1.5 for BPSK
    monkeypatch.setattr(mgf, "mgf", lambda model, s, strategy, fit=None: 3.0)
    with pytest.raises(SerIntegrityError):
        errorrates.aser(AlphaMu(3.0, 1.0), modulation_spec("mpsk", 2), "approx")


def test_sweep_outputs():
    model = models.rayleigh()
    spec = modulation_spec("mpsk", 2)
    curve = errorrates.aser_sweep(model, [0.0, 5.0, 10.0], spec)
    assert curve.strategy == "approx_closed_form"
    np.testing.assert_allclose(
        curve.ser, [errorrates.rayleigh_bpsk_reference(models.db_to_linear(d)) for d in (0, 5, 10)],
        rtol=1e-8)
    lines = curve.to_csv().splitlines()
    assert lines[0] == "gbar_db,ser,strategy,quad_error"
    assert float(lines[2].split(",")[1]) == curve.points[1].ser
    doc = json.loads(curve.to_json())
    assert doc["schema"] == errorrates.JSON_SCHEMA
    assert "gbar_db" not in doc["model"]
    assert doc["modulation"]["M"] == 2


def test_sweep_threads_match_serial():
    model = AlphaMu(3.0, 1.2)
    spec = modulation_spec("mpsk", 4)
    grid = np.arange(-5.0, 20.0, 5.0)
    serial = errorrates.aser_sweep(model, grid, spec, jobs=1)
    threaded = errorrates.aser_sweep(model, grid, spec, jobs=4)
    assert serial.to_csv() == threaded.to_csv()


@pytest.mark.parametrize("grid", [[], [1.0, 1.0], [3.0, 2.0]])
def test_sweep_grid_errors(grid):
    with pytest.raises(ValueError, match="sweep"):
        errorrates.aser_sweep(models.rayleigh(), grid, modulation_spec("mpsk", 2))


def test_sweep_records_point_failures(monkeypatch):
    real = errorrates.aser_result

    def flaky(model, spec, strategy, rel_tol=errorrates.SER_REL_TOL):
        if model.gbar > 5.0:
            raise SerIntegrityError("boom")
        return real(model, spec, strategy, rel_tol)
    monkeypatch.setattr(errorrates, "aser_result", flaky)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        curve = errorrates.aser_sweep(models.rayleigh(), [0.0, 10.0], modulation_spec("mpsk", 2))
    assert curve.points[0].error is None
    assert curve.points[1].error.startswith("SerIntegrityError")
    assert math.isnan(curve.points[1].ser)
    assert json.loads(curve.to_json())["points"][1]["ser"] is None
