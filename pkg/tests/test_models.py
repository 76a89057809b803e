import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special, stats

from fadingmgf import mgf, models
from fadingmgf.models import (
    AlphaEtaMu,
    AlphaKappaMu,
    AlphaLambdaEtaMu,
    AlphaLambdaMu,
    AlphaMu,
    EtaLambdaMu,
    ModelValidationError,
)

G = np.array([1e-3, 0.05, 0.4, 1.0, 2.0, 5.0])


def test_rayleigh_density():
    gbar = 3.0
    got = models.pdf(models.rayleigh(gbar), G * gbar)
    np.testing.assert_allclose(got, np.exp(-G) / gbar, rtol=1e-13)


@pytest.mark.parametrize("m", [0.5, 1.7, 4.0, 30.0])
def test_nakagami_density(m):
    gbar = 0.7
    ref = stats.gamma(m, scale=gbar / m).pdf(G * gbar)
    # log-domain evaluation: relative error grows with |log pdf| in the far tail
    np.testing.assert_allclose(models.pdf(models.nakagami_m(m, gbar), G * gbar), ref, rtol=1e-11)


@pytest.mark.parametrize("alpha", [0.8, 1.5, 3.0, 7.0])
def test_weibull_density(alpha):
    # g = lam X^(2/alpha) with X ~ Exp(1): Weibull with shape alpha/2
    gbar = 2.0
    k = alpha / 2.0
    lam = gbar / math.gamma(1.0 + 1.0 / k)
    ref = stats.weibull_min(k, scale=lam).pdf(G * gbar)
    np.testing.assert_allclose(models.pdf(models.weibull(alpha, gbar), G * gbar), ref, rtol=1e-12)


@pytest.mark.parametrize("K", [0.0, 0.5, 3.0, 20.0])
def test_rice_density(K):
    gbar = 1.5
    g = G * gbar
    arg = 2.0 * np.sqrt(K * (1.0 + K) * g / gbar)
    ref = ((1.0 + K) / gbar * np.exp(-K - (1.0 + K) * g / gbar + arg) * special.i0e(arg))
    np.testing.assert_allclose(models.pdf(models.kappa_mu(K, 1.0, gbar), g), ref, rtol=1e-12)


@pytest.mark.parametrize("q", [0.1, 0.5, 0.9, 1.0])
def test_hoyt_density(q):
    gbar = 2.0
    g = G * gbar
    q2 = q * q
    x = (1.0 - q2 * q2) * g / (4.0 * q2 * gbar)
    ref = ((1.0 + q2) / (2.0 * q * gbar)
           * np.exp(-(1.0 + q2) ** 2 * g / (4.0 * q2 * gbar) + x) * special.i0e(x))
    np.testing.assert_allclose(models.pdf(models.hoyt(q, gbar), g), ref, rtol=1e-12)


@pytest.mark.parametrize("mu", [0.3, 1.0, 4.5])
def test_equal_power_two_gamma_is_nakagami(mu):
    m = EtaLambdaMu(1.0, 0.0, mu, 1.2)
    ref = stats.gamma(2.0 * mu, scale=1.2 / (2.0 * mu)).pdf(G * 1.2)
    np.testing.assert_allclose(models.pdf(m, G * 1.2), ref, rtol=1e-12)


def test_one_sided_gaussian_density():
    gbar = 1.0
    ref = np.exp(-G / (2 * gbar)) / np.sqrt(2 * np.pi * G * gbar)
    np.testing.assert_allclose(models.pdf(models.one_sided_gaussian(gbar), G), ref, rtol=1e-12)


def test_alpha_two_mapping_matches_tables():
    # at alpha = 2 the mean-normalised scale equals gbar
    cp = models.compact_params(AlphaMu(2.0, 1.5, 4.0))
    assert cp.scale == pytest.approx(4.0, rel=1e-14)
    assert cp.beta == pytest.approx(1.5 / 4.0, rel=1e-14)
    assert cp.nu is None
    cp = models.compact_params(AlphaKappaMu(2.0, 2.0, 1.5, 4.0))
    assert (cp.r, cp.nu) == (0.5, 0.5)
    assert cp.d == pytest.approx(2 * 1.5 * math.sqrt(2.0 * 3.0) / math.sqrt(4.0), rel=1e-13)
    cp = models.compact_params(EtaLambdaMu(0.5, 0.3, 2.0, 1.0))
    assert (cp.r, cp.nu, cp.m) == (1.0, 1.5, 2.5)


def random_model():
    mu = st.floats(0.1, 20.0)
    gbar = st.floats(0.01, 1e4)
    alpha = st.floats(0.6, 10.0)
    eta = st.floats(1e-2, 1e2)
    lam = st.floats(0.0, 0.95)
    kappa = st.floats(0.0, 30.0)
    return st.one_of(
        st.builds(EtaLambdaMu, eta, lam, mu, gbar),
        st.builds(AlphaMu, alpha, mu, gbar),
        st.builds(AlphaEtaMu, alpha, eta, mu, gbar),
        st.builds(AlphaLambdaMu, alpha, lam, mu, gbar),
        st.builds(AlphaKappaMu, alpha, kappa, mu, gbar),
        st.builds(AlphaLambdaEtaMu, alpha, lam, eta, mu, gbar),
    )


@given(random_model())
def test_density_is_normalised_with_correct_mean(m):
    assert mgf.mgf_numeric(m, 0.0) == pytest.approx(1.0, abs=1e-6)
    assert -mgf.mgf_derivative_numeric(m, 1, 0.0) == pytest.approx(m.gbar, rel=1e-4)


@given(random_model(), st.floats(0.01, 100.0))
def test_density_scales_with_mean(m, c):
    scaled = m.with_gbar(m.gbar * c)
    g = G * m.gbar
    np.testing.assert_allclose(models.log_pdf(scaled, g * c), models.log_pdf(m, g) - math.log(c),
                               rtol=1e-9, atol=1e-9)


@given(random_model())
def test_density_nonnegative_and_finite(m):
    values = models.pdf(m, np.logspace(-8, 3, 50) * m.gbar)
    assert np.all(np.isfinite(values))
    assert np.all(values >= 0)


def test_validate_lists_every_problem():
    problems = models.validate(AlphaLambdaEtaMu(-1.0, 1.0, 0.0, math.nan, 0.0))
    assert len(problems) == 5
    assert models.validate(AlphaMu(11.0, 1.0)) == [
        "α must lie in [0, 10] (library limit; got 11.0)"]
    assert models.validate(AlphaMu(2.0, 1.0)) == []
    with pytest.raises(ModelValidationError):
        models.pdf(AlphaMu(2.0, -1.0), 1.0)


def test_pdf_rejects_nonpositive_snr():
    with pytest.raises(ValueError):
        models.pdf(models.rayleigh(), np.array([1.0, 0.0]))


@pytest.mark.parametrize("m", [EtaLambdaMu(0.5, 0.2, 1.0, 10.0), AlphaMu(3.0, 2.0, 0.1),
                               AlphaKappaMu(1.5, 0.0, 0.7, 2.0),
                               AlphaLambdaEtaMu(4.0, 0.5, 3.0, 1.5, 1e3)])
def test_record_round_trip(m):
    rec = models.to_record(m)
    back = models.from_record(rec)
    assert type(back) is type(m)
    assert back.shape() == m.shape()
    assert back.gbar == pytest.approx(m.gbar, rel=1e-14)


@pytest.mark.parametrize("rec,prefix", [
    ({"family": "nope", "gbar_db": 0}, "family"),
    ({"family": "alpha_mu", "alpha": 2}, "gbar_db"),
    ({"family": "alpha_mu", "alpha": 2, "gbar_db": 0}, "mu"),
    ({"family": "alpha_mu", "alpha": "x", "mu": 1, "gbar_db": 0}, "alpha"),
    ({"family": "alpha_mu", "alpha": 2, "mu": 1, "eta": 1, "gbar_db": 0}, "eta"),
])
def test_from_record_errors_name_the_field(rec, prefix):
    with pytest.raises(ValueError, match=f"^{prefix}"):
        models.from_record(rec)


def test_special_case_arguments():
    with pytest.raises(ValueError):
        models.special_case("nope")
    with pytest.raises(TypeError):
        models.special_case("hoyt", m=1.0)
    with pytest.raises(ModelValidationError):
        models.nakagami_m(0.3)
    with pytest.raises(ModelValidationError):
        models.hoyt(1.5)


def test_db_conversion():
    assert models.db_to_linear(10.0) == pytest.approx(10.0)
    assert models.linear_to_db(models.db_to_linear(-3.7)) == pytest.approx(-3.7)
