import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fadingmgf import specfun
from fadingmgf.specfun import DomainError

mpmath.mp.dps = 40


def rel(a, b):
    return abs(a - float(b)) / abs(float(b))


@pytest.mark.parametrize("x", [1e-300, 1e-8, 0.5, 1.0, 2.5, 10.0, 171.5, 1e5, 1e300])
def test_ln_gamma_matches_mpmath(x):
    assert specfun.ln_gamma(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-14, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
def test_ln_gamma_rejects(x):
    with pytest.raises(DomainError):
        specfun.ln_gamma(x)


BESSEL_CASES = [(nu, x) for nu in (-0.5, -0.25, 0.0, 0.5, 1.0, 3.7, 25.0, 50.0)
                for x in (1e-12, 1e-3, 0.5, 1.0, 1.0001, 7.0, 300.0, 5e4, 2e6, 1e9)]


@pytest.mark.parametrize("nu,x", BESSEL_CASES)
def test_log_bessel_i_matches_mpmath(nu, x):
    ref = mpmath.log(mpmath.besseli(nu, x))
    assert specfun.log_bessel_i(nu, x) == pytest.approx(float(ref), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.5, 2.0, 10.0])
def test_reduced_bessel_limit_at_zero(nu):
    expected = -nu * math.log(2.0) - math.lgamma(nu + 1.0)
    assert specfun.log_bessel_i_reduced(nu, 0.0) == pytest.approx(expected, rel=1e-15, abs=1e-15)


def test_bessel_values_and_zero():
    assert specfun.bessel_i(0.0, 0.0) == 1.0
    assert specfun.bessel_i(1.0, 0.0) == 0.0
    assert specfun.log_bessel_i(2.0, 0.0) == -math.inf
    assert specfun.bessel_i(0.5, 2.0) == pytest.approx(
        math.sqrt(2.0 / (math.pi * 2.0)) * math.sinh(2.0), rel=1e-14)


def test_bessel_vectorised_matches_scalar():
    x = np.array([0.0, 0.3, 1.0, 4.0, 1e3, 1e7])
    vec = specfun.log_bessel_i_reduced(1.5, x)
    assert vec.shape == x.shape
    for xi, vi in zip(x, vec):
        assert vi == specfun.log_bessel_i_reduced(1.5, float(xi))


def test_bessel_infinite_argument_gives_inf():
    assert specfun.log_bessel_i_reduced(0.0, math.inf) == math.inf


@pytest.mark.parametrize("nu,x", [(-1.0, 1.0), (-2.5, 1.0), (0.0, -1.0), (0.0, math.nan),
                                  (math.nan, 1.0)])
def test_bessel_domain(nu, x):
    with pytest.raises(DomainError):
        specfun.log_bessel_i(nu, x)


@given(nu=st.floats(-0.9, 40.0), x=st.floats(0.0, 1e4))
def test_bessel_recurrence(nu, x):
    # I_{nu-1}(x) - I_{nu+1}(x) = (2 nu / x) I_nu(x), in scaled form
    if x < 1e-3 or nu < 0.2:
        return
    lm = specfun.log_bessel_i(nu - 1.0, x) if nu - 1.0 > -1.0 else None
    if lm is None:
        return
    lp = specfun.log_bessel_i(nu + 1.0, x)
    l0 = specfun.log_bessel_i(nu, x)
    lhs = math.exp(lm - l0) - math.exp(lp - l0)
    assert lhs == pytest.approx(2.0 * nu / x, rel=1e-9)


HYP2F1_CASES = [
    (0.5, 1.5, 2.0, 0.3),
    (2.5, 3.0, 1.5, 0.9),
    (10.0, 12.5, 3.0, 0.99),
    (0.7, 1.2, 4.0, 0.9999),
    (1.0, 1.0, 2.0, 0.5),
    (-3.0, 2.0, 1.5, 0.7),          # terminating
    (0.3, 2.0, 2.0, 0.95),          # b == c collapses
    (40.0, 40.5, 1.5, 0.8),
]


@pytest.mark.parametrize("a,b,c,z", HYP2F1_CASES)
def test_hyp2f1_matches_mpmath(a, b, c, z):
    ref = mpmath.hyp2f1(a, b, c, z)
    assert rel(specfun.hyp2f1(a, b, c, z), ref) < 1e-12


@pytest.mark.parametrize("a,b,c,z", [t for t in HYP2F1_CASES if t[0] > 0])
def test_log_hyp2f1_matches_mpmath(a, b, c, z):
    ref = mpmath.log(mpmath.hyp2f1(a, b, c, z))
    assert specfun.log_hyp2f1(a, b, c, z) == pytest.approx(float(ref), rel=1e-12, abs=1e-13)


@pytest.mark.parametrize("a,b,c,z", [(1.0, 1.0, 2.0, 1.0), (1.0, 1.0, 2.0, -0.1),
                                     (1.0, 1.0, 0.0, 0.5), (1.0, 1.0, -2.0, 0.5)])
def test_hyp2f1_domain(a, b, c, z):
    with pytest.raises(DomainError):
        specfun.hyp2f1(a, b, c, z)


@given(a=st.floats(0.05, 20.0), b=st.floats(0.05, 20.0), z=st.floats(0.0, 0.999))
def test_hyp2f1_collapse_identity(a, b, z):
    assert specfun.hyp2f1(a, b, b, z) == pytest.approx((1.0 - z) ** -a, rel=1e-13)


@given(a=st.floats(0.05, 10.0), b=st.floats(0.05, 10.0), c=st.floats(0.5, 10.0),
       z=st.floats(0.0, 0.95))
def test_hyp2f1_symmetric(a, b, c, z):
    assert specfun.hyp2f1(a, b, c, z) == pytest.approx(specfun.hyp2f1(b, a, c, z), rel=1e-12)


HYP1F1_CASES = [(0.5, 1.5, 0.3), (2.0, 3.5, 10.0), (1.0, 0.5, 200.0), (7.5, 2.0, 1500.0),
                (3.0, 3.0, 5.0), (0.25, 4.0, 1e-6)]


@pytest.mark.parametrize("a,b,z", HYP1F1_CASES)
def test_log_hyp1f1_matches_mpmath(a, b, z):
    ref = mpmath.log(mpmath.hyp1f1(a, b, z))
    assert specfun.log_hyp1f1(a, b, z) == pytest.approx(float(ref), rel=1e-12, abs=1e-13)


@pytest.mark.parametrize("a,b,z", [(0.5, 1.5, 0.3), (2.0, 3.5, 10.0), (-2.0, 1.5, 3.0),
                                   (1.5, 2.5, -2.0)])
def test_hyp1f1_matches_mpmath(a, b, z):
    assert rel(specfun.hyp1f1(a, b, z), mpmath.hyp1f1(a, b, z)) < 1e-11


def test_hyp1f1_kummer_transformation():
    # 1F1(a; b; z) = e^z 1F1(b - a; b; -z)
    a, b, z = 1.3, 2.9, 1.7
    assert specfun.hyp1f1(a, b, z) == pytest.approx(
        math.exp(z) * specfun.hyp1f1(b - a, b, -z), rel=1e-12)


def test_hyp1f1_domain():
    with pytest.raises(DomainError):
        specfun.hyp1f1(1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        specfun.log_hyp1f1(1.0, 1.5, -1.0)
