import math

import numpy as np
import pytest

from fadingmgf import models, validation
from fadingmgf.models import AlphaEtaMu, AlphaKappaMu, AlphaLambdaMu, AlphaMu


def test_random_models_cover_families_within_limits():
    sample = validation.random_models(60)
    assert {type(m) for m in sample} == set(models.FAMILIES.values())
    assert all(models.validate(m) == [] for m in sample)
    assert validation.random_models(60) == sample


@pytest.mark.parametrize("model", [
    AlphaMu(3.3, 0.7, 2.0),
    AlphaKappaMu(1.2, 4.0, 2.5, 0.5),
    AlphaEtaMu(5.0, 0.2, 1.3, 10.0),
    AlphaEtaMu(2.0, 1.0, 0.8, 1.0),
    AlphaLambdaMu(0.9, 0.6, 3.0, 3.0),
])
def test_reference_densities_agree_with_compact_form(model):
    g = np.array([0.1, 0.5, 1.0, 3.0]) * model.gbar
    np.testing.assert_allclose(models.pdf(model, g), validation.reference_pdf(model, g), rtol=1e-9)


def test_check_wraps_exceptions_as_failures():
    def boom():
        raise ArithmeticError("no")
    res = validation._check("x", 1.0, boom)
    assert not res.passed and res.worst == math.inf and "ArithmeticError" in res.detail


def test_nan_counts_as_worst():
    worst, cases, detail = validation._worst([("a", 1e-3), ("b", math.nan), ("c", 0.5)])
    assert worst == math.inf and cases == 3 and detail == "at b"


def test_report_verdict_ignores_informational_checks():
    report = validation.Report([
        validation.CheckResult("gate", True, 1.0, 0.5, 3),
        validation.CheckResult("note", False, 1.0, 2.0, 3, gating=False),
    ])
    assert report.passed
    assert report.checks[1].line().startswith("NOTE")
    report.checks.append(validation.CheckResult("bad", False, 1.0, 2.0, 1))
    assert not report.passed
    assert report.to_dict()["passed"] is False


def test_quick_suite_passes_and_reports_dpsk_readings():
    report = validation.run_suite(quick=True)
    assert report.passed, [c.line() for c in report.checks if not c.passed]
    names = [c.name for c in report.checks]
    assert "table_identities" in names and "rayleigh_bpsk" in names
    dpsk = report.info["binary_dpsk_rayleigh_10db"]
    assert dpsk["tabulated_row"] == pytest.approx(dpsk["mgf_at_1"], rel=1e-8)
    assert dpsk["classical_half_mgf"] == pytest.approx(1.0 / 22.0, rel=1e-8)


def test_fail_fast_stops_at_first_failure():
    models.EXPONENTS["two_gamma_two"] += 0.5
    models.clear_cache()
    progress = []
    report = validation.run_suite(quick=True, fail_fast=True, progress=progress.append)
    assert not report.passed
    assert report.info["stopped_early"] and not progress[-1].passed
    assert "seconds" in report.info


def test_table_identity_audit_catches_equivalent_mutant():
    # this perturbation is absorbed by the mean normalisation, so only the
    # identity audit sees it
    models.EXPONENTS["lambda_mu_inverse"] += 0.5
    models.clear_cache()
    report = validation.run_suite(quick=True, fail_fast=True)
    assert [c.name for c in report.checks if not c.passed] == ["table_identities"]
