"""
Self-validation and mutation sensitivity
========================================

The validation suite compares independent routes to the same quantities.
Perturbing an exponent of the model mapping makes it fail, which is how the
audits are shown to be load-bearing.
"""

from fadingmgf import models, validation

# %%
# The quick suite uses smaller samples and skips the informational checks.
report = validation.run_suite(quick=True)
for check in report.checks:
    print(check.line())
print("passed:", report.passed)

# %%
# Binary DPSK is reported under both readings of its constants.
print(report.info["binary_dpsk_rayleigh_10db"])

# %%
# Perturb one exponent of the mapping and rerun.
original = models.EXPONENTS["kappa_mu_nu"]
models.EXPONENTS["kappa_mu_nu"] = original + 0.5
models.clear_cache()
try:
    broken = validation.run_suite(quick=True, fail_fast=True)
    print("after perturbation:", "PASS" if broken.passed else "FAIL")
    print(broken.checks[-1].line())
finally:
    models.EXPONENTS["kappa_mu_nu"] = original
    models.clear_cache()
