"""
Fading densities in one compact form
====================================

Six generalized fading models share the density shape

    f(g) = psi * g**(m-1) * exp(-beta * g**abar) * I_nu(d * g**(r*abar))

This script builds a few models, prints their compact parameters and
checks classical special cases against their textbook densities.
"""

import numpy as np

from fadingmgf import models
from fadingmgf.models import AlphaKappaMu, AlphaLambdaEtaMu, EtaLambdaMu

# %%
# Models are small frozen dataclasses; ``gbar`` is the linear mean SNR.
rician = models.kappa_mu(kappa=3.0, mu=1.0, gbar=models.db_to_linear(10.0))
general = AlphaLambdaEtaMu(alpha=3.0, lam=0.4, eta=0.5, mu=1.5, gbar=10.0)
two_wave = EtaLambdaMu(eta=2.0, lam=0.7, mu=0.8, gbar=10.0)

for m in (rician, general, two_wave):
    cp = models.compact_params(m)
    print(f"{m.family:22s} m={cp.m:.4g} beta={cp.beta:.4g} nu={cp.nu} "
          f"d={cp.d if cp.d is None else round(cp.d, 4)} r={cp.r} abar={cp.alpha_bar}")

# %%
# Rayleigh is alpha-mu with alpha = 2, mu = 1: an exponential density.
g = np.array([0.1, 1.0, 5.0, 20.0])
print("Rayleigh  :", models.pdf(models.rayleigh(10.0), g))
print("exp(-g/10):", np.exp(-g / 10.0) / 10.0)

# %%
# With kappa = 0 the alpha-kappa-mu model loses its line-of-sight component
# and collapses to alpha-mu; the densities agree to rounding.
a = models.pdf(AlphaKappaMu(2.5, 0.0, 1.7, 3.0), g)
b = models.pdf(models.AlphaMu(2.5, 1.7, 3.0), g)
print("kappa -> 0 max rel diff:", float(np.max(np.abs(a / b - 1.0))))

# %%
# The mean SNR is exact for every alpha: E[g] = gbar by construction.
from fadingmgf.mgf import mgf_derivative_numeric  # noqa: E402

for alpha in (0.8, 2.0, 5.0):
    m = AlphaKappaMu(alpha, 2.0, 1.2, 7.5)
    print(f"alpha={alpha}: E[g] = {-mgf_derivative_numeric(m, 1, 0.0):.10f}")

# %%
# Out-of-range parameters are reported all at once.
print(models.validate(EtaLambdaMu(eta=-1.0, lam=1.0, mu=0.0, gbar=1.0)))
# Far in the tail the density underflows; the log density stays finite.
print("pdf(1e3) =", models.pdf(general, 1e3), " log pdf(1e3) =", models.log_pdf(general, 1e3))
