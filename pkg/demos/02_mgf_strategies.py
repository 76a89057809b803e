"""
Three ways to the moment generating function
============================================

``M(s) = E[exp(-s g)]`` is available as

* ``numeric_oracle``: quadrature of the density,
* ``exact_closed_form``: two closed forms for eta-lambda-mu,
* ``approx_closed_form``: a four-term exponential-sum approximation for
  the alpha families.

The oracle is the reference for the other two.
"""

import numpy as np

from fadingmgf import mgf
from fadingmgf.models import AlphaMu, AlphaKappaMu, EtaLambdaMu

s_values = np.logspace(-1, 2, 4)

# %%
# eta-lambda-mu: the rational and hypergeometric closed forms agree with the
# oracle to about 1e-13.
m = EtaLambdaMu(eta=0.5, lam=0.3, mu=1.5, gbar=3.0)
for s in s_values:
    num = mgf.mgf_numeric(m, s)
    print(f"s={s:7.2f}  rational {mgf.mgf_eta_lambda_mu_rational(m, s):.12e}  "
          f"hyp {mgf.mgf_eta_lambda_mu_hyp(m, s):.12e}  oracle {num:.12e}")

# %%
# At alpha = 2 the exponential sum has one exact term and the approximate
# form reproduces the Nakagami MGF (m / (m + s gbar))**m.
m = AlphaMu(alpha=2.0, mu=2.5, gbar=4.0)
for s in s_values:
    print(f"s={s:7.2f}  approx {mgf.mgf(m, s, 'approx'):.15e}  "
          f"closed {(2.5 / (2.5 + s * 4.0)) ** 2.5:.15e}")

# %%
# Away from alpha = 2 the approximation inherits the fit residual. The
# relative error is small where M(s) is large and grows in the tail, where
# the absolute error (bounded by the fit's sup-norm residual) dominates.
m = AlphaKappaMu(alpha=3.0, kappa=1.0, mu=1.0, gbar=1.0)
for s in s_values:
    a, n = mgf.mgf(m, s, "approx"), mgf.mgf_numeric(m, s)
    print(f"s={s:7.2f}  approx {a:.6e}  oracle {n:.6e}  abs err {abs(a - n):.1e}  "
          f"rel err {abs(a - n) / n:.1e}")

# %%
# ``auto`` picks exact for eta-lambda-mu and approx for the alpha families;
# asking for a strategy that has no formula is an error.
print(mgf.resolve_strategy(m).value)
try:
    mgf.mgf(m, 1.0, "exact")
except mgf.InapplicableStrategyError as exc:
    print("error:", exc)
