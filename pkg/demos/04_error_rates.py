"""
Average symbol error rates
==========================

Error rates come from a single finite integral of the MGF over a half-angle
variable, with constants per modulation scheme.
"""

import numpy as np

from fadingmgf import errorrates, models, presets
from fadingmgf.errorrates import modulation_spec

# %%
# BPSK over Rayleigh fading has the closed form 0.5 (1 - sqrt(g / (1 + g))).
spec = modulation_spec("mpsk", 2)
for db in (0, 5, 10, 20):
    g = models.db_to_linear(db)
    print(f"{db:2d} dB  aser {errorrates.aser(models.rayleigh(g), spec):.10e}  "
          f"closed {errorrates.rayleigh_bpsk_reference(g):.10e}")

# %%
# The same model under several schemes; the constants are inspectable.
model = models.AlphaKappaMu(alpha=2.5, kappa=2.0, mu=1.5, gbar=models.db_to_linear(15.0))
for scheme, M in (("mpsk", 4), ("mpam", 4), ("mqam", 16), ("mdpsk", 4)):
    sp = modulation_spec(scheme, M)
    print(f"{scheme}-{M:<3} ser={errorrates.aser(model, sp):.4e}  {sp.to_dict()['verification']}")

# %%
# A sweep over mean SNR returns a curve with CSV and JSON writers.
curve = errorrates.aser_sweep(model, np.arange(0.0, 25.0, 5.0), modulation_spec("mqam", 16))
print(curve.to_csv())

# %%
# Presets rebuild the four BPSK figure families. Only the family and the
# fixed parameters come from the figures; the curve parameters are chosen
# here and printed with each preset.
p = presets.preset("fig1")
print(p.title, "|", p.chosen)
grid = [0.0, 10.0, 20.0]
for label, template in p.curves[:3]:
    c = errorrates.aser_sweep(template, grid, modulation_spec(p.scheme, p.order))
    print(f"{label:18s}", " ".join(f"{v:.3e}" for v in c.ser))
