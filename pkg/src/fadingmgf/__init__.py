"""MGF-based performance analysis for generalized fading channels.

The MGF dispatcher lives at ``fadingmgf.mgf.mgf``; the name ``fadingmgf.mgf``
refers to the module.

Densities of the alpha-mu, alpha-eta-mu, alpha-lambda-mu, alpha-kappa-mu,
alpha-lambda-eta-mu and eta-lambda-mu SNR models, their moment generating
functions (numerically, in exact closed form, or through an exponential-sum
approximation) and the average symbol error rates that follow from them.
"""

from .errorrates import aser, aser_sweep, modulation_spec, rayleigh_bpsk_reference
from .expfit import ExpSumFit, eval_exp_sum, fit_exp_sum, get_or_fit
from .mgf import MgfStrategy, mgf_derivative_numeric, mgf_numeric
from .models import (
    AlphaEtaMu,
    AlphaKappaMu,
    AlphaLambdaEtaMu,
    AlphaLambdaMu,
    AlphaMu,
    EtaLambdaMu,
    compact_params,
    pdf,
    special_case,
    validate,
)

__all__ = [
    "AlphaEtaMu", "AlphaKappaMu", "AlphaLambdaEtaMu", "AlphaLambdaMu", "AlphaMu", "EtaLambdaMu",
    "compact_params", "pdf", "special_case", "validate",
    "ExpSumFit", "eval_exp_sum", "fit_exp_sum", "get_or_fit",
    "MgfStrategy", "mgf_derivative_numeric", "mgf_numeric",
    "aser", "aser_sweep", "modulation_spec", "rayleigh_bpsk_reference",
]
__version__ = "0.1.0"
