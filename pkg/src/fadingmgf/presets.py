"""Curve families for regenerating the four BPSK error-rate figures.

The figure captions fix only the family and, for the first two, ``alpha = 2``
(and ``lambda = 0`` for the second). The remaining parameters below are this
package's choice; they are printed with every preset output.
"""

from __future__ import annotations

from dataclasses import dataclass

from .models import AlphaKappaMu, AlphaLambdaEtaMu, AlphaMu, EtaLambdaMu, FadingModel

__all__ = ["Preset", "PRESETS", "preset", "DEFAULT_SWEEP"]

DEFAULT_SWEEP = (-5.0, 30.0, 1.0)


@dataclass(frozen=True)
class Preset:
    name: str
    title: str
    scheme: str
    order: int
    curves: tuple[tuple[str, FadingModel], ...]
    fixed: str
    chosen: str


def _fig1() -> Preset:
    curves = tuple((f"kappa={k:g},mu={mu:g}", AlphaKappaMu(2.0, k, mu))
                   for mu in (0.5, 1.0, 2.0) for k in (0.0, 1.0, 3.0))
    return Preset("fig1", "BPSK over alpha-kappa-mu fading", "mpsk", 2, curves,
                  "alpha=2", "kappa in {0,1,3}; mu in {0.5,1,2}")


def _fig2() -> Preset:
    curves = tuple((f"eta={eta:g},mu={mu:g}", AlphaLambdaEtaMu(2.0, 0.0, eta, mu))
                   for eta in (0.5, 2.0) for mu in (0.5, 1.0, 2.0))
    return Preset("fig2", "BPSK over alpha-lambda-eta-mu fading", "mpsk", 2, curves,
                  "alpha=2, lambda=0", "eta in {0.5,2}; mu in {0.5,1,2}")


def _fig3() -> Preset:
    curves = tuple((f"eta={eta:g},lambda={lam:g},mu={mu:g}", EtaLambdaMu(eta, lam, mu))
                   for eta, lam in ((0.5, 0.3), (2.0, 0.7)) for mu in (0.5, 1.0, 2.0))
    return Preset("fig3", "BPSK over eta-lambda-mu fading", "mpsk", 2, curves,
                  "", "(eta,lambda) in {(0.5,0.3),(2,0.7)}; mu in {0.5,1,2}")


def _fig4() -> Preset:
    curves = tuple((f"alpha={a:g},mu={mu:g}", AlphaMu(a, mu))
                   for a in (1.5, 2.5, 3.5) for mu in (0.5, 1.0, 2.0))
    return Preset("fig4", "BPSK over alpha-mu fading", "mpsk", 2, curves,
                  "", "alpha in {1.5,2.5,3.5}; mu in {0.5,1,2}")


PRESETS = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4}


def preset(name: str) -> Preset:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"preset: unknown preset {name!r}; expected one of {sorted(PRESETS)}") from None
