"""Differential operators applied to derivative jets.

Applying an equation's operator to the jet of a constructed solution yields
the manufactured source term at that point; evaluating the jet at t=0 yields
the manufactured initial value(s).

Sign conventions (taken verbatim from the governing equations):

    WAVE1D        u_tt - u_xx = f
    WAVE2D        u_tt - (u_x1x1 + u_x2x2) = f
    BURGERS       u_t - u u_x - nu u_xx = f          (note the minus signs)
    KDV           u_t + 6 u u_x + u_xxx = f
    SCHRODINGER   i u_t = -u_xx + f, i.e. f = i u_t + u_xx
"""

from __future__ import annotations

from dataclasses import dataclass

from . import families
from .families import DerivativeJet

__all__ = [
    "WAVE1D",
    "WAVE2D",
    "BURGERS",
    "KDV",
    "SCHRODINGER",
    "PdeSpec",
    "spec_for_family",
    "apply_operator",
    "initial_traces",
    "residual",
]

WAVE1D = "wave1d"
WAVE2D = "wave2d"
BURGERS = "burgers"
KDV = "kdv"
SCHRODINGER = "schrodinger"

_EQUATIONS = (WAVE1D, WAVE2D, BURGERS, KDV, SCHRODINGER)


@dataclass(frozen=True)
class PdeSpec:
    equation: str
    viscosity: float = 0.2  # Burgers only

    def __post_init__(self):
        if self.equation not in _EQUATIONS:
            raise ValueError(f"unknown equation {self.equation!r}")
        if self.equation == BURGERS and self.viscosity <= 0:
            raise ValueError(f"viscosity must be > 0, got {self.viscosity}")

    @property
    def time_order(self) -> int:
        return 2 if self.equation in (WAVE1D, WAVE2D) else 1

    @property
    def complex_valued(self) -> bool:
        return self.equation == SCHRODINGER


_FAMILY_EQUATION = {
    families.WAVE1D_HERMITE: WAVE1D,
    families.WAVE1D_POINTSRC: WAVE1D,
    families.WAVE2D_PACKET: WAVE2D,
    families.BURGERS_HERMITE: BURGERS,
    families.KDV_PACKET: KDV,
    families.SCHRODINGER_BEAM: SCHRODINGER,
}


def spec_for_family(family: str, viscosity: float = 0.2) -> PdeSpec:
    eq = _FAMILY_EQUATION[family]
    return PdeSpec(eq, viscosity) if eq == BURGERS else PdeSpec(eq)


def _need(jet: DerivativeJet, name: str):
    val = getattr(jet, name)
    if val is None:
        raise ValueError(f"jet is missing the {name} derivative")
    return val


def apply_operator(spec: PdeSpec, jet: DerivativeJet):
    """L[u] at the jet's point; for a manufactured pair this value is f."""
    if spec.equation == WAVE1D:
        return _need(jet, "d2u_dt2") - _need(jet, "d2u_dx2")
    if spec.equation == WAVE2D:
        return _need(jet, "d2u_dt2") - _need(jet, "d2u_dx1x1") - _need(jet, "d2u_dx2x2")
    if spec.equation == BURGERS:
        return (
            _need(jet, "du_dt")
            - jet.u * _need(jet, "du_dx")
            - spec.viscosity * _need(jet, "d2u_dx2")
        )
    if spec.equation == KDV:
        return _need(jet, "du_dt") + 6.0 * jet.u * _need(jet, "du_dx") + _need(jet, "d3u_dx3")
    if spec.equation == SCHRODINGER:
        return 1j * _need(jet, "du_dt") + _need(jet, "d2u_dx2")
    raise ValueError(f"unknown equation {spec.equation!r}")


def initial_traces(spec: PdeSpec, jet_at_t0: DerivativeJet) -> list:
    """[u] for first-order equations, [u, u_t] for the wave equations."""
    if spec.time_order == 2:
        return [jet_at_t0.u, _need(jet_at_t0, "du_dt")]
    return [jet_at_t0.u]


def residual(spec: PdeSpec, jet: DerivativeJet, f_value):
    """L[u] - f; identically zero for a manufactured (u, f) pair."""
    return apply_operator(spec, jet) - f_value
