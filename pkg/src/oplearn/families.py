"""Closed-form solution families and target problems.

Each family is a randomly parameterized analytic expression u(x, t) chosen so
that substituting it into the governing equation manufactures an exactly
consistent (initial value, source, solution) triple.  Derivatives are obtained
by seeding the expression with truncated Taylor series (:mod:`oplearn.taylor`),
so every jet entry is analytic, not a numerical difference.

Families
--------
wave1d_hermite      sum_i A_i sin(k_i t + a_i) Hhat_i(w x + b)
wave1d_pointsrc     sum_i A_i t^2 cos(a_i t + b_i) exp(-x^2 / sigma_i^2)
wave2d_packet       A exp(-((x1-a1 t)^2 + (x2-a2 t)^2)/sigma^2) cos(k1 x1 + k2 x2 - w t)
burgers_hermite     sum_i A_i (sin(k1_i pi t) + t cos(k2_i pi t)) Hhat_i(w_i x + b_i)
kdv_packet          A exp(a (x + c1 t + c2)^2) cos(k x - w t), a < 0
schrodinger_beam    A / sqrt(zeta + i t) exp(i k (x - k t) - (x - 2 k t)^2 / (4 (zeta + i t)))

Hhat_i denotes the normalized Hermite function (Hermite polynomial times a
Gaussian weight, orthonormal on the line).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import taylor
from .taylor import cos, exp, sin, sqrt

__all__ = [
    "WAVE1D_HERMITE",
    "WAVE1D_POINTSRC",
    "WAVE2D_PACKET",
    "BURGERS_HERMITE",
    "KDV_PACKET",
    "SCHRODINGER_BEAM",
    "ALL_FAMILIES",
    "FamilyParams",
    "DerivativeJet",
    "hermite_function",
    "hermite_functions",
    "sample_params",
    "eval_u",
    "eval_jet",
    "jet_from_expr",
    "stack_params",
    "separable_terms",
    "eval_grid_jet",
    "TargetCase",
    "target_case",
    "target_functions",
    "burgers_multi_thetas",
    "ALL_CASES",
]

WAVE1D_HERMITE = "wave1d_hermite"
WAVE1D_POINTSRC = "wave1d_pointsrc"
WAVE2D_PACKET = "wave2d_packet"
BURGERS_HERMITE = "burgers_hermite"
KDV_PACKET = "kdv_packet"
SCHRODINGER_BEAM = "schrodinger_beam"

ALL_FAMILIES = (
    WAVE1D_HERMITE,
    WAVE1D_POINTSRC,
    WAVE2D_PACKET,
    BURGERS_HERMITE,
    KDV_PACKET,
    SCHRODINGER_BEAM,
)

_HERMITE_CAP = 10  # families use index <= 2; hard safety bound
_SIGMA_FLOOR = 0.05  # keep Gaussian widths away from the singular sigma -> 0
_MAX_RESAMPLE = 1000
_TRUNCATION = 2  # number of extra basis terms in the truncated sums


def hermite_functions(n: int, x):
    """Normalized Hermite functions Hhat_0..Hhat_n at x via the stable recurrence.

    Hhat_0 = pi^(-1/4) exp(-x^2/2), Hhat_1 = sqrt(2) x Hhat_0, and
    Hhat_{i+1} = x sqrt(2/(i+1)) Hhat_i - sqrt(i/(i+1)) Hhat_{i-1}.
    Works on floats, arrays, and Taylor series alike.
    """
    if n < 0 or n > _HERMITE_CAP:
        raise ValueError(f"Hermite index must be in [0, {_HERMITE_CAP}], got {n}")
    h0 = math.pi ** (-0.25) * exp(-0.5 * x * x)
    out = [h0]
    if n >= 1:
        out.append(math.sqrt(2.0) * x * h0)
    for i in range(1, n):
        out.append(
            math.sqrt(2.0 / (i + 1)) * x * out[i] - math.sqrt(i / (i + 1)) * out[i - 1]
        )
    return out


def hermite_function(i: int, x):
    """Normalized Hermite function Hhat_i(x)."""
    return hermite_functions(i, x)[i]


@dataclass(frozen=True)
class FamilyParams:
    """One random draw of a family's parameters (vectors are per-index draws)."""

    family: str
    values: dict

    def to_jsonable(self) -> dict:
        vals = {
            k: (v.tolist() if isinstance(v, np.ndarray) else float(v))
            for k, v in self.values.items()
        }
        return {"family": self.family, "values": vals}

    @staticmethod
    def from_jsonable(obj: dict) -> "FamilyParams":
        vals = {
            k: (np.asarray(v, dtype=float) if isinstance(v, list) else float(v))
            for k, v in obj["values"].items()
        }
        return FamilyParams(obj["family"], vals)


def _resample(rng, mean, std, predicate, what: str):
    x = rng.normal(mean, std)
    for _ in range(_MAX_RESAMPLE):
        if predicate(x):
            return x
        x = rng.normal(mean, std)
    raise RuntimeError(
        f"{what}: constraint still unmet after {_MAX_RESAMPLE} draws from "
        f"N({mean}, {std}); the law looks misconfigured"
    )


def sample_params(family: str, rng: np.random.Generator) -> FamilyParams:
    """Draw family parameters from their normal laws (N(mean, std))."""
    K = _TRUNCATION
    n = K + 1
    if family == WAVE1D_HERMITE:
        vals = {
            "A": rng.normal(1.0, 1.0, n),
            "k": rng.normal(0.0, 1.0, n),
            "a": rng.normal(0.0, 1.0, n),
            "w": rng.normal(-2.0, 1.0),
            "b": rng.normal(0.0, 1.0),
        }
    elif family == WAVE1D_POINTSRC:
        vals = {
            "A": rng.normal(0.2, 1.0, n),
            "a": rng.normal(1.0, 1.0, n),
            "b": rng.normal(0.0, 1.0, n),
            "sigma": np.array(
                [
                    _resample(rng, 0.2, 0.5, lambda s: abs(s) >= _SIGMA_FLOOR, "sigma")
                    for _ in range(n)
                ]
            ),
        }
    elif family == WAVE2D_PACKET:
        vals = {
            "A": rng.normal(1.0, 1.0),
            "a1": rng.normal(2.0, 1.0),
            "a2": rng.normal(1.0, 1.0),
            "sigma": _resample(rng, 1.0, 1.0, lambda s: abs(s) >= _SIGMA_FLOOR, "sigma"),
            "k1": rng.normal(0.0, 1.0),
            "k2": rng.normal(0.0, 1.0),
            "w": rng.normal(3.0, 1.0),
        }
    elif family == BURGERS_HERMITE:
        vals = {
            "A": rng.normal(0.2, 1.0, n),
            "k1": rng.normal(0.8, 1.0, n),
            "k2": rng.normal(1.0, 2.0, n),
            "w": rng.normal(1.0, 1.0, n),
            "b": rng.normal(0.0, 1.0, n),
        }
    elif family == KDV_PACKET:
        vals = {
            "A": rng.normal(1.0, 1.0),
            "a": _resample(rng, -1.0, 1.0, lambda a: a < 0.0, "a"),
            "c1": rng.normal(0.0, 1.0),
            "c2": rng.normal(-1.0, 1.0),
            "k": rng.normal(0.0, 1.0),
            "w": rng.normal(0.0, 1.0),
        }
    elif family == SCHRODINGER_BEAM:
        vals = {
            "A": rng.normal(0.5, 0.5),
            "zeta": _resample(rng, 0.3, 0.5, lambda z: z > 0.0, "zeta"),
            "k": rng.normal(1.0, 0.5),
        }
    else:
        raise ValueError(f"unknown family {family!r}")
    return FamilyParams(family, vals)


# -- family expressions ------------------------------------------------------
# Written with the dispatching primitives from oplearn.taylor so the same code
# evaluates plain values (numpy path) and derivative jets (series path).


def _u_wave1d_hermite(v, x, t):
    H = hermite_functions(len(v["A"]) - 1, v["w"] * x + v["b"])
    total = v["A"][0] * sin(v["k"][0] * t + v["a"][0]) * H[0]
    for i in range(1, len(v["A"])):
        total = total + v["A"][i] * sin(v["k"][i] * t + v["a"][i]) * H[i]
    return total


def _u_wave1d_pointsrc(v, x, t):
    t2 = t * t
    total = None
    for i in range(len(v["A"])):
        term = v["A"][i] * t2 * cos(v["a"][i] * t + v["b"][i]) * exp(
            -(x * x) / v["sigma"][i] ** 2
        )
        total = term if total is None else total + term
    return total


def _u_wave2d_packet(v, x1, x2, t):
    g1 = x1 - v["a1"] * t
    g2 = x2 - v["a2"] * t
    return (
        v["A"]
        * exp(-(g1 * g1 + g2 * g2) / v["sigma"] ** 2)
        * cos(v["k1"] * x1 + v["k2"] * x2 - v["w"] * t)
    )


def _u_burgers_hermite(v, x, t):
    total = None
    for i in range(len(v["A"])):
        alpha = sin(v["k1"][i] * math.pi * t) + t * cos(v["k2"][i] * math.pi * t)
        H_i = hermite_functions(i, v["w"][i] * x + v["b"][i])[i]
        term = v["A"][i] * alpha * H_i
        total = term if total is None else total + term
    return total


def _u_kdv_packet(v, x, t):
    g = x + v["c1"] * t + v["c2"]
    return v["A"] * exp(v["a"] * g * g) * cos(v["k"] * x - v["w"] * t)


def _u_schrodinger_beam(v, x, t):
    zt = v["zeta"] + 1j * t
    phase = 1j * v["k"] * (x - v["k"] * t)
    g = x - 2.0 * v["k"] * t
    return v["A"] / sqrt(zt) * exp(phase - (g * g) / (4.0 * zt))


_EXPRS_1D = {
    WAVE1D_HERMITE: _u_wave1d_hermite,
    WAVE1D_POINTSRC: _u_wave1d_pointsrc,
    BURGERS_HERMITE: _u_burgers_hermite,
    KDV_PACKET: _u_kdv_packet,
    SCHRODINGER_BEAM: _u_schrodinger_beam,
}


def spatial_dim(family: str) -> int:
    return 2 if family == WAVE2D_PACKET else 1


def eval_u(params: FamilyParams, x, t):
    """Value of the constructed solution; x is (x1, x2) for the 2D family."""
    if params.family == WAVE2D_PACKET:
        x1, x2 = x
        return _u_wave2d_packet(params.values, x1, x2, t)
    return _EXPRS_1D[params.family](params.values, x, t)


# -- derivative jets ---------------------------------------------------------


@dataclass
class DerivativeJet:
    """Field value and the partial derivatives the operators consume.

    1D jets carry x-derivatives up to third order; 2D jets carry the two
    second-order axis derivatives instead.  Missing orders are None.
    """

    u: np.ndarray
    du_dt: np.ndarray | None = None
    d2u_dt2: np.ndarray | None = None
    du_dx: np.ndarray | None = None
    d2u_dx2: np.ndarray | None = None
    d3u_dx3: np.ndarray | None = None
    du_dx1: np.ndarray | None = None
    du_dx2: np.ndarray | None = None
    d2u_dx1x1: np.ndarray | None = None
    d2u_dx2x2: np.ndarray | None = None


def jet_from_expr(expr, x, t, *, dim: int = 1, t_order: int = 2, x_order: int = 3) -> DerivativeJet:
    """Jet of a closed-form expression u(x, t) (or u(x1, x2, t) when dim=2).

    The expression is evaluated once per seed variable with a truncated Taylor
    series in that variable; all other arguments stay plain.  Orders may be
    trimmed (down to 0, skipping the pass) when fewer derivatives are needed.
    """
    if dim == 1:
        out = {}
        if t_order >= 1:
            st = expr(x, taylor.variable(t, t_order))
            out["u"] = st.c[0]
            out["du_dt"] = st.deriv(1)
            if t_order >= 2:
                out["d2u_dt2"] = st.deriv(2)
        if x_order >= 1:
            sx = expr(taylor.variable(x, x_order), t)
            out.setdefault("u", sx.c[0])
            out["du_dx"] = sx.deriv(1)
            if x_order >= 2:
                out["d2u_dx2"] = sx.deriv(2)
            if x_order >= 3:
                out["d3u_dx3"] = sx.deriv(3)
        if "u" not in out:
            out["u"] = expr(x, t)
        return DerivativeJet(**out)
    x1, x2 = x
    out = {}
    if t_order >= 1:
        st = expr(x1, x2, taylor.variable(t, t_order))
        out["u"] = st.c[0]
        out["du_dt"] = st.deriv(1)
        if t_order >= 2:
            out["d2u_dt2"] = st.deriv(2)
    if x_order >= 1:
        s1 = expr(taylor.variable(x1, x_order), x2, t)
        s2 = expr(x1, taylor.variable(x2, x_order), t)
        out.setdefault("u", s1.c[0])
        out["du_dx1"] = s1.deriv(1)
        out["du_dx2"] = s2.deriv(1)
        if x_order >= 2:
            out["d2u_dx1x1"] = s1.deriv(2)
            out["d2u_dx2x2"] = s2.deriv(2)
    if "u" not in out:
        out["u"] = expr(x1, x2, t)
    return DerivativeJet(**out)


def eval_jet(params: FamilyParams, x, t, *, t_order: int = 2, x_order: int = 3) -> DerivativeJet:
    """Exact derivative jet of the constructed solution at (x, t).

    Points may be scalars or arrays (vectorized evaluation); 2D jets cap the
    spatial order at 2.
    """
    if params.family == WAVE2D_PACKET:
        return jet_from_expr(
            lambda x1, x2, tt: _u_wave2d_packet(params.values, x1, x2, tt),
            x,
            t,
            dim=2,
            t_order=t_order,
            x_order=min(x_order, 2),
        )
    expr = _EXPRS_1D[params.family]
    return jet_from_expr(
        lambda xx, tt: expr(params.values, xx, tt),
        x,
        t,
        dim=1,
        t_order=t_order,
        x_order=x_order,
    )


def separable_terms(params: FamilyParams):
    """Factorized terms [(alpha(t), h(x)), ...] with u = sum alpha_i h_i.

    Only the variable-separated families admit this; returns None otherwise.
    The amplitude is folded into the time factor.
    """
    v = params.values
    if params.family == WAVE1D_HERMITE:
        return [
            (
                lambda t, i=i: v["A"][i] * sin(v["k"][i] * t + v["a"][i]),
                lambda x, i=i: hermite_functions(i, v["w"] * x + v["b"])[i],
            )
            for i in range(len(v["A"]))
        ]
    if params.family == WAVE1D_POINTSRC:
        return [
            (
                lambda t, i=i: v["A"][i] * t * t * cos(v["a"][i] * t + v["b"][i]),
                lambda x, i=i: exp(-(x * x) / v["sigma"][i] ** 2),
            )
            for i in range(len(v["A"]))
        ]
    if params.family == BURGERS_HERMITE:
        return [
            (
                lambda t, i=i: v["A"][i]
                * (sin(v["k1"][i] * math.pi * t) + t * cos(v["k2"][i] * math.pi * t)),
                lambda x, i=i: hermite_functions(i, v["w"][i] * x + v["b"][i])[i],
            )
            for i in range(len(v["A"]))
        ]
    return None


def _axis_derivs(fn, axis: np.ndarray, order: int) -> list:
    """[f, f', ..., f^(order)] of a univariate factor along an axis.

    With stacked parameters the entries broadcast to (B, len(axis))."""
    if order == 0:
        return [np.asarray(fn(axis), dtype=float)]
    s = fn(taylor.variable(axis, order))
    return [np.asarray(s.deriv(k), dtype=float) for k in range(order + 1)]


def eval_grid_jet(
    params: FamilyParams, x_axis: np.ndarray, t_axis: np.ndarray, *,
    t_order: int = 2, x_order: int = 3,
) -> DerivativeJet:
    """Jet of a separable family on the tensor grid x_axis (x) t_axis.

    Axis factors are differentiated once per axis and combined by matrix
    products over the term index, which is dramatically cheaper than pointwise
    evaluation on the full grid.  Fields are (len(x_axis), len(t_axis)) arrays,
    with a leading batch axis when ``params`` is a :func:`stack_params` stack.
    """
    terms = separable_terms(params)
    if terms is None:
        raise ValueError(f"family {params.family!r} is not variable-separated")
    nx, nt = len(x_axis), len(t_axis)
    # A[k][..., i, :] = alpha_i^(k) on t_axis; H[k][..., :, i] = h_i^(k) on x_axis
    at = [_axis_derivs(alpha_fn, t_axis, t_order) for alpha_fn, _ in terms]
    hx = [_axis_derivs(h_fn, x_axis, x_order) for _, h_fn in terms]
    A = [
        np.stack([np.broadcast_to(a[k], a[0].shape[:-1] + (nt,)) for a in at], axis=-2)
        for k in range(t_order + 1)
    ]
    H = [
        np.stack([np.broadcast_to(h[k], h[0].shape[:-1] + (nx,)) for h in hx], axis=-1)
        for k in range(x_order + 1)
    ]
    fields = {}
    for k, name in enumerate(["u", "du_dt", "d2u_dt2"][: t_order + 1]):
        fields[name] = H[0] @ A[k]
    for k, name in enumerate(["du_dx", "d2u_dx2", "d3u_dx3"][:x_order], start=1):
        fields[name] = H[k] @ A[0]
    fields.setdefault("u", H[0] @ A[0])
    return DerivativeJet(**fields)


def stack_params(params_list: list[FamilyParams]) -> FamilyParams:
    """Stack same-family draws along a leading batch axis for vectorized eval.

    Scalars become (B, 1) columns and per-index vectors (K+1, B, 1) stacks, so
    the family expressions broadcast against point rows of shape (1, npts) and
    return (B, npts) values.
    """
    if not params_list:
        raise ValueError("empty parameter list")
    fam = params_list[0].family
    if any(p.family != fam for p in params_list):
        raise ValueError("mixed families cannot be stacked")
    out = {}
    for key in params_list[0].values:
        vals = [p.values[key] for p in params_list]
        if isinstance(vals[0], np.ndarray):
            out[key] = np.stack(vals, axis=1)[:, :, None]
        else:
            out[key] = np.asarray(vals)[:, None]
    return FamilyParams(fam, out)


# -- target problems ---------------------------------------------------------


@dataclass(frozen=True)
class TargetCase:
    """Target initial value(s), source term, and exact solution if printed."""

    case_id: str
    dim: int
    time_order: int
    complex_valued: bool
    phi: tuple  # callables of x (or x1, x2)
    f: object  # callable of (x, t) or (x1, x2, t)
    exact: object | None  # same signature as f, or None


def _wave1d_case1() -> TargetCase:
    return TargetCase(
        case_id="wave1d-1",
        dim=1,
        time_order=2,
        complex_valued=False,
        phi=(
            lambda x: exp(-x * x) * cos(x),
            lambda x: exp(-x * x) * sin(x),
        ),
        f=lambda x, t: exp(-x * x)
        * (4.0 * x * sin(t - x) + (2.0 - 4.0 * x * x) * cos(t - x)),
        exact=lambda x, t: exp(-x * x) * cos(t - x),
    )


def _wave1d_case2() -> TargetCase:
    return TargetCase(
        case_id="wave1d-2",
        dim=1,
        time_order=2,
        complex_valued=False,
        phi=(lambda x: 0.0 * x, lambda x: 0.0 * x),
        f=lambda x, t: 5.0 * exp(-25.0 * x * x) + 0.0 * t,
        exact=None,
    )


def _wave1d_caseb() -> TargetCase:
    # Wider-Gaussian variant of case 1 used by the generation-domain sweep.
    return TargetCase(
        case_id="wave1d-b",
        dim=1,
        time_order=2,
        complex_valued=False,
        phi=(
            lambda x: exp(-x * x / 4.0) * cos(x),
            lambda x: exp(-x * x / 4.0) * sin(x),
        ),
        f=lambda x, t: exp(-x * x / 4.0)
        * ((0.5 - x * x / 4.0) * cos(t - x) + x * sin(t - x)),
        exact=lambda x, t: exp(-x * x / 4.0) * cos(t - x),
    )


def _wave2d(k: float) -> TargetCase:
    def f(x1, x2, t):
        g1 = x1 - t
        g2 = x2 - t
        env = exp(-(g1 * g1 + g2 * g2) / 2.0)
        s = g1 + g2
        return env * (
            s * s * cos(k * t)
            - 2.0 * k * s * sin(k * t)
            - (k * k + g1 * g1 + g2 * g2) * cos(k * t)
        )

    return TargetCase(
        case_id="wave2d",
        dim=2,
        time_order=2,
        complex_valued=False,
        phi=(
            lambda x1, x2: exp(-(x1 * x1 + x2 * x2) / 2.0),
            lambda x1, x2: exp(-(x1 * x1 + x2 * x2) / 2.0) * (x1 + x2),
        ),
        f=f,
        exact=lambda x1, x2, t: exp(-((x1 - t) ** 2 + (x2 - t) ** 2) / 2.0) * cos(k * t),
    )


def _burgers_source(theta: float):
    return lambda x, t: cos(theta * t) * exp(-x * x)


def _burgers_case(case_id: str, theta: float) -> TargetCase:
    return TargetCase(
        case_id=case_id,
        dim=1,
        time_order=1,
        complex_valued=False,
        phi=(lambda x: 0.0 * x,),
        f=_burgers_source(theta),
        exact=None,
    )


def _kdv() -> TargetCase:
    def f(x, t):
        d = t - x
        return exp(-d * d) * (
            12.0 * d * exp(-d * d)
            + 14.0 * (x - t)
            + 24.0 * t * x * (x - t)
            + 8.0 * (t * t * t - x * x * x)
        )

    return TargetCase(
        case_id="kdv",
        dim=1,
        time_order=1,
        complex_valued=False,
        phi=(lambda x: exp(-x * x),),
        f=f,
        exact=lambda x, t: exp(-((x - t) ** 2)),
    )


def _schrodinger() -> TargetCase:
    return TargetCase(
        case_id="schrodinger",
        dim=1,
        time_order=1,
        complex_valued=True,
        phi=(lambda x: exp(-x * x + 1j * x) * cos(x),),
        f=lambda x, t: 0.0 * x + 0.0 * t,
        exact=None,
    )


ALL_CASES = (
    "wave1d-1",
    "wave1d-2",
    "wave1d-b",
    "wave2d",
    "burgers-1",
    "burgers-multi",
    "kdv",
    "schrodinger",
)


def burgers_multi_thetas(n: int = 20) -> np.ndarray:
    """Uniformly spaced source parameters over [-pi, pi], endpoints included."""
    return np.linspace(-math.pi, math.pi, n)


def target_case(case_id: str, *, wave2d_k: float = 2.0, theta: float | None = None) -> TargetCase:
    """Target functions for a named case.

    wave2d_k is a configuration value (the printed 2D target leaves the
    wavenumber unspecified); theta selects one member of the parameterized
    source family for ``burgers-multi``.
    """
    if case_id == "wave1d-1":
        return _wave1d_case1()
    if case_id == "wave1d-2":
        return _wave1d_case2()
    if case_id == "wave1d-b":
        return _wave1d_caseb()
    if case_id == "wave2d":
        return _wave2d(wave2d_k)
    if case_id == "burgers-1":
        return _burgers_case("burgers-1", math.pi)
    if case_id == "burgers-multi":
        return _burgers_case("burgers-multi", math.pi if theta is None else theta)
    if case_id == "kdv":
        return _kdv()
    if case_id == "schrodinger":
        return _schrodinger()
    raise ValueError(f"unknown case {case_id!r}")


def target_functions(case_id: str, **kwargs):
    """(initial function list, source term) of a target case."""
    case = target_case(case_id, **kwargs)
    return list(case.phi), case.f
