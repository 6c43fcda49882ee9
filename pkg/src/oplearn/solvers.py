"""Reference solutions on the domain of interest.

Cases with a printed exact solution are evaluated directly.  The rest are
solved numerically on a spatial domain truncated far enough out that the
boundary cannot influence the domain of interest within the time horizon:

* 1D wave: explicit leapfrog (second order in space and time) with
  homogeneous Dirichlet ends.  Signals travel one cell per step, so with
  ``x_big >= x_interest + T + margin`` and the CFL ratio below one the
  truncation is provably invisible on the restriction.
* Viscous Burgers: semi-implicit finite differences with the diffusion term
  treated implicitly (tridiagonal solves); the convection and source terms are
  explicit.  The Crank-Nicolson/Adams-Bashforth variant is the default; a
  first-order option is kept for step-size studies.
* Free Schrodinger: Fourier split-step on a periodic box, exact in time for
  the homogeneous equation (each mode rotates by exp(-i k^2 dt)), so the
  solution is spectrally accurate once the state has decayed at the box edge.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import solve_banded

from . import families
from .config import ExperimentConfig

__all__ = [
    "EvalGrid",
    "ReferenceField",
    "eval_grid_for",
    "analytic_reference",
    "solve_wave1d_fd",
    "solve_burgers_fd",
    "solve_schrodinger_spectral",
    "reference_field",
    "cached_reference",
    "save_reference",
    "load_reference",
]


@dataclass(frozen=True)
class EvalGrid:
    """Tensor evaluation grid: spatial axes plus a time axis."""

    space_axes: tuple
    t_axis: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.space_axes)

    @property
    def shape(self) -> tuple:
        return tuple(len(ax) for ax in self.space_axes) + (len(self.t_axis),)

    def points(self) -> np.ndarray:
        """All grid points, flattened in axis-major order, as (P, d+1) rows."""
        mesh = np.meshgrid(*self.space_axes, self.t_axis, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def eval_grid_for(cfg: ExperimentConfig) -> EvalGrid:
    axes = tuple(
        np.linspace(lo, hi, n)
        for (lo, hi), n in zip(cfg.domain_of_interest, cfg.eval_grid[:-1])
    )
    t_axis = np.linspace(0.0, cfg.time_horizon, cfg.eval_grid[-1])
    return EvalGrid(axes, t_axis)


@dataclass
class ReferenceField:
    grid: EvalGrid
    values: np.ndarray  # shape == grid.shape, real or complex
    provenance: str  # "analytic" | "fd_wave" | "fd_burgers" | "spectral_schrodinger"

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} != grid shape {self.grid.shape}"
            )


# -- analytic references --------------------------------------------------------

_ANALYTIC_CASES = ("wave1d-1", "wave1d-b", "wave2d", "kdv")


def analytic_reference(case_id: str, grid: EvalGrid, *, wave2d_k: float = 2.0) -> ReferenceField:
    case = families.target_case(case_id, wave2d_k=wave2d_k)
    if case.exact is None:
        raise ValueError(
            f"case {case_id!r} has no printed exact solution; use its numerical solver"
        )
    mesh = np.meshgrid(*grid.space_axes, grid.t_axis, indexing="ij")
    values = np.asarray(case.exact(*mesh))
    return ReferenceField(grid, values, "analytic")


# -- large-domain numerical solves ------------------------------------------------


@dataclass
class LargeDomainField:
    """Solver output on the full truncated domain: values[ix, it]."""

    x: np.ndarray
    t: np.ndarray
    values: np.ndarray


def _steps_for(T: float, dt: float) -> int:
    n = int(round(T / dt))
    if n < 1 or abs(n * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"dt={dt} does not divide the horizon T={T}")
    return n


def _symmetric_axis(x_big: float, dx: float) -> np.ndarray:
    n = int(round(2.0 * x_big / dx))
    if abs(n * dx - 2.0 * x_big) > 1e-9:
        raise ValueError(f"dx={dx} does not divide the domain [-{x_big}, {x_big}]")
    return np.linspace(-x_big, x_big, n + 1)


def solve_wave1d_fd(phi0, phi1, f, x_big: float, dx: float, dt: float, T: float) -> LargeDomainField:
    """Leapfrog for u_tt - u_xx = f with zero Dirichlet truncation.

    First step by Taylor expansion: u^1 = phi0 + dt phi1 + dt^2/2 (phi0'' + f(.,0)),
    with phi0'' taken as the discrete second difference.
    """
    if dt / dx > 0.9 + 1e-12:
        raise ValueError(f"CFL violation: dt/dx = {dt / dx:.4f} > 0.9")
    x = _symmetric_axis(x_big, dx)
    n_steps = _steps_for(T, dt)
    t = np.arange(n_steps + 1) * dt
    nx = len(x)
    U = np.zeros((nx, n_steps + 1))

    def lap(u):
        out = np.zeros_like(u)
        out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / dx**2
        return out

    u0 = np.asarray(phi0(x), dtype=float)
    u0[0] = u0[-1] = 0.0
    u1 = u0 + dt * np.asarray(phi1(x), dtype=float) + 0.5 * dt**2 * (
        lap(u0) + np.asarray(f(x, 0.0), dtype=float)
    )
    u1[0] = u1[-1] = 0.0
    U[:, 0], U[:, 1] = u0, u1
    prev, cur = u0, u1
    for n in range(1, n_steps):
        nxt = 2.0 * cur - prev + dt**2 * (lap(cur) + np.asarray(f(x, t[n]), dtype=float))
        nxt[0] = nxt[-1] = 0.0
        U[:, n + 1] = nxt
        prev, cur = cur, nxt
    return LargeDomainField(x, t, U)


def solve_burgers_fd(
    phi,
    f,
    nu: float,
    x_big: float,
    dx: float,
    dt: float,
    T: float,
    *,
    scheme: str = "imex-cnab",
) -> LargeDomainField:
    """Semi-implicit finite differences for u_t - u u_x - nu u_xx = f.

    Diffusion is implicit (tridiagonal solve per step); convection u u_x and
    the source are explicit.  ``imex-cnab`` (default) uses Crank-Nicolson
    diffusion with Adams-Bashforth convection and a midpoint source, second
    order in time; ``imex-euler`` is the plain first-order variant.
    """
    if scheme not in ("imex-cnab", "imex-euler"):
        raise ValueError(f"unknown scheme {scheme!r}")
    theta = 0.5 if scheme == "imex-cnab" else 1.0
    x = _symmetric_axis(x_big, dx)
    n_steps = _steps_for(T, dt)
    t = np.arange(n_steps + 1) * dt
    nx = len(x)
    n_int = nx - 2
    r = nu * dt / dx**2
    # banded (I - theta r D2) on the interior, Dirichlet 0 at the ends
    ab = np.zeros((3, n_int))
    ab[0, 1:] = -theta * r
    ab[1, :] = 1.0 + 2.0 * theta * r
    ab[2, :-1] = -theta * r

    def conv(u):
        out = np.zeros_like(u)
        out[1:-1] = u[1:-1] * (u[2:] - u[:-2]) / (2.0 * dx)
        return out

    def lap(u):
        out = np.zeros_like(u)
        out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / dx**2
        return out

    U = np.zeros((nx, n_steps + 1))
    u = np.asarray(phi(x), dtype=float)
    u[0] = u[-1] = 0.0
    U[:, 0] = u
    conv_prev = None
    for n in range(n_steps):
        cn = conv(u)
        if theta == 0.5:
            adv = cn if conv_prev is None else 1.5 * cn - 0.5 * conv_prev
            src = np.asarray(f(x, t[n] + 0.5 * dt), dtype=float)
        else:
            adv = cn
            src = np.asarray(f(x, t[n]), dtype=float)
        rhs = u + dt * (adv + src) + (1.0 - theta) * dt * nu * lap(u)
        nxt = np.zeros_like(u)
        nxt[1:-1] = solve_banded((1, 1), ab, rhs[1:-1])
        U[:, n + 1] = nxt
        if np.abs(nxt).max() > 1e6:
            raise FloatingPointError(f"Burgers solve diverged at t={t[n + 1]:.4f}")
        conv_prev = cn
        u = nxt
    return LargeDomainField(x, t, U)


def solve_schrodinger_spectral(
    phi, x_big: float, n_modes: int, dt: float, T: float
) -> LargeDomainField:
    """Fourier split-step for i u_t = -u_xx, exact in time per mode."""
    x = -x_big + (2.0 * x_big / n_modes) * np.arange(n_modes)
    u0 = np.asarray(phi(x), dtype=complex)
    edge = max(abs(u0[0]), abs(u0[-1]))
    if edge >= 1e-12:
        raise ValueError(
            f"initial state has magnitude {edge:.2e} at the truncation boundary; "
            "enlarge x_big"
        )
    n_steps = _steps_for(T, dt)
    t = np.arange(n_steps + 1) * dt
    k = 2.0 * np.pi * np.fft.fftfreq(n_modes, d=2.0 * x_big / n_modes)
    factor = np.exp(-1j * k * k * dt)
    U = np.zeros((n_modes, n_steps + 1), dtype=complex)
    U[:, 0] = u0
    uhat = np.fft.fft(u0)
    for n in range(n_steps):
        uhat = uhat * factor
        U[:, n + 1] = np.fft.ifft(uhat)
    return LargeDomainField(x, t, U)


def restrict(field: LargeDomainField, grid: EvalGrid, provenance: str) -> ReferenceField:
    """Restrict a 1D large-domain solve to an evaluation grid it contains."""
    if grid.dim != 1:
        raise ValueError("restriction is for 1D solves")

    def indices(coarse, fine, label):
        idx = np.searchsorted(fine, coarse)
        idx = np.clip(idx, 0, len(fine) - 1)
        left = np.clip(idx - 1, 0, len(fine) - 1)
        idx = np.where(np.abs(fine[left] - coarse) < np.abs(fine[idx] - coarse), left, idx)
        if np.abs(fine[idx] - coarse).max() > 1e-9:
            raise ValueError(f"evaluation {label} points do not lie on the solver grid")
        return idx

    ix = indices(grid.space_axes[0], field.x, "space")
    it = indices(grid.t_axis, field.t, "time")
    return ReferenceField(grid, field.values[np.ix_(ix, it)], provenance)


# -- per-case references -----------------------------------------------------------


def reference_field(cfg: ExperimentConfig, *, theta: float | None = None) -> ReferenceField:
    """The case's reference solution on its evaluation grid.

    Numerical resolutions are fixed per case so that the solver grids contain
    the evaluation grid exactly (no interpolation).  ``theta`` selects one
    member of the parameterized source family.
    """
    grid = eval_grid_for(cfg)
    case_id = cfg.case_id
    if case_id in _ANALYTIC_CASES:
        return analytic_reference(case_id, grid, wave2d_k=cfg.wave2d_k)
    if case_id == "wave1d-2":
        case = families.target_case(case_id)
        x_interest = max(abs(v) for iv in cfg.domain_of_interest for v in iv)
        field = solve_wave1d_fd(
            case.phi[0],
            case.phi[1],
            case.f,
            x_big=x_interest + cfg.time_horizon + 1.0,
            dx=0.01,
            dt=0.005,
            T=cfg.time_horizon,
        )
        return restrict(field, grid, "fd_wave")
    if case_id in ("burgers-1", "burgers-multi"):
        case = families.target_case(case_id, theta=theta)
        field = solve_burgers_fd(
            case.phi[0],
            case.f,
            nu=cfg.viscosity,
            x_big=8.0,
            dx=0.01,
            dt=0.01,
            T=cfg.time_horizon,
        )
        return restrict(field, grid, "fd_burgers")
    if case_id == "schrodinger":
        case = families.target_case(case_id)
        field = solve_schrodinger_spectral(
            case.phi[0], x_big=20.0, n_modes=2000, dt=0.01, T=cfg.time_horizon
        )
        return restrict(field, grid, "spectral_schrodinger")
    raise ValueError(f"no reference recipe for case {case_id!r}")


# -- caching (dataset blob format) ---------------------------------------------------

REFERENCE_SCHEMA = 1


def save_reference(field: ReferenceField, path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    cplx = np.iscomplexobj(field.values)
    raw = np.ascontiguousarray(field.values, dtype="<c16" if cplx else "<f8").tobytes()
    manifest = {
        "schema_version": REFERENCE_SCHEMA,
        "format": "reference-field",
        "provenance": field.provenance,
        "complex_valued": bool(cplx),
        "shape": list(field.values.shape),
        "space_axes": [ax.tolist() for ax in field.grid.space_axes],
        "t_axis": field.grid.t_axis.tolist(),
        "checksum": hashlib.sha256(raw).hexdigest(),
    }
    (path / "values.bin").write_bytes(raw)
    (path / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))


def load_reference(path) -> ReferenceField:
    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text())
    if manifest.get("schema_version") != REFERENCE_SCHEMA:
        raise ValueError(
            f"unsupported reference schema_version {manifest.get('schema_version')!r}"
        )
    raw = (path / "values.bin").read_bytes()
    if hashlib.sha256(raw).hexdigest() != manifest["checksum"]:
        raise ValueError("reference blob failed its checksum")
    dtype = "<c16" if manifest["complex_valued"] else "<f8"
    values = np.frombuffer(raw, dtype=dtype).reshape(manifest["shape"])
    grid = EvalGrid(
        tuple(np.asarray(ax) for ax in manifest["space_axes"]),
        np.asarray(manifest["t_axis"]),
    )
    return ReferenceField(grid, values.astype(values.dtype), manifest["provenance"])


def _reference_key(cfg: ExperimentConfig, theta: float | None) -> str:
    payload = json.dumps(
        {
            "case": cfg.case_id,
            "eval_grid": list(cfg.eval_grid),
            "domain": [list(iv) for iv in cfg.domain_of_interest],
            "T": cfg.time_horizon,
            "viscosity": cfg.viscosity,
            "wave2d_k": cfg.wave2d_k,
            "theta": theta,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def cached_reference(cfg: ExperimentConfig, cache_dir, *, theta: float | None = None) -> ReferenceField:
    """Load the case reference from the cache, computing and storing if absent."""
    cache_dir = Path(cache_dir)
    slot = cache_dir / f"{cfg.case_id}-{_reference_key(cfg, theta)}"
    if (slot / "manifest.json").exists():
        return load_reference(slot)
    field = reference_field(cfg, theta=theta)
    save_reference(field, slot)
    return field
