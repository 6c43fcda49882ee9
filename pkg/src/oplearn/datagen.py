"""Training-data synthesis: manufacture, filter, assemble, persist.

Candidates are drawn from the case's solution family, their manufactured
initial value(s) and source are scored against the target functions on fixed
generation-domain grids, and a candidate is kept only when every component
error is within its tolerance.  Accepted samples are discretized at the fixed
sensors and output locations shared by the whole dataset.

Scoring uses the relative discrete L2 error, except against an identically
zero target where that metric is undefined and the root-mean-square error is
used instead.  A tolerance of exactly 0 marks a component the family satisfies
by construction; it is verified to 1e-12 rather than thresholded (a metric
threshold of zero would reject everything under roundoff).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import families, operators
from .config import ExperimentConfig
from .families import FamilyParams

__all__ = [
    "SensorLayout",
    "GeneratedSample",
    "OperatorDataset",
    "AcceptanceComponent",
    "GenerationError",
    "metric_rel_l2",
    "metric_mse",
    "component_error",
    "accept_sample",
    "multi_target_accept",
    "uniform_grid",
    "build_layout",
    "acceptance_components",
    "build_dataset",
    "save_dataset",
    "load_dataset",
    "dataset_equal",
]

EXACT_ZERO_TOL = 1e-12
DATASET_SCHEMA = 1


class GenerationError(RuntimeError):
    pass


# -- grids --------------------------------------------------------------------


def uniform_grid(intervals, counts) -> np.ndarray:
    """Uniform tensor grid over the given intervals, flattened to (npts, d)."""
    if len(intervals) != len(counts):
        raise ValueError("one count per interval expected")
    axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(intervals, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _space_time_grid(space_intervals, T, counts) -> np.ndarray:
    return uniform_grid(list(space_intervals) + [(0.0, T)], counts)


@dataclass
class SensorLayout:
    """Fixed sensors and output locations shared by every sample.

    ``output_locations`` starts with ``n_initial_locations`` random spatial
    points at t=0 (drawn once per dataset), followed by a uniform interior
    space-time grid on the domain of interest.
    """

    initial_sensors: np.ndarray  # (m1, d), generation domain
    source_sensors: np.ndarray  # (m2, d+1), generation domain x [0, T]
    output_locations: np.ndarray  # (P, d+1), domain of interest x [0, T]
    n_initial_locations: int


def build_layout(cfg: ExperimentConfig, rng: np.random.Generator) -> SensorLayout:
    initial_sensors = uniform_grid(cfg.generation_domain, cfg.initial_sensor_grid)
    source_sensors = _space_time_grid(
        cfg.generation_domain, cfg.time_horizon, cfg.source_sensor_grid
    )
    d = cfg.dim
    lows = np.array([iv[0] for iv in cfg.domain_of_interest])
    highs = np.array([iv[1] for iv in cfg.domain_of_interest])
    init_pts = rng.uniform(lows, highs, size=(cfg.n_initial_locations, d))
    init_locs = np.hstack([init_pts, np.zeros((cfg.n_initial_locations, 1))])
    interior = _space_time_grid(cfg.domain_of_interest, cfg.time_horizon, cfg.interior_grid)
    return SensorLayout(
        initial_sensors=initial_sensors,
        source_sensors=source_sensors,
        output_locations=np.vstack([init_locs, interior]),
        n_initial_locations=cfg.n_initial_locations,
    )


# -- metrics ------------------------------------------------------------------


def metric_rel_l2(g, g_tar) -> float:
    """Relative discrete L2 error ||g_tar - g||_2 / ||g_tar||_2."""
    g = np.asarray(g)
    g_tar = np.asarray(g_tar)
    if g.shape != g_tar.shape:
        raise ValueError(f"shape mismatch {g.shape} vs {g_tar.shape}")
    denom = np.linalg.norm(g_tar)
    if denom == 0.0:
        raise ValueError(
            "target is identically zero; the relative L2 metric is ineffective, "
            "use metric_mse"
        )
    return float(np.linalg.norm(g_tar - g) / denom)


def metric_mse(g, g_tar, P: int | None = None) -> float:
    """Root-mean-square deviation over the P sample points."""
    g = np.asarray(g)
    g_tar = np.asarray(g_tar)
    if g.shape != g_tar.shape:
        raise ValueError(f"shape mismatch {g.shape} vs {g_tar.shape}")
    if P is None:
        P = g_tar.size
    if P != g_tar.size or P < 1:
        raise ValueError(f"P={P} disagrees with {g_tar.size} sample points")
    d = np.abs(g_tar - g)
    return float(np.sqrt(np.mean(d * d)))


# -- acceptance ---------------------------------------------------------------


@dataclass
class AcceptanceComponent:
    """One scored component: a name, a tolerance, and its target value rows.

    ``targets`` has shape (n_targets, npts); with several rows the component
    error is the best (smallest) error over the rows, so a candidate is kept
    when it approximates at least one of the parameterized targets.
    """

    name: str
    tolerance: float
    targets: np.ndarray
    kind: str  # "initial" | "source"

    def __post_init__(self):
        self.targets = np.atleast_2d(np.asarray(self.targets, dtype=float))


def _single_target_error(candidate: np.ndarray, target: np.ndarray, exact: bool) -> float:
    if exact:
        return float(np.abs(candidate - target).max())
    if np.all(target == 0.0):
        return metric_mse(candidate, target)
    return metric_rel_l2(candidate, target)


def component_error(candidate, comp: AcceptanceComponent) -> float:
    candidate = np.asarray(candidate, dtype=float)
    exact = comp.tolerance == 0.0
    return min(_single_target_error(candidate, row, exact) for row in comp.targets)


def multi_target_accept(candidate, target_rows, tolerance: float) -> tuple[bool, float]:
    """Keep a candidate whose error is within tolerance for >= 1 target."""
    comp = AcceptanceComponent("multi", tolerance, np.asarray(target_rows), "source")
    err = component_error(candidate, comp)
    return _passes(err, tolerance), err


def _passes(err: float, tolerance: float) -> bool:
    if tolerance == 0.0:
        return err <= EXACT_ZERO_TOL
    return err <= tolerance  # inclusive boundary


def accept_sample(candidate_values: dict, components: list[AcceptanceComponent]):
    """Score every component; accepted iff all pass.  Returns (bool, errors)."""
    errors = {}
    ok = True
    for comp in components:
        err = component_error(candidate_values[comp.name], comp)
        errors[comp.name] = err
        ok = ok and _passes(err, comp.tolerance)
    return ok, errors


# -- per-case candidate evaluation ----------------------------------------------


def _split_points(pts: np.ndarray, dim: int):
    """(npts, d) -> x arg for the family evaluators."""
    if dim == 1:
        return pts[:, 0]
    return (pts[:, 0], pts[:, 1])


# Derivative orders each equation's source needs; trimming the jets here is
# worth a multiple in candidate throughput.
_SOURCE_ORDERS = {
    "wave1d": (2, 2),
    "wave2d": (2, 2),
    "burgers": (1, 2),
    "kdv": (1, 3),
    "schrodinger": (1, 2),
}


def _initial_field_values(params: FamilyParams, pts: np.ndarray, cfg: ExperimentConfig):
    """Manufactured initial-trace vectors [u(.,0)] or [u(.,0), u_t(.,0)]."""
    spec = operators.spec_for_family(cfg.family, cfg.viscosity)
    x = _split_points(pts, cfg.dim)
    t_order = 1 if spec.time_order == 2 else 0
    if t_order == 0:
        return [families.eval_u(params, x, 0.0)]
    jet = families.eval_jet(params, x, 0.0, t_order=1, x_order=0)
    return operators.initial_traces(spec, jet)


def _source_field_values(params: FamilyParams, pts: np.ndarray, cfg: ExperimentConfig):
    """Manufactured source L[u] at space-time points (exactly 0 for the beam)."""
    if not cfg.has_source_branch and params.family == families.SCHRODINGER_BEAM:
        return np.zeros(len(pts), dtype=complex)
    return _source_residual_values(params, pts, cfg)


def _source_residual_values(params: FamilyParams, pts: np.ndarray, cfg: ExperimentConfig):
    """L[u] evaluated numerically, used to verify exact-by-construction zeros."""
    spec = operators.spec_for_family(cfg.family, cfg.viscosity)
    t_order, x_order = _SOURCE_ORDERS[cfg.equation]
    jet = families.eval_jet(
        params,
        _split_points(pts[:, :-1], cfg.dim),
        pts[:, -1],
        t_order=t_order,
        x_order=x_order,
    )
    return operators.apply_operator(spec, jet)


def _source_grid_values(params: FamilyParams, x_axis, t_axis, cfg: ExperimentConfig):
    """Source on a tensor grid via the separable fast path, flattened x-major."""
    spec = operators.spec_for_family(cfg.family, cfg.viscosity)
    t_order, x_order = _SOURCE_ORDERS[cfg.equation]
    jet = families.eval_grid_jet(params, x_axis, t_axis, t_order=t_order, x_order=x_order)
    return operators.apply_operator(spec, jet).ravel()


def _component_names(cfg: ExperimentConfig) -> tuple[list[str], list[str]]:
    """(initial component names, source component names) in tolerance order."""
    names = [name for name, _ in cfg.tolerances]
    initial = [n for n in names if n.startswith("phi")]
    source = [n for n in names if n.startswith("f")]
    return initial, source


def acceptance_components(cfg: ExperimentConfig) -> list[AcceptanceComponent]:
    """Target values on the generation-domain evaluation grids (Table-driven)."""
    initial_pts = uniform_grid(cfg.generation_domain, cfg.acceptance_initial_grid)
    source_pts = _space_time_grid(
        cfg.generation_domain, cfg.time_horizon, cfg.acceptance_source_grid
    )
    tol = dict(cfg.tolerances)
    initial_names, source_names = _component_names(cfg)
    comps: list[AcceptanceComponent] = []

    case = families.target_case(cfg.case_id, wave2d_k=cfg.wave2d_k)
    xs = _split_points(initial_pts, cfg.dim)
    phi_vals = [np.broadcast_to(np.asarray(phi(*xs) if cfg.dim == 2 else phi(xs)),
                                (len(initial_pts),)) for phi in case.phi]
    if cfg.complex_valued:
        phi = phi_vals[0]
        per_name = {"phi_re": phi.real, "phi_im": phi.imag}
    else:
        per_name = {name: v for name, v in zip(initial_names, phi_vals)}
    for name in initial_names:
        comps.append(AcceptanceComponent(name, tol[name], per_name[name], "initial"))

    xt = _split_points(source_pts[:, :-1], cfg.dim)
    tcol = source_pts[:, -1]
    if cfg.case_id == "burgers-multi":
        rows = [
            np.asarray(families.target_case("burgers-multi", theta=th).f(xt, tcol))
            for th in families.burgers_multi_thetas(cfg.theta_count)
        ]
        comps.append(AcceptanceComponent("f", tol["f"], np.stack(rows), "source"))
        return comps
    f_args = (*xt, tcol) if cfg.dim == 2 else (xt, tcol)
    f_vals = np.broadcast_to(np.asarray(case.f(*f_args)), (len(source_pts),))
    if cfg.complex_valued:
        src = {"f_re": np.asarray(f_vals).real, "f_im": np.asarray(f_vals).imag}
        for name in source_names:
            comps.append(AcceptanceComponent(name, tol[name], src[name], "source"))
    else:
        comps.append(AcceptanceComponent("f", tol["f"], f_vals, "source"))
    return comps


@dataclass
class GeneratedSample:
    """One accepted manufactured triple, discretized at the shared layout."""

    params: FamilyParams
    phi_sensor_values: list[np.ndarray]
    f_sensor_values: np.ndarray
    u_values: np.ndarray
    acceptance_errors: dict


@dataclass
class OperatorDataset:
    case_id: str
    seed: int
    layout: SensorLayout
    samples: list[GeneratedSample]
    complex_valued: bool
    n_initial_functions: int
    generation_domain: tuple
    domain_of_interest: tuple
    time_horizon: float
    initial_sensor_grid: tuple
    source_sensor_grid: tuple
    n_initial_locations: int
    interior_grid: tuple
    acceptance_rate: float

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    def phi_matrix(self, j: int) -> np.ndarray:
        return np.stack([s.phi_sensor_values[j] for s in self.samples])

    def f_matrix(self) -> np.ndarray:
        return np.stack([s.f_sensor_values for s in self.samples])

    def u_matrix(self) -> np.ndarray:
        return np.stack([s.u_values for s in self.samples])


def _batch_rows(pts: np.ndarray, dim: int):
    """Point rows shaped (1, npts) so stacked parameters broadcast over them."""
    if dim == 1:
        return pts[:, 0][None, :]
    return (pts[:, 0][None, :], pts[:, 1][None, :])


def _batch_errors(cand: np.ndarray, comp: AcceptanceComponent) -> np.ndarray:
    """Component error per candidate row of a (B, npts) value matrix."""
    cand = np.atleast_2d(cand)
    if comp.tolerance == 0.0:
        return np.abs(cand - comp.targets[0]).max(axis=1)
    errs = []
    for row in comp.targets:
        if np.all(row == 0.0):
            d = np.abs(cand - row)
            errs.append(np.sqrt(np.mean(d * d, axis=1)))
        else:
            errs.append(np.linalg.norm(cand - row, axis=1) / np.linalg.norm(row))
    return np.min(errs, axis=0)


def _evaluate_chunk(draws, cfg, initial_comps, source_comps, initial_pts, source_pts):
    """Score a chunk of candidates; per-candidate early exit at the failing
    component is preserved in the recorded errors.  Returns (accepted mask,
    error dicts in candidate order)."""
    B = len(draws)
    errors: list[dict[str, float]] = [dict() for _ in range(B)]
    alive = np.ones(B, dtype=bool)
    spec = operators.spec_for_family(cfg.family, cfg.viscosity)

    if initial_comps:
        stacked = families.stack_params(draws)
        x = _batch_rows(initial_pts, cfg.dim)
        if spec.time_order == 2:
            jet = families.eval_jet(stacked, x, 0.0, t_order=1, x_order=0)
            traces = operators.initial_traces(spec, jet)
        else:
            traces = [families.eval_u(stacked, x, 0.0)]
        traces = [np.broadcast_to(np.atleast_2d(tr), (B, len(initial_pts))) for tr in traces]
        if cfg.complex_valued:
            values = {"phi_re": traces[0].real, "phi_im": traces[0].imag}
        else:
            values = {c.name: tr.real for c, tr in zip(initial_comps, traces)}
        for comp in initial_comps:
            errs = _batch_errors(values[comp.name], comp)
            for i in range(B):
                if alive[i]:
                    errors[i][comp.name] = float(errs[i])
            alive &= errs <= (EXACT_ZERO_TOL if comp.tolerance == 0.0 else comp.tolerance)

    if source_comps and alive.any():
        idx = np.flatnonzero(alive)
        separable = cfg.dim == 1 and families.separable_terms(draws[0]) is not None
        if separable:
            x_axis = np.linspace(*cfg.generation_domain[0], cfg.acceptance_source_grid[0])
            t_axis = np.linspace(0.0, cfg.time_horizon, cfg.acceptance_source_grid[1])
            t_order, x_order = _SOURCE_ORDERS[cfg.equation]
            jet = families.eval_grid_jet(
                families.stack_params([draws[i] for i in idx]),
                x_axis,
                t_axis,
                t_order=t_order,
                x_order=x_order,
            )
            fvals = operators.apply_operator(spec, jet).reshape(len(idx), -1)
        else:
            stacked = families.stack_params([draws[i] for i in idx])
            t_order, x_order = _SOURCE_ORDERS[cfg.equation]
            jet = families.eval_jet(
                stacked,
                _batch_rows(source_pts[:, :-1], cfg.dim),
                source_pts[:, -1][None, :],
                t_order=t_order,
                x_order=x_order,
            )
            fvals = np.atleast_2d(operators.apply_operator(spec, jet))
            fvals = np.broadcast_to(fvals, (len(idx), len(source_pts)))
        if cfg.complex_valued:
            values = {"f_re": fvals.real, "f_im": fvals.imag}
        else:
            values = {"f": fvals.real}
        sub_alive = np.ones(len(idx), dtype=bool)
        for comp in source_comps:
            errs = _batch_errors(values[comp.name], comp)
            for k, i in enumerate(idx):
                if sub_alive[k]:
                    errors[i][comp.name] = float(errs[k])
            sub_alive &= errs <= (EXACT_ZERO_TOL if comp.tolerance == 0.0 else comp.tolerance)
        alive[idx] = sub_alive

    return alive, errors


def _materialize(params, cfg, layout: SensorLayout, errors) -> GeneratedSample:
    phi = _initial_field_values(params, layout.initial_sensors, cfg)
    if cfg.dim == 1 and cfg.has_source_branch and families.separable_terms(params) is not None:
        f = _source_grid_values(
            params,
            np.linspace(*cfg.generation_domain[0], cfg.source_sensor_grid[0]),
            np.linspace(0.0, cfg.time_horizon, cfg.source_sensor_grid[1]),
            cfg,
        )
    else:
        f = _source_field_values(params, layout.source_sensors, cfg)
    pts = layout.output_locations
    u = families.eval_u(params, _split_points(pts[:, :-1], cfg.dim), pts[:, -1])
    if cfg.complex_valued:
        phi = [np.asarray(p, dtype=complex) for p in phi]
        f = np.asarray(f, dtype=complex)
        u = np.asarray(u, dtype=complex)
    else:
        phi = [np.asarray(p, dtype=float) for p in phi]
        f = np.asarray(f, dtype=float)
        u = np.asarray(u, dtype=float)
    return GeneratedSample(params, phi, f, u, dict(errors))


BUDGET_DRAWS = 1_000_000
MIN_ACCEPT_RATE = 1e-4


def build_dataset(
    cfg: ExperimentConfig,
    seed: int | None = None,
    report: list | None = None,
) -> OperatorDataset:
    """Sample, manufacture, filter, and discretize until n_samples accepted.

    With a fixed seed the result is bit-identical between runs; candidate i
    draws from its own derived stream, so parallel and serial generation would
    accept the identical first-N set.  ``report`` (if given) receives one
    (candidate_index, component, error, accepted) row per evaluated component.
    """
    if seed is None:
        seed = cfg.seed
    layout = build_layout(cfg, np.random.default_rng([seed, 0]))
    comps = acceptance_components(cfg)
    initial_comps = [c for c in comps if c.kind == "initial"]
    source_comps = [c for c in comps if c.kind == "source"]
    initial_pts = uniform_grid(cfg.generation_domain, cfg.acceptance_initial_grid)
    source_pts = _space_time_grid(
        cfg.generation_domain, cfg.time_horizon, cfg.acceptance_source_grid
    )

    samples: list[GeneratedSample] = []
    fail_counts: dict[str, int] = {c.name: 0 for c in comps}
    tried = 0
    index = 0
    # Chunk size trades numpy dispatch overhead against temporary-array size;
    # results are independent of it (candidate i always uses stream (seed,1,i),
    # and processing cuts exactly at the N-th acceptance).
    chunk = int(np.clip(600_000 // max(len(source_pts), 1), 16, 512))
    while len(samples) < cfg.n_samples:
        draws = [
            families.sample_params(cfg.family, np.random.default_rng([seed, 1, index + k]))
            for k in range(chunk)
        ]
        alive, errors = _evaluate_chunk(
            draws, cfg, initial_comps, source_comps, initial_pts, source_pts
        )
        for k in range(chunk):
            tried += 1
            if report is not None:
                for name, err in errors[k].items():
                    report.append((index + k, name, err, bool(alive[k])))
            if alive[k]:
                samples.append(_materialize(draws[k], cfg, layout, errors[k]))
                if len(samples) == cfg.n_samples:
                    break
            else:
                failing = list(errors[k])[-1]  # early exit stops at the failure
                fail_counts[failing] += 1
        index += chunk
        if tried >= BUDGET_DRAWS and len(samples) / tried < MIN_ACCEPT_RATE:
            worst = max(fail_counts, key=fail_counts.get)
            raise GenerationError(
                f"acceptance rate {len(samples) / tried:.2e} below {MIN_ACCEPT_RATE}"
                f" after {tried} draws; worst component: {worst!r}"
                f" ({fail_counts[worst]} rejections) - check tolerances/laws"
            )
    rate = cfg.n_samples / tried if tried else 1.0
    return OperatorDataset(
        case_id=cfg.case_id,
        seed=seed,
        layout=layout,
        samples=samples,
        complex_valued=cfg.complex_valued,
        n_initial_functions=cfg.n_initial_functions,
        generation_domain=cfg.generation_domain,
        domain_of_interest=cfg.domain_of_interest,
        time_horizon=cfg.time_horizon,
        initial_sensor_grid=cfg.initial_sensor_grid,
        source_sensor_grid=cfg.source_sensor_grid,
        n_initial_locations=cfg.n_initial_locations,
        interior_grid=cfg.interior_grid,
        acceptance_rate=rate,
    )


# -- persistence ----------------------------------------------------------------
# Directory format: manifest.json plus raw little-endian float64 blobs phi.bin,
# f.bin, u.bin, locations.bin, each row-major [sample x sensor]; complex fields
# are stored as interleaved (re, im) pairs.


def _blob_bytes(arr: np.ndarray, complex_valued: bool) -> bytes:
    dtype = "<c16" if complex_valued else "<f8"
    return np.ascontiguousarray(arr, dtype=dtype).tobytes()


def save_dataset(ds: OperatorDataset, path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    n = ds.n_samples
    phi = np.stack(
        [np.concatenate(s.phi_sensor_values) for s in ds.samples]
    ) if n else np.zeros((0, ds.n_initial_functions * len(ds.layout.initial_sensors)))
    f = ds.f_matrix() if n else np.zeros((0, len(ds.layout.source_sensors)))
    u = ds.u_matrix() if n else np.zeros((0, len(ds.layout.output_locations)))
    blobs = {
        "phi.bin": _blob_bytes(phi, ds.complex_valued),
        "f.bin": _blob_bytes(f, ds.complex_valued),
        "u.bin": _blob_bytes(u, ds.complex_valued),
        "locations.bin": _blob_bytes(ds.layout.output_locations, False),
    }
    manifest = {
        "schema_version": DATASET_SCHEMA,
        "format": "operator-dataset",
        "case_id": ds.case_id,
        "seed": ds.seed,
        "n_samples": n,
        "complex_valued": ds.complex_valued,
        "n_initial_functions": ds.n_initial_functions,
        "generation_domain": [list(iv) for iv in ds.generation_domain],
        "domain_of_interest": [list(iv) for iv in ds.domain_of_interest],
        "time_horizon": ds.time_horizon,
        "initial_sensor_grid": list(ds.initial_sensor_grid),
        "source_sensor_grid": list(ds.source_sensor_grid),
        "n_initial_locations": ds.n_initial_locations,
        "interior_grid": list(ds.interior_grid),
        "acceptance_rate": ds.acceptance_rate,
        "samples": [
            {
                "params": s.params.to_jsonable(),
                "acceptance_errors": {k: float(v) for k, v in s.acceptance_errors.items()},
            }
            for s in ds.samples
        ],
        "checksums": {
            name: hashlib.sha256(raw).hexdigest() for name, raw in blobs.items()
        },
    }
    for name, raw in blobs.items():
        (path / name).write_bytes(raw)
    (path / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))


def _read_blob(path: Path, name: str, checksum: str, shape, complex_valued: bool):
    raw = (path / name).read_bytes()
    if hashlib.sha256(raw).hexdigest() != checksum:
        raise ValueError(f"dataset blob {name} failed its checksum")
    dtype = "<c16" if complex_valued else "<f8"
    expected = int(np.prod(shape)) * np.dtype(dtype).itemsize
    if len(raw) != expected:
        raise ValueError(f"dataset blob {name} is truncated: {len(raw)} != {expected}")
    arr = np.frombuffer(raw, dtype=dtype).reshape(shape)
    return arr.astype(complex if complex_valued else float)


def load_dataset(path) -> OperatorDataset:
    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text())
    if manifest.get("schema_version") != DATASET_SCHEMA:
        raise ValueError(
            f"unsupported dataset schema_version {manifest.get('schema_version')!r}"
        )
    if manifest.get("format") != "operator-dataset":
        raise ValueError(f"not an operator dataset: format={manifest.get('format')!r}")
    n = manifest["n_samples"]
    cplx = manifest["complex_valued"]
    n_phi = manifest["n_initial_functions"]
    gen_dom = tuple(tuple(iv) for iv in manifest["generation_domain"])
    interest = tuple(tuple(iv) for iv in manifest["domain_of_interest"])
    T = manifest["time_horizon"]
    init_grid = tuple(manifest["initial_sensor_grid"])
    src_grid = tuple(manifest["source_sensor_grid"])
    interior = tuple(manifest["interior_grid"])
    m1 = math.prod(init_grid)
    m2 = math.prod(src_grid)
    P = manifest["n_initial_locations"] + math.prod(interior)
    d = len(gen_dom)
    cks = manifest["checksums"]
    phi = _read_blob(path, "phi.bin", cks["phi.bin"], (n, n_phi * m1), cplx)
    f = _read_blob(path, "f.bin", cks["f.bin"], (n, m2), cplx)
    u = _read_blob(path, "u.bin", cks["u.bin"], (n, P), cplx)
    locations = _read_blob(path, "locations.bin", cks["locations.bin"], (P, d + 1), False)
    layout = SensorLayout(
        initial_sensors=uniform_grid(gen_dom, init_grid),
        source_sensors=_space_time_grid(gen_dom, T, src_grid),
        output_locations=locations,
        n_initial_locations=manifest["n_initial_locations"],
    )
    samples = []
    for i, meta in enumerate(manifest["samples"]):
        samples.append(
            GeneratedSample(
                params=FamilyParams.from_jsonable(meta["params"]),
                phi_sensor_values=[phi[i, j * m1 : (j + 1) * m1] for j in range(n_phi)],
                f_sensor_values=f[i],
                u_values=u[i],
                acceptance_errors=dict(meta["acceptance_errors"]),
            )
        )
    return OperatorDataset(
        case_id=manifest["case_id"],
        seed=manifest["seed"],
        layout=layout,
        samples=samples,
        complex_valued=cplx,
        n_initial_functions=n_phi,
        generation_domain=gen_dom,
        domain_of_interest=interest,
        time_horizon=T,
        initial_sensor_grid=init_grid,
        source_sensor_grid=src_grid,
        n_initial_locations=manifest["n_initial_locations"],
        interior_grid=interior,
        acceptance_rate=manifest["acceptance_rate"],
    )


def dataset_equal(a: OperatorDataset, b: OperatorDataset) -> bool:
    """Bitwise equality of two datasets (arrays, params, and metadata)."""
    if (
        a.case_id != b.case_id
        or a.seed != b.seed
        or a.n_samples != b.n_samples
        or a.complex_valued != b.complex_valued
        or a.n_initial_functions != b.n_initial_functions
        or a.generation_domain != b.generation_domain
        or a.domain_of_interest != b.domain_of_interest
        or a.time_horizon != b.time_horizon
        or a.acceptance_rate != b.acceptance_rate
    ):
        return False
    for arr_a, arr_b in (
        (a.layout.initial_sensors, b.layout.initial_sensors),
        (a.layout.source_sensors, b.layout.source_sensors),
        (a.layout.output_locations, b.layout.output_locations),
    ):
        if not np.array_equal(arr_a, arr_b):
            return False
    for sa, sb in zip(a.samples, b.samples):
        if sa.params.family != sb.params.family:
            return False
        for key in sa.params.values:
            if not np.array_equal(sa.params.values[key], sb.params.values[key]):
                return False
        for pa, pb in zip(sa.phi_sensor_values, sb.phi_sensor_values):
            if not np.array_equal(pa, pb):
                return False
        if not np.array_equal(sa.f_sensor_values, sb.f_sensor_values):
            return False
        if not np.array_equal(sa.u_values, sb.u_values):
            return False
        if sa.acceptance_errors != sb.acceptance_errors:
            return False
    return True
