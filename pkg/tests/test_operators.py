import numpy as np
import pytest

from oplearn import families, operators
from oplearn.families import DerivativeJet, eval_jet, sample_params
from oplearn.operators import (
    BURGERS,
    KDV,
    PdeSpec,
    SCHRODINGER,
    WAVE1D,
    WAVE2D,
    apply_operator,
    initial_traces,
    residual,
    spec_for_family,
)


def zero_jet_1d():
    z = 0.0
    return DerivativeJet(z, z, z, du_dx=z, d2u_dx2=z, d3u_dx3=z)


def zero_jet_2d():
    z = 0.0
    return DerivativeJet(z, z, z, du_dx1=z, du_dx2=z, d2u_dx1x1=z, d2u_dx2x2=z)


@pytest.mark.parametrize("eq", [WAVE1D, BURGERS, KDV, SCHRODINGER])
def test_operators_annihilate_zero_1d(eq):
    assert apply_operator(PdeSpec(eq), zero_jet_1d()) == 0.0


def test_operator_annihilates_zero_2d():
    assert apply_operator(PdeSpec(WAVE2D), zero_jet_2d()) == 0.0


def test_wave_operator_on_case1_solution_at_origin():
    case = families.target_case("wave1d-1")
    jet = families.jet_from_expr(case.exact, 0.0, 0.0)
    assert apply_operator(PdeSpec(WAVE1D), jet) == pytest.approx(2.0, abs=1e-14)


def test_kdv_operator_on_exact_solution_at_origin():
    case = families.target_case("kdv")
    jet = families.jet_from_expr(case.exact, 0.0, 0.0)
    assert apply_operator(PdeSpec(KDV), jet) == pytest.approx(0.0, abs=1e-14)


def test_initial_traces():
    rng = np.random.default_rng(0)
    x = np.linspace(-2, 2, 11)
    p = sample_params(families.WAVE1D_POINTSRC, rng)
    traces = initial_traces(PdeSpec(WAVE1D), eval_jet(p, x, 0.0))
    assert len(traces) == 2
    assert np.all(traces[0] == 0.0) and np.all(traces[1] == 0.0)

    p = sample_params(families.BURGERS_HERMITE, rng)
    traces = initial_traces(PdeSpec(BURGERS), eval_jet(p, x, 0.0))
    assert len(traces) == 1
    assert np.all(traces[0] == 0.0)

    case = families.target_case("wave1d-1")
    jet = families.jet_from_expr(case.exact, 0.0, 0.0)
    traces = initial_traces(PdeSpec(WAVE1D), jet)
    assert traces[0] == pytest.approx(1.0, abs=1e-15)
    assert traces[1] == pytest.approx(0.0, abs=1e-15)


def test_manufactured_pairs_have_zero_residual():
    rng = np.random.default_rng(1)
    for fam in families.ALL_FAMILIES:
        spec = spec_for_family(fam)
        for _ in range(5):
            p = sample_params(fam, rng)
            if fam == families.WAVE2D_PACKET:
                pt = ((rng.uniform(-5, 5, 200), rng.uniform(-5, 5, 200)), rng.uniform(0, 1, 200))
            else:
                pt = (rng.uniform(-3, 3, 200), rng.uniform(0, 1, 200))
            jet = eval_jet(p, *pt)
            f = apply_operator(spec, jet)
            assert np.abs(residual(spec, jet, f)).max() == 0.0


def test_schrodinger_family_residual_against_declared_zero_source():
    rng = np.random.default_rng(2)
    spec = PdeSpec(SCHRODINGER)
    p = sample_params(families.SCHRODINGER_BEAM, rng)
    jet = eval_jet(p, rng.uniform(-3, 3, 100), rng.uniform(0, 1, 100))
    assert np.abs(residual(spec, jet, 0.0)).max() < 1e-8


def test_residual_linear_in_f():
    rng = np.random.default_rng(3)
    p = sample_params(families.KDV_PACKET, rng)
    jet = eval_jet(p, 0.3, 0.4)
    f = apply_operator(PdeSpec(KDV), jet)
    assert residual(PdeSpec(KDV), jet, f + 1.0) == -1.0


def _combine(j1: DerivativeJet, j2: DerivativeJet, a: float, b: float) -> DerivativeJet:
    def mix(u, v):
        if u is None or v is None:
            return None
        return a * u + b * v

    return DerivativeJet(
        *(mix(getattr(j1, k), getattr(j2, k)) for k in (
            "u", "du_dt", "d2u_dt2", "du_dx", "d2u_dx2", "d3u_dx3",
            "du_dx1", "du_dx2", "d2u_dx1x1", "d2u_dx2x2",
        ))
    )


@pytest.mark.parametrize("fam,eq", [
    (families.WAVE1D_HERMITE, WAVE1D),
    (families.WAVE2D_PACKET, WAVE2D),
    (families.SCHRODINGER_BEAM, SCHRODINGER),
])
def test_linear_operators_are_linear_on_jets(fam, eq):
    rng = np.random.default_rng(4)
    spec = PdeSpec(eq)
    p1 = sample_params(fam, rng)
    p2 = sample_params(fam, rng)
    if fam == families.WAVE2D_PACKET:
        pt = ((rng.uniform(-2, 2, 50), rng.uniform(-2, 2, 50)), rng.uniform(0, 1, 50))
    else:
        pt = (rng.uniform(-2, 2, 50), rng.uniform(0, 1, 50))
    j1, j2 = eval_jet(p1, *pt), eval_jet(p2, *pt)
    a, b = 1.7, -0.6
    lhs = apply_operator(spec, _combine(j1, j2, a, b))
    rhs = a * apply_operator(spec, j1) + b * apply_operator(spec, j2)
    scale = max(np.abs(rhs).max(), 1.0)
    assert np.abs(lhs - rhs).max() / scale < 1e-12


@pytest.mark.parametrize("fam,eq", [
    (families.BURGERS_HERMITE, BURGERS),
    (families.KDV_PACKET, KDV),
])
def test_nonlinear_operators_fail_superposition(fam, eq):
    rng = np.random.default_rng(5)
    spec = spec_for_family(fam)
    p1 = sample_params(fam, rng)
    p2 = sample_params(fam, rng)
    pt = (rng.uniform(-1, 1, 50), rng.uniform(0.2, 1, 50))
    j1, j2 = eval_jet(p1, *pt), eval_jet(p2, *pt)
    lhs = apply_operator(spec, _combine(j1, j2, 1.0, 1.0))
    rhs = apply_operator(spec, j1) + apply_operator(spec, j2)
    assert np.abs(lhs - rhs).max() > 1e-6


def test_missing_derivative_order_is_an_error():
    jet2d = zero_jet_2d()
    with pytest.raises(ValueError, match="du_dx"):
        apply_operator(PdeSpec(KDV), jet2d)
    with pytest.raises(ValueError, match="d2u_dx1x1"):
        apply_operator(PdeSpec(WAVE2D), zero_jet_1d())
    partial = zero_jet_1d()
    partial.d3u_dx3 = None
    with pytest.raises(ValueError, match="d3u_dx3"):
        apply_operator(PdeSpec(KDV), partial)


def test_spec_validation():
    with pytest.raises(ValueError):
        PdeSpec("heat")
    with pytest.raises(ValueError):
        PdeSpec(BURGERS, viscosity=0.0)
    assert PdeSpec(WAVE1D).time_order == 2
    assert PdeSpec(BURGERS).time_order == 1
    assert PdeSpec(SCHRODINGER).complex_valued
