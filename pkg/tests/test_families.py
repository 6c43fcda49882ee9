import numpy as np
import pytest

from oplearn import families, operators
from oplearn.families import (
    ALL_FAMILIES,
    BURGERS_HERMITE,
    FamilyParams,
    KDV_PACKET,
    SCHRODINGER_BEAM,
    WAVE1D_HERMITE,
    WAVE1D_POINTSRC,
    WAVE2D_PACKET,
    eval_jet,
    eval_u,
    hermite_function,
    sample_params,
    target_case,
)

from _utils import fd_jet_1d, fd_jet_2d, vec_rel_err


# -- Hermite functions ---------------------------------------------------------


def test_hermite_values_at_zero():
    assert hermite_function(1, 0.0) == 0.0
    assert hermite_function(0, 0.0) == pytest.approx(np.pi ** (-0.25), abs=1e-15)
    assert hermite_function(2, 0.0) == pytest.approx(
        -np.pi ** (-0.25) / np.sqrt(2.0), abs=1e-15
    )


def test_hermite_orthonormality():
    # Gauss-Hermite quadrature with the Gaussian weight folded into the functions.
    nodes, weights = np.polynomial.hermite.hermgauss(40)
    for i in range(4):
        for j in range(4):
            hi = hermite_function(i, nodes) * np.exp(nodes**2 / 2)
            hj = hermite_function(j, nodes) * np.exp(nodes**2 / 2)
            ip = np.sum(weights * hi * hj)
            assert ip == pytest.approx(1.0 if i == j else 0.0, abs=1e-10)


def test_hermite_index_cap():
    with pytest.raises(ValueError):
        hermite_function(11, 0.0)
    with pytest.raises(ValueError):
        hermite_function(-1, 0.0)


# -- parameter sampling ---------------------------------------------------------


def test_sampling_is_deterministic():
    for fam in ALL_FAMILIES:
        a = sample_params(fam, np.random.default_rng(123))
        b = sample_params(fam, np.random.default_rng(123))
        assert a.family == b.family
        for key in a.values:
            assert np.array_equal(a.values[key], b.values[key])


def test_wave1d_hermite_amplitude_law():
    rng = np.random.default_rng(2024)
    draws = np.array(
        [sample_params(WAVE1D_HERMITE, rng).values["A"] for _ in range(10_000)]
    ).ravel()
    assert abs(draws.mean() - 1.0) < 0.05
    assert abs(draws.std() - 1.0) < 0.05


def test_constrained_parameters():
    rng = np.random.default_rng(7)
    for _ in range(500):
        assert sample_params(SCHRODINGER_BEAM, rng).values["zeta"] > 0.0
        assert sample_params(KDV_PACKET, rng).values["a"] < 0.0
        assert np.all(np.abs(sample_params(WAVE1D_POINTSRC, rng).values["sigma"]) >= 0.05)


def test_params_json_roundtrip():
    p = sample_params(BURGERS_HERMITE, np.random.default_rng(5))
    q = FamilyParams.from_jsonable(p.to_jsonable())
    assert q.family == p.family
    for key in p.values:
        assert np.array_equal(q.values[key], p.values[key])


# -- built-in zeros at t=0 -------------------------------------------------------


def test_burgers_family_vanishes_at_t0():
    rng = np.random.default_rng(11)
    x = np.linspace(-4, 4, 101)
    for _ in range(20):
        p = sample_params(BURGERS_HERMITE, rng)
        assert np.all(eval_u(p, x, 0.0) == 0.0)


def test_pointsrc_family_zero_initial_data():
    rng = np.random.default_rng(12)
    x = np.linspace(-2, 2, 101)
    for _ in range(20):
        p = sample_params(WAVE1D_POINTSRC, rng)
        jet = eval_jet(p, x, 0.0)
        assert np.all(jet.u == 0.0)
        assert np.all(jet.du_dt == 0.0)


def test_even_family_odd_x_derivatives_vanish_at_center():
    rng = np.random.default_rng(13)
    for _ in range(10):
        p = sample_params(WAVE1D_POINTSRC, rng)
        jet = eval_jet(p, 0.0, 0.7)
        assert jet.du_dx == 0.0
        assert jet.d3u_dx3 == 0.0


# -- analytic jets vs finite-difference oracle -----------------------------------


@pytest.mark.parametrize("family", [f for f in ALL_FAMILIES if f != WAVE2D_PACKET])
def test_jets_match_fd_oracle_1d(family):
    # The oracle, not the jet, limits the attainable agreement: at h=1e-4 the
    # 5-point third-derivative stencil carries ~1e-4 * |u| of float64
    # cancellation noise, and h^2 truncation in t blows up for beams much
    # sharper than the sigma/zeta floor.  Draws are kept inside the oracle's
    # validity range and beams get sample points near their moving center.
    rng = np.random.default_rng(2167)
    entries = {k: ([], []) for k in ("du_dt", "d2u_dt2", "du_dx", "d2u_dx2", "d3u_dx3")}
    for _ in range(20):
        p = sample_params(family, rng)
        if family == SCHRODINGER_BEAM:
            while p.values["zeta"] < 0.05:
                p = sample_params(family, rng)
        t = rng.uniform(0.0, 1.0, 10)
        x = rng.uniform(-3.0, 3.0, 10)
        if family == SCHRODINGER_BEAM:
            x[5:] = 2.0 * p.values["k"] * t[5:] + rng.uniform(-1.0, 1.0, 5)
        jet = eval_jet(p, x, t)
        fd = fd_jet_1d(lambda xx, tt: eval_u(p, xx, tt), x, t, h=1e-4)
        for key, (ja, fa) in entries.items():
            ja.append(getattr(jet, key))
            fa.append(fd[key])
    for key, (ja, fa) in entries.items():
        tol = 1e-4 if key == "d3u_dx3" else 1e-5
        err = vec_rel_err(np.concatenate(fa), np.concatenate(ja))
        assert err < tol, f"{family} {key}: rel err {err}"


def test_jets_match_fd_oracle_2d():
    rng = np.random.default_rng(99)
    entries = {
        k: ([], [])
        for k in ("du_dt", "d2u_dt2", "du_dx1", "du_dx2", "d2u_dx1x1", "d2u_dx2x2")
    }
    for _ in range(10):
        p = sample_params(WAVE2D_PACKET, rng)
        x1 = rng.uniform(-5, 5, 10)
        x2 = rng.uniform(-5, 5, 10)
        t = rng.uniform(0, 1, 10)
        jet = eval_jet(p, (x1, x2), t)
        fd = fd_jet_2d(lambda a, b, tt: eval_u(p, (a, b), tt), x1, x2, t)
        for key, (ja, fa) in entries.items():
            ja.append(getattr(jet, key))
            fa.append(fd[key])
    for key, (ja, fa) in entries.items():
        err = vec_rel_err(np.concatenate(fa), np.concatenate(ja))
        assert err < 1e-5, f"{key}: rel err {err}"


def test_beam_solves_homogeneous_equation():
    rng = np.random.default_rng(21)
    spec = operators.PdeSpec(operators.SCHRODINGER)
    for _ in range(20):
        p = sample_params(SCHRODINGER_BEAM, rng)
        x = rng.uniform(-5, 5, 50)
        t = rng.uniform(0, 1, 50)
        res = operators.apply_operator(spec, eval_jet(p, x, t))
        assert np.abs(res).max() < 1e-8


# -- targets ---------------------------------------------------------------------


def test_wave1d_case1_initial_values():
    case = target_case("wave1d-1")
    assert case.phi[0](0.0) == 1.0
    assert case.phi[1](0.0) == 0.0


def test_wave1d_case2_source_peak():
    case = target_case("wave1d-2")
    for t in np.linspace(0, 1, 7):
        assert case.f(0.0, t) == 5.0


def test_kdv_target_source_vanishes_at_origin():
    assert target_case("kdv").f(0.0, 0.0) == 0.0


def test_wave1d_case1_printed_source_consistent_with_operator():
    case = target_case("wave1d-1")
    rng = np.random.default_rng(3)
    x = rng.uniform(-3, 3, 100)
    t = rng.uniform(0, 1, 100)
    jet = families.jet_from_expr(case.exact, x, t)
    lhs = operators.apply_operator(operators.PdeSpec(operators.WAVE1D), jet)
    assert np.abs(lhs - case.f(x, t)).max() < 1e-10


def test_kdv_printed_source_consistent_with_operator():
    case = target_case("kdv")
    rng = np.random.default_rng(4)
    x = rng.uniform(-5, 5, 100)
    t = rng.uniform(0, 1, 100)
    jet = families.jet_from_expr(case.exact, x, t)
    lhs = operators.apply_operator(operators.PdeSpec(operators.KDV), jet)
    assert np.abs(lhs - case.f(x, t)).max() < 1e-10


def test_wave2d_printed_source_consistent_with_operator():
    case = target_case("wave2d", wave2d_k=2.0)
    rng = np.random.default_rng(5)
    x1 = rng.uniform(-1, 1, 50)
    x2 = rng.uniform(-1, 1, 50)
    t = rng.uniform(0, 1, 50)
    jet = families.jet_from_expr(case.exact, (x1, x2), t, dim=2)
    lhs = operators.apply_operator(operators.PdeSpec(operators.WAVE2D), jet)
    assert np.abs(lhs - case.f(x1, x2, t)).max() < 1e-10


def test_burgers_multi_theta_grid():
    thetas = families.burgers_multi_thetas(20)
    assert len(thetas) == 20
    assert thetas[0] == -np.pi
    assert thetas[-1] == np.pi
    steps = np.diff(thetas)
    assert np.allclose(steps, 2 * np.pi / 19, atol=1e-12)


def test_unknown_case_rejected():
    with pytest.raises(ValueError):
        target_case("heat-1")
