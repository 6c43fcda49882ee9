import numpy as np
import pytest

from oplearn import nn
from oplearn.nn import LrSchedule, MLP, adam_init, adam_step, lr_at, mlp_init

from _utils import fd_gradcheck


def zero_net(dims):
    return MLP(
        list(dims),
        [np.zeros((a, b)) for a, b in zip(dims[:-1], dims[1:])],
        [np.zeros(b) for b in dims[1:]],
    )


def test_zero_net_forward_is_zero():
    net = zero_net([3, 4, 2])
    out = nn.mlp_forward(net, np.array([1.0, -2.0, 0.5]))
    assert out.shape == (2,)
    assert np.all(out == 0.0)


def test_one_one_one_net():
    net = MLP([1, 1, 1], [np.ones((1, 1)), np.ones((1, 1))], [np.zeros(1), np.zeros(1)])
    assert nn.mlp_forward(net, np.array([0.0]))[0] == 0.0
    out = nn.mlp_forward(net, np.array([1.0]))[0]
    assert out == pytest.approx(np.tanh(1.0), abs=1e-15)
    assert out == pytest.approx(0.761594, abs=1e-6)


def test_forward_dimension_mismatch():
    net = zero_net([3, 4, 2])
    with pytest.raises(ValueError):
        nn.mlp_forward(net, np.zeros(5))


def test_invariants_enforced():
    with pytest.raises(ValueError):
        MLP([3, 2], [np.zeros((3, 2))], [np.zeros(2)])  # no hidden layer
    with pytest.raises(ValueError):
        MLP(
            [3, 4, 2],
            [np.zeros((3, 5)), np.zeros((5, 2))],
            [np.zeros(5), np.zeros(2)],
        )


def test_backward_zero_upstream():
    rng = np.random.default_rng(0)
    net = mlp_init([2, 5, 3], rng)
    grads = nn.mlp_backward(net, rng.normal(size=2), np.zeros(3))
    assert all(np.all(g == 0.0) for g in grads)


def test_backward_linear_layer_identities():
    # The output layer is linear, so dW_last = a_prev^T g and db_last = g.
    rng = np.random.default_rng(1)
    net = mlp_init([2, 4, 3], rng)
    x = rng.normal(size=2)
    g = rng.normal(size=3)
    a1 = np.tanh(x @ net.weights[0] + net.biases[0])
    grads = nn.mlp_backward(net, x, g)
    assert np.allclose(grads[2], np.outer(a1, g), atol=1e-15)
    assert np.allclose(grads[3], g, atol=1e-15)
    # first layer via the tanh chain rule
    delta = (g @ net.weights[1].T) * (1 - a1 * a1)
    assert np.allclose(grads[0], np.outer(x, delta), atol=1e-15)
    assert np.allclose(grads[1], delta, atol=1e-15)


def test_gradients_match_finite_differences():
    # 20 random small nets, scalar quadratic loss, h=1e-5.
    rng = np.random.default_rng(42)
    for trial in range(20):
        n_hidden = int(rng.integers(1, 3))
        dims = [int(rng.integers(1, 5))] + [
            int(rng.integers(2, 9)) for _ in range(n_hidden)
        ] + [int(rng.integers(1, 4))]
        net = mlp_init(dims, rng)
        x = rng.normal(size=(4, dims[0]))
        target = rng.normal(size=(4, dims[-1]))

        def loss_fn(params):
            nn.set_parameters(net, params)
            y = nn.mlp_forward(net, x)
            err = y - target
            return float(np.sum(err * err)), nn.mlp_backward(net, x, 2.0 * err)

        worst = fd_gradcheck(loss_fn, nn.parameters(net))
        assert worst < 1e-6, f"trial {trial}: rel err {worst}"


def test_saturation_stays_finite():
    rng = np.random.default_rng(3)
    net = mlp_init([2, 8, 1], rng)
    for scale in (1e2, 1e3):
        x = np.array([scale, -scale])
        y = nn.mlp_forward(net, x)
        assert np.all(np.isfinite(y))
        g = nn.mlp_backward(net, x, np.ones(1))
        assert all(np.all(np.isfinite(t)) for t in g)


# -- Adam --------------------------------------------------------------------


def test_adam_zero_gradient_fixed_point():
    rng = np.random.default_rng(5)
    params = [rng.normal(size=(3, 2)), rng.normal(size=2)]
    zeros = [np.zeros_like(p) for p in params]
    # from a fresh state, zero gradients leave the parameters untouched
    new_params, new_state = adam_step(params, zeros, adam_init(params), 1e-3)
    for p, q in zip(params, new_params):
        assert np.array_equal(p, q)
    assert new_state.step_count == 1
    # preloaded moments decay toward zero under zero gradients
    state = adam_init(params)
    state.first_moment = [np.full_like(p, 0.5) for p in params]
    state.second_moment = [np.full_like(p, 0.25) for p in params]
    _, decayed = adam_step(params, zeros, state, 1e-3)
    for m_old, m_new in zip(state.first_moment, decayed.first_moment):
        assert np.all(np.abs(m_new) < np.abs(m_old))
    for v_old, v_new in zip(state.second_moment, decayed.second_moment):
        assert np.all(np.abs(v_new) < np.abs(v_old))


def test_adam_first_step_identity():
    params = [np.array([1.0])]
    state = adam_init(params)
    new_params, _ = adam_step(params, [np.array([1.0])], state, 1e-3)
    delta = params[0][0] - new_params[0][0]
    assert delta == pytest.approx(1e-3 / (1.0 + 1e-8), abs=1e-15)
    assert delta == pytest.approx(9.99999e-4, abs=1e-9)


def test_adam_is_deterministic_and_pure():
    rng = np.random.default_rng(6)
    params = [rng.normal(size=4)]
    grads = [rng.normal(size=4)]
    state = adam_init(params)
    p1, s1 = adam_step(params, grads, state, 1e-2)
    p2, s2 = adam_step(params, grads, state, 1e-2)
    assert np.array_equal(p1[0], p2[0])
    assert np.array_equal(s1.first_moment[0], s2.first_moment[0])
    assert state.step_count == 0  # input untouched


def test_adam_flattening_order_invariance():
    # Elementwise update: splitting a tensor into pieces changes nothing.
    rng = np.random.default_rng(7)
    p = rng.normal(size=6)
    g = rng.normal(size=6)
    joined, _ = adam_step([p.copy()], [g.copy()], adam_init([p]), 1e-3)
    split_params = [p[:2].copy(), p[2:].copy()]
    split_grads = [g[:2].copy(), g[2:].copy()]
    split, _ = adam_step(split_params, split_grads, adam_init(split_params), 1e-3)
    assert np.array_equal(joined[0], np.concatenate(split))


def test_adam_rejects_nonfinite_gradient():
    params = [np.zeros(2), np.zeros(3)]
    grads = [np.zeros(2), np.array([0.0, np.nan, 0.0])]
    with pytest.raises(FloatingPointError, match="tensor 1"):
        adam_step(params, grads, adam_init(params), 1e-3)


# -- learning-rate schedule ---------------------------------------------------


def test_lr_at_examples():
    s = LrSchedule(0.001, 500, 0.96)
    assert lr_at(s, 0) == pytest.approx(0.001, abs=1e-15)
    assert lr_at(s, 1000) == pytest.approx(9.216e-4, abs=1e-12)
    s2 = LrSchedule(0.0005, 1000, 0.95)
    assert lr_at(s2, 999) == pytest.approx(0.0005, abs=1e-15)


def test_lr_piecewise_constant_with_jumps_at_multiples():
    s = LrSchedule(0.01, 100, 0.9)
    prev = lr_at(s, 0)
    for it in range(1, 1000):
        cur = lr_at(s, it)
        assert cur <= prev
        if it % 100 == 0:
            assert cur < prev
        else:
            assert cur == prev
        prev = cur


def test_lr_schedule_validation():
    with pytest.raises(ValueError):
        LrSchedule(-1.0, 100, 0.9)
    with pytest.raises(ValueError):
        LrSchedule(0.001, 0, 0.9)
    with pytest.raises(ValueError):
        LrSchedule(0.001, 100, 1.5)
    with pytest.raises(ValueError):
        lr_at(LrSchedule(0.001, 100, 0.9), -1)


# -- checkpoints --------------------------------------------------------------


def test_checkpoint_roundtrip_bitwise(tmp_path):
    rng = np.random.default_rng(11)
    net = mlp_init([3, 7, 7, 2], rng)
    nn.save_mlp(net, tmp_path / "ckpt")
    back = nn.load_mlp(tmp_path / "ckpt")
    assert back.layer_dims == net.layer_dims
    for a, b in zip(nn.parameters(net), nn.parameters(back)):
        assert np.array_equal(a, b)


def test_checkpoint_detects_corruption(tmp_path):
    net = mlp_init([2, 3, 1], np.random.default_rng(0))
    nn.save_mlp(net, tmp_path / "ckpt")
    blob = (tmp_path / "ckpt" / "params.bin").read_bytes()
    (tmp_path / "ckpt" / "params.bin").write_bytes(blob[:8] + b"\x00" * 8 + blob[16:])
    with pytest.raises(ValueError, match="checksum"):
        nn.load_mlp(tmp_path / "ckpt")
    (tmp_path / "ckpt" / "params.bin").write_bytes(blob[:-8])
    with pytest.raises(ValueError, match="truncated"):
        nn.load_mlp(tmp_path / "ckpt")


def test_checkpoint_rejects_unknown_schema(tmp_path):
    import json

    net = mlp_init([2, 3, 1], np.random.default_rng(0))
    nn.save_mlp(net, tmp_path / "ckpt")
    manifest = json.loads((tmp_path / "ckpt" / "manifest.json").read_text())
    manifest["schema_version"] = 999
    (tmp_path / "ckpt" / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(ValueError, match="schema_version"):
        nn.load_mlp(tmp_path / "ckpt")
