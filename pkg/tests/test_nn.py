import math

import numpy as np
import pytest

from entlink import nn
from entlink.errors import GraphNotRecorded, NonFiniteUpdate, ShapeMismatch


def layer(w, b, act="identity"):
    return nn.DenseLayer(np.array(w, float), np.array(b, float), act)


def test_dense_forward_examples():
    x = np.array([0.3, -1.2, 2.0])
    assert np.array_equal(nn.dense_forward(layer(np.eye(3), np.zeros(3)), x), x)
    b = np.array([1.0, -2.0])
    assert np.array_equal(nn.dense_forward(layer(np.zeros((2, 3)), b), x), b)
    assert nn.dense_forward(layer(np.zeros((2, 3)), np.zeros(2), "sigmoid"), x).tolist() == [0.5, 0.5]


def test_dense_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        nn.dense_forward(layer(np.eye(3), np.zeros(3)), np.ones(2))


def test_bce_examples():
    assert nn.bce_loss(1.0, 1) == pytest.approx(0.0, abs=1e-6)
    assert nn.bce_loss(0.5, 1) == pytest.approx(math.log(2), abs=1e-12)
    assert nn.bce_loss(0.5, 0) == pytest.approx(math.log(2), abs=1e-12)
    assert math.isfinite(nn.bce_loss(0.0, 1))


def _pair_at(d, dim=2):
    """Unit vectors a, v with cosine distance d."""
    theta = math.acos(1 - d)
    return np.array([1.0, 0.0]), np.array([math.cos(theta), math.sin(theta)])


def test_triplet_loss_examples():
    a, n = _pair_at(0.5)
    assert nn.triplet_loss_value(a, a, n, 0.2) == 0.0
    _, p = _pair_at(0.4)
    _, n = _pair_at(0.1)
    assert nn.triplet_loss_value(a, p, n, 0.2) == pytest.approx(0.5, abs=1e-12)
    assert nn.triplet_loss_value(a, a, a, 0.2) == pytest.approx(0.2, abs=1e-12)


def test_cosine_distance_zero_vector_is_one():
    d = nn.cosine_distance(np.zeros((1, 3)), np.ones((1, 3)))
    assert d.value.tolist() == [1.0]


def test_triplet_loss_nonnegative_and_zero_when_separated(rng):
    for _ in range(200):
        a, p, n = rng.normal(size=(3, 1, 4))
        margin = rng.uniform(0.01, 1)
        loss = nn.triplet_loss(a, p, n, margin).value[0]
        dp = nn.cosine_distance(a, p).value[0]
        dn = nn.cosine_distance(a, n).value[0]
        assert loss >= 0
        if dn >= dp + margin:
            assert loss == 0


def test_backward_closed_form():
    w = nn.parameter([[0.7, -0.3]])
    b = nn.parameter([0.1])
    x = np.array([2.0, 5.0])
    y = 1.5
    loss = nn.squared_error(nn.linear(x, w, b), [y])
    nn.backward(loss)
    resid = w.value @ x + b.value - y
    np.testing.assert_allclose(w.grad, 2 * resid[:, None] * x[None], rtol=1e-14)
    np.testing.assert_allclose(b.grad, 2 * resid, rtol=1e-14)


def test_backward_zero_at_optimum():
    w = nn.parameter([[1.0, 1.0]])
    b = nn.parameter([0.0])
    loss = nn.squared_error(nn.linear(np.array([1.0, 2.0]), w, b), [3.0])
    nn.backward(loss)
    assert not w.grad.any() and not b.grad.any()


def test_graph_not_recorded():
    with pytest.raises(GraphNotRecorded):
        nn.backward(nn.Tensor(1.0))
    with pytest.raises(GraphNotRecorded):
        nn.backward(nn.squared_error(np.ones(2), np.zeros(2)))


def test_sgd_step_examples():
    p = nn.parameter([1.0])
    nn.sgd_step([p], 0.1, [np.array([0.5])])
    assert p.value.tolist() == [0.95]
    nn.sgd_step([p], 0.1, [np.zeros(1)])
    assert p.value.tolist() == [0.95]
    nn.sgd_step([p], 0.0, [np.array([3.0])])
    assert p.value.tolist() == [0.95]


def test_sgd_rejects_non_finite():
    p = nn.parameter([1.0, 2.0])
    with pytest.raises(NonFiniteUpdate):
        nn.sgd_step([p], 0.1, [np.array([0.0, np.inf])])
    assert p.value.tolist() == [1.0, 2.0]


def test_grad_check_single_layer(rng):
    for act in nn.ACTIVATIONS:
        lay = nn.DenseLayer.init(rng, 4, 3, act)
        x = rng.normal(size=(5, 4))
        y = rng.normal(size=(5, 3))
        err = nn.grad_check(lambda: nn.squared_error(lay(x), y), lay.parameters(), 1e-5)
        assert err < 1e-6, act


def test_grad_check_ops(rng):
    table = nn.parameter(rng.normal(size=(6, 3)))
    lay = nn.DenseLayer.init(rng, 6, 2, "tanh")
    idx = np.array([[0, 2], [5, -1], [-1, -1]])
    mask = np.array([[1, 1], [1, 0], [0, 0]], float)
    anchor_proj = nn.DenseLayer.init(rng, 2, 2)
    pos = rng.normal(size=(3, 2))
    neg = rng.normal(size=(3, 2))

    def loss():
        words = nn.embed(table, idx)  # (3, 2, 3)
        flat = nn.reshape(nn.concat([words, words], axis=-1), (3, 2, 6))
        pooled = nn.masked_mean(lay(flat), mask)
        a = anchor_proj(nn.add(pooled, pooled))
        tl = nn.triplet_loss(a, pos, neg, 0.5)
        p = nn.sigmoid(nn.total(a))
        return nn.add(nn.mean(tl), nn.mean(nn.bce(nn.reshape(p, (1,)), np.ones(1))))

    err = nn.grad_check(loss, [table, *lay.parameters(), *anchor_proj.parameters()], 1e-5)
    assert err < 1e-4


def test_pad_rows_get_no_gradient():
    table = nn.parameter(np.ones((3, 2)))
    out = nn.embed(table, np.array([[0, -1]]))
    assert out.value[0, 1].tolist() == [0.0, 0.0]
    nn.backward(nn.total(out))
    assert table.grad.tolist() == [[1, 1], [0, 0], [0, 0]]


def test_grad_check_epsilon_range():
    p = nn.parameter([1.0])
    with pytest.raises(ValueError):
        nn.grad_check(lambda: nn.squared_error(p, [0.0]), [p], 1e-3)


def test_relu_kink_excluded():
    w = nn.parameter([[1.0]])
    b = nn.parameter([0.0])
    # pre-activation is exactly 0, where relu is not differentiable
    err = nn.grad_check(lambda: nn.total(nn.relu(nn.linear(np.array([0.0]), w, b))), [w, b], 1e-5)
    assert err == 0.0


def test_seeded_init_is_bitwise_reproducible():
    a = nn.DenseLayer.init(nn.make_rng(7), 5, 4)
    b = nn.DenseLayer.init(nn.make_rng(7), 5, 4)
    assert a.weights.value.tobytes() == b.weights.value.tobytes()
    r = np.sqrt(6 / 9)
    assert np.all(np.abs(a.weights.value) <= r)


def test_params_stay_finite_over_long_sgd(rng):
    lay1 = nn.DenseLayer.init(rng, 4, 8, "relu")
    lay2 = nn.DenseLayer.init(rng, 8, 1, "sigmoid")
    params = lay1.parameters() + lay2.parameters()
    for _ in range(10_000):
        x = rng.uniform(-1, 1, size=(4, 4))
        y = (x[:, 0] > 0).astype(float)
        p = nn.reshape(lay2(lay1(x)), (4,))
        nn.backward(nn.mean(nn.bce(p, y)))
        nn.sgd_step(params, 0.1)
    assert all(np.all(np.isfinite(p.value)) for p in params)


def test_dense_roundtrip_dict(rng):
    lay = nn.DenseLayer.init(rng, 3, 2, "tanh")
    again = nn.DenseLayer.from_dict(lay.to_dict())
    x = rng.normal(size=3)
    assert np.array_equal(nn.dense_forward(lay, x), nn.dense_forward(again, x))
