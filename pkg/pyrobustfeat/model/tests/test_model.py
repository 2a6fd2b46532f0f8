import os
import inspect
import numpy as np
import numpy.testing as npt
import pytest

import pyrobustfeat.tensor as T
from pyrobustfeat.model import Model, NetworkSpec, build
from pyrobustfeat.model import load_network_spec_yaml


def _upper_level(path, nlevel=4):
    """
    Go the nlevel dir up
    """
    for i in range(nlevel):
        path = os.path.dirname(path)
    return path


TESTBASE_DIR = _upper_level(
    os.path.abspath(inspect.getfile(inspect.currentframe())), 4)
CONFIG_DIR = os.path.join(TESTBASE_DIR, "configs")

TINY = NetworkSpec.from_dict({
    "name": "tiny",
    "input_shape": [1, 8, 8],
    "layers": [
        {"kind": "conv", "kernel": [3, 3], "in_channels": 1,
         "out_channels": 2, "normalize": True, "activation": "relu"},
        {"kind": "maxpool"},
        {"kind": "dense", "units": 8, "normalize": True,
         "activation": "relu"},
        {"kind": "softmax", "units": 10},
    ],
})


def _inputs(n, seed=0, dtype=np.float32):
    return np.random.RandomState(seed).rand(n, 1, 8, 8).astype(dtype)


def test_parameter_layout():
    model = Model(TINY)
    names = [name for name, _ in model.named_parameters()]
    assert names == ["layer0.weight", "layer0.bias", "layer0.gamma",
                     "layer0.beta", "layer2.weight", "layer2.bias",
                     "layer2.gamma", "layer2.beta", "layer3.weight",
                     "layer3.bias"]
    assert model.params["layer0.weight"].shape == (2, 1, 3, 3)
    assert model.params["layer2.weight"].shape == (32, 8)
    assert model.params["layer3.weight"].shape == (8, 10)
    assert sorted(model.bn_states) == [0, 2]
    assert all(p.requires_grad for p in model.parameters())


def test_build_initialization():
    model = build(TINY, T.RngStream(0))
    npt.assert_array_equal(model.params["layer0.bias"].data, 0)
    npt.assert_array_equal(model.params["layer2.gamma"].data, 1)
    npt.assert_array_equal(model.params["layer2.beta"].data, 0)
    assert model.params["layer0.weight"].data.std() > 0
    for state in model.bn_states.values():
        assert state.num_batches_tracked == 0
        npt.assert_array_equal(state.running_mean, 0)


def test_he_normal_scale():
    spec = load_network_spec_yaml(os.path.join(CONFIG_DIR,
                                               "mnist.network.yaml"))
    model = build(spec, T.RngStream(1))
    weight = model.params["layer4.weight"].data
    npt.assert_allclose(weight.std(), np.sqrt(2.0 / weight.shape[0]),
                        rtol=0.02)
    assert model.normalization_layer_count == 3


def test_build_is_deterministic():
    a = build(TINY, T.RngStream(42))
    b = build(TINY, T.RngStream(42))
    c = build(TINY, T.RngStream(43))
    for name in a.params:
        npt.assert_array_equal(a.params[name].data, b.params[name].data)
    assert not np.array_equal(a.params["layer0.weight"].data,
                              c.params["layer0.weight"].data)


def test_forward_shapes_and_taps():
    model = build(TINY, T.RngStream(0))
    with T.no_grad():
        logits, taps = model.forward(_inputs(4), mode="train")
    assert logits.shape == (4, 10)
    assert [z.shape for z in taps] == TINY.tap_shapes(4)


def test_train_mode_taps_are_centered():
    model = build(TINY, T.RngStream(0))
    with T.no_grad():
        _, taps = model.forward(_inputs(16), mode="train")
    npt.assert_allclose(taps[0].data.mean(axis=(0, 2, 3)), 0, atol=1e-5)
    npt.assert_allclose(taps[1].data.mean(axis=0), 0, atol=1e-5)


def test_eval_forward_is_deterministic():
    model = build(TINY, T.RngStream(0))
    with T.no_grad():
        model.forward(_inputs(8, seed=1), mode="train")
        x = _inputs(3, seed=2)
        first, taps_a = model.forward(x, mode="eval")
        second, taps_b = model.forward(x, mode="eval")
    npt.assert_array_equal(first.data, second.data)
    for za, zb in zip(taps_a, taps_b):
        npt.assert_array_equal(za.data, zb.data)


def test_eval_before_training_statistics_is_rejected():
    model = build(TINY, T.RngStream(0))
    with pytest.raises(ValueError):
        model.forward(_inputs(2), mode="eval")


def test_zero_gamma_blocks_the_input():
    model = build(TINY, T.RngStream(0))
    for index in model.bn_states:
        model.params["layer%d.gamma" % index].data[...] = 0
    model.params["layer2.beta"].data[...] = np.linspace(-1, 1, 8)
    with T.no_grad():
        a, _ = model.forward(_inputs(4, seed=3), mode="train")
        b, _ = model.forward(_inputs(4, seed=4) * 10, mode="train")
    npt.assert_array_equal(a.data, b.data)
    # only the last hidden beta and the output layer reach the logits
    hidden = np.maximum(np.linspace(-1, 1, 8), 0).astype(np.float32)
    expected = hidden.dot(model.params["layer3.weight"].data) + \
        model.params["layer3.bias"].data
    npt.assert_allclose(a.data[0], expected, rtol=1e-5, atol=1e-6)


def test_forward_rejects_bad_input():
    model = build(TINY, T.RngStream(0))
    with pytest.raises(ValueError):
        model.forward(np.zeros((2, 1, 8, 9), dtype=np.float32))
    with pytest.raises(ValueError):
        model.forward(np.zeros((1, 8, 8), dtype=np.float32))
    with pytest.raises(TypeError):
        model.forward(T.Tensor(np.zeros((2, 1, 8, 8)), dtype=np.float64))


def test_gradient_flows_through_taps():
    model = build(TINY, T.RngStream(5), dtype=np.float64)
    with T.no_grad():
        model.forward(_inputs(8, seed=6, dtype=np.float64), mode="train")
    x = T.Tensor(_inputs(2, seed=7, dtype=np.float64), dtype=np.float64,
                 requires_grad=True)

    def loss():
        _, taps = model.forward(x, mode="eval")
        total = T.reduce_sum(taps[0])
        for z in taps[1:]:
            total = total + T.reduce_sum(z)
        return total

    grad, = T.tape_gradients(loss, [x])
    assert np.abs(grad).max() > 0
    picked = list(range(0, 128, 7))
    numeric = T.numerical_gradient(loss, x.data, h=1e-5, indices=picked)
    npt.assert_allclose(grad.reshape(-1)[picked],
                        numeric.reshape(-1)[picked], rtol=1e-3, atol=1e-6)
    model.zero_grad()


def test_copy_is_independent():
    model = build(TINY, T.RngStream(0))
    with T.no_grad():
        model.forward(_inputs(4), mode="train")
    clone = model.copy()
    model.params["layer0.weight"].data[...] += 1.0
    with T.no_grad():
        model.forward(_inputs(4, seed=1), mode="train")
    assert not np.array_equal(clone.params["layer0.weight"].data,
                              model.params["layer0.weight"].data)
    assert clone.bn_states[0].num_batches_tracked == 1
    assert model.bn_states[0].num_batches_tracked == 2


def test_predict_matches_eval_logits():
    model = build(TINY, T.RngStream(0))
    with T.no_grad():
        model.forward(_inputs(16), mode="train")
        x = _inputs(10, seed=9)
        logits, _ = model.forward(x, mode="eval")
    npt.assert_array_equal(model.predict(x, batch_size=3),
                           logits.data.argmax(axis=1))


def test_state_arrays_round_trip():
    model = build(TINY, T.RngStream(0))
    with T.no_grad():
        model.forward(_inputs(4), mode="train")
    arrays = {k: v.copy() for k, v in model.state_arrays().items()}
    assert list(model.state_arrays())[-2:] == ["layer2.running_mean",
                                               "layer2.running_var"]
    other = Model(TINY)
    other.load_state_arrays(arrays, {0: 1, 2: 1})
    for name, value in other.state_arrays().items():
        npt.assert_array_equal(value, arrays[name])
    with pytest.raises(ValueError):
        other.load_state_arrays({"layer0.weight": arrays["layer0.weight"]})
