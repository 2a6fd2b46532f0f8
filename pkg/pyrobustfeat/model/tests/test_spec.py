import os
import inspect
import copy
import pytest

from pyrobustfeat.model import NetworkSpec, NetworkSpecError
from pyrobustfeat.model import load_network_spec_yaml
from pyrobustfeat.model.spec import first_layer_difference
from pyrobustfeat.utils.io import ConfigError


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

TINY = {
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
}


def test_shipped_mnist_spec():
    spec = load_network_spec_yaml(os.path.join(CONFIG_DIR,
                                               "mnist.network.yaml"))
    assert spec.normalization_layer_count == 3
    assert spec.feature_counts == [64, 128, 1024]
    assert spec.num_classes == 10
    assert spec.tap_shapes(2) == [(2, 64, 28, 28), (2, 128, 14, 14),
                                  (2, 1024)]


def test_shipped_cifar_spec():
    spec = load_network_spec_yaml(os.path.join(CONFIG_DIR,
                                               "cifar10.network.yaml"))
    assert spec.normalization_layer_count == 11
    assert spec.feature_counts == [64, 64, 128, 128, 256, 256, 512, 512,
                                   512, 1024, 1024]
    assert spec.validate()[-2] == (1024, )


def test_tiny_spec_shapes():
    spec = NetworkSpec.from_dict(TINY)
    assert spec.validate() == [(2, 8, 8), (2, 4, 4), (8, ), (10, )]
    assert spec.tap_layer_indices == [0, 2]
    assert spec.tap_shapes(4) == [(4, 2, 8, 8), (4, 8)]


def test_spec_dict_round_trip():
    spec = NetworkSpec.from_dict(TINY)
    again = NetworkSpec.from_dict(spec.to_dict())
    assert again == spec
    assert again.spec_hash() == spec.spec_hash()


def test_spec_hash_ignores_name_but_not_layers():
    spec = NetworkSpec.from_dict(TINY)
    renamed = copy.deepcopy(TINY)
    renamed["name"] = "other"
    assert NetworkSpec.from_dict(renamed).spec_hash() == spec.spec_hash()

    wider = copy.deepcopy(TINY)
    wider["layers"][2]["units"] = 16
    wider_spec = NetworkSpec.from_dict(wider)
    assert wider_spec.spec_hash() != spec.spec_hash()
    assert first_layer_difference(spec, wider_spec) == 2
    assert first_layer_difference(spec, spec) is None


def test_channel_chain_break_names_layer():
    broken = copy.deepcopy(TINY)
    broken["layers"].insert(1, {"kind": "conv", "kernel": [3, 3],
                                "in_channels": 3, "out_channels": 4})
    with pytest.raises(NetworkSpecError) as err:
        NetworkSpec.from_dict(broken)
    assert err.value.layer_index == 1
    assert "layer 1" in str(err.value)


def test_odd_pooling_is_rejected():
    broken = copy.deepcopy(TINY)
    broken["input_shape"] = [1, 7, 8]
    with pytest.raises(NetworkSpecError) as err:
        NetworkSpec.from_dict(broken)
    assert err.value.layer_index == 1


def test_conv_after_dense_is_rejected():
    broken = copy.deepcopy(TINY)
    broken["layers"].insert(3, {"kind": "conv", "kernel": [1, 1],
                                "in_channels": 8, "out_channels": 2})
    with pytest.raises(NetworkSpecError) as err:
        NetworkSpec.from_dict(broken)
    assert err.value.layer_index == 3


def test_softmax_placement():
    broken = copy.deepcopy(TINY)
    broken["layers"].pop()
    with pytest.raises(NetworkSpecError):
        NetworkSpec.from_dict(broken)

    broken = copy.deepcopy(TINY)
    broken["layers"][-1]["units"] = 5
    with pytest.raises(NetworkSpecError):
        NetworkSpec.from_dict(broken)


def test_unknown_and_missing_keys_are_config_errors():
    typo = copy.deepcopy(TINY)
    typo["layers"][0]["normalise"] = True
    with pytest.raises(ConfigError) as err:
        NetworkSpec.from_dict(typo)
    assert "layers[0].normalise: unknown key" in err.value.errors

    missing = copy.deepcopy(TINY)
    del missing["layers"][2]["units"]
    with pytest.raises(ConfigError) as err:
        NetworkSpec.from_dict(missing)
    assert "layers[2].units: missing" in err.value.errors

    with pytest.raises(ConfigError):
        NetworkSpec.from_dict(dict(TINY, extra=1))


def test_bad_values_are_config_errors():
    bad = copy.deepcopy(TINY)
    bad["layers"][0]["activation"] = "tanh"
    bad["layers"][0]["padding"] = "full"
    bad["layers"][1]["kind"] = "avgpool"
    with pytest.raises(ConfigError) as err:
        NetworkSpec.from_dict(bad)
    assert len(err.value.errors) == 3


def test_schema_version_is_checked():
    with pytest.raises(ConfigError):
        NetworkSpec.from_dict(dict(TINY, schema_version=2))
