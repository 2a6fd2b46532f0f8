import pytest

from pyrobustfeat.utils.io import (ConfigError, check_dict_keys,
                                   coerce_float, coerce_int, dump_json,
                                   dump_yaml, load_json, load_yaml)


def test_yaml_round_trip(tmpdir):
    content = {"name": "mnist", "betas": [1e-7, 3e-7], "seed": 0}
    filename = str(tmpdir.join("a.yaml"))
    dump_yaml(content, filename)
    assert load_yaml(filename) == content


def test_json_round_trip(tmpdir):
    content = {"linf": 0.2, "attack": {"method": "pgd", "steps": 20}}
    filename = str(tmpdir.join("a.json"))
    dump_json(content, filename)
    assert load_json(filename) == content


def test_load_yaml_top_level(tmpdir):
    empty = tmpdir.join("empty.yaml")
    empty.write("")
    assert load_yaml(str(empty)) == {}
    listed = tmpdir.join("list.yaml")
    listed.write("- 1\n- 2\n")
    with pytest.raises(ConfigError) as err:
        load_yaml(str(listed))
    assert str(listed) in str(err.value)


def test_check_dict_keys():
    assert check_dict_keys({"a": 1, "b": 2}, ["a"], ["b", "c"]) == []
    assert check_dict_keys({"a": 1, "d": 2}, ["a", "b"], ["c"],
                           section="train") == ["train.d: unknown key",
                                                "train.b: missing"]
    assert check_dict_keys([1, 2], ["a"], section="train") == \
        ["train: should be a mapping, got list"]


def test_coerce_numbers():
    errors = []
    assert coerce_float("1e-7", "objective.betas[0]", errors) == 1e-7
    assert coerce_float(3, "alpha", errors) == 3.0
    assert coerce_int(4, "epochs", errors) == 4
    assert errors == []

    assert coerce_float(True, "alpha", errors) is None
    assert coerce_float("abc", "alpha", errors) is None
    assert coerce_int(2.5, "epochs", errors) is None
    assert coerce_int(False, "epochs", errors) is None
    assert len(errors) == 4
    assert errors[2] == "epochs: expected an integer, got 2.5"


def test_config_error_message():
    err = ConfigError(["a: missing", "b: unknown key"], filename="x.yaml")
    assert err.errors == ["a: missing", "b: unknown key"]
    assert str(err) == "Invalid config (x.yaml):\n  a: missing\n  " \
        "b: unknown key"
    assert isinstance(err, ValueError)
    assert ConfigError("c: bad").errors == ["c: bad"]
