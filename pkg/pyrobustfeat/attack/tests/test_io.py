import pytest

from pyrobustfeat.attack import AttackConfig, attack_configs_from_dict
from pyrobustfeat.attack import default_attack_configs, load_attack_config_yaml
from pyrobustfeat.utils.io import ConfigError


def test_load_attack_config_yaml(tmpdir):
    path = tmpdir.join("attacks.yaml")
    path.write("schema_version: 1\n"
               "fgsm: {epsilon: 0.2}\n"
               "pgd: {epsilon: 0.2, step_size: 1.0e-2, steps: 20}\n")
    configs = load_attack_config_yaml(str(path))
    assert configs["fgsm"] == AttackConfig.fgsm(0.2)
    assert configs["pgd"] == AttackConfig(epsilon=0.2, step_size=0.01,
                                          steps=20)


def test_numeric_strings_are_coerced():
    configs = attack_configs_from_dict(
        {"strong": {"method": "pgd", "epsilon": "4", "step_size": "1e0",
                    "steps": 12, "clip_max": 255}})
    assert configs["strong"].epsilon == 4.0
    assert configs["strong"].step_size == 1.0
    assert configs["strong"].clip_max == 255.0


def test_unknown_keys_and_bad_values_are_reported_per_field():
    with pytest.raises(ConfigError) as err:
        attack_configs_from_dict(
            {"pgd": {"epsilon": 0.2, "step_size": 0.01, "steps": 20,
                     "random_start": True},
             "fgsm": {"epsilon": -1.0}})
    assert "attacks.pgd.random_start: unknown key" in err.value.errors
    assert any(e.startswith("attacks.fgsm.epsilon") for e in err.value.errors)


def test_missing_steps_for_pgd():
    with pytest.raises(ConfigError) as err:
        attack_configs_from_dict({"pgd": {"epsilon": 0.2}})
    assert "attacks.pgd.step_size: missing" in err.value.errors
    assert "attacks.pgd.steps: missing" in err.value.errors


def test_empty_mapping_is_rejected():
    with pytest.raises(ConfigError):
        attack_configs_from_dict({})


def test_entries_merge_over_dataset_defaults():
    defaults = default_attack_configs("cifar10")
    configs = attack_configs_from_dict({"pgd": {"steps": 40}},
                                       defaults=defaults)
    assert configs["pgd"].steps == 40
    assert configs["pgd"].epsilon == defaults["pgd"].epsilon
    assert configs["fgsm"] == defaults["fgsm"]
    assert attack_configs_from_dict({}, defaults=defaults) == defaults

    with pytest.raises(ConfigError) as err:
        attack_configs_from_dict({"cw": {"epsilon": 1.0}}, defaults=defaults)
    assert err.value.errors == ["attacks.cw: unknown attack condition"]
