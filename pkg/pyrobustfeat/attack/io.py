#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Attack config files.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
from ..utils.io import ConfigError, load_yaml
from .attack import METHODS, AttackConfig


def attack_configs_from_dict(content, section="attacks", defaults=None):
    """
    Parse a mapping of condition name to attack settings, e.g.::

        fgsm: {method: fgsm, epsilon: 0.2}
        pgd: {epsilon: 0.2, step_size: 0.01, steps: 20}

    With ``defaults`` (condition name to AttackConfig) only those
    conditions are accepted, each entry is merged over its default and
    conditions left out keep the default.

    :return: dict of condition name to AttackConfig
    :raise ConfigError: with every field-level problem found
    """
    if not isinstance(content, dict) or (not content and defaults is None):
        raise ConfigError("%s: should be a non-empty mapping" % section)
    configs = dict(defaults or {})
    errors = []
    for name in sorted(content):
        entry = content[name]
        if defaults is not None:
            if name not in defaults:
                errors.append("%s.%s: unknown attack condition"
                              % (section, name))
                continue
            merged = defaults[name].to_dict()
            if isinstance(entry, dict):
                merged.update(entry)
            entry = merged
        if isinstance(entry, dict) and "method" not in entry and \
                name in METHODS:
            entry = dict(entry, method=name)
        try:
            configs[name] = AttackConfig.from_dict(
                entry, section="%s.%s" % (section, name))
        except ConfigError as err:
            errors.extend(err.errors)
    if errors:
        raise ConfigError(errors)
    return configs


def load_attack_config_yaml(filename):
    """
    load yaml and setup AttackConfig objects, one per condition
    """
    data = load_yaml(filename)
    data.pop("schema_version", None)
    try:
        return attack_configs_from_dict(data)
    except ConfigError as err:
        raise ConfigError(err.errors, filename=filename)
