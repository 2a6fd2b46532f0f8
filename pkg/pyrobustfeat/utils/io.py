from __future__ import (absolute_import, division, print_function)
import json
import numbers
import yaml


class ConfigError(ValueError):
    """
    Invalid configuration. ``errors`` holds one field-level message per
    problem, like ``"objective.alpha: should be in [0, 1]"``.
    """
    def __init__(self, errors, filename=None):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        self.filename = filename
        head = "Invalid config"
        if filename:
            head += " (%s)" % filename
        super(ConfigError, self).__init__(
            "%s:\n  %s" % (head, "\n  ".join(self.errors)))


def load_json(filename):
    with open(filename) as fh:
        return json.load(fh)


def dump_json(content, filename):
    with open(filename, 'w') as fh:
        json.dump(content, fh, indent=2, sort_keys=True)


def load_yaml(filename):
    with open(filename) as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("top level should be a mapping, got %s"
                          % type(data).__name__, filename=filename)
    return data


def dump_yaml(content, filename):
    with open(filename, 'w') as fh:
        yaml.safe_dump(content, fh, default_flow_style=False,
                       sort_keys=True)


def check_dict_keys(dict_to_check, required, optional=(), section=None):
    """
    Check that a config mapping holds every required key and nothing
    outside required + optional.

    :return: list of field-level error messages, empty when consistent
    """
    prefix = "%s." % section if section else ""
    if not isinstance(dict_to_check, dict):
        return ["%s: should be a mapping, got %s"
                % (section or "config", type(dict_to_check).__name__)]

    set_input = set(dict_to_check.keys())
    set_required = set(required)
    set_allowed = set_required | set(optional)

    errors = []
    for key in sorted(set_input - set_allowed, key=str):
        errors.append("%s%s: unknown key" % (prefix, key))
    for key in sorted(set_required - set_input):
        errors.append("%s%s: missing" % (prefix, key))
    return errors


def coerce_float(value, field, errors):
    """
    Float value of a config entry, accepting numeric strings such as
    "1e-7" that YAML leaves as text. Appends to ``errors`` on failure.
    """
    if isinstance(value, bool):
        errors.append("%s: expected a number, got %r" % (field, value))
        return None
    if isinstance(value, numbers.Real):
        return float(value)
    try:
        return float(value)
    except (TypeError, ValueError):
        errors.append("%s: expected a number, got %r" % (field, value))
        return None


def coerce_int(value, field, errors):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        errors.append("%s: expected an integer, got %r" % (field, value))
        return None
    return int(value)
