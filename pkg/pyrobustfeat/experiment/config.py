#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Experiment configuration files.

An experiment config names the dataset, the network, the training
objective, the training schedule, the evaluation attacks and the output
directory. Example::

    schema_version: 1
    name: mnist-ours
    dataset: mnist
    data_dir: ../data/mnist          # relative to this file
    network: mnist.network.yaml      # file name, or the spec inline
    output_dir: ../runs/mnist-ours
    seed: 0
    objective:
      kind: distortion-regularized
      alpha: 0.2
      betas: [1e-7, 1e-7, 3e-7]
      attack: {epsilon: 0.2}
    train: {epochs: 10, batch_size: 64, learning_rate: 0.01}
    attacks:                          # defaults per dataset
      pgd: {epsilon: 0.2, step_size: 0.01, steps: 20}
    evaluation: {batch_size: 256, subset: null}

Every random draw derives from ``seed``: ``RngStream(seed)`` drives
the shuffling of the training loop, ``child("init")`` the weights,
``child("subset")`` the training subset and ``child("eval-subset")`` the
evaluation subset.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import copy
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, Optional

from ..attack import (AttackConfig, attack_configs_from_dict,
                      default_attack_configs)
from ..dataset import CLIP_RANGES
from ..model import NetworkSpec, NetworkSpecError
from ..train import ObjectiveConfig, TrainConfig
from ..utils.io import (ConfigError, check_dict_keys, coerce_int, dump_yaml,
                        load_yaml)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
_REQUIRED = ("schema_version", "name", "dataset", "network", "objective")
_OPTIONAL = ("data_dir", "output_dir", "seed", "train", "attacks",
             "evaluation")
_EVALUATION_KEYS = ("batch_size", "subset", "distortion_attack")


@dataclass
class EvaluationConfig:
    batch_size: int = 256
    subset: Optional[int] = None
    distortion_attack: str = "pgd"


@dataclass
class ExperimentConfig:
    name: str
    dataset: str
    network: NetworkSpec
    objective: ObjectiveConfig
    train: TrainConfig
    attacks: Dict[str, AttackConfig]
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    data_dir: Optional[str] = None
    output_dir: Optional[str] = None
    seed: int = 0
    filename: Optional[str] = None

    @property
    def clip_range(self):
        return CLIP_RANGES[self.dataset]

    def check(self):
        """ cross-field consistency, as a list of error messages """
        errors = []
        errors.extend(self.objective.check(
            self.network.normalization_layer_count))
        lo, hi = self.clip_range
        sections = [("attacks.%s" % k, cfg) for k, cfg in self.attacks.items()]
        if self.objective.attack is not None:
            sections.append(("objective.attack", self.objective.attack))
        for section, cfg in sections:
            if (cfg.clip_min, cfg.clip_max) != (lo, hi):
                errors.append("%s: clip range [%g, %g] does not match the "
                              "%s input range [%g, %g]"
                              % (section, cfg.clip_min, cfg.clip_max,
                                 self.dataset, lo, hi))
            if cfg.epsilon > hi - lo:
                errors.append("%s.epsilon: %g exceeds the %s input range"
                              % (section, cfg.epsilon, self.dataset))
        if self.evaluation.distortion_attack not in self.attacks:
            errors.append("evaluation.distortion_attack: %r is not one of "
                          "the configured attacks %s"
                          % (self.evaluation.distortion_attack,
                             sorted(self.attacks)))
        if tuple(self.network.input_shape) != \
                {"mnist": (1, 28, 28), "cifar10": (3, 32, 32)}[self.dataset]:
            errors.append("network: input shape %s does not fit %s"
                          % (list(self.network.input_shape), self.dataset))
        return errors

    def validate(self):
        errors = self.check()
        if errors:
            raise ConfigError(errors, filename=self.filename)
        return self

    def with_overrides(self, seed=None, epochs=None, subset=None,
                       output_dir=None):
        """ Copy with command-line overrides applied, then validated """
        cfg = copy.deepcopy(self)
        if seed is not None:
            cfg.seed = seed
            cfg.train.seed = seed
        if epochs is not None:
            cfg.train.epochs = epochs
        if subset is not None:
            cfg.train.subset = subset
        if output_dir is not None:
            cfg.output_dir = os.path.abspath(output_dir)
        cfg.train.validate()
        return cfg.validate()

    def to_dict(self):
        """ Resolved form: defaults filled in, paths absolute, spec inline """
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "dataset": self.dataset,
            "data_dir": self.data_dir,
            "output_dir": self.output_dir,
            "seed": self.seed,
            "network": self.network.to_dict(),
            "objective": self.objective.to_dict(),
            "train": self.train.to_dict(),
            "attacks": {k: v.to_dict() for k, v in self.attacks.items()},
            "evaluation": {"batch_size": self.evaluation.batch_size,
                           "subset": self.evaluation.subset,
                           "distortion_attack":
                               self.evaluation.distortion_attack},
        }


def _resolve(path, basedir):
    if path is None:
        return None
    path = os.path.expanduser(path)
    if not os.path.isabs(path):
        path = os.path.join(basedir, path)
    return os.path.abspath(path)


def _with_clip_range(content, clip_range):
    if not isinstance(content, dict):
        return content
    content = dict(content)
    content.setdefault("clip_min", clip_range[0])
    content.setdefault("clip_max", clip_range[1])
    return content


def _load_network(value, basedir, errors):
    try:
        if isinstance(value, dict):
            content = dict(value)
            content.pop("schema_version", None)
            return NetworkSpec.from_dict(content)
        filename = _resolve(str(value), basedir)
        if not os.path.isfile(filename):
            errors.append("network: file not found: %s" % filename)
            return None
        content = load_yaml(filename)
        content.pop("schema_version", None)
        return NetworkSpec.from_dict(content, filename=filename)
    except ConfigError as err:
        errors.extend("network: %s" % e for e in err.errors)
    except NetworkSpecError as err:
        errors.append("network: %s" % err)
    return None


def _evaluation_from_dict(content, errors):
    errors_before = len(errors)
    errors.extend(check_dict_keys(content, (), _EVALUATION_KEYS,
                                  section="evaluation"))
    if len(errors) > errors_before:
        return EvaluationConfig()
    values = {}
    if "batch_size" in content:
        values["batch_size"] = coerce_int(content["batch_size"],
                                          "evaluation.batch_size", errors)
    if content.get("subset") is not None:
        values["subset"] = coerce_int(content["subset"],
                                      "evaluation.subset", errors)
    if "distortion_attack" in content:
        values["distortion_attack"] = content["distortion_attack"]
    cfg = EvaluationConfig(**values)
    if isinstance(cfg.batch_size, int) and cfg.batch_size < 1:
        errors.append("evaluation.batch_size: should be >= 1")
    if isinstance(cfg.subset, int) and cfg.subset < 1:
        errors.append("evaluation.subset: should be >= 1")
    return cfg


def _attacks_from_dict(content, dataset, errors):
    defaults = default_attack_configs(dataset)
    try:
        return attack_configs_from_dict(content, defaults=defaults)
    except ConfigError as err:
        errors.extend(err.errors)
        return defaults


def experiment_config_from_dict(content, basedir=".", filename=None):
    """
    :param basedir: directory relative paths are resolved against
    :raise ConfigError: with every field-level problem found
    """
    errors = check_dict_keys(content, _REQUIRED, _OPTIONAL)
    if errors:
        raise ConfigError(errors, filename=filename)
    if content["schema_version"] != SCHEMA_VERSION:
        raise ConfigError("schema_version: expected %d, got %r"
                          % (SCHEMA_VERSION, content["schema_version"]),
                          filename=filename)
    dataset = content["dataset"]
    if dataset not in CLIP_RANGES:
        raise ConfigError("dataset: should be 'mnist' or 'cifar10', got %r"
                          % dataset, filename=filename)
    clip_range = CLIP_RANGES[dataset]

    network = _load_network(content["network"], basedir, errors)
    seed = coerce_int(content.get("seed", 0), "seed", errors)

    objective = None
    objective_content = content["objective"]
    if isinstance(objective_content, dict) and \
            objective_content.get("attack") is not None:
        objective_content = dict(objective_content)
        objective_content["attack"] = _with_clip_range(
            objective_content["attack"], clip_range)
    try:
        objective = ObjectiveConfig.from_dict(objective_content)
    except ConfigError as err:
        errors.extend(err.errors)

    train_content = dict(content.get("train") or {})
    train_content.setdefault("dataset", dataset)
    if isinstance(seed, int):
        train_content.setdefault("seed", seed)
    train = None
    try:
        train = TrainConfig.from_dict(train_content)
        if train.dataset != dataset:
            errors.append("train.dataset: %r differs from dataset %r"
                          % (train.dataset, dataset))
    except ConfigError as err:
        errors.extend(err.errors)

    attacks = _attacks_from_dict(content.get("attacks") or {}, dataset,
                                 errors)
    evaluation = _evaluation_from_dict(content.get("evaluation") or {},
                                       errors)
    if errors:
        raise ConfigError(errors, filename=filename)

    return ExperimentConfig(
        name=str(content["name"]), dataset=dataset, network=network,
        objective=objective, train=train, attacks=attacks,
        evaluation=evaluation,
        data_dir=_resolve(content.get("data_dir"), basedir),
        output_dir=_resolve(content.get("output_dir"), basedir),
        seed=seed, filename=filename).validate()


def load_experiment_config_yaml(filename):
    """
    load yaml and setup the experiment config
    """
    content = load_yaml(filename)
    basedir = os.path.dirname(os.path.abspath(filename))
    cfg = experiment_config_from_dict(content, basedir=basedir,
                                      filename=filename)
    logger.debug("loaded experiment config %s from %s", cfg.name, filename)
    return cfg


def write_resolved_config(cfg, filename):
    dump_yaml(cfg.to_dict(), filename)
    logger.info("wrote resolved config: %s", filename)
