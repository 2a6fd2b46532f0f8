#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Test-time measurements: accuracy on clean and attacked inputs, and the
mean distortion of the normalized features of every normalization
layer between clean and attacked inputs.

Everything runs in eval mode with the running statistics, so results
do not depend on how examples are grouped into batches, and the model
is never modified.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, List, Optional
import numpy as np

from .. import tensor as T
from ..attack import default_attack_configs, run_attack
from ..dataset import batches

logger = logging.getLogger(__name__)

CONDITIONS = ("clean", "fgsm", "pgd")


@dataclass
class AccuracyReport:
    """
    Fraction of correctly classified examples per condition, all
    conditions measured on the same examples.
    """
    dataset: str
    accuracies: Dict[str, float]
    count: Optional[int] = None
    attacks: Dict[str, dict] = field(default_factory=dict)

    def __post_init__(self):
        for condition, value in self.accuracies.items():
            if not 0 <= value <= 1:
                raise ValueError("%s accuracy should be in [0, 1]: %r"
                                 % (condition, value))

    def to_row(self, label):
        row = OrderedDict([("model", label), ("dataset", self.dataset)])
        for condition in CONDITIONS:
            row[condition] = self.accuracies.get(condition, np.nan)
        return row


@dataclass
class DistortionReport:
    """ Mean squared feature distortion of each normalization layer """
    dataset: str
    values: List[float]
    count: Optional[int] = None
    attack: Optional[dict] = None

    def __post_init__(self):
        if any(not v >= 0 for v in self.values):
            raise ValueError("distortions should be non-negative: %s"
                             % self.values)

    @property
    def layer_count(self):
        return len(self.values)


def _check_ready(model, dataset):
    if len(dataset) < 1:
        raise ValueError("cannot evaluate on an empty dataset")
    if not all(s.initialized for s in model.bn_states.values()):
        raise ValueError("model has no running statistics yet; train it "
                         "before evaluation")


def _eval_logits(model, x):
    with T.no_grad():
        logits, _ = model.forward(x, mode="eval")
    return logits.data


def evaluate_accuracy(model, dataset, attacks=None, batch_size=256):
    """
    Accuracy on clean inputs and under each attack.

    :type dataset: pyrobustfeat.dataset.DatasetHandle
    :param attacks: dict condition -> AttackConfig; defaults to the
        dataset's FGSM and PGD settings. Pass an empty dict for clean
        accuracy only.
    :rtype: AccuracyReport
    """
    _check_ready(model, dataset)
    if attacks is None:
        attacks = default_attack_configs(dataset.name)
    correct = OrderedDict([("clean", 0)])
    for condition in attacks:
        correct[condition] = 0

    for batch in batches(dataset, batch_size):
        predicted = _eval_logits(model, batch.inputs).argmax(axis=1)
        correct["clean"] += int(np.sum(predicted == batch.labels))
        for condition, cfg in attacks.items():
            x_adv = run_attack(model, batch.inputs, batch.labels, cfg)
            predicted = _eval_logits(model, x_adv).argmax(axis=1)
            correct[condition] += int(np.sum(predicted == batch.labels))

    n = len(dataset)
    report = AccuracyReport(
        dataset=dataset.name,
        accuracies=OrderedDict((k, v / n) for k, v in correct.items()),
        count=n,
        attacks={k: cfg.to_dict() for k, cfg in attacks.items()})
    logger.info("accuracy on %d %s examples: %s", n, dataset.name,
                ", ".join("%s %.4f" % kv for kv in report.accuracies.items()))
    return report


def measure_distortions(model, x, x_adv):
    """
    Per-layer sums of ``(z - z*)^2`` and the number of summed elements,
    from eval-mode forwards on ``x`` and ``x_adv``. Sums and counts of
    several batches add up.

    :return: (sums, counts), float64 and int arrays of one entry per
        normalization layer
    """
    with T.no_grad():
        _, taps = model.forward(x, mode="eval")
        _, taps_adv = model.forward(x_adv, mode="eval")
    sums = np.array([np.sum(np.square(z.data.astype(np.float64)
                                      - z_adv.data.astype(np.float64)))
                     for z, z_adv in zip(taps, taps_adv)])
    counts = np.array([z.size for z in taps], dtype=np.int64)
    return sums, counts


def evaluate_distortions(model, dataset, attack=None, batch_size=256):
    """
    Mean distortion of the normalized features of every normalization
    layer, over features, positions and examples.

    :param attack: defaults to the dataset's PGD settings
    :rtype: DistortionReport
    """
    _check_ready(model, dataset)
    if attack is None:
        attack = default_attack_configs(dataset.name)["pgd"]
    nlayers = model.normalization_layer_count
    sums = np.zeros(nlayers)
    counts = np.zeros(nlayers, dtype=np.int64)
    for batch in batches(dataset, batch_size):
        x_adv = run_attack(model, batch.inputs, batch.labels, attack)
        batch_sums, batch_counts = measure_distortions(model, batch.inputs,
                                                       x_adv)
        sums += batch_sums
        counts += batch_counts
    values = (sums / counts).tolist()
    logger.info("mean distortion per normalization layer (%s, %d "
                "examples): %s", attack.method, len(dataset),
                ", ".join("%.6g" % v for v in values))
    return DistortionReport(dataset=dataset.name, values=values,
                            count=len(dataset), attack=attack.to_dict())
