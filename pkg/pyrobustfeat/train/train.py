#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Training loop: seeded shuffling per epoch, one momentum-SGD step per
batch, per-epoch metrics to a sink and checkpoints on cadence.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import logging
import math
import os
from dataclasses import dataclass, asdict, fields
from typing import Optional
import numpy as np
import pandas as pd

from .. import tensor as T
from ..dataset import batches
from ..model import save_checkpoint
from ..utils.io import ConfigError, check_dict_keys, coerce_float, coerce_int
from .objective import objective_terms

logger = logging.getLogger(__name__)

METRICS_COLUMNS = ["epoch", "split", "metric", "value"]


class TrainingDivergedError(RuntimeError):
    """ A loss term became NaN or infinite """
    def __init__(self, epoch, batch, terms):
        self.epoch = epoch
        self.batch = batch
        self.terms = dict(terms)
        super(TrainingDivergedError, self).__init__(
            "non-finite loss at epoch %d, batch %d: %s" % (
                epoch, batch, ", ".join("%s=%r" % (k, v) for k, v in
                                        sorted(self.terms.items()))))


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 64
    learning_rate: float = 0.01
    momentum: float = 0.9
    seed: int = 0
    checkpoint_every: int = 0
    dataset: str = "mnist"
    subset: Optional[int] = None

    def check(self, section="train"):
        errors = []
        for name in ("epochs", "batch_size"):
            if getattr(self, name) < 1:
                errors.append("%s.%s: should be >= 1, got %r"
                              % (section, name, getattr(self, name)))
        if not self.learning_rate > 0:
            errors.append("%s.learning_rate: should be > 0, got %r"
                          % (section, self.learning_rate))
        if not 0 <= self.momentum < 1:
            errors.append("%s.momentum: should be in [0, 1), got %r"
                          % (section, self.momentum))
        if self.seed < 0:
            errors.append("%s.seed: should be >= 0, got %r"
                          % (section, self.seed))
        if self.checkpoint_every < 0:
            errors.append("%s.checkpoint_every: should be >= 0, got %r"
                          % (section, self.checkpoint_every))
        if self.dataset not in ("mnist", "cifar10"):
            errors.append("%s.dataset: should be 'mnist' or 'cifar10', got "
                          "%r" % (section, self.dataset))
        if self.subset is not None and self.subset < 1:
            errors.append("%s.subset: should be >= 1, got %r"
                          % (section, self.subset))
        return errors

    def validate(self, section="train"):
        errors = self.check(section)
        if errors:
            raise ConfigError(errors)
        return self

    @classmethod
    def from_dict(cls, content, section="train"):
        names = [f.name for f in fields(cls)]
        errors = check_dict_keys(content, (), names, section=section)
        if errors:
            raise ConfigError(errors)
        values = {}
        for name in ("epochs", "batch_size", "seed", "checkpoint_every"):
            if name in content:
                values[name] = coerce_int(content[name],
                                          "%s.%s" % (section, name), errors)
        for name in ("learning_rate", "momentum"):
            if name in content:
                values[name] = coerce_float(content[name],
                                            "%s.%s" % (section, name), errors)
        if content.get("subset") is not None:
            values["subset"] = coerce_int(content["subset"],
                                          section + ".subset", errors)
        if "dataset" in content:
            values["dataset"] = content["dataset"]
        if errors:
            raise ConfigError(errors)
        return cls(**values).validate(section)

    def to_dict(self):
        return asdict(self)


class CsvMetricsSink(object):
    """
    Append-only metrics stream written as CSV rows
    ``epoch,split,metric,value``. The header is written with the first
    row of a new file.
    """
    def __init__(self, filename):
        self.filename = filename
        self.rows = []

    def __call__(self, epoch, split, metric, value):
        row = {"epoch": int(epoch), "split": split, "metric": metric,
               "value": float(value)}
        self.rows.append(row)
        header = not os.path.exists(self.filename)
        pd.DataFrame([row], columns=METRICS_COLUMNS).to_csv(
            self.filename, mode="a", header=header, index=False)

    def to_frame(self):
        return pd.DataFrame(self.rows, columns=METRICS_COLUMNS)


def _check_finite(epoch, ibatch, values):
    if not all(math.isfinite(v) for v in values.values()):
        raise TrainingDivergedError(epoch, ibatch, values)


def _epoch_checkpoint(model, out_dir, epoch, objective):
    ckpt_dir = os.path.join(out_dir, "checkpoints")
    if not os.path.isdir(ckpt_dir):
        os.makedirs(ckpt_dir)
    path = os.path.join(ckpt_dir, "epoch_%03d.ckpt" % epoch)
    save_checkpoint(model, path, metadata={"epoch": epoch,
                                           "objective": objective.kind})
    return path


def train(model, dataset, objective, tc, sink=None, out_dir=None):
    """
    Optimize ``model`` in place on ``dataset`` with the given objective.

    The shuffle order of epoch e is drawn from
    ``RngStream(tc.seed).child("shuffle", e)``.

    :type objective: pyrobustfeat.train.ObjectiveConfig
    :type tc: TrainConfig
    :param sink: optional ``sink(epoch, split, metric, value)`` receiving
        the per-epoch metrics
    :param out_dir: directory for cadence checkpoints; required when
        ``tc.checkpoint_every`` is set
    :return: (model, history) with one dict of metrics per epoch
    :raise TrainingDivergedError: on the first non-finite loss term
    """
    objective.validate(model.normalization_layer_count)
    tc.validate()
    if tc.checkpoint_every and out_dir is None:
        raise ValueError("checkpoint_every=%d needs an output directory"
                         % tc.checkpoint_every)
    if len(dataset) < 1:
        raise ValueError("cannot train on an empty dataset")

    rng = T.RngStream(tc.seed)
    optimizer = T.SGD(model.parameters(), learning_rate=tc.learning_rate,
                      momentum=tc.momentum)
    history = []
    for epoch in range(1, tc.epochs + 1):
        sums = {}
        correct = 0
        seen = 0
        shuffle = rng.child("shuffle", epoch)
        for ibatch, batch in enumerate(batches(dataset, tc.batch_size,
                                               shuffle=True, rng=shuffle)):
            optimizer.zero_grad()
            with T.Tape():
                terms = objective_terms(model, batch, objective)
                values = terms.values()
                _check_finite(epoch, ibatch, values)
                T.backward(terms.total)
            optimizer.step()

            n = len(batch)
            seen += n
            correct += int(np.sum(terms.logits.data.argmax(axis=1)
                                  == batch.labels))
            for key, value in values.items():
                sums[key] = sums.get(key, 0.0) + value * n
            logger.debug("epoch %d batch %d: %s", epoch, ibatch,
                         ", ".join("%s %.6f" % kv for kv in
                                   sorted(values.items())))

        record = {"epoch": epoch, "loss": sums.pop("total") / seen,
                  "clean_accuracy": correct / seen}
        for key, value in sorted(sums.items()):
            record["%s_loss" % key] = value / seen
        history.append(record)
        logger.info("epoch %d/%d: loss %.6f, clean accuracy %.4f", epoch,
                    tc.epochs, record["loss"], record["clean_accuracy"])
        if sink is not None:
            for metric, value in record.items():
                if metric != "epoch":
                    sink(epoch, "train", metric, value)
        if tc.checkpoint_every and epoch % tc.checkpoint_every == 0:
            _epoch_checkpoint(model, out_dir, epoch, objective)

    model.metadata = {"epochs": tc.epochs, "objective": objective.kind,
                      "seed": tc.seed}
    return model, history
