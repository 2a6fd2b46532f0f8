#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
CSV tables of evaluation results.

accuracy table: ``model,dataset,clean,fgsm,pgd``, one row per model.
distortion table: ``model,layer_index,mean_distortion``, one row per
normalization layer of each model (layer_index counts normalization
layers from 1). The comparison distortion table adds a ``dataset``
column after ``model``.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import logging
from collections import OrderedDict
import pandas as pd

from .evaluate import CONDITIONS, AccuracyReport, DistortionReport

logger = logging.getLogger(__name__)

ACCURACY_COLUMNS = ["model", "dataset"] + list(CONDITIONS)
DISTORTION_COLUMNS = ["model", "layer_index", "mean_distortion"]
COMPARISON_DISTORTION_COLUMNS = ["model", "dataset", "layer_index",
                                 "mean_distortion"]


def accuracy_frame(runs):
    """ :param runs: list of (label, AccuracyReport) """
    return pd.DataFrame([report.to_row(label) for label, report in runs],
                        columns=ACCURACY_COLUMNS)


def distortion_frame(runs, with_dataset=False):
    """ :param runs: list of (label, DistortionReport) """
    rows = []
    for label, report in runs:
        for index, value in enumerate(report.values):
            row = OrderedDict([("model", label)])
            if with_dataset:
                row["dataset"] = report.dataset
            row.update(layer_index=index + 1, mean_distortion=value)
            rows.append(row)
    columns = COMPARISON_DISTORTION_COLUMNS if with_dataset \
        else DISTORTION_COLUMNS
    return pd.DataFrame(rows, columns=columns)


def write_accuracy_csv(runs, filename):
    accuracy_frame(runs).to_csv(filename, index=False)
    logger.info("wrote accuracy table: %s", filename)


def write_distortion_csv(runs, filename):
    distortion_frame(runs).to_csv(filename, index=False)
    logger.info("wrote distortion table: %s", filename)


def _check_columns(table, columns, filename):
    if list(table.columns) != columns:
        raise ValueError("%s: columns %s, expected %s"
                         % (filename, list(table.columns), columns))


def read_accuracy_csv(filename):
    """ :return: list of (label, AccuracyReport) in file order """
    table = pd.read_csv(filename, float_precision="round_trip")
    _check_columns(table, ACCURACY_COLUMNS, filename)
    runs = []
    for _, row in table.iterrows():
        accuracies = OrderedDict((c, float(row[c])) for c in CONDITIONS
                                 if not pd.isnull(row[c]))
        runs.append((str(row["model"]),
                     AccuracyReport(dataset=str(row["dataset"]),
                                    accuracies=accuracies)))
    return runs


def read_distortion_csv(filename, dataset=None):
    """
    :return: list of (label, DistortionReport) in file order, layers
        sorted by index
    """
    table = pd.read_csv(filename, float_precision="round_trip")
    _check_columns(table, DISTORTION_COLUMNS, filename)
    runs = []
    for label, group in table.groupby("model", sort=False):
        group = group.sort_values("layer_index")
        runs.append((str(label), DistortionReport(
            dataset=dataset, values=group["mean_distortion"].tolist())))
    return runs


def compare_runs(runs):
    """
    Merge the results of several runs into one accuracy table and one
    layer-indexed distortion table.

    :param runs: list of (label, AccuracyReport, DistortionReport); the
        distortion report may be None
    :return: (accuracy DataFrame, distortion DataFrame)
    :raise ValueError: duplicate (label, dataset) pairs, or runs on the
        same dataset with different numbers of normalization layers
    """
    keys = [(label, acc.dataset) for label, acc, _ in runs]
    duplicates = sorted(set(k for k in keys if keys.count(k) > 1))
    if duplicates:
        raise ValueError("duplicate runs (label, dataset): %s"
                         % duplicates)
    layer_counts = {}
    for label, accuracy, distortion in runs:
        if distortion is None:
            continue
        if distortion.dataset is None:
            distortion.dataset = accuracy.dataset
        seen = layer_counts.setdefault(distortion.dataset,
                                       (label, distortion.layer_count))
        if seen[1] != distortion.layer_count:
            raise ValueError(
                "%s runs differ in normalization layers: %s has %d, %s "
                "has %d" % (distortion.dataset, seen[0], seen[1], label,
                            distortion.layer_count))
    accuracy = accuracy_frame([(label, acc) for label, acc, _ in runs])
    distortion = distortion_frame([(label, dist) for label, _, dist in runs
                                   if dist is not None], with_dataset=True)
    return accuracy, distortion
