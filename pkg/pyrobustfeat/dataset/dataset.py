#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
In-memory dataset handles, deterministic batching and class-balanced
subsets.

MNIST pixels are scaled to [0, 1]; CIFAR-10 pixels keep their 0-255
range as floats. Inputs are planar [N, C, H, W] float32.

Expected files::

    <mnist dir>/train-images-idx3-ubyte    <mnist dir>/train-labels-idx1-ubyte
    <mnist dir>/t10k-images-idx3-ubyte     <mnist dir>/t10k-labels-idx1-ubyte

    <cifar dir>/data_batch_1.bin ... data_batch_5.bin, test_batch.bin
    (or the same files under <cifar dir>/cifar-10-batches-bin)

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import logging
import os
from dataclasses import dataclass
from typing import Tuple
import numpy as np

from .formats import (CIFAR_BATCH_RECORDS, MNIST_IMAGE_SHAPE, NUM_CLASSES,
                      DatasetFormatError, read_cifar_batch, read_idx_images,
                      read_idx_labels)

logger = logging.getLogger(__name__)

DATASETS = ("mnist", "cifar10")
SPLITS = ("train", "test")

MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}
CIFAR10_FILES = {
    "train": tuple("data_batch_%d.bin" % i for i in range(1, 6)),
    "test": ("test_batch.bin", ),
}
CLIP_RANGES = {"mnist": (0.0, 1.0), "cifar10": (0.0, 255.0)}


@dataclass
class LabeledBatch:
    inputs: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return self.labels.shape[0]


@dataclass
class DatasetHandle:
    """
    A loaded split. ``inputs`` [N, C, H, W] float32 in dataset units and
    ``labels`` [N] int64 are read-only.
    """
    name: str
    split: str
    inputs: np.ndarray
    labels: np.ndarray
    clip_range: Tuple[float, float]

    def __post_init__(self):
        if self.inputs.ndim != 4 or self.labels.ndim != 1 or \
                self.inputs.shape[0] != self.labels.shape[0]:
            raise ValueError("inputs [N, C, H, W] and labels [N] do not "
                             "match: %s, %s" % (self.inputs.shape,
                                                self.labels.shape))
        self.inputs.flags.writeable = False
        self.labels.flags.writeable = False

    def __len__(self):
        return self.labels.shape[0]

    @property
    def count(self):
        return len(self)

    @property
    def input_shape(self):
        return tuple(self.inputs.shape[1:])

    @property
    def scaling(self):
        """ "unit" for pixels in [0, 1], "raw" for 0-255 """
        return "unit" if self.clip_range == (0.0, 1.0) else "raw"

    def class_counts(self):
        return np.bincount(self.labels, minlength=NUM_CLASSES)

    def take(self, indices):
        """ New handle holding the given examples, in the given order """
        indices = np.asarray(indices, dtype=np.int64)
        return DatasetHandle(self.name, self.split,
                             np.array(self.inputs[indices]),
                             np.array(self.labels[indices]),
                             self.clip_range)

    def __repr__(self):
        return "DatasetHandle(%s/%s, %d examples, %s, %s pixels)" % (
            self.name, self.split, len(self),
            "x".join(map(str, self.input_shape)), self.scaling)


def _check_split(split):
    if split not in SPLITS:
        raise ValueError("split should be 'train' or 'test': %s" % split)


def load_mnist(directory, split="test"):
    """
    Load an MNIST split from its IDX files.

    :param directory: directory holding the four canonical files
    :param split: "train" or "test"
    :raise DatasetFormatError: malformed file, images other than 28x28,
        or image and label counts that differ
    """
    _check_split(split)
    image_file, label_file = [os.path.join(directory, f)
                              for f in MNIST_FILES[split]]
    images = read_idx_images(image_file)
    labels = read_idx_labels(label_file)
    if images.shape[1:] != MNIST_IMAGE_SHAPE:
        raise DatasetFormatError(
            "images are %s, expected %s"
            % ("x".join(map(str, images.shape[1:])),
               "x".join(map(str, MNIST_IMAGE_SHAPE))), image_file, 8)
    if images.shape[0] != labels.shape[0]:
        raise DatasetFormatError(
            "%d images but %d labels in %s" % (images.shape[0],
                                               labels.shape[0], label_file),
            image_file, 4)
    inputs = (images.astype(np.float32) / np.float32(255.0))[:, None]
    handle = DatasetHandle("mnist", split, inputs,
                           labels.astype(np.int64), CLIP_RANGES["mnist"])
    logger.info("loaded %s from %s", handle, directory)
    return handle


def _cifar_dir(directory):
    nested = os.path.join(directory, "cifar-10-batches-bin")
    if os.path.isdir(nested):
        return nested
    return directory


def load_cifar10(directory, split="test",
                 records_per_batch=CIFAR_BATCH_RECORDS):
    """
    Load a CIFAR-10 split from its binary batches; pixels stay in 0-255.

    :param records_per_batch: records each batch file must hold
    :raise DatasetFormatError: malformed batch, or one of another size
    """
    _check_split(split)
    directory = _cifar_dir(directory)
    images, labels = [], []
    for filename in CIFAR10_FILES[split]:
        batch_images, batch_labels = read_cifar_batch(
            os.path.join(directory, filename), records=records_per_batch)
        images.append(batch_images)
        labels.append(batch_labels)
    inputs = np.concatenate(images).astype(np.float32)
    handle = DatasetHandle("cifar10", split, inputs,
                           np.concatenate(labels).astype(np.int64),
                           CLIP_RANGES["cifar10"])
    logger.info("loaded %s from %s", handle, directory)
    return handle


def load_dataset(name, directory, split="test"):
    if name == "mnist":
        return load_mnist(directory, split)
    if name == "cifar10":
        return load_cifar10(directory, split)
    raise ValueError("dataset should be one of %s: %s"
                     % (", ".join(DATASETS), name))


def batches(handle, batch_size, shuffle=False, rng=None):
    """
    Iterate over a dataset in batches; the final short batch is included.

    :param shuffle: visit examples in the order of ``rng.permutation``
    :type rng: pyrobustfeat.tensor.RngStream
    """
    if batch_size < 1:
        raise ValueError("batch_size should be >= 1: %s" % batch_size)
    n = len(handle)
    if shuffle:
        if rng is None:
            raise ValueError("shuffling needs an RngStream")
        order = rng.permutation(n)
    else:
        order = np.arange(n)
    for start in range(0, n, batch_size):
        index = order[start:start + batch_size]
        yield LabeledBatch(handle.inputs[index], handle.labels[index])


def subset(handle, n, rng):
    """
    Seeded sample of ``n`` examples without replacement, spread over the
    classes round-robin so the label histogram is as even as the data
    allows. Selected examples keep their original order.
    """
    if not 0 < n <= len(handle):
        raise ValueError("subset size should be in [1, %d]: %d"
                         % (len(handle), n))
    if n == len(handle):
        return handle
    pools = []
    for label in range(NUM_CLASSES):
        members = np.flatnonzero(handle.labels == label)
        pools.append(list(members[rng.child("class", label).permutation(
            members.size)]))
    chosen = []
    depth = 0
    while len(chosen) < n:
        for pool in pools:
            if depth < len(pool) and len(chosen) < n:
                chosen.append(pool[depth])
        depth += 1
    result = handle.take(np.sort(chosen))
    logger.debug("subset of %s: %s", handle, result.class_counts().tolist())
    return result
