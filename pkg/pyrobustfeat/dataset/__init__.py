#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)

from .formats import DatasetFormatError, write_idx_images          # NOQA
from .formats import write_idx_labels, write_cifar_batch           # NOQA
from .formats import read_idx_images, read_idx_labels              # NOQA
from .dataset import LabeledBatch, DatasetHandle, CLIP_RANGES      # NOQA
from .dataset import MNIST_FILES, CIFAR10_FILES                    # NOQA
from .dataset import load_mnist, load_cifar10, load_dataset        # NOQA
from .dataset import batches, subset                               # NOQA
