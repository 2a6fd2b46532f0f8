#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Readers and writers for the two on-disk dataset formats.

IDX (MNIST): big-endian header ``0x00 0x00 0x08 ndim`` (magic 2051 for
images, 2049 for labels), one big-endian uint32 per dimension, then
unsigned bytes in row-major order.

CIFAR-10 binary: records of 3073 bytes, one label byte followed by
3072 pixel bytes, channel-major (1024 red, 1024 green, 1024 blue), rows
of 32 pixels within a channel.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import logging
import struct
import numpy as np

logger = logging.getLogger(__name__)

IDX_IMAGES_MAGIC = 2051
IDX_LABELS_MAGIC = 2049
CIFAR_IMAGE_SHAPE = (3, 32, 32)
CIFAR_RECORD_BYTES = 1 + 3 * 32 * 32
CIFAR_BATCH_RECORDS = 10000
MNIST_IMAGE_SHAPE = (28, 28)
NUM_CLASSES = 10


class DatasetFormatError(ValueError):
    """ Malformed dataset file; ``offset`` is the byte offset at fault """
    def __init__(self, message, filename=None, offset=None):
        self.filename = filename
        self.offset = offset
        if offset is not None:
            message = "%s (byte offset %d)" % (message, offset)
        if filename:
            message = "%s: %s" % (filename, message)
        super(DatasetFormatError, self).__init__(message)


def _read_bytes(filename):
    with open(filename, "rb") as fh:
        return fh.read()


def parse_idx(content, magic, filename=None):
    """
    Parse IDX bytes into a uint8 array.

    :param content: the whole file
    :type content: bytes
    :param magic: expected magic number (2051 or 2049)
    :raise DatasetFormatError: on bad magic, truncation or trailing bytes
    """
    if len(content) < 4:
        raise DatasetFormatError("truncated IDX header", filename,
                                 len(content))
    found, = struct.unpack(">I", content[:4])
    if found != magic:
        raise DatasetFormatError("bad IDX magic %d, expected %d"
                                 % (found, magic), filename, 0)
    ndim = found & 0xff
    header = 4 + 4 * ndim
    if len(content) < header:
        raise DatasetFormatError("truncated IDX dimensions", filename,
                                 len(content))
    dims = struct.unpack(">%dI" % ndim, content[4:header])
    expected = header + int(np.prod(dims))
    if len(content) < expected:
        raise DatasetFormatError(
            "truncated IDX data: %d bytes, dimensions %s need %d"
            % (len(content), list(dims), expected), filename, len(content))
    if len(content) > expected:
        raise DatasetFormatError("%d trailing bytes after IDX data"
                                 % (len(content) - expected), filename,
                                 expected)
    return np.frombuffer(content, dtype=np.uint8, offset=header).reshape(dims)


def read_idx_images(filename):
    """ uint8 images [N, H, W] """
    return parse_idx(_read_bytes(filename), IDX_IMAGES_MAGIC, filename)


def read_idx_labels(filename):
    """ uint8 labels [N] """
    labels = parse_idx(_read_bytes(filename), IDX_LABELS_MAGIC, filename)
    bad = np.flatnonzero(labels >= NUM_CLASSES)
    if bad.size:
        raise DatasetFormatError("label %d out of range"
                                 % labels[bad[0]], filename, 8 + bad[0])
    return labels


def _write_idx(filename, array, magic):
    array = np.ascontiguousarray(array, dtype=np.uint8)
    if (magic & 0xff) != array.ndim:
        raise ValueError("IDX magic %d does not fit an array of %d "
                         "dimensions" % (magic, array.ndim))
    with open(filename, "wb") as fh:
        fh.write(struct.pack(">I", magic))
        fh.write(struct.pack(">%dI" % array.ndim, *array.shape))
        fh.write(array.tobytes())
    logger.debug("wrote IDX file: %s", filename)


def to_bytes(images):
    """ Pixel arrays back to uint8; floats in [0, 1] are scaled by 255 """
    images = np.asarray(images)
    if images.dtype == np.uint8:
        return images
    return np.rint(images.astype(np.float64) * 255).astype(np.uint8)


def write_idx_images(filename, images):
    """
    :param images: [N, H, W] (or [N, 1, H, W]) uint8, or floats in [0, 1]
    """
    images = to_bytes(images)
    if images.ndim == 4 and images.shape[1] == 1:
        images = images[:, 0]
    if images.ndim != 3:
        raise ValueError("IDX images should be [N, H, W]: %s"
                         % (images.shape, ))
    _write_idx(filename, images, IDX_IMAGES_MAGIC)


def write_idx_labels(filename, labels):
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ValueError("IDX labels should be [N]: %s" % (labels.shape, ))
    _write_idx(filename, labels, IDX_LABELS_MAGIC)


def parse_cifar_records(content, filename=None):
    """
    :return: (uint8 images [N, 3, 32, 32], uint8 labels [N])
    :raise DatasetFormatError: when the size is not a whole number of
        records or a label is out of range
    """
    if not content or len(content) % CIFAR_RECORD_BYTES:
        raise DatasetFormatError(
            "size %d is not a positive multiple of the %d-byte record"
            % (len(content), CIFAR_RECORD_BYTES), filename,
            len(content) - len(content) % CIFAR_RECORD_BYTES)
    records = np.frombuffer(content, dtype=np.uint8).reshape(
        -1, CIFAR_RECORD_BYTES)
    labels = records[:, 0]
    bad = np.flatnonzero(labels >= NUM_CLASSES)
    if bad.size:
        raise DatasetFormatError("label %d out of range" % labels[bad[0]],
                                 filename, int(bad[0]) * CIFAR_RECORD_BYTES)
    images = records[:, 1:].reshape((-1, ) + CIFAR_IMAGE_SHAPE)
    return images, labels


def read_cifar_batch(filename, records=None):
    """
    :param records: number of records the batch must hold, if given
    """
    images, labels = parse_cifar_records(_read_bytes(filename), filename)
    if records is not None and labels.shape[0] != records:
        raise DatasetFormatError(
            "%d records, a batch holds %d" % (labels.shape[0], records),
            filename, min(labels.shape[0], records) * CIFAR_RECORD_BYTES)
    return images, labels


def write_cifar_batch(filename, images, labels):
    """ Serialize uint8 images [N, 3, 32, 32] and labels [N] as records """
    images = np.ascontiguousarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    if images.shape[1:] != CIFAR_IMAGE_SHAPE or \
            images.shape[0] != labels.shape[0]:
        raise ValueError("CIFAR records need images [N, 3, 32, 32] and "
                         "labels [N]: %s, %s"
                         % (images.shape, labels.shape))
    records = np.empty((labels.shape[0], CIFAR_RECORD_BYTES),
                       dtype=np.uint8)
    records[:, 0] = labels
    records[:, 1:] = images.reshape(labels.shape[0], -1)
    with open(filename, "wb") as fh:
        fh.write(records.tobytes())
    logger.debug("wrote CIFAR-10 batch: %s", filename)
