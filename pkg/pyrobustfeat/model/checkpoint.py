#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Checkpoint files.

Layout::

    b"PRFCKPT1"                      8-byte magic
    uint32 little-endian             manifest length in bytes
    manifest                         UTF-8 JSON, sorted keys
    arrays                           raw little-endian float32, in manifest
                                     order

The manifest holds the network spec and its hash, the name, shape and
byte offset (relative to the array section) of every array, the number
of batches seen by each normalization layer and free-form training
metadata.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import json
import logging
import struct
import numpy as np

from .model import Model
from .spec import NetworkSpec, first_layer_difference

logger = logging.getLogger(__name__)

MAGIC = b"PRFCKPT1"
FORMAT_VERSION = 1
ARRAY_DTYPE = "<f4"
_HEADER = struct.Struct("<I")


class CheckpointError(ValueError):
    pass


def _encode_manifest(manifest):
    return json.dumps(manifest, sort_keys=True,
                      separators=(",", ":")).encode("utf-8")


def save_checkpoint(model, path, metadata=None):
    """
    Write a model to ``path``.

    :param model: the model; float64 models are stored rounded to float32
    :type model: pyrobustfeat.model.Model
    :param metadata: JSON-serializable training metadata, defaults to
        ``model.metadata``
    :type metadata: dict
    """
    if metadata is None:
        metadata = model.metadata
    arrays = []
    entries = []
    offset = 0
    for name, data in model.state_arrays().items():
        raw = np.ascontiguousarray(data, dtype=ARRAY_DTYPE).tobytes()
        entries.append({"name": name, "shape": list(data.shape),
                        "offset": offset})
        arrays.append(raw)
        offset += len(raw)

    manifest = {
        "format_version": FORMAT_VERSION,
        "dtype": ARRAY_DTYPE,
        "spec": model.spec.to_dict(),
        "spec_hash": model.spec.spec_hash(),
        "arrays": entries,
        "array_bytes": offset,
        "num_batches_tracked": {
            str(index): state.num_batches_tracked
            for index, state in model.bn_states.items()},
        "metadata": metadata,
    }
    encoded = _encode_manifest(manifest)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(len(encoded)))
        fh.write(encoded)
        for raw in arrays:
            fh.write(raw)
    logger.info("checkpoint written: %s (%d bytes of arrays)", path, offset)


def _read(path):
    with open(path, "rb") as fh:
        content = fh.read()
    head = len(MAGIC) + _HEADER.size
    if len(content) < head:
        raise CheckpointError("%s: truncated header (%d bytes)"
                              % (path, len(content)))
    if content[:len(MAGIC)] != MAGIC:
        raise CheckpointError("%s: not a checkpoint file (magic %r)"
                              % (path, content[:len(MAGIC)]))
    length, = _HEADER.unpack(content[len(MAGIC):head])
    if len(content) < head + length:
        raise CheckpointError("%s: truncated manifest, expected %d bytes "
                              "at offset %d" % (path, length, head))
    try:
        manifest = json.loads(content[head:head + length].decode("utf-8"))
    except ValueError as err:
        raise CheckpointError("%s: corrupt manifest: %s" % (path, err))
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CheckpointError("%s: unsupported format version %r"
                              % (path, manifest.get("format_version")))
    body = content[head + length:]
    if len(body) != manifest["array_bytes"]:
        raise CheckpointError(
            "%s: truncated array section, expected %d bytes after offset %d, "
            "found %d" % (path, manifest["array_bytes"], head + length,
                          len(body)))
    return manifest, body


def read_checkpoint_manifest(path):
    """ Manifest of a checkpoint, without materializing the model """
    manifest, _ = _read(path)
    return manifest


def load_checkpoint(spec, path):
    """
    Read a checkpoint written for ``spec``.

    :param spec: network spec the checkpoint must match; None to use the
        spec stored in the file
    :type spec: NetworkSpec
    :return: float32 model with ``metadata`` restored
    :raise CheckpointError: on hash mismatch or a damaged file
    """
    manifest, body = _read(path)
    stored = NetworkSpec.from_dict(manifest["spec"])
    if spec is None:
        spec = stored
    if manifest["spec_hash"] != spec.spec_hash():
        index = first_layer_difference(stored, spec)
        if index is None or index < 0:
            where = "input shape or class count"
        else:
            where = "layer %d (checkpoint %s, spec %s)" % (
                index,
                stored.layers[index].to_dict()
                if index < len(stored.layers) else "missing",
                spec.layers[index].to_dict()
                if index < len(spec.layers) else "missing")
        raise CheckpointError("%s: checkpoint does not match the network "
                              "spec, first difference at %s" % (path, where))

    model = Model(spec, dtype=np.float32)
    arrays = {}
    for entry in manifest["arrays"]:
        count = int(np.prod(entry["shape"], dtype=np.int64))
        start = entry["offset"]
        arrays[entry["name"]] = np.frombuffer(
            body, dtype=ARRAY_DTYPE, count=count,
            offset=start).reshape(entry["shape"])
    try:
        model.load_state_arrays(
            arrays, {int(k): v for k, v in
                     manifest["num_batches_tracked"].items()})
    except (ValueError, KeyError) as err:
        raise CheckpointError("%s: %s" % (path, err))
    model.metadata = manifest.get("metadata") or {}
    logger.debug("checkpoint loaded: %s", path)
    return model
