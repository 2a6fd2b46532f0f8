#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Declarative network specification.

A network is an ordered list of layers: ``conv``, ``maxpool``, ``dense``
and a final ``softmax`` output layer (a dense map to the class logits).
Conv and dense layers may carry a batch-normalization stage between the
linear map and the activation; each such stage is one normalization tap.

YAML layout::

    schema_version: 1
    name: mnist
    input_shape: [1, 28, 28]
    num_classes: 10
    layers:
      - {kind: conv, kernel: [5, 5], in_channels: 1, out_channels: 64,
         normalize: true, activation: relu}
      - {kind: maxpool}
      - {kind: dense, units: 1024, normalize: true, activation: relu}
      - {kind: softmax, units: 10}

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import hashlib
import json
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from ..utils.io import ConfigError, check_dict_keys, coerce_int, load_yaml


SCHEMA_VERSION = 1
LAYER_KINDS = ("conv", "maxpool", "dense", "softmax")
ACTIVATIONS = ("relu", "none")
PADDINGS = ("same", "valid")


class NetworkSpecError(ValueError):
    """ A layer list that does not chain; ``layer_index`` is the culprit """
    def __init__(self, message, layer_index=None):
        self.layer_index = layer_index
        if layer_index is not None:
            message = "layer %d: %s" % (layer_index, message)
        super(NetworkSpecError, self).__init__(message)


@dataclass
class LayerSpec:
    kind: str
    kernel: Optional[Tuple[int, int]] = None
    in_channels: Optional[int] = None
    out_channels: Optional[int] = None
    units: Optional[int] = None
    padding: str = "same"
    normalize: bool = False
    activation: str = "none"

    @property
    def has_tap(self):
        return self.normalize and self.kind in ("conv", "dense")

    @property
    def features(self):
        """ channel count of a conv layer, unit count of a dense layer """
        if self.kind == "conv":
            return self.out_channels
        if self.kind in ("dense", "softmax"):
            return self.units
        return None

    def to_dict(self):
        content = {"kind": self.kind}
        if self.kind == "conv":
            content.update(kernel=list(self.kernel),
                           in_channels=self.in_channels,
                           out_channels=self.out_channels,
                           padding=self.padding)
        elif self.kind in ("dense", "softmax"):
            content["units"] = self.units
        if self.kind in ("conv", "dense"):
            content.update(normalize=self.normalize,
                           activation=self.activation)
        return content


_LAYER_KEYS = {
    "conv": (("kind", "kernel", "in_channels", "out_channels"),
             ("padding", "normalize", "activation")),
    "maxpool": (("kind", ), ()),
    "dense": (("kind", "units"), ("normalize", "activation")),
    "softmax": (("kind", "units"), ()),
}


def _layer_from_dict(content, index, errors):
    section = "layers[%d]" % index
    if not isinstance(content, dict) or "kind" not in content:
        errors.append("%s: should be a mapping with a 'kind'" % section)
        return None
    kind = content["kind"]
    if kind not in LAYER_KINDS:
        errors.append("%s.kind: should be one of %s, got %r"
                      % (section, ", ".join(LAYER_KINDS), kind))
        return None
    required, optional = _LAYER_KEYS[kind]
    nerr = len(errors)
    errors.extend(check_dict_keys(content, required, optional,
                                  section=section))
    if len(errors) != nerr:
        return None

    layer = LayerSpec(kind=kind)
    if kind == "conv":
        kernel = content["kernel"]
        if not isinstance(kernel, (list, tuple)) or len(kernel) != 2:
            errors.append("%s.kernel: should be [kh, kw], got %r"
                          % (section, kernel))
        else:
            kh = coerce_int(kernel[0], section + ".kernel", errors)
            kw = coerce_int(kernel[1], section + ".kernel", errors)
            layer.kernel = (kh, kw)
        layer.in_channels = coerce_int(content["in_channels"],
                                       section + ".in_channels", errors)
        layer.out_channels = coerce_int(content["out_channels"],
                                        section + ".out_channels", errors)
        layer.padding = content.get("padding", "same")
        if layer.padding not in PADDINGS:
            errors.append("%s.padding: should be 'same' or 'valid', got %r"
                          % (section, layer.padding))
    if kind in ("dense", "softmax"):
        layer.units = coerce_int(content["units"], section + ".units",
                                 errors)
    if kind in ("conv", "dense"):
        layer.normalize = content.get("normalize", False)
        if not isinstance(layer.normalize, bool):
            errors.append("%s.normalize: should be true or false, got %r"
                          % (section, layer.normalize))
        layer.activation = content.get("activation", "none")
        if layer.activation not in ACTIVATIONS:
            errors.append("%s.activation: should be 'relu' or 'none', "
                          "got %r" % (section, layer.activation))
    return layer


@dataclass
class NetworkSpec:
    name: str
    input_shape: Tuple[int, int, int]
    layers: List[LayerSpec] = field(default_factory=list)
    num_classes: int = 10

    @property
    def tap_layer_indices(self):
        return [i for i, layer in enumerate(self.layers) if layer.has_tap]

    @property
    def normalization_layer_count(self):
        return len(self.tap_layer_indices)

    @property
    def feature_counts(self):
        """ h_i of every normalization layer """
        return [self.layers[i].features for i in self.tap_layer_indices]

    def validate(self):
        """
        Chain the layer shapes from the input shape.

        :return: per-layer output shapes, without the batch axis
        :raise NetworkSpecError: at the first layer that does not chain
        """
        if len(self.input_shape) != 3 or min(self.input_shape) < 1:
            raise NetworkSpecError("input_shape should be [C, H, W] with "
                                   "positive sizes: %s"
                                   % (list(self.input_shape), ))
        if not self.layers:
            raise NetworkSpecError("network has no layers")
        if self.layers[-1].kind != "softmax":
            raise NetworkSpecError("last layer should be the softmax output",
                                   len(self.layers) - 1)

        shape = tuple(self.input_shape)
        shapes = []
        for index, layer in enumerate(self.layers):
            shape = _chain(layer, shape, index, self)
            shapes.append(shape)
        return shapes

    def tap_shapes(self, batch_size):
        """ Shapes of the normalized values z_i for a batch """
        shapes = self.validate()
        return [(batch_size, ) + shapes[i] for i in self.tap_layer_indices]

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION,
                "name": self.name,
                "input_shape": list(self.input_shape),
                "num_classes": self.num_classes,
                "layers": [layer.to_dict() for layer in self.layers]}

    def spec_hash(self):
        """ sha256 of the canonical JSON form; the name is excluded """
        content = self.to_dict()
        content.pop("name")
        text = json.dumps(content, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, content, filename=None):
        errors = check_dict_keys(
            content, ("input_shape", "layers"),
            ("schema_version", "name", "num_classes"))
        if errors:
            raise ConfigError(errors, filename=filename)
        version = content.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            errors.append("schema_version: unsupported version %r" % version)

        input_shape = content["input_shape"]
        if not isinstance(input_shape, (list, tuple)) or \
                len(input_shape) != 3:
            errors.append("input_shape: should be [C, H, W], got %r"
                          % (input_shape, ))
            input_shape = (1, 1, 1)
        else:
            input_shape = tuple(coerce_int(v, "input_shape", errors)
                                for v in input_shape)
        num_classes = coerce_int(content.get("num_classes", 10),
                                 "num_classes", errors)

        layers = []
        if not isinstance(content["layers"], list):
            errors.append("layers: should be a list")
        else:
            for index, entry in enumerate(content["layers"]):
                layers.append(_layer_from_dict(entry, index, errors))
        if errors:
            raise ConfigError(errors, filename=filename)

        spec = cls(name=str(content.get("name", "network")),
                   input_shape=input_shape, layers=layers,
                   num_classes=num_classes)
        spec.validate()
        return spec


def _chain(layer, shape, index, spec):
    if layer.kind == "softmax" and index != len(spec.layers) - 1:
        raise NetworkSpecError("softmax output should be the last layer",
                               index)

    if layer.kind == "conv":
        if len(shape) != 3:
            raise NetworkSpecError("conv after a dense layer: input shape "
                                   "%s is not [C, H, W]" % (shape, ), index)
        channels, height, width = shape
        if layer.in_channels != channels:
            raise NetworkSpecError(
                "conv expects %d input channels, previous layer gives %s"
                % (layer.in_channels, shape), index)
        if min(layer.kernel) < 1 or layer.out_channels < 1:
            raise NetworkSpecError("conv sizes should be positive", index)
        kh, kw = layer.kernel
        if layer.padding == "same":
            return (layer.out_channels, height, width)
        if kh > height or kw > width:
            raise NetworkSpecError("kernel %s larger than input %s"
                                   % (layer.kernel, shape), index)
        return (layer.out_channels, height - kh + 1, width - kw + 1)

    if layer.kind == "maxpool":
        if len(shape) != 3:
            raise NetworkSpecError("maxpool after a dense layer", index)
        channels, height, width = shape
        if height % 2 or width % 2:
            raise NetworkSpecError("maxpool needs even height and width, "
                                   "got %s" % (shape, ), index)
        return (channels, height // 2, width // 2)

    if layer.units is None or layer.units < 1:
        raise NetworkSpecError("units should be positive", index)
    if layer.kind == "softmax" and layer.units != spec.num_classes:
        raise NetworkSpecError("softmax output has %d units but the network "
                               "has %d classes"
                               % (layer.units, spec.num_classes), index)
    return (layer.units, )


def load_network_spec_yaml(filename):
    """ load a network spec file and validate its shape chain """
    return NetworkSpec.from_dict(load_yaml(filename), filename=filename)


def first_layer_difference(spec_a, spec_b):
    """
    Index of the first layer where two specs differ, -1 when only the
    input shape or class count differ, None when they are identical.
    """
    if tuple(spec_a.input_shape) != tuple(spec_b.input_shape) or \
            spec_a.num_classes != spec_b.num_classes:
        return -1
    for index, (la, lb) in enumerate(zip(spec_a.layers, spec_b.layers)):
        if la.to_dict() != lb.to_dict():
            return index
    if len(spec_a.layers) != len(spec_b.layers):
        return min(len(spec_a.layers), len(spec_b.layers))
    return None
