#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Materialized network: parameters, running normalization statistics and
the forward pass that exposes the normalized values of every
normalization layer.

Parameter names follow the layer index of the spec: ``layer{i}.weight``,
``layer{i}.bias`` and, for normalized layers, ``layer{i}.gamma`` and
``layer{i}.beta``. Conv weights are [F, C, kh, kw]; dense weights are
[D, U].

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import logging
from collections import OrderedDict
import numpy as np

from .. import tensor as T
from .spec import NetworkSpec

logger = logging.getLogger(__name__)


class Model(object):
    """
    Network parameters θ, running statistics and the tap registry of a
    :class:`NetworkSpec`. Weights start at zero; use :func:`build` for an
    initialized model.

    :param spec: validated network spec
    :type spec: NetworkSpec
    :param dtype: float32, or float64 for gradient oracles
    """
    def __init__(self, spec, dtype=np.float32):
        if not isinstance(spec, NetworkSpec):
            raise TypeError("spec should be NetworkSpec: %s" % type(spec))
        self.spec = spec
        self.dtype = np.dtype(dtype)
        self.metadata = {}
        self.params = OrderedDict()
        self.bn_states = OrderedDict()

        shapes = spec.validate()
        in_shape = tuple(spec.input_shape)
        for index, layer in enumerate(spec.layers):
            prefix = "layer%d." % index
            if layer.kind == "conv":
                kh, kw = layer.kernel
                self._add(prefix + "weight", (layer.out_channels,
                                              layer.in_channels, kh, kw))
                self._add(prefix + "bias", (layer.out_channels, ))
            elif layer.kind in ("dense", "softmax"):
                fan_in = int(np.prod(in_shape))
                self._add(prefix + "weight", (fan_in, layer.units))
                self._add(prefix + "bias", (layer.units, ))
            if layer.has_tap:
                self._add(prefix + "gamma", (layer.features, ), fill=1.0)
                self._add(prefix + "beta", (layer.features, ))
                self.bn_states[index] = T.BatchNormState(layer.features,
                                                         dtype=self.dtype)
            in_shape = shapes[index]

    def _add(self, name, shape, fill=0.0):
        self.params[name] = T.Tensor(np.full(shape, fill), dtype=self.dtype,
                                     requires_grad=True)

    @property
    def normalization_layer_count(self):
        return self.spec.normalization_layer_count

    def parameters(self):
        return list(self.params.values())

    def named_parameters(self):
        return list(self.params.items())

    def zero_grad(self):
        for p in self.params.values():
            p.grad = None

    def forward(self, x, mode="train", update_stats=True):
        """
        Run the network.

        :param x: batch of shape [N] + input_shape
        :type x: Tensor or numpy.ndarray
        :param mode: "train" (batch statistics) or "eval" (running
            statistics)
        :param update_stats: in train mode, whether running statistics
            are updated
        :return: (logits [N, K], list of normalized values z_i)
        """
        if not isinstance(x, T.Tensor):
            x = T.Tensor(x, dtype=self.dtype)
        if x.dtype != self.dtype:
            raise TypeError("input dtype %s does not match model dtype %s"
                            % (x.dtype, self.dtype))
        expected = tuple(self.spec.input_shape)
        if x.ndim != 4 or tuple(x.shape[1:]) != expected or x.shape[0] < 1:
            raise ValueError("input shape %s does not match network input "
                             "[N, %s]" % (x.shape,
                                          ", ".join(map(str, expected))))

        taps = []
        h = x
        for index, layer in enumerate(self.spec.layers):
            prefix = "layer%d." % index
            if layer.kind == "maxpool":
                h = T.maxpool2x2(h)
                continue
            weight = self.params[prefix + "weight"]
            bias = self.params[prefix + "bias"]
            if layer.kind == "conv":
                h = T.conv2d(h, weight, bias, padding=layer.padding)
            else:
                if h.ndim != 2:
                    h = T.flatten(h)
                h = T.dense(h, weight, bias)
            if layer.has_tap:
                h, z = T.batchnorm(h, self.params[prefix + "gamma"],
                                   self.params[prefix + "beta"],
                                   self.bn_states[index], mode=mode,
                                   update_stats=update_stats)
                taps.append(z)
            if layer.activation == "relu":
                h = T.relu(h)
        return h, taps

    __call__ = forward

    def predict(self, x, batch_size=256):
        """ argmax class of every example, eval mode """
        x = np.asarray(x)
        labels = np.empty(x.shape[0], dtype=np.int64)
        with T.no_grad():
            for start in range(0, x.shape[0], batch_size):
                logits, _ = self.forward(x[start:start + batch_size],
                                         mode="eval")
                labels[start:start + batch_size] = logits.data.argmax(axis=1)
        return labels

    def state_arrays(self):
        """
        Every array defining the model: parameters, then the running mean
        and variance of each normalization layer, in spec order.
        """
        arrays = OrderedDict()
        for name, p in self.params.items():
            arrays[name] = p.data
        for index, state in self.bn_states.items():
            arrays["layer%d.running_mean" % index] = state.running_mean
            arrays["layer%d.running_var" % index] = state.running_var
        return arrays

    def load_state_arrays(self, arrays, num_batches_tracked=None):
        """ Copy arrays (as produced by :meth:`state_arrays`) in place """
        expected = self.state_arrays()
        if set(arrays) != set(expected):
            missing = sorted(set(expected) - set(arrays))
            extra = sorted(set(arrays) - set(expected))
            raise ValueError("state arrays do not match the model: missing "
                             "%s, unexpected %s" % (missing, extra))
        for name, target in expected.items():
            value = np.asarray(arrays[name])
            if value.shape != target.shape:
                raise ValueError("%s: shape %s, model expects %s"
                                 % (name, value.shape, target.shape))
            target[...] = value
        for index, state in self.bn_states.items():
            if num_batches_tracked is not None:
                state.num_batches_tracked = int(num_batches_tracked[index])

    def copy(self):
        clone = Model(self.spec, dtype=self.dtype)
        for name, p in self.params.items():
            clone.params[name].data[...] = p.data
        for index, state in self.bn_states.items():
            clone.bn_states[index] = state.copy()
        clone.metadata = dict(self.metadata)
        return clone

    def __repr__(self):
        nparams = sum(p.size for p in self.params.values())
        return "Model(%s, %d layers, %d taps, %d parameters)" % (
            self.spec.name, len(self.spec.layers),
            self.normalization_layer_count, nparams)


def build(spec, rng, dtype=np.float32):
    """
    Materialize a network: He-normal conv/dense weights, zero biases,
    gamma 1, beta 0 and empty running statistics.

    Every layer draws from its own child stream ``layer{i}`` of ``rng``.

    :type spec: NetworkSpec
    :type rng: pyrobustfeat.tensor.RngStream
    :return: the model
    """
    model = Model(spec, dtype=dtype)
    for index, layer in enumerate(spec.layers):
        if layer.kind not in ("conv", "dense", "softmax"):
            continue
        weight = model.params["layer%d.weight" % index]
        if layer.kind == "conv":
            fan_in = int(np.prod(weight.shape[1:]))
        else:
            fan_in = weight.shape[0]
        std = np.sqrt(2.0 / fan_in)
        weight.data[...] = rng.child("layer%d" % index).normal(
            weight.shape, std=std, dtype=dtype)
    logger.debug("built %s", model)
    return model
