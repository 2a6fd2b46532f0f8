#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Batch normalization, split into a normalization op producing the
pre-affine value z and an affine op producing gamma * z + beta. The
distortion measurements consume z.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import numpy as np
from .tensor import Tensor, record_op


DEFAULT_MOMENTUM = 0.9
DEFAULT_EPS = 1e-5


class BatchNormState(object):
    """
    Running mean and variance of one normalization layer.

    The first recorded batch initializes the statistics directly; later
    batches update them as ``running = momentum * running +
    (1 - momentum) * batch``. The running variance tracks the unbiased
    batch variance.
    """
    def __init__(self, num_features, dtype=np.float32):
        self.running_mean = np.zeros(num_features, dtype=dtype)
        self.running_var = np.zeros(num_features, dtype=dtype)
        self.num_batches_tracked = 0

    @property
    def num_features(self):
        return self.running_mean.shape[0]

    @property
    def initialized(self):
        return self.num_batches_tracked > 0

    def update(self, batch_mean, batch_var, momentum=DEFAULT_MOMENTUM):
        dtype = self.running_mean.dtype
        batch_mean = np.asarray(batch_mean, dtype=dtype)
        batch_var = np.asarray(batch_var, dtype=dtype)
        if not self.initialized:
            self.running_mean = batch_mean.copy()
            self.running_var = batch_var.copy()
        else:
            keep = dtype.type(momentum)
            new = dtype.type(1.0 - momentum)
            self.running_mean = keep * self.running_mean + new * batch_mean
            self.running_var = keep * self.running_var + new * batch_var
        self.num_batches_tracked += 1

    def copy(self):
        state = BatchNormState(self.num_features,
                               dtype=self.running_mean.dtype)
        state.running_mean = self.running_mean.copy()
        state.running_var = self.running_var.copy()
        state.num_batches_tracked = self.num_batches_tracked
        return state


def _feature_geometry(x):
    """ (reduction axes, broadcast shape) for [N, F] or [N, F, H, W] """
    if x.ndim == 2:
        return (0, ), (1, x.shape[1])
    if x.ndim == 4:
        return (0, 2, 3), (1, x.shape[1], 1, 1)
    raise ValueError("batch normalization expects 2-d or 4-d input: %s"
                     % (x.shape, ))


def normalize(x, state, mode="train", momentum=DEFAULT_MOMENTUM,
              eps=DEFAULT_EPS, update_stats=True):
    """
    Normalize every feature (channel of a conv output, unit of a dense
    output).

    In train mode the batch statistics are used, and the running
    statistics in ``state`` are updated unless ``update_stats`` is False.
    In eval mode the running statistics are used.

    :return: the normalized tensor z
    """
    if not isinstance(x, Tensor):
        raise TypeError("normalize input should be a Tensor: %s" % type(x))
    if not isinstance(state, BatchNormState):
        raise TypeError("state should be BatchNormState: %s" % type(state))
    axes, fshape = _feature_geometry(x)
    if state.num_features != x.shape[1]:
        raise ValueError("normalization state has %d features, input %s "
                         "has %d" % (state.num_features, x.shape,
                                     x.shape[1]))
    eps = x.dtype.type(eps)

    if mode == "train":
        count = x.data.size // x.shape[1]
        mean = x.data.mean(axis=axes, keepdims=True)
        centered = x.data - mean
        var = (centered * centered).mean(axis=axes, keepdims=True)
        inv_std = 1 / np.sqrt(var + eps)
        z = centered * inv_std
        if update_stats:
            unbiased = var * (count / (count - 1)) if count > 1 else var
            state.update(mean.reshape(-1), unbiased.reshape(-1),
                         momentum=momentum)

        def _backward(g, needs):
            gsum = g.sum(axis=axes, keepdims=True)
            gzsum = (g * z).sum(axis=axes, keepdims=True)
            return ((inv_std / count) * (count * g - gsum - z * gzsum), )

        return record_op("batchnorm_normalize", [x], z, _backward)

    if mode == "eval":
        if not state.initialized:
            raise ValueError("eval-mode normalization before any running "
                             "statistics were recorded")
        mean = state.running_mean.reshape(fshape)
        inv_std = 1 / np.sqrt(state.running_var.reshape(fshape) + eps)
        z = (x.data - mean) * inv_std
        return record_op("batchnorm_normalize", [x], z,
                         lambda g, needs: (g * inv_std, ))

    raise ValueError("mode should be 'train' or 'eval': %s" % mode)


def affine(z, gamma, beta):
    """ Per-feature ``gamma * z + beta`` """
    axes, fshape = _feature_geometry(z)
    nfeatures = z.shape[1]
    if gamma.shape != (nfeatures, ) or beta.shape != (nfeatures, ):
        raise ValueError("gamma %s / beta %s do not match %d features of "
                         "input %s" % (gamma.shape, beta.shape, nfeatures,
                                       z.shape))
    z_data = z.data
    g_data = gamma.data.reshape(fshape)

    def _backward(g, needs):
        gz = g * g_data if needs[0] else None
        ggamma = (g * z_data).sum(axis=axes) if needs[1] else None
        gbeta = g.sum(axis=axes) if needs[2] else None
        return gz, ggamma, gbeta

    out = z_data * g_data + beta.data.reshape(fshape)
    return record_op("batchnorm_affine", [z, gamma, beta], out, _backward)


def batchnorm(x, gamma, beta, state, mode="train",
              momentum=DEFAULT_MOMENTUM, eps=DEFAULT_EPS, update_stats=True):
    """
    Batch normalization returning both the affine output and the
    normalized value.

    :param x: input of shape [N, F] or [N, F, H, W]
    :param gamma: scale of shape [F]
    :param beta: shift of shape [F]
    :param state: running statistics of this layer
    :type state: BatchNormState
    :param mode: "train" (batch statistics) or "eval" (running statistics)
    :param update_stats: in train mode, whether to update ``state``
    :return: (gamma * z + beta, z)
    """
    z = normalize(x, state, mode=mode, momentum=momentum, eps=eps,
                  update_stats=update_stats)
    return affine(z, gamma, beta), z
