#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Elementwise, reduction, dense and loss operators of the tensor engine.

Broadcasting is intentionally narrow: binary operators accept two tensors
of identical shape, or a tensor and a Python scalar. Per-feature
broadcasting only happens inside the layer operators that need it.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import numbers
import numpy as np
from .tensor import Tensor, record_op


def _check_tensor(x, name):
    if not isinstance(x, Tensor):
        raise TypeError("%s should be a Tensor: %s" % (name, type(x)))


def _check_same_shape(kind, a, b):
    if a.shape != b.shape:
        raise ValueError("%s: shape mismatch between %s and %s"
                         % (kind, a.shape, b.shape))


def _is_scalar(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _normalize_axis(axis, ndim):
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, numbers.Integral):
        axis = (axis, )
    axes = []
    for ax in axis:
        if ax < -ndim or ax >= ndim:
            raise ValueError("axis %d out of range for %d dimensions"
                             % (ax, ndim))
        axes.append(ax % ndim)
    return tuple(sorted(set(axes)))


def add(a, b):
    """ a + b, with b a same-shape tensor or a scalar """
    if not isinstance(a, Tensor):
        a, b = b, a
    _check_tensor(a, "add operand")
    if _is_scalar(b):
        c = a.dtype.type(b)
        return record_op("add_scalar", [a], a.data + c,
                         lambda g, needs: (g, ))
    _check_tensor(b, "add operand")
    _check_same_shape("add", a, b)
    return record_op("add", [a, b], a.data + b.data,
                     lambda g, needs: (g, g))


def sub(a, b):
    """ a - b, either side may be a scalar """
    if _is_scalar(a):
        _check_tensor(b, "sub operand")
        c = b.dtype.type(a)
        return record_op("rsub_scalar", [b], c - b.data,
                         lambda g, needs: (-g, ))
    _check_tensor(a, "sub operand")
    if _is_scalar(b):
        c = a.dtype.type(b)
        return record_op("sub_scalar", [a], a.data - c,
                         lambda g, needs: (g, ))
    _check_tensor(b, "sub operand")
    _check_same_shape("sub", a, b)
    return record_op("sub", [a, b], a.data - b.data,
                     lambda g, needs: (g, -g))


def mul(a, b):
    """ Elementwise a * b, with b a same-shape tensor or a scalar """
    if not isinstance(a, Tensor):
        a, b = b, a
    _check_tensor(a, "mul operand")
    if _is_scalar(b):
        c = a.dtype.type(b)
        return record_op("mul_scalar", [a], a.data * c,
                         lambda g, needs: (g * c, ))
    _check_tensor(b, "mul operand")
    _check_same_shape("mul", a, b)
    a_data, b_data = a.data, b.data

    def _backward(g, needs):
        return (g * b_data if needs[0] else None,
                g * a_data if needs[1] else None)

    return record_op("mul", [a, b], a_data * b_data, _backward)


def square(x):
    _check_tensor(x, "square input")
    data = x.data
    return record_op("square", [x], data * data,
                     lambda g, needs: (2 * g * data, ))


def reduce_sum(x, axis=None):
    """ Sum over the given axes (all axes when None), dropping them """
    _check_tensor(x, "sum input")
    axes = _normalize_axis(axis, x.ndim)
    shape = x.shape

    out = np.asarray(x.data.sum(axis=axes), dtype=x.dtype)
    out_shape = out.shape

    def _backward(g, needs):
        g = np.reshape(g, out_shape)
        return (np.array(np.broadcast_to(np.expand_dims(g, axes), shape)), )

    return record_op("sum", [x], out, _backward)


def reduce_mean(x, axis=None):
    """ Mean over the given axes (all axes when None), dropping them """
    _check_tensor(x, "mean input")
    axes = _normalize_axis(axis, x.ndim)
    shape = x.shape
    count = 1
    for ax in axes:
        count *= shape[ax]
    scale = x.dtype.type(1.0 / count)

    out = np.asarray(x.data.mean(axis=axes), dtype=x.dtype)
    out_shape = out.shape

    def _backward(g, needs):
        g = np.reshape(g, out_shape) * scale
        grad = np.broadcast_to(np.expand_dims(g, axes), shape)
        return (np.array(grad), )

    return record_op("mean", [x], out, _backward)


def reshape(x, shape):
    _check_tensor(x, "reshape input")
    in_shape = x.shape
    return record_op("reshape", [x], x.data.reshape(shape),
                     lambda g, needs: (g.reshape(in_shape), ))


def flatten(x):
    """ Collapse every axis but the first: [N, ...] -> [N, D] """
    _check_tensor(x, "flatten input")
    return reshape(x, (x.shape[0], -1))


def dense(x, weight, bias):
    """
    Affine map ``x @ weight + bias``.

    :param x: input of shape [N, D]
    :param weight: weight of shape [D, U]
    :param bias: bias of shape [U]
    :return: tensor of shape [N, U]
    """
    _check_tensor(x, "dense input")
    _check_tensor(weight, "dense weight")
    _check_tensor(bias, "dense bias")
    if x.ndim != 2 or weight.ndim != 2:
        raise ValueError("dense expects 2-d input and weight: %s and %s"
                         % (x.shape, weight.shape))
    if x.shape[1] != weight.shape[0]:
        raise ValueError("dense: inner dimensions disagree between input "
                         "%s and weight %s" % (x.shape, weight.shape))
    if bias.shape != (weight.shape[1], ):
        raise ValueError("dense: bias %s does not match weight %s"
                         % (bias.shape, weight.shape))

    x_data, w_data = x.data, weight.data

    def _backward(g, needs):
        gx = g.dot(w_data.T) if needs[0] else None
        gw = x_data.T.dot(g) if needs[1] else None
        gb = g.sum(axis=0) if needs[2] else None
        return gx, gw, gb

    out = x_data.dot(w_data) + bias.data
    return record_op("dense", [x, weight, bias], out, _backward)


def relu(x):
    """ max(0, x); the subgradient at exactly 0 is 0 """
    _check_tensor(x, "relu input")
    mask = x.data > 0
    return record_op("relu", [x], np.where(mask, x.data, 0).astype(x.dtype),
                     lambda g, needs: (g * mask, ))


def softmax_cross_entropy(logits, labels):
    """
    Mean over the batch of ``-log softmax(logits)[label]``, stabilized by
    subtracting the per-row maximum.

    :param logits: tensor of shape [N, K]
    :param labels: integer array of shape [N] with values in [0, K)
    :return: scalar tensor
    """
    _check_tensor(logits, "logits")
    if logits.ndim != 2:
        raise ValueError("logits should be 2-d [N, K]: %s"
                         % (logits.shape, ))
    nsamples, nclasses = logits.shape
    if nsamples == 0:
        raise ValueError("cross-entropy of an empty batch: logits %s"
                         % (logits.shape, ))
    labels = np.asarray(labels)
    if labels.shape != (nsamples, ):
        raise ValueError("labels shape %s does not match logits %s"
                         % (labels.shape, logits.shape))
    if not np.issubdtype(labels.dtype, np.integer):
        raise ValueError("labels should be integers: %s" % labels.dtype)
    if labels.size and (labels.min() < 0 or labels.max() >= nclasses):
        raise ValueError("labels out of range [0, %d): min %d, max %d"
                         % (nclasses, labels.min(), labels.max()))

    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_prob = shifted - log_norm
    rows = np.arange(nsamples)
    loss = -log_prob[rows, labels].mean()

    def _backward(g, needs):
        grad = np.exp(log_prob)
        grad[rows, labels] -= 1
        return (grad * (g / nsamples), )

    return record_op("softmax_cross_entropy", [logits],
                     np.asarray(loss, dtype=logits.dtype), _backward)
