#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Stochastic gradient descent with classical momentum.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import numpy as np


def sgd_step(params, grads, velocities, learning_rate, momentum):
    """
    One in-place momentum update for every parameter::

        v <- momentum * v + g
        p <- p - learning_rate * v

    :param params: parameter arrays, updated in place
    :type params: list of numpy.ndarray
    :param grads: gradients, same shapes as params (None means zero)
    :param velocities: velocity buffers, updated in place
    :param learning_rate: step size
    :type learning_rate: float
    :param momentum: momentum coefficient in [0, 1)
    :type momentum: float
    :return: the updated params
    """
    if not (len(params) == len(grads) == len(velocities)):
        raise ValueError("params(%d), grads(%d) and velocities(%d) differ "
                         "in length" % (len(params), len(grads),
                                        len(velocities)))
    for param, grad, velocity in zip(params, grads, velocities):
        if grad is None:
            grad = np.zeros_like(param)
        if param.shape != grad.shape or param.shape != velocity.shape:
            raise ValueError("sgd_step shape mismatch: param %s, grad %s, "
                             "velocity %s" % (param.shape, grad.shape,
                                              velocity.shape))
        dtype = param.dtype.type
        velocity *= dtype(momentum)
        velocity += grad
        param -= dtype(learning_rate) * velocity
    return params


class SGD(object):
    """
    Momentum SGD over a list of parameter tensors.

    :param params: tensors whose ``data`` is updated from their ``grad``
    :param learning_rate: step size
    :param momentum: momentum coefficient
    """
    def __init__(self, params, learning_rate=0.01, momentum=0.9):
        if learning_rate < 0:
            raise ValueError("learning_rate should be non-negative: %f"
                             % learning_rate)
        if not 0 <= momentum < 1:
            raise ValueError("momentum should be in [0, 1): %f" % momentum)
        self.params = list(params)
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.velocities = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            p.grad = None

    def step(self):
        sgd_step([p.data for p in self.params],
                 [p.grad for p in self.params],
                 self.velocities, self.learning_rate, self.momentum)
