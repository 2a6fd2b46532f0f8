#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Central finite-difference oracle for the tape gradients.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import numpy as np
from .tensor import Tensor, Tape, backward, no_grad


def numerical_gradient(func, array, h=1e-3, indices=None):
    """
    Central differences ``(f(x + h) - f(x - h)) / 2h`` of a scalar
    function, perturbing ``array`` in place one element at a time.

    :param func: callable returning a float; it must read ``array``
    :param array: the array to perturb (restored afterwards)
    :type array: numpy.ndarray
    :param h: step
    :param indices: flat indices to perturb, all elements when None
    :return: float64 array shaped like ``array`` (entries not perturbed are 0)
    """
    grad = np.zeros(array.shape, dtype=np.float64)
    if indices is None:
        indices = range(array.size)
    flat = array.reshape(-1)
    for idx in indices:
        orig = flat[idx]
        flat[idx] = orig + h
        with no_grad():
            f_plus = float(func())
        flat[idx] = orig - h
        with no_grad():
            f_minus = float(func())
        flat[idx] = orig
        grad.reshape(-1)[idx] = (f_plus - f_minus) / (2 * h)
    return grad


def tape_gradients(loss_fn, tensors):
    """
    Gradients of ``loss_fn()`` with respect to ``tensors`` computed on a
    fresh tape. Existing ``grad`` buffers are cleared first.

    :return: list of arrays, one per tensor
    """
    for t in tensors:
        if not isinstance(t, Tensor):
            raise TypeError("tape_gradients expects Tensors: %s" % type(t))
        t.grad = None
    with Tape():
        loss = loss_fn()
        backward(loss, wrt=tensors)
    return [np.zeros_like(t.data) if t.grad is None else t.grad
            for t in tensors]


def max_relative_error(analytic, numeric, floor=1e-6):
    """ max |a - n| / max(|a|, |n|, floor) over all elements """
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float((np.abs(analytic - numeric) / denom).max())
