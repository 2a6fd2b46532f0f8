#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Minimal dense tensor engine with reverse-mode differentiation.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)

from .tensor import Tensor, Tape, TapeRecord, backward, no_grad  # NOQA
from .tensor import current_tape, is_grad_enabled                 # NOQA
from .tensor import enable_grad                                    # NOQA
from .ops import add, sub, mul, square, reduce_sum, reduce_mean    # NOQA
from .ops import reshape, flatten, dense, relu                     # NOQA
from .ops import softmax_cross_entropy                             # NOQA
from .conv import conv2d, maxpool2x2                               # NOQA
from .norm import BatchNormState, batchnorm, normalize, affine     # NOQA
from .optim import SGD, sgd_step                                   # NOQA
from .rng import RngStream                                         # NOQA
from .gradcheck import numerical_gradient, tape_gradients         # NOQA
from .gradcheck import max_relative_error                         # NOQA
