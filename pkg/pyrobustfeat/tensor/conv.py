#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Spatial operators: 2-d cross-correlation and 2x2 max pooling on
planar [N, C, H, W] tensors.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from .tensor import Tensor, record_op


def same_padding(kernel_size):
    """
    Padding (before, after) that keeps the output size equal to the input
    size for a stride-1 kernel. Even kernels pad one more after.
    """
    before = (kernel_size - 1) // 2
    return before, kernel_size - 1 - before


def conv2d(x, kernel, bias, padding="same"):
    """
    Stride-1 cross-correlation with zero padding.

    :param x: input of shape [N, C, H, W]
    :type x: Tensor
    :param kernel: kernel of shape [F, C, kh, kw]
    :type kernel: Tensor
    :param bias: bias of shape [F]
    :type bias: Tensor
    :param padding: "same" or "valid"
    :type padding: str
    :return: tensor of shape [N, F, H', W']
    """
    for value, name in ((x, "input"), (kernel, "kernel"), (bias, "bias")):
        if not isinstance(value, Tensor):
            raise TypeError("conv2d %s should be a Tensor: %s"
                            % (name, type(value)))
    if x.ndim != 4 or kernel.ndim != 4:
        raise ValueError("conv2d expects 4-d input and kernel: input %s, "
                         "kernel %s" % (x.shape, kernel.shape))
    nsamples, nchannels, height, width = x.shape
    nfilters, kchannels, kh, kw = kernel.shape
    if nchannels != kchannels:
        raise ValueError("conv2d: kernel %s expects %d input channels but "
                         "input %s has %d" % (kernel.shape, kchannels,
                                              x.shape, nchannels))
    if bias.shape != (nfilters, ):
        raise ValueError("conv2d: bias %s does not match kernel %s"
                         % (bias.shape, kernel.shape))

    if padding == "same":
        pad_h, pad_w = same_padding(kh), same_padding(kw)
    elif padding == "valid":
        pad_h, pad_w = (0, 0), (0, 0)
    else:
        raise ValueError("padding should be 'same' or 'valid': %s"
                         % padding)

    padded_h = height + sum(pad_h)
    padded_w = width + sum(pad_w)
    if kh > padded_h or kw > padded_w:
        raise ValueError("conv2d: kernel %s larger than padded input %s"
                         % (kernel.shape, x.shape))

    if sum(pad_h) or sum(pad_w):
        xp = np.pad(x.data, ((0, 0), (0, 0), pad_h, pad_w))
    else:
        xp = x.data
    out_h = padded_h - kh + 1
    out_w = padded_w - kw + 1

    # [N, C, H', W', kh, kw] view, no copy until tensordot
    cols = sliding_window_view(xp, (kh, kw), axis=(2, 3))
    out = np.tensordot(cols, kernel.data, axes=([1, 4, 5], [1, 2, 3]))
    out = out.transpose(0, 3, 1, 2) + bias.data[None, :, None, None]

    w_data = kernel.data

    def _backward(g, needs):
        gx = gk = gb = None
        if needs[0]:
            gxp = np.zeros_like(xp)
            for i in range(kh):
                for j in range(kw):
                    contrib = np.tensordot(w_data[:, :, i, j], g,
                                           axes=([0], [1]))
                    gxp[:, :, i:i + out_h, j:j + out_w] += \
                        contrib.transpose(1, 0, 2, 3)
            gx = gxp[:, :, pad_h[0]:pad_h[0] + height,
                     pad_w[0]:pad_w[0] + width]
        if needs[1]:
            gk = np.tensordot(g, cols, axes=([0, 2, 3], [0, 2, 3]))
        if needs[2]:
            gb = g.sum(axis=(0, 2, 3))
        return gx, gk, gb

    return record_op("conv2d", [x, kernel, bias],
                     np.ascontiguousarray(out), _backward)


def maxpool2x2(x):
    """
    Non-overlapping 2x2 max pooling. The gradient is routed to the first
    maximum of each window.

    :param x: input of shape [N, C, H, W] with H and W even
    :return: tensor of shape [N, C, H/2, W/2]
    """
    if not isinstance(x, Tensor):
        raise TypeError("maxpool2x2 input should be a Tensor: %s" % type(x))
    if x.ndim != 4:
        raise ValueError("maxpool2x2 expects 4-d input: %s" % (x.shape, ))
    nsamples, nchannels, height, width = x.shape
    if height % 2 or width % 2:
        raise ValueError("maxpool2x2 needs even height and width: %s"
                         % (x.shape, ))
    half_h, half_w = height // 2, width // 2

    windows = x.data.reshape(nsamples, nchannels, half_h, 2, half_w, 2)
    windows = windows.transpose(0, 1, 2, 4, 3, 5).reshape(
        nsamples, nchannels, half_h, half_w, 4)
    argmax = windows.argmax(axis=-1)[..., None]
    out = np.take_along_axis(windows, argmax, axis=-1)[..., 0]

    def _backward(g, needs):
        routed = np.zeros((nsamples, nchannels, half_h, half_w, 4),
                          dtype=g.dtype)
        np.put_along_axis(routed, argmax, g[..., None], axis=-1)
        routed = routed.reshape(nsamples, nchannels, half_h, half_w, 2, 2)
        return (routed.transpose(0, 1, 2, 4, 3, 5).reshape(x.shape), )

    return record_op("maxpool2x2", [x], out, _backward)
