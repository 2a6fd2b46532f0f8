#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Dense tensor and reverse-mode gradient tape.

A :class:`Tensor` wraps a contiguous numpy array. Every operation in
:mod:`pyrobustfeat.tensor.ops` that consumes a tensor with
``requires_grad=True`` appends one :class:`TapeRecord` to the active
:class:`Tape`. :func:`backward` walks the records of the loss' tape in
reverse creation order and accumulates gradients into the leaves.

Tapes are thread-local and stackable, so an attack can run its own
forward/backward pass inside a training step without touching the
records of the step itself.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import threading
from contextlib import contextmanager
import numpy as np


_SUPPORTED_DTYPES = (np.float32, np.float64)
DEFAULT_DTYPE = np.float32

_state = threading.local()


def _resolve_dtype(dtype):
    if dtype is None:
        return np.dtype(DEFAULT_DTYPE)
    dtype = np.dtype(dtype)
    if dtype.type not in _SUPPORTED_DTYPES:
        raise TypeError("Unsupported tensor dtype: %s (float32 or float64 "
                        "expected)" % dtype)
    return dtype


class Tensor(object):
    """
    n-dimensional floating point array taking part in the gradient tape.

    :param data: array-like content, copied into a contiguous array
    :param requires_grad: whether gradients should flow into this tensor
    :type requires_grad: bool
    :param dtype: numpy float dtype, float32 unless given
    """
    __array_priority__ = 100

    def __init__(self, data, requires_grad=False, dtype=None):
        if isinstance(data, Tensor):
            if dtype is None:
                dtype = data.dtype
            data = data.data
        data = np.asarray(data, dtype=_resolve_dtype(dtype))
        if data.ndim > 0:
            data = np.ascontiguousarray(data)
        self.data = data
        self.requires_grad = bool(requires_grad)
        self.grad = None
        # set by the op that produced this tensor; None for leaves
        self._record = None
        self._tape = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def is_leaf(self):
        return self._record is None

    def numpy(self):
        return self.data

    def item(self):
        if self.data.size != 1:
            raise ValueError("Only single-element tensors can be converted "
                             "to a scalar: shape %s" % (self.shape,))
        return self.data.reshape(-1)[0].item()

    def __float__(self):
        return float(self.item())

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return "Tensor(shape=%s, dtype=%s, requires_grad=%s)" % (
            self.shape, self.dtype, self.requires_grad)

    # operator overloads delegate to ops; imported lazily to avoid a cycle
    def __add__(self, other):
        from .ops import add
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from .ops import sub
        return sub(self, other)

    def __rsub__(self, other):
        from .ops import sub
        return sub(other, self)

    def __mul__(self, other):
        from .ops import mul
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        from .ops import mul
        return mul(self, -1.0)

    def sum(self, axis=None):
        from .ops import reduce_sum
        return reduce_sum(self, axis=axis)

    def mean(self, axis=None):
        from .ops import reduce_mean
        return reduce_mean(self, axis=axis)

    def reshape(self, *shape):
        from .ops import reshape
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)


class TapeRecord(object):
    """
    One recorded operation: its kind, operand tensors, result tensor and
    the backward rule. Forward values needed by the rule are captured by
    the rule's closure.

    ``backward(grad_output, needs)`` returns one gradient (or None) per
    operand; ``needs[i]`` tells whether operand ``i`` wants a gradient.
    """
    __slots__ = ("kind", "inputs", "output", "backward", "index")

    def __init__(self, kind, inputs, output, backward, index):
        self.kind = kind
        self.inputs = inputs
        self.output = output
        self.backward = backward
        self.index = index

    def __repr__(self):
        return "TapeRecord(%d, %s)" % (self.index, self.kind)


class Tape(object):
    """
    Ordered operation records of one forward pass. Usable as a context
    manager, in which case it becomes the active tape of the current
    thread until the block exits.
    """
    def __init__(self):
        self.records = []

    def __len__(self):
        return len(self.records)

    def record(self, kind, inputs, output, backward):
        rec = TapeRecord(kind, tuple(inputs), output, backward,
                         len(self.records))
        self.records.append(rec)
        output._record = rec
        output._tape = self
        return rec

    def reset(self):
        for rec in self.records:
            rec.output._record = None
        self.records = []

    def __enter__(self):
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        stack = _tape_stack()
        if stack and stack[-1] is self:
            stack.pop()
        self.reset()
        return False


def _tape_stack():
    stack = getattr(_state, "tapes", None)
    if stack is None:
        # every thread owns a base tape
        stack = [Tape()]
        _state.tapes = stack
    return stack


def current_tape():
    return _tape_stack()[-1]


def is_grad_enabled():
    return getattr(_state, "grad_enabled", True)


@contextmanager
def no_grad():
    """ Operations executed inside this block record nothing """
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


@contextmanager
def enable_grad():
    """ Re-enable recording inside a no_grad block """
    previous = is_grad_enabled()
    _state.grad_enabled = True
    try:
        yield
    finally:
        _state.grad_enabled = previous


def record_op(kind, inputs, out_data, backward):
    """
    Wrap ``out_data`` into a tensor and record it on the active tape when
    any input requires gradient and recording is enabled.

    :param kind: operation name, kept on the record for diagnostics
    :param inputs: operand tensors, in the order the backward rule uses
    :param out_data: forward result
    :type out_data: numpy.ndarray
    :param backward: rule ``(grad_output, needs) -> tuple of gradients``
    :return: the result tensor
    """
    dtype = inputs[0].dtype
    for t in inputs[1:]:
        if t.dtype != dtype:
            raise TypeError("Operands of '%s' mix dtypes: %s and %s"
                            % (kind, dtype, t.dtype))
    needs_tape = is_grad_enabled() and any(t.requires_grad for t in inputs)
    out = Tensor(out_data, requires_grad=needs_tape, dtype=dtype)
    if needs_tape:
        current_tape().record(kind, inputs, out, backward)
    return out


def backward(loss, wrt=None):
    """
    Reverse-mode accumulation from a scalar loss.

    Gradients are summed over fan-out and accumulated into the ``grad``
    buffer of every leaf tensor with ``requires_grad`` (or only into the
    tensors listed in ``wrt``). The loss' tape is reset afterwards so it
    can record a fresh forward pass.

    :param loss: scalar tensor produced on a tape
    :type loss: Tensor
    :param wrt: optional list of leaf tensors that should receive
        gradients; gradients of every other leaf are discarded
    :type wrt: list
    """
    if not isinstance(loss, Tensor):
        raise TypeError("backward expects a Tensor: %s" % type(loss))
    if loss.data.size != 1:
        raise ValueError("backward needs a scalar loss, got shape %s"
                         % (loss.shape,))
    if loss._record is None:
        raise ValueError("Loss is not on a tape: was it computed from "
                         "tensors with requires_grad inside no_grad()?")

    tape = loss._tape
    if loss._record is not tape.records[loss._record.index]:
        raise ValueError("Loss record does not belong to its tape")

    wanted = None
    if wrt is not None:
        wanted = set(id(t) for t in wrt)

    grads = {id(loss): np.ones_like(loss.data)}
    leaves = {}
    for rec in reversed(tape.records[:loss._record.index + 1]):
        grad_out = grads.pop(id(rec.output), None)
        if grad_out is None:
            continue
        needs = [t.requires_grad for t in rec.inputs]
        input_grads = rec.backward(grad_out, needs)
        for tensor, need, grad in zip(rec.inputs, needs, input_grads):
            if not need or grad is None:
                continue
            key = id(tensor)
            if key in grads:
                grads[key] = grads[key] + grad
            else:
                grads[key] = grad
            if tensor.is_leaf:
                leaves[key] = tensor

    for key, tensor in leaves.items():
        if wanted is not None and key not in wanted:
            continue
        grad = grads[key].astype(tensor.dtype, copy=False)
        if tensor.grad is None:
            tensor.grad = grad
        else:
            tensor.grad = tensor.grad + grad

    tape.reset()
