#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
White-box l-infinity attacks: the fast gradient sign method and
projected gradient descent.

Input gradients are taken in eval mode (running statistics), on a tape
of their own, so generating an attack never changes the parameters or
the running statistics of the model and never touches the records of
an enclosing training step.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import logging
from dataclasses import dataclass, asdict
import numpy as np

from .. import tensor as T
from ..utils.io import ConfigError, check_dict_keys, coerce_float, coerce_int

logger = logging.getLogger(__name__)

METHODS = ("fgsm", "pgd")


@dataclass
class AttackConfig:
    """
    :param epsilon: l-infinity budget, in input units
    :param step_size: per-iteration step, in input units
    :param steps: number of iterations
    :param clip_min: lower bound of the valid input range
    :param clip_max: upper bound of the valid input range
    :param method: "fgsm" or "pgd"
    """
    epsilon: float
    step_size: float
    steps: int
    clip_min: float = 0.0
    clip_max: float = 1.0
    method: str = "pgd"

    def check(self, section="attack"):
        errors = []
        if self.method not in METHODS:
            errors.append("%s.method: should be 'fgsm' or 'pgd', got %r"
                          % (section, self.method))
        if not self.epsilon >= 0:
            errors.append("%s.epsilon: should be >= 0, got %r"
                          % (section, self.epsilon))
        if not self.step_size >= 0:
            errors.append("%s.step_size: should be >= 0, got %r"
                          % (section, self.step_size))
        if self.steps < 1:
            errors.append("%s.steps: should be >= 1, got %r"
                          % (section, self.steps))
        if not self.clip_min < self.clip_max:
            errors.append("%s.clip_min: should be below clip_max (%r >= %r)"
                          % (section, self.clip_min, self.clip_max))
        if self.method == "fgsm" and (self.steps != 1
                                      or self.step_size != self.epsilon):
            errors.append("%s: fgsm takes one step of size epsilon"
                          % section)
        return errors

    def validate(self, section="attack"):
        errors = self.check(section)
        if errors:
            raise ConfigError(errors)
        return self

    @classmethod
    def fgsm(cls, epsilon, clip_min=0.0, clip_max=1.0):
        return cls(epsilon=epsilon, step_size=epsilon, steps=1,
                   clip_min=clip_min, clip_max=clip_max,
                   method="fgsm").validate()

    @classmethod
    def from_dict(cls, content, section="attack"):
        """
        ``method`` defaults to pgd; for fgsm only ``epsilon`` and the clip
        range are read, ``steps`` and ``step_size`` follow from it.
        """
        method = content.get("method", "pgd") \
            if isinstance(content, dict) else None
        if method == "fgsm":
            required = ("epsilon", )
            optional = ("method", "clip_min", "clip_max", "steps",
                        "step_size")
        else:
            required = ("epsilon", "step_size", "steps")
            optional = ("method", "clip_min", "clip_max")
        errors = check_dict_keys(content, required, optional,
                                 section=section)
        if errors:
            raise ConfigError(errors)
        epsilon = coerce_float(content["epsilon"], section + ".epsilon",
                               errors)
        values = {
            "epsilon": epsilon,
            "step_size": coerce_float(content.get("step_size", epsilon),
                                      section + ".step_size", errors),
            "steps": coerce_int(content.get("steps", 1),
                                section + ".steps", errors),
            "clip_min": coerce_float(content.get("clip_min", 0.0),
                                     section + ".clip_min", errors),
            "clip_max": coerce_float(content.get("clip_max", 1.0),
                                     section + ".clip_max", errors),
            "method": method,
        }
        if errors:
            raise ConfigError(errors)
        return cls(**values).validate(section)

    def to_dict(self):
        return asdict(self)

    def replace(self, **changes):
        """
        Copy with some fields changed. For fgsm, a new epsilon also sets
        the step size.
        """
        values = self.to_dict()
        values.update({k: v for k, v in changes.items() if v is not None})
        if values["method"] == "fgsm":
            values["steps"] = 1
            values["step_size"] = values["epsilon"]
        return AttackConfig(**values).validate()


def default_attack_configs(dataset):
    """
    Attack settings per dataset, in the dataset's input units.

    MNIST pixels are in [0, 1]: FGSM with epsilon 0.2, PGD with 20 steps
    of 0.01 within the same 0.2 ball. CIFAR-10 pixels are in [0, 255]:
    FGSM with epsilon 4, PGD with 12 steps of 1 within the same ball.

    :return: dict with "fgsm" and "pgd" configs
    """
    if dataset == "mnist":
        return {"fgsm": AttackConfig.fgsm(0.2, 0.0, 1.0),
                "pgd": AttackConfig(epsilon=0.2, step_size=0.01, steps=20,
                                    clip_min=0.0, clip_max=1.0).validate()}
    if dataset == "cifar10":
        return {"fgsm": AttackConfig.fgsm(4.0, 0.0, 255.0),
                "pgd": AttackConfig(epsilon=4.0, step_size=1.0, steps=12,
                                    clip_min=0.0, clip_max=255.0).validate()}
    raise ValueError("No attack defaults for dataset: %s" % dataset)


def _as_array(model, x):
    if isinstance(x, T.Tensor):
        x = x.data
    return np.ascontiguousarray(x, dtype=model.dtype)


def input_gradient(model, x, labels):
    """
    Gradient of the mean cross-entropy with respect to the input, in eval
    mode. Parameter gradients of the same pass are discarded.

    :return: (loss value, gradient array)
    """
    xt = T.Tensor(x, dtype=model.dtype, requires_grad=True)
    with T.enable_grad():
        with T.Tape():
            logits, _ = model.forward(xt, mode="eval")
            loss = T.softmax_cross_entropy(logits, labels)
            T.backward(loss, wrt=[xt])
    return loss.item(), xt.grad


def attack_loss(model, x, labels):
    """ Mean cross-entropy at ``x`` in eval mode """
    with T.no_grad():
        logits, _ = model.forward(_as_array(model, x), mode="eval")
        return T.softmax_cross_entropy(logits, labels).item()


def _ball_bounds(x0, epsilon):
    """
    Bounds of the epsilon ball around x0, tightened by one ulp where
    rounding would let ``bound - x0`` exceed epsilon.
    """
    upper = x0 + epsilon
    over = (upper - x0) > epsilon
    upper[over] = np.nextafter(upper[over], -np.inf)
    lower = x0 - epsilon
    over = (x0 - lower) > epsilon
    lower[over] = np.nextafter(lower[over], np.inf)
    return lower, upper


def pgd(model, x, labels, cfg, callback=None):
    """
    Projected gradient descent without random start::

        x <- clip(clip(x + step_size * sign(grad), x0 - eps, x0 + eps),
                  clip_min, clip_max)

    repeated ``cfg.steps`` times from x0; sign(0) is 0.

    :param model: the attacked model, left unchanged
    :type model: pyrobustfeat.model.Model
    :param x: clean batch [N, C, H, W]
    :param labels: true labels [N]
    :type cfg: AttackConfig
    :param callback: optional ``callback(step, loss, candidate)`` called
        with the loss at the start of each step and the step's candidate
        before projection
    :return: the adversarial batch, as a Tensor outside any tape
    """
    cfg.validate()
    x0 = _as_array(model, x)
    labels = np.asarray(labels)
    dtype = x0.dtype.type
    epsilon, step = dtype(cfg.epsilon), dtype(cfg.step_size)
    lo, hi = dtype(cfg.clip_min), dtype(cfg.clip_max)
    if epsilon == 0:
        return T.Tensor(x0.copy(), dtype=x0.dtype)

    lower, upper = _ball_bounds(x0, epsilon)
    x_adv = x0.copy()
    for istep in range(cfg.steps):
        loss, grad = input_gradient(model, x_adv, labels)
        candidate = x_adv + step * np.sign(grad).astype(x0.dtype)
        if callback is not None:
            callback(istep, loss, candidate)
        x_adv = np.clip(np.clip(candidate, lower, upper), lo, hi)
        logger.debug("%s step %d/%d: loss %.6f", cfg.method, istep + 1,
                     cfg.steps, loss)
    return T.Tensor(x_adv, dtype=x0.dtype)


def fgsm(model, x, labels, cfg):
    """
    One signed gradient step of size epsilon, ``clip(x + eps *
    sign(grad))``; exactly pgd with one step of size epsilon.
    """
    return pgd(model, x, labels, cfg.replace(method="fgsm"))


def run_attack(model, x, labels, cfg):
    """ Dispatch on ``cfg.method`` """
    if cfg.method == "fgsm":
        return fgsm(model, x, labels, cfg)
    return pgd(model, x, labels, cfg)
