#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Training objectives.

* ``standard``: cross-entropy on the clean batch.
* ``adversarial``: ``alpha * J(x) + (1 - alpha) * J(x*)`` with x*
  generated by the inner attack from the current parameters.
* ``distortion-regularized``: the adversarial objective plus
  ``sum_i beta_i * sum_j d_ij``, where ``d_ij = (z - z*)^2`` for feature
  j of normalization layer i, reduced over examples and positions.

x* enters every objective as a constant. The clean pass runs in train
mode and updates the running statistics; x* is then generated in eval
mode; the adversarial pass runs in train mode on its own batch
statistics without updating the running statistics.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import logging
from dataclasses import dataclass, field
from typing import List, Optional

from .. import tensor as T
from ..attack import AttackConfig, run_attack
from ..utils.io import ConfigError, check_dict_keys, coerce_float

logger = logging.getLogger(__name__)

KINDS = ("standard", "adversarial", "distortion-regularized")
REDUCTIONS = ("mean", "sum")


@dataclass
class ObjectiveConfig:
    kind: str = "standard"
    alpha: float = 0.2
    betas: List[float] = field(default_factory=list)
    attack: Optional[AttackConfig] = None
    inner_attack: str = "fgsm"
    distortion_reduction: str = "mean"

    def check(self, tap_count=None, section="objective"):
        errors = []
        if self.kind not in KINDS:
            errors.append("%s.kind: should be one of %s, got %r"
                          % (section, ", ".join(KINDS), self.kind))
            return errors
        if self.kind == "standard":
            return errors
        if not 0 <= self.alpha <= 1:
            errors.append("%s.alpha: should be in [0, 1], got %r"
                          % (section, self.alpha))
        if self.attack is None:
            errors.append("%s.attack: required for the %s objective"
                          % (section, self.kind))
        else:
            errors.extend(self.attack.check(section + ".attack"))
        if self.inner_attack not in ("fgsm", "pgd"):
            errors.append("%s.inner_attack: should be 'fgsm' or 'pgd', got "
                          "%r" % (section, self.inner_attack))
        if self.kind == "distortion-regularized":
            if self.distortion_reduction not in REDUCTIONS:
                errors.append("%s.distortion_reduction: should be 'mean' or "
                              "'sum', got %r"
                              % (section, self.distortion_reduction))
            if any(not b >= 0 for b in self.betas):
                errors.append("%s.betas: should be non-negative, got %s"
                              % (section, self.betas))
            if tap_count is not None and len(self.betas) != tap_count:
                errors.append("%s.betas: %d values given, the network has "
                              "%d normalization layers"
                              % (section, len(self.betas), tap_count))
        return errors

    def validate(self, tap_count=None, section="objective"):
        """
        :param tap_count: normalization layer count of the model, checked
            against the beta list of the distortion-regularized objective
        :raise ConfigError: with one message per problem
        """
        errors = self.check(tap_count, section)
        if errors:
            raise ConfigError(errors)
        return self

    @property
    def inner_attack_config(self):
        """ the attack generating x* during training """
        if self.inner_attack == "fgsm":
            return self.attack.replace(method="fgsm")
        return self.attack.replace(method="pgd")

    @classmethod
    def from_dict(cls, content, section="objective"):
        errors = check_dict_keys(
            content, ("kind", ),
            ("alpha", "betas", "attack", "inner_attack",
             "distortion_reduction"), section=section)
        if errors:
            raise ConfigError(errors)
        alpha = coerce_float(content.get("alpha", 0.2), section + ".alpha",
                             errors)
        betas = content.get("betas", [])
        if not isinstance(betas, list):
            errors.append("%s.betas: should be a list" % section)
            betas = []
        betas = [coerce_float(b, "%s.betas[%d]" % (section, i), errors)
                 for i, b in enumerate(betas)]
        attack = None
        if content.get("attack") is not None:
            attack_content = dict(content["attack"]) \
                if isinstance(content["attack"], dict) else content["attack"]
            if isinstance(attack_content, dict):
                attack_content.setdefault(
                    "method", content.get("inner_attack", "fgsm"))
            try:
                attack = AttackConfig.from_dict(attack_content,
                                                section=section + ".attack")
            except ConfigError as err:
                errors.extend(err.errors)
        if errors:
            raise ConfigError(errors)
        return cls(kind=content["kind"], alpha=alpha, betas=betas,
                   attack=attack,
                   inner_attack=content.get("inner_attack", "fgsm"),
                   distortion_reduction=content.get("distortion_reduction",
                                                    "mean")).validate(
                                                        section=section)

    def to_dict(self):
        content = {"kind": self.kind}
        if self.kind == "standard":
            return content
        content.update(alpha=self.alpha,
                       attack=self.attack.to_dict(),
                       inner_attack=self.inner_attack)
        if self.kind == "distortion-regularized":
            content.update(betas=list(self.betas),
                           distortion_reduction=self.distortion_reduction)
        return content


@dataclass
class DistortionTerm:
    """
    per_layer: scalar tensors ``sum_j d_ij``, one per normalization layer;
    total: ``sum_i beta_i * per_layer[i]``
    """
    per_layer: list
    total: T.Tensor


@dataclass
class ObjectiveTerms:
    total: T.Tensor
    clean: T.Tensor
    adversarial: Optional[T.Tensor] = None
    distortion: Optional[DistortionTerm] = None
    logits: Optional[T.Tensor] = None
    x_adv: Optional[T.Tensor] = None

    def values(self):
        """ plain floats of every term, for diagnostics """
        out = {"total": self.total.item(), "clean": self.clean.item()}
        if self.adversarial is not None:
            out["adversarial"] = self.adversarial.item()
        if self.distortion is not None:
            out["distortion"] = self.distortion.total.item()
        return out


def _layer_distortion(z_clean, z_adv, reduction):
    sq = T.square(z_clean - z_adv)
    if reduction == "sum":
        return T.reduce_sum(sq)
    # per feature: mean over examples and positions, then summed
    axes = (0, ) if sq.ndim == 2 else (0, 2, 3)
    return T.reduce_sum(T.reduce_mean(sq, axis=axes))


def distortion_term(taps_clean, taps_adv, betas, reduction="mean"):
    """
    Weighted feature distortion between two forward passes.

    :param taps_clean: normalized values z_i of the clean pass
    :param taps_adv: normalized values z*_i of the perturbed pass
    :param betas: one non-negative weight per normalization layer
    :param reduction: "mean" (over examples and positions, per feature) or
        "sum" (plain sum over everything)
    :rtype: DistortionTerm
    """
    if not (len(taps_clean) == len(taps_adv) == len(betas)):
        raise ValueError("distortion term needs one beta per layer: %d clean "
                         "taps, %d perturbed taps, %d betas"
                         % (len(taps_clean), len(taps_adv), len(betas)))
    if reduction not in REDUCTIONS:
        raise ValueError("reduction should be 'mean' or 'sum': %s"
                         % reduction)
    if not taps_clean:
        raise ValueError("distortion term over zero layers")
    per_layer = []
    total = None
    for index, (z, z_adv, beta) in enumerate(zip(taps_clean, taps_adv,
                                                 betas)):
        if z.shape != z_adv.shape:
            raise ValueError("tap %d: clean shape %s differs from perturbed "
                             "shape %s" % (index, z.shape, z_adv.shape))
        layer = _layer_distortion(z, z_adv, reduction)
        per_layer.append(layer)
        weighted = layer * float(beta)
        total = weighted if total is None else total + weighted
    return DistortionTerm(per_layer=per_layer, total=total)


def _clean_pass(model, batch):
    logits, taps = model.forward(batch.inputs, mode="train",
                                 update_stats=True)
    return T.softmax_cross_entropy(logits, batch.labels), logits, taps


def loss_standard(model, batch):
    """ cross-entropy of the clean batch, train mode """
    loss, _, _ = _clean_pass(model, batch)
    return loss


def generate_adversarial(model, batch, cfg):
    """ x* of the batch under the objective's inner attack, a constant """
    return run_attack(model, batch.inputs, batch.labels,
                      cfg.inner_attack_config)


def objective_terms(model, batch, cfg, x_adv=None):
    """
    Evaluate the configured objective on a batch.

    :param model: the trained model
    :param batch: object with ``inputs`` [N, C, H, W] and ``labels`` [N]
    :type cfg: ObjectiveConfig
    :param x_adv: precomputed x*; generated with the inner attack when
        None
    :rtype: ObjectiveTerms
    """
    clean, logits, taps = _clean_pass(model, batch)
    if cfg.kind == "standard":
        return ObjectiveTerms(total=clean, clean=clean, logits=logits)

    if x_adv is None:
        x_adv = generate_adversarial(model, batch, cfg)
    adv_logits, adv_taps = model.forward(x_adv, mode="train",
                                         update_stats=False)
    adversarial = T.softmax_cross_entropy(adv_logits, batch.labels)
    # alpha*J + (1-alpha)*J*, written so J* == J gives J exactly
    total = clean + (adversarial - clean) * (1.0 - cfg.alpha)

    distortion = None
    if cfg.kind == "distortion-regularized":
        distortion = distortion_term(taps, adv_taps, cfg.betas,
                                     reduction=cfg.distortion_reduction)
        total = total + distortion.total
    return ObjectiveTerms(total=total, clean=clean, adversarial=adversarial,
                          distortion=distortion, logits=logits, x_adv=x_adv)


def loss_adversarial(model, batch, cfg, x_adv=None):
    """ ``alpha * J(x) + (1 - alpha) * J(x*)`` """
    if cfg.kind == "standard":
        raise ValueError("loss_adversarial needs an adversarial objective")
    terms = objective_terms(model, batch, _adversarial_only(cfg), x_adv)
    return terms.total


def loss_distortion_regularized(model, batch, cfg, x_adv=None):
    """ adversarial loss plus the weighted distortion term """
    if cfg.kind != "distortion-regularized":
        raise ValueError("loss_distortion_regularized needs the "
                         "distortion-regularized objective, got %s"
                         % cfg.kind)
    return objective_terms(model, batch, cfg, x_adv).total


def _adversarial_only(cfg):
    if cfg.kind == "adversarial":
        return cfg
    return ObjectiveConfig(kind="adversarial", alpha=cfg.alpha,
                           attack=cfg.attack, inner_attack=cfg.inner_attack)
