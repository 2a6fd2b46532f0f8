#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)

from .objective import ObjectiveConfig, ObjectiveTerms, DistortionTerm  # NOQA
from .objective import loss_standard, loss_adversarial                 # NOQA
from .objective import loss_distortion_regularized, distortion_term    # NOQA
from .objective import objective_terms, generate_adversarial           # NOQA
from .train import TrainConfig, TrainingDivergedError, train           # NOQA
from .train import CsvMetricsSink                                      # NOQA
