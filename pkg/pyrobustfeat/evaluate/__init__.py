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

from .evaluate import AccuracyReport, DistortionReport, CONDITIONS    # NOQA
from .evaluate import evaluate_accuracy, evaluate_distortions         # NOQA
from .evaluate import measure_distortions                             # NOQA
from .report import write_accuracy_csv, write_distortion_csv          # NOQA
from .report import read_accuracy_csv, read_distortion_csv            # NOQA
from .report import accuracy_frame, distortion_frame, compare_runs    # NOQA
