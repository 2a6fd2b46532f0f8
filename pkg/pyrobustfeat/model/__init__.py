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

from .spec import LayerSpec, NetworkSpec, NetworkSpecError  # NOQA
from .spec import load_network_spec_yaml                    # NOQA
from .model import Model, build                             # NOQA
from .checkpoint import CheckpointError, save_checkpoint     # NOQA
from .checkpoint import load_checkpoint, read_checkpoint_manifest  # NOQA
