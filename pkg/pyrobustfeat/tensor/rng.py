#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Reproducible random streams.

Every stream is a numpy ``Generator`` over the PCG64 bit generator,
seeded through ``SeedSequence``. Named children are derived from the
parent's entropy and the CRC32 of the name, so each consumer (weight
initialization, data shuffling, subset sampling) gets its own stream
and adding a consumer never shifts the draws of another.

:copyright:
    pyrobustfeat developers, 2026
:license:
    GNU Lesser General Public License, version 3 (LGPLv3)
    (http://www.gnu.org/licenses/lgpl-3.0.en.html)
"""
from __future__ import (absolute_import, division, print_function)
import zlib
import numpy as np


ALGORITHM = "PCG64"


class RngStream(object):
    """
    :param seed: non-negative 64-bit integer seed
    :type seed: int
    :param path: names of the derivation chain, empty for a root stream
    :type path: tuple
    """
    def __init__(self, seed, path=()):
        seed = int(seed)
        if seed < 0 or seed >= 2 ** 64:
            raise ValueError("seed should be a 64-bit non-negative integer: "
                             "%d" % seed)
        self.seed = seed
        self.path = tuple(path)
        entropy = [seed] + [zlib.crc32(name.encode("utf-8"))
                            for name in self.path]
        self.generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy)))

    @property
    def algorithm(self):
        return ALGORITHM

    def child(self, *names):
        """ Independent stream derived from this one and ``names`` """
        return RngStream(self.seed, self.path + tuple(str(n) for n in names))

    def normal(self, shape, std=1.0, dtype=np.float32):
        """ Normal draws, generated in float64 and rounded to dtype """
        return (self.generator.standard_normal(shape) * std).astype(dtype)

    def permutation(self, n):
        return self.generator.permutation(n)

    def __repr__(self):
        return "RngStream(seed=%d, path=%s, algorithm=%s)" % (
            self.seed, "/".join(self.path) or "-", ALGORITHM)
