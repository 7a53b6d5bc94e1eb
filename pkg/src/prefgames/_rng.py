"""Seed expansion: one integer seed, independent streams per named stage."""

import zlib

import numpy as np


def stage_rng(seed, label):
    """Generator for stage ``label``; stable across runs and platforms."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(label.encode())])
