"""Multiplicative Gaussian noise with a counter-based generator.

Sample ``j`` (row-major, channel-interleaved index) is a pure function of
``(seed, j)``: two 64-bit words at Philox counter positions 2j and 2j+1 feed a
Box-Muller transform.  Any sub-range can be generated on its own, so the
result does not depend on how the work is split.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import Image


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float  # on the 0-255 scale
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")


def standard_normals(seed: int, start: int, count: int) -> np.ndarray:
    """N(0, 1) samples with indices ``start .. start + count - 1``."""
    bg = np.random.Philox(key=int(seed) & (2**64 - 1))
    # each raw draw advances the 256-bit counter by one 4-word block
    # internally; Philox.advance counts in blocks of 4 words
    first = 2 * start
    bg.advance(first // 4)
    skip = first % 4
    raw = bg.random_raw(2 * count + skip)[skip:]
    # 53-bit uniforms in (0, 1]; u1 > 0 keeps the log finite
    u = ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u1, u2 = u[0::2], u[1::2]
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def add_multiplicative_gaussian(img: Image, ns: NoiseSpec) -> Image:
    """I' = clamp(I * (1 + n), 0, 1) with n ~ N(0, (sigma/255)^2) per sample."""
    if ns.sigma == 0:
        return img
    n = standard_normals(ns.seed, 0, img.data.size).reshape(img.shape)
    return Image.clamped(img.data * (1.0 + (ns.sigma / 255.0) * n))
