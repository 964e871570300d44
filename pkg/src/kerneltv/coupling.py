"""Coupled images, kernel fields, and inversion of kernel values to intensities.

The solvers evolve ``k(I^a, I^b)`` rather than the image.  The coupled image
``I^b`` is chosen so the kernel value depends on a single intensity that can
be read back in closed form:

* gray images use a constant couple (0 for Gaussian, 1 for polynomial);
* color images get one couple per channel: for the Gaussian kernel a copy of
  the current image with the target channel zeroed, for the polynomial kernel
  a one-hot image selecting the target channel.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .image import DimensionError, Image
from .kernels import Gaussian, KernelSpec, Polynomial, evaluate


@dataclass(frozen=True)
class GrayConstant:
    level: float

    def __post_init__(self):
        if not 0.0 <= self.level <= 1.0:
            raise ValueError(f"couple level must be in [0, 1], got {self.level}")


@dataclass(frozen=True)
class ColorChannel:
    target: int

    def __post_init__(self):
        if self.target not in (0, 1, 2):
            raise ValueError(f"target channel must be 0, 1 or 2, got {self.target}")


CoupleRule = Union[GrayConstant, ColorChannel]


class CoupleMismatch(ValueError):
    pass


@dataclass
class ClampStats:
    """Running count of kernel values that fell outside the invertible range."""

    warnings: int = 0


@dataclass
class KernelField:
    values: np.ndarray

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def default_gray_rule(k: KernelSpec | None) -> GrayConstant:
    """Constant couple that makes the gray kernel field invertible: 0 for the
    Gaussian kernel, 1 for the polynomial kernel (and the identity map)."""
    return GrayConstant(0.0 if isinstance(k, Gaussian) else 1.0)


def _arr(img) -> np.ndarray:
    arr = img.data if isinstance(img, Image) else np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr


def make_coupled(rule: CoupleRule, k: KernelSpec, current):
    """Coupled image for ``current`` under ``rule``.

    Returns an :class:`Image` when given one, otherwise a float array.
    """
    arr = _arr(current)
    nch = arr.shape[2]
    if isinstance(rule, GrayConstant):
        if nch != 1:
            raise CoupleMismatch("GrayConstant couples apply to 1-channel images only")
        out = np.full_like(arr, rule.level)
    elif isinstance(rule, ColorChannel):
        if nch != 3:
            raise CoupleMismatch("ColorChannel couples apply to 3-channel images only")
        if isinstance(k, Gaussian):
            out = arr.copy()
            out[:, :, rule.target] = 0.0
        elif isinstance(k, Polynomial):
            out = np.zeros_like(arr)
            out[:, :, rule.target] = 1.0
        else:
            raise TypeError(f"unsupported kernel {k!r}")
    else:
        raise TypeError(f"unsupported couple rule {rule!r}")
    if isinstance(current, Image):
        return Image(np.clip(out, 0.0, 1.0))
    return out


def kernel_field(k: KernelSpec, a, b) -> KernelField:
    a, b = _arr(a), _arr(b)
    if a.shape != b.shape:
        raise DimensionError(f"image shapes differ: {a.shape} vs {b.shape}")
    return KernelField(evaluate(k, a, b))


def reconstruct_gaussian(v, delta: float, stats: ClampStats | None = None):
    """Invert v = exp(-I^2 / 2 delta) for I >= 0, clamped to [0, 1]."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    v = np.asarray(v, dtype=np.float64)
    if np.any(v <= 0):
        raise ValueError("Gaussian kernel values must be positive")
    over = v > 1.0
    if stats is not None:
        stats.warnings += int(np.count_nonzero(over))
    v = np.where(over, 1.0, v)
    out = np.clip(np.sqrt(-np.log(v) * 2.0 * delta), 0.0, 1.0)
    return out if out.ndim else float(out)


def reconstruct_polynomial(v, degree: float, stats: ClampStats | None = None):
    """Invert v = I^d, clamped to [0, 1]."""
    v = np.asarray(v, dtype=np.float64)
    neg = v < 0.0
    if stats is not None:
        stats.warnings += int(np.count_nonzero(neg))
    v = np.where(neg, 0.0, v)
    out = np.clip(np.power(v, 1.0 / degree), 0.0, 1.0)
    return out if out.ndim else float(out)


def reconstruct(k: KernelSpec, rule: CoupleRule, v, stats: ClampStats | None = None):
    """Recover the target intensity from a kernel field built with ``rule``.

    For a gray constant couple at ``level`` the Gaussian branch assumes the
    intensity is not below ``level`` (exact for the default level 0).
    """
    if isinstance(rule, GrayConstant) and rule.level != _neutral_level(k):
        v = np.asarray(v, dtype=np.float64)
        if isinstance(k, Gaussian):
            off = reconstruct_gaussian(v, k.delta, stats)
            return np.clip(rule.level + off, 0.0, 1.0)
        if rule.level == 0.0:
            raise CoupleMismatch("a zero couple makes the polynomial field identically zero")
        # (a * L)^d = v  =>  a = v^(1/d) / L
        raw = np.power(np.maximum(v, 0.0), 1.0 / k.degree) / rule.level
        if stats is not None:
            stats.warnings += int(np.count_nonzero(v < 0))
        return np.clip(raw, 0.0, 1.0)
    if isinstance(k, Gaussian):
        return reconstruct_gaussian(v, k.delta, stats)
    return reconstruct_polynomial(v, k.degree, stats)


def _neutral_level(k: KernelSpec) -> float:
    return 0.0 if isinstance(k, Gaussian) else 1.0
