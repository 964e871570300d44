"""Gaussian and polynomial kernels and their feature-space derivatives.

Every function is vectorized: pixel vectors carry their channels on the last
axis, so a ``(H, W, C)`` image and a single ``(C,)`` pixel go through the same
code.  Derivative inner products are expressed purely through intensities and
their spatial derivatives, so the feature map itself is never formed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

# bases below this are lifted before raising them to a negative power
SINGULAR_BASE = 1e-12


class KernelDomainError(ValueError):
    pass


@dataclass(frozen=True)
class Gaussian:
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"Gaussian delta must be positive, got {self.delta}")

    @property
    def param(self) -> float:
        return self.delta


@dataclass(frozen=True)
class Polynomial:
    degree: float

    def __post_init__(self):
        # degrees in (0, 1) are only valid for strictly positive images; the
        # singular-base lift keeps them finite otherwise
        if not self.degree > 0:
            raise ValueError(f"polynomial degree must be positive, got {self.degree}")

    @property
    def param(self) -> float:
        return self.degree


KernelSpec = Union[Gaussian, Polynomial]


@dataclass
class GradSample:
    """Pixel values of the working and coupled images plus spatial derivatives
    of the working image, all with channels on the last axis."""

    a: np.ndarray
    b: np.ndarray
    dax: np.ndarray
    day: np.ndarray

    def __post_init__(self):
        self.a, self.b, self.dax, self.day = (
            np.asarray(v, dtype=np.float64) for v in (self.a, self.b, self.dax, self.day)
        )
        nch = {np.shape(v)[-1] if np.ndim(v) else 1 for v in (self.a, self.b, self.dax, self.day)}
        if len(nch) != 1:
            raise ValueError("GradSample components disagree on channel count")


@dataclass
class MetricInner:
    gxx: np.ndarray
    gyy: np.ndarray
    gxy: np.ndarray

    def norm_sq(self):
        """Squared feature-space gradient magnitude gxx + gyy."""
        return self.gxx + self.gyy


def _dot(u, v):
    return np.sum(np.asarray(u, dtype=np.float64) * np.asarray(v, dtype=np.float64), axis=-1)


def _is_integer(d: float) -> bool:
    return float(d).is_integer()


def _power(base, exponent: float):
    """base**exponent with the conventions used throughout the package."""
    base = np.asarray(base, dtype=np.float64)
    if not _is_integer(exponent) and np.any(base < 0):
        raise KernelDomainError(
            f"negative base raised to non-integer power {exponent}"
        )
    if exponent < 0:
        base = np.where(np.abs(base) < SINGULAR_BASE, SINGULAR_BASE, base)
    return np.power(base, exponent)


def evaluate(k: KernelSpec, a, b):
    """k(a, b) = <phi(a), phi(b)>."""
    if isinstance(k, Gaussian):
        diff = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
        return np.exp(-_dot(diff, diff) / (2.0 * k.delta))
    return _power(_dot(a, b), k.degree)


def _grad_k(k: KernelSpec, a, b, da):
    if isinstance(k, Gaussian):
        return evaluate(k, a, b) * _dot(np.asarray(b) - np.asarray(a), da) / k.delta
    d = k.degree
    return d * _power(_dot(a, b), d - 1.0) * _dot(b, da)


def grad_k_x(k: KernelSpec, s: GradSample):
    """<d/dx phi(I^a), phi(I^b)>."""
    return _grad_k(k, s.a, s.b, s.dax)


def grad_k_y(k: KernelSpec, s: GradSample):
    """<d/dy phi(I^a), phi(I^b)>."""
    return _grad_k(k, s.a, s.b, s.day)


def metric_inner(k: KernelSpec, s: GradSample) -> MetricInner:
    """Inner products of the spatial derivatives of phi(I^a).

    For the Gaussian kernel these do not depend on pixel values at all; for the
    polynomial kernel they depend on the working image through ``a . a`` (the
    coupled image is not used).
    """
    if isinstance(k, Gaussian):
        return MetricInner(
            _dot(s.dax, s.dax) / k.delta,
            _dot(s.day, s.day) / k.delta,
            _dot(s.dax, s.day) / k.delta,
        )
    d = k.degree
    base = _dot(s.a, s.a)
    ax, ay = _dot(s.a, s.dax), _dot(s.a, s.day)
    outer = d * (d - 1.0)
    if outer == 0.0:
        # degree 1: the first term vanishes identically
        c1 = np.zeros_like(base)
    else:
        c1 = outer * _power(base, d - 2.0)
    c2 = d * _power(base, d - 1.0)
    return MetricInner(
        c1 * ax * ax + c2 * _dot(s.dax, s.dax),
        c1 * ay * ay + c2 * _dot(s.day, s.day),
        c1 * ax * ay + c2 * _dot(s.dax, s.day),
    )


def feature_distance(k: KernelSpec | None, a, b):
    """Squared feature-space distance |phi(a) - phi(b)|^2.

    ``k=None`` means the identity map, i.e. the plain squared Euclidean
    distance between pixel vectors.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if k is None:
        diff = a - b
        return _dot(diff, diff)
    if isinstance(k, Gaussian):
        diff = a - b
        return -2.0 * np.expm1(-_dot(diff, diff) / (2.0 * k.delta))
    if a.shape[-1] == 1:
        # gray: (a^d - b^d)^2, free of cancellation and exact for d = 1
        return (_power(a[..., 0], k.degree) - _power(b[..., 0], k.degree)) ** 2
    dist = evaluate(k, a, a) + evaluate(k, b, b) - 2.0 * evaluate(k, a, b)
    return np.maximum(dist, 0.0)


def holder_estimate(k: KernelSpec, pairs) -> float:
    """Largest observed ratio [k(a,a) + k(b,b) - 2k(a,b)] / |a - b|^2.

    ``pairs`` is a sequence of ``(a, b)`` pixel vectors (or an array of shape
    ``(n, 2, C)``).  Pairs with ``a == b`` carry no information and are skipped.
    """
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.size == 0:
        raise ValueError("holder_estimate needs at least one pair")
    a, b = arr[:, 0], arr[:, 1]
    diff = a - b
    denom = _dot(diff, diff)
    keep = denom > 0
    if not keep.any():
        raise ValueError("all pairs are degenerate (a == b)")
    # feature_distance is the numerator, evaluated without cancellation where possible
    return float(np.max(feature_distance(k, a[keep], b[keep]) / denom[keep]))


def holder_bound(k: KernelSpec, max_intensity: float = 1.0, channels: int = 1) -> float:
    """Analytic Lipschitz-squared bound on [0, max_intensity]^channels."""
    if isinstance(k, Gaussian):
        return 1.0 / k.delta
    d = k.degree
    if d < 1:
        return float("inf")
    # mean-value bound for |a|^d along a segment, with |a| <= sqrt(C)*max
    r = np.sqrt(channels) * max_intensity
    return float((d * r ** (d - 1.0)) ** 2)
