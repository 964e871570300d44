"""PSNR, surface-area ratio for kernel-parameter selection, external scores."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .image import DimensionError, Image
from .kernels import GradSample, KernelSpec, metric_inner


def psnr(reference: Image, test: Image) -> float:
    """PSNR in dB with peak 1 on normalized intensities; ``inf`` if identical."""
    if reference.shape != test.shape:
        raise DimensionError(f"shape mismatch: {reference.shape} vs {test.shape}")
    mse = float(np.mean((reference.data - test.data) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def format_db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"


def _central_gradients(arr):
    ap = np.pad(arr, ((1, 1), (1, 1), (0, 0)), mode="edge")
    gx = 0.5 * (ap[1:-1, 2:] - ap[1:-1, :-2])
    gy = 0.5 * (ap[2:, 1:-1] - ap[:-2, 1:-1])
    return gx, gy


def surface_area(img: Image, k: KernelSpec | None = None) -> float:
    """Area of the graph surface (x, y, phi(I)) in pixel^2 units.

    Per pixel: sqrt(det G) with G = [[1 + gxx, gxy], [gxy, 1 + gyy]], the
    first fundamental form of the lifted surface.
    """
    arr = img.data
    gx, gy = _central_gradients(arr)
    if k is None:
        gxx = np.sum(gx * gx, axis=2)
        gyy = np.sum(gy * gy, axis=2)
        gxy = np.sum(gx * gy, axis=2)
    else:
        m = metric_inner(k, GradSample(arr, arr, gx, gy))
        gxx, gyy, gxy = m.gxx, m.gyy, m.gxy
    det = (1.0 + gxx) * (1.0 + gyy) - gxy * gxy
    return float(np.sum(np.sqrt(det)))


@dataclass(frozen=True)
class AreaReport:
    param: float | None
    area_original: float
    area_mapped: float

    @property
    def ratio(self) -> float:
        return self.area_mapped / self.area_original


def area_ratio(img: Image, k: KernelSpec) -> AreaReport:
    return AreaReport(getattr(k, "param", None), surface_area(img, None), surface_area(img, k))


def select_kernel_param(img: Image, family: Callable[[float], KernelSpec],
                        grid: Sequence[float]):
    """Grid value whose area ratio is closest to 1 (ties go to the smaller value).

    ``family`` builds a kernel from a parameter, e.g. ``Gaussian`` or
    ``Polynomial``.  Returns ``(param, reports)``.
    """
    if len(grid) == 0:
        raise ValueError("parameter grid is empty")
    base = surface_area(img, None)
    reports = [AreaReport(float(p), base, surface_area(img, family(p))) for p in grid]
    best = min(reports, key=lambda r: (abs(r.ratio - 1.0), r.param))
    return best.param, reports


class ScoreFileError(ValueError):
    pass


def external_scores(path) -> dict[str, float]:
    """Read ``id,score`` rows (optional ``id,score`` header) into a dict."""
    scores = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ScoreFileError(f"line {lineno}: expected 2 columns, got {len(row)}")
            key, raw = row[0].strip(), row[1].strip()
            if lineno == 1 and (key.lower(), raw.lower()) == ("id", "score"):
                continue
            try:
                scores[key] = float(raw)
            except ValueError:
                raise ScoreFileError(f"line {lineno}: score {raw!r} is not a number") from None
    return scores
