"""The six denoising methods by name, and kernel-space display images."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import ColorChannel, GrayConstant, default_gray_rule, make_coupled
from .gtv import SolverConfig, denoise_color, denoise_gray
from .image import Image
from .kernels import Gaussian, KernelSpec, Polynomial, evaluate
from .nltv import NlConfig, NonlocalGraph, denoise_nltv

METHODS = ("gtv", "gk-gtv", "pk-gtv", "nltv", "gk-nltv", "pk-nltv")

GAUSSIAN_GRID = tuple(round(0.1 * i, 1) for i in range(1, 11))
POLYNOMIAL_GRID = tuple(round(1.0 + 0.1 * i, 1) for i in range(1, 11))


@dataclass(frozen=True)
class Method:
    name: str
    solver: str  # "gtv" or "nltv"
    family: type | None  # Gaussian, Polynomial or None

    @property
    def grid(self):
        if self.family is Gaussian:
            return GAUSSIAN_GRID
        if self.family is Polynomial:
            return POLYNOMIAL_GRID
        return ()

    def kernel(self, param: float | None) -> KernelSpec | None:
        if self.family is None:
            return None
        if param is None:
            flag = "--delta" if self.family is Gaussian else "--degree"
            raise ValueError(f"method {self.name} needs {flag}")
        return self.family(float(param))


def parse_method(name: str) -> Method:
    if name not in METHODS:
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    prefix, _, solver = name.rpartition("-")
    family = {"": None, "gk": Gaussian, "pk": Polynomial}[prefix]
    return Method(name, solver, family)


def run(noisy: Image, method: Method, param: float | None = None,
        cfg: SolverConfig = SolverConfig(), nc: NlConfig = NlConfig(),
        couple_level: float | None = None, graph: NonlocalGraph | None = None, **kw) -> Image:
    """Denoise ``noisy`` with a named method."""
    k = method.kernel(param)
    if method.solver == "nltv":
        if couple_level is not None and noisy.channels == 1 and k is not None:
            raise ValueError("custom couple levels are only supported by the GTV solver")
        return denoise_nltv(noisy, k, cfg, nc, graph=graph, **kw)
    if noisy.channels == 1:
        rule = GrayConstant(couple_level) if couple_level is not None and k is not None else None
        return denoise_gray(noisy, k, rule, cfg, **kw)
    return denoise_color(noisy, k, cfg, **kw)


def kernel_space_image(img: Image, k: KernelSpec | None, couple_level: float | None = None,
                       normalize: bool = False) -> Image:
    """The image as seen in the kernel function space.

    Gaussian fields are shown as ``1 - k`` so that dark stays dark.  Fields
    outside [0, 1] (only possible with a couple level above 1 or
    ``normalize=True``) are min-max scaled.
    """
    arr = img.data
    if k is None:
        field = arr.copy()
    elif img.channels == 1:
        rule = GrayConstant(couple_level) if couple_level is not None else default_gray_rule(k)
        field = evaluate(k, arr, make_coupled(rule, k, arr))[:, :, None]
    else:
        field = np.stack(
            [evaluate(k, arr, make_coupled(ColorChannel(c), k, arr)) for c in range(3)], axis=2
        )
    if isinstance(k, Gaussian):
        field = 1.0 - field
    if normalize or field.min() < 0.0 or field.max() > 1.0:
        lo, hi = float(field.min()), float(field.max())
        field = (field - lo) / (hi - lo) if hi > lo else np.zeros_like(field)
    return Image.clamped(field)


def pick_by_scores(ids_by_param: dict, scores: dict) -> float:
    """Parameter whose image id has the lowest external score."""
    scored = [(scores[i], p) for p, ids in ids_by_param.items() for i in ids if i in scores]
    if not scored:
        raise KeyError("none of the swept parameters appear in the score file")
    return min(scored)[1]
