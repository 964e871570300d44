"""Nonlocal TV and its kernel variants.

The 4-neighborhood stencil of :mod:`kerneltv.gtv` is replaced by a weighted
graph: each pixel keeps its ``k_best`` most similar pixels inside a
``(2r+1) x (2r+1)`` search window, similarity being measured on the 5-pixel
cross patch.  The graph is built once from the noisy image and symmetrized
by union.

The nonlocal gradient magnitude at p is ``sum_q w(p,q) |phi(I_q) - phi(I_p)|^2``
with the feature-space distance taken through the kernel, so the identity
map gives plain NLTV and the degree-1 polynomial reproduces it exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import CoupleMismatch
from .gtv import Diagnostics, Monitor, SolverConfig, solve_color, solve_gray
from .image import Image
from .kernels import KernelSpec, feature_distance

CROSS = ((0, 0), (0, 1), (0, -1), (1, 0), (-1, 0))


@dataclass(frozen=True)
class NlConfig:
    search_radius: int = 2
    k_best: int = 10
    h_sim: float = 0.1

    def __post_init__(self):
        window = (2 * self.search_radius + 1) ** 2
        if self.search_radius < 1:
            raise ValueError("search_radius must be at least 1")
        if not 1 <= self.k_best <= window - 1:
            raise ValueError(f"k_best must be in [1, {window - 1}]")
        if not self.h_sim > 0:
            raise ValueError("h_sim must be positive")


@dataclass
class NonlocalGraph:
    """Edges stored densely per window offset.

    ``offsets[i] = (dy, dx)``; ``weights[y, x, i]`` is the weight of the edge
    from (x, y) to (x + dx, y + dy), zero when absent.  ``selected`` marks the
    k-best choices before symmetrization.
    """

    offsets: np.ndarray
    weights: np.ndarray
    selected: np.ndarray

    @property
    def shape(self):
        return self.weights.shape[:2]

    def degree(self) -> np.ndarray:
        return np.count_nonzero(self.weights > 0, axis=2)

    def neighbors(self, x: int, y: int):
        out = []
        for i, (dy, dx) in enumerate(self.offsets):
            w = self.weights[y, x, i]
            if w > 0:
                out.append(((x + int(dx), y + int(dy)), float(w)))
        return out

    def stats_csv(self, path, bins: int = 10):
        """Mean degree and a weight histogram, for debugging."""
        w = self.weights[self.weights > 0]
        hist, edges = np.histogram(w, bins=bins, range=(0.0, 1.0))
        with open(path, "w", newline="") as fh:
            fh.write("stat,value\n")
            fh.write(f"mean_degree,{self.degree().mean():.6f}\n")
            fh.write(f"max_degree,{int(self.degree().max())}\n")
            fh.write(f"edges,{w.size}\n")
            for lo, hi, n in zip(edges[:-1], edges[1:], hist):
                fh.write(f"w[{lo:.1f};{hi:.1f}),{int(n)}\n")


def _offsets(radius):
    return np.array(
        [(dy, dx) for dy in range(-radius, radius + 1) for dx in range(-radius, radius + 1)
         if (dy, dx) != (0, 0)],
        dtype=np.int64,
    )


def _shift(arr, dy, dx, pad):
    """arr[y + dy, x + dx] for every (y, x), reading a pre-padded array."""
    h, w = arr.shape[0] - 2 * pad, arr.shape[1] - 2 * pad
    return arr[pad + dy:pad + dy + h, pad + dx:pad + dx + w]


def _valid(shape, dy, dx):
    h, w = shape
    ys = np.arange(h)[:, None] + dy
    xs = np.arange(w)[None, :] + dx
    return (ys >= 0) & (ys < h) & (xs >= 0) & (xs < w)


def _mirror_index(offsets):
    lut = {tuple(o): i for i, o in enumerate(offsets.tolist())}
    return np.array([lut[(-dy, -dx)] for dy, dx in offsets.tolist()])


def candidate_weights(img, nc: NlConfig):
    """exp(-|patch(p) - patch(q)|^2 / h^2) for every window offset; -1 outside."""
    arr = img.data if isinstance(img, Image) else np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    h, w = arr.shape[:2]
    r = nc.search_radius
    offsets = _offsets(r)
    p1 = np.pad(arr, ((1, 1), (1, 1), (0, 0)), mode="edge")
    patches = [_shift(p1, dy, dx, 1) for dy, dx in CROSS]
    padded = [np.pad(pt, ((r, r), (r, r), (0, 0)), mode="edge") for pt in patches]
    cand = np.empty((h, w, len(offsets)))
    for i, (dy, dx) in enumerate(offsets):
        dist = np.zeros((h, w))
        for pt, pp in zip(patches, padded):
            diff = pt - _shift(pp, dy, dx, r)
            dist += np.sum(diff * diff, axis=2)
        wt = np.exp(-dist / nc.h_sim ** 2)
        cand[:, :, i] = np.where(_valid((h, w), dy, dx), wt, -1.0)
    return offsets, cand


def build_graph(img, nc: NlConfig = NlConfig()) -> NonlocalGraph:
    offsets, cand = candidate_weights(img, nc)
    h, w, n = cand.shape
    # stable sort on -weight: ties keep raster order of the window offsets
    order = np.argsort(-cand, axis=2, kind="stable")[:, :, :nc.k_best]
    selected = np.zeros(cand.shape, dtype=bool)
    np.put_along_axis(selected, order, True, axis=2)
    selected &= cand >= 0
    r = nc.search_radius
    mirror = _mirror_index(offsets)
    sel_pad = np.pad(selected, ((r, r), (r, r), (0, 0)), constant_values=False)
    edge = selected.copy()
    for i, (dy, dx) in enumerate(offsets):
        # q = p + o lists p under the mirrored offset
        edge[:, :, i] |= _shift(sel_pad[:, :, mirror[i]], dy, dx, r) & (cand[:, :, i] >= 0)
    weights = np.where(edge, cand, 0.0)
    return NonlocalGraph(offsets, weights, selected)


@dataclass
class NlWeights:
    neighbors: np.ndarray  # (H, W, K), zero where the graph has no edge
    self_weight: np.ndarray  # (H, W)

    def total(self):
        return self.neighbors.sum(axis=2) + self.self_weight


def _gather(arr, graph: NonlocalGraph):
    """Stack arr[p + o] over offsets; arr is (H, W) or (H, W, C)."""
    r = int(np.max(np.abs(graph.offsets)))
    pad = [(r, r), (r, r)] + [(0, 0)] * (arr.ndim - 2)
    ap = np.pad(arr, pad, mode="edge")
    return np.stack([_shift(ap, dy, dx, r) for dy, dx in graph.offsets], axis=2)


def nl_weights(src, graph: NonlocalGraph, k: KernelSpec | None, cfg: SolverConfig) -> NlWeights:
    """Normalized nonlocal low-pass coefficients for every pixel.

    The modulation |grad_w phi|^(p-2) is averaged between the two ends of an
    edge so the operator stays symmetric.
    """
    src = np.asarray(src, dtype=np.float64)
    if src.ndim == 2:
        src = src[:, :, None]
    nb = _gather(src, graph)  # (H, W, K, C)
    dist = feature_distance(k, src[:, :, None, :], nb)
    grad_sq = np.sum(graph.weights * dist, axis=2)
    g = np.power(grad_sq + cfg.eps, 0.5 * (cfg.p - 2.0))
    wt = graph.weights * 0.5 * (g[:, :, None] + _gather(g, graph))
    denom = wt.sum(axis=2) + cfg.lam
    return NlWeights(wt / denom[:, :, None], cfg.lam / denom)


def stencil_nl(src, graph: NonlocalGraph, k: KernelSpec | None, x: int, y: int,
               cfg: SolverConfig):
    """Coefficients at one pixel: a list of ((x', y'), h) plus the self weight."""
    src = src.data if isinstance(src, Image) else src
    nw = nl_weights(src, graph, k, cfg)
    pairs = []
    for i, (dy, dx) in enumerate(graph.offsets):
        if graph.weights[y, x, i] > 0:
            pairs.append(((x + int(dx), y + int(dy)), float(nw.neighbors[y, x, i])))
    return pairs, float(nw.self_weight[y, x])


def nl_step(field, anchor, weights: NlWeights, graph: NonlocalGraph):
    return np.sum(weights.neighbors * _gather(np.asarray(field, dtype=np.float64), graph), axis=2) \
        + weights.self_weight * anchor


def _nl_stepper(graph, cfg):
    def step(fld, anchor, src, k):
        nw = nl_weights(src, graph, k, cfg)
        return nl_step(fld, anchor, nw, graph), nw

    return step


def denoise_nltv(noisy: Image, k: KernelSpec | None, cfg: SolverConfig = SolverConfig(),
                 nc: NlConfig = NlConfig(), graph: NonlocalGraph | None = None,
                 monitor: Monitor | None = None,
                 diagnostics: Diagnostics | None = None) -> Image:
    """NLTV (``k=None``) or kernel NLTV on a gray or color image."""
    if graph is None:
        graph = build_graph(noisy, nc)
    if graph.shape != (noisy.height, noisy.width):
        raise ValueError("graph does not match image size")
    step = _nl_stepper(graph, cfg)
    if noisy.channels == 1:
        return Image.clamped(solve_gray(noisy, k, None, cfg, step, monitor, diagnostics))
    if noisy.channels != 3:
        raise CoupleMismatch("expected 1 or 3 channels")
    if k is None:
        out = np.empty(noisy.shape)
        for c in range(3):
            out[:, :, c:c + 1] = solve_gray(noisy.data[:, :, c:c + 1], None, None, cfg, step,
                                            monitor, diagnostics, channel=c)
        return Image.clamped(out)
    return Image.clamped(solve_color(noisy, k, cfg, step, monitor, diagnostics))
