"""Command-line entry point.

Exit codes: 0 success, 1 runtime error, 2 configuration error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench, files
from .gtv import Diagnostics, SolverConfig
from .kernels import Gaussian
from .metrics import area_ratio, external_scores, format_db, psnr
from .methods import METHODS, kernel_space_image, parse_method, pick_by_scores, run
from .nltv import NlConfig, build_graph
from .noise import NoiseSpec, add_multiplicative_gaussian

NOISE_NOTE = (
    "Noise model: multiplicative Gaussian, I' = clamp(I * (1 + n), 0, 1) with "
    "n ~ N(0, (sigma/255)^2) per sample; intensities are normalized to [0, 1]."
)


class ConfigError(Exception):
    pass


def _grid(text: str):
    """'a:step:b' (inclusive) or a comma list."""
    try:
        if ":" in text:
            lo, step, hi = (float(t) for t in text.split(":"))
            n = int(round((hi - lo) / step)) + 1
            return [round(lo + i * step, 10) for i in range(n)]
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None


def _add_solver_flags(p):
    g = p.add_argument_group("solver")
    g.add_argument("--lambda", dest="lam", type=float, default=10.0, help="fidelity weight (default 10)")
    g.add_argument("--p", type=float, default=1.2, help="gradient exponent (default 1.2)")
    g.add_argument("--iters", type=int, default=50, help="iteration budget (default 50)")
    g.add_argument("--eps", type=float, default=1e-6, help="gradient regularizer (default 1e-6)")
    g.add_argument("--stop-tol", type=float, default=0.0,
                   help="stop when the relative field change drops below this (0 = full budget)")
    g.add_argument("--simultaneous", action="store_true",
                   help="color: update all channels from the previous iterate instead of R->G->B")
    n = p.add_argument_group("nonlocal")
    n.add_argument("--h-sim", type=float, default=0.1, help="patch similarity bandwidth (default 0.1)")
    n.add_argument("--search-radius", type=int, default=2, help="search window radius (default 2 = 5x5)")
    n.add_argument("--k-best", type=int, default=10, help="neighbors kept per pixel (default 10)")


def _add_kernel_flags(p):
    g = p.add_argument_group("kernel")
    g.add_argument("--method", choices=METHODS, default="gtv")
    g.add_argument("--delta", type=float, help="Gaussian kernel width (gk-* methods)")
    g.add_argument("--degree", type=float, help="polynomial degree (pk-* methods)")
    g.add_argument("--couple-level", type=float,
                   help="constant couple for gray images (default 0 Gaussian, 1 polynomial)")


def _solver_config(args) -> SolverConfig:
    try:
        return SolverConfig(p=args.p, lam=args.lam, max_iters=args.iters, eps=args.eps,
                            stop_tol=args.stop_tol, sequential=not args.simultaneous)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _nl_config(args) -> NlConfig:
    try:
        return NlConfig(args.search_radius, args.k_best, args.h_sim)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _method_param(args):
    m = parse_method(args.method)
    if m.family is None:
        return m, None
    param = args.delta if m.family is Gaussian else args.degree
    if param is None:
        flag = "--delta" if m.family is Gaussian else "--degree"
        raise ConfigError(f"method {m.name} requires {flag}")
    try:
        m.kernel(param)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return m, param


def cmd_denoise(args) -> int:
    m, param = _method_param(args)
    cfg, nc = _solver_config(args), _nl_config(args)
    noisy = files.load(args.input)
    diag = Diagnostics() if args.diagnostics else None
    graph = None
    if m.solver == "nltv":
        graph = build_graph(noisy, nc)
        if args.graph_stats:
            graph.stats_csv(args.graph_stats)
    try:
        out = run(noisy, m, param, cfg, nc, couple_level=args.couple_level, graph=graph,
                  diagnostics=diag)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    files.save(args.output, out)
    if diag is not None:
        diag.to_csv(args.diagnostics)
    if args.ref:
        print(f"psnr_db={format_db(psnr(files.load(args.ref), out))}")
    return 0


def _enhance_one(img, m, param, args, cfg, nc):
    k = m.kernel(param)
    if args.iters > 0:
        img = run(img, m, param, cfg, nc, couple_level=args.couple_level)
    return kernel_space_image(img, k, args.couple_level, args.normalize)


def cmd_enhance(args) -> int:
    m = parse_method(args.method)
    img = files.load(args.input)
    if args.iters < 0:
        raise ConfigError("--iters must be >= 0")
    # zero iterations: show the input itself in kernel space
    cfg = _solver_config(argparse.Namespace(**{**vars(args), "iters": max(args.iters, 1)}))
    nc = _nl_config(args)
    if args.grid is not None or args.scores:
        if m.family is None:
            raise ConfigError("parameter sweeps need a kernel method (gk-* or pk-*)")
        grid = args.grid if args.grid is not None else list(m.grid)
        stem = Path(args.input).stem
        ids = {p: (f"{stem}_{p:g}", f"{p:g}") for p in grid}
        if args.scores:
            try:
                scores = external_scores(args.scores)
                param = pick_by_scores(ids, scores)
            except (ValueError, KeyError) as exc:
                raise ConfigError(str(exc)) from None
            print(f"selected_param={param:g} score={min(scores[i] for i in ids[param] if i in scores):g}")
            files.save(args.output, _enhance_one(img, m, param, args, cfg, nc))
            return 0
        out_dir = Path(args.output)
        out_dir.mkdir(parents=True, exist_ok=True)
        suffix = ".pgm" if img.channels == 1 else ".ppm"
        for p in grid:
            path = out_dir / f"{ids[p][0]}{suffix}"
            files.save(path, _enhance_one(img, m, p, args, cfg, nc))
            print(f"{ids[p][0]},{path}")
        return 0
    _, param = _method_param(args)
    files.save(args.output, _enhance_one(img, m, param, args, cfg, nc))
    return 0


def cmd_noise(args) -> int:
    img = files.load(args.input)
    try:
        ns = NoiseSpec(args.sigma, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    files.save(args.output, add_multiplicative_gaussian(img, ns))
    return 0


def cmd_sweep(args) -> int:
    m = parse_method(args.method)
    if m.family is None:
        raise ConfigError("sweep needs a kernel method (gk-* or pk-*)")
    clean = files.load(args.clean)
    if args.noisy:
        noisy = files.load(args.noisy)
    else:
        noisy = add_multiplicative_gaussian(clean, NoiseSpec(args.sigma, args.seed))
    cfg, nc = _solver_config(args), _nl_config(args)
    grid = args.grid if args.grid is not None else list(m.grid)
    graph = build_graph(noisy, nc) if m.solver == "nltv" else None
    lines = ["param,ratio,psnr_db"]
    for p in grid:
        rep = area_ratio(noisy, m.kernel(p))
        out = run(noisy, m, p, cfg, nc, graph=graph)
        lines.append(f"{p:g},{rep.ratio:.6f},{format_db(psnr(clean, out))}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args) -> int:
    methods = tuple(args.methods.split(",")) if args.methods else METHODS
    for name in methods:
        try:
            parse_method(name)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    lambdas = {}
    if args.lambdas:
        vals = [float(v) for v in args.lambdas.split(",")]
        if len(vals) != len(args.sigmas):
            raise ConfigError("--lambdas needs one value per sigma")
        lambdas = dict(zip(args.sigmas, vals))
    cfg = bench.BenchConfig(sigmas=tuple(args.sigmas), methods=methods, seed=args.seed,
                            iters=args.iters, p=args.p, eps=args.eps, h_sim=args.h_sim,
                            lambdas=lambdas)
    rows = bench.run_bench(args.images, cfg, workers=args.workers)
    text = bench.format_csv(rows, timing=args.timing)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kerneltv", description=__doc__.splitlines()[0],
                                 epilog=NOISE_NOTE)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="denoise an image", epilog=NOISE_NOTE)
    p.add_argument("input")
    p.add_argument("output")
    _add_kernel_flags(p)
    _add_solver_flags(p)
    p.add_argument("--ref", help="clean reference image; prints PSNR")
    p.add_argument("--diagnostics", help="write per-iteration CSV here")
    p.add_argument("--graph-stats", help="nltv methods: write graph statistics CSV here")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("enhance", help="export the image in kernel function space", epilog=NOISE_NOTE)
    p.add_argument("input")
    p.add_argument("output", help="output image, or a directory when sweeping without --scores")
    _add_kernel_flags(p)
    _add_solver_flags(p)
    p.add_argument("--grid", type=_grid, help="parameter grid 'lo:step:hi' or 'a,b,c'")
    p.add_argument("--scores", help="id,score CSV from an external quality tool; lowest wins")
    p.add_argument("--normalize", action="store_true", help="min-max scale the field")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("noise", help="add multiplicative Gaussian noise", epilog=NOISE_NOTE)
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--sigma", type=float, default=20.0, help="std on the 0-255 scale (default 20)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("sweep", help="area ratio and PSNR over a kernel parameter grid",
                       epilog=NOISE_NOTE)
    p.add_argument("clean")
    p.add_argument("--noisy", help="pre-noised input (otherwise noise is synthesized)")
    p.add_argument("--sigma", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=[m for m in METHODS if "-" in m], default="gk-gtv")
    p.add_argument("--grid", type=_grid, help="default 0.1:0.1:1.0 (Gaussian) or 1.1:0.1:2.0")
    p.add_argument("--out", help="CSV path (default stdout)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="PSNR table over images, noise levels and methods",
                       epilog=NOISE_NOTE + " Lambda defaults: 10 for sigma <= 50, else 1; "
                       "h-sim is scaled by sigma/20.")
    p.add_argument("images", help="directory of clean .pgm/.ppm/.png images")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--sigmas", type=_grid, default=[20.0, 80.0])
    p.add_argument("--lambdas", help="comma list, one per sigma")
    p.add_argument("--methods", help=f"comma list (default all: {','.join(METHODS)})")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--p", type=float, default=1.2)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--h-sim", type=float, default=0.1, help="patch bandwidth at sigma=20")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill the wall_ms column (breaks byte-identical reruns)")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
