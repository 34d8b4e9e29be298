"""Command line: ``hyplane sample|render|stats``.

Exit status: 0 on success, 1 on usage errors, 2 when a statistical check fails.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import stats
from .geom import DISK, HALFPLANE
from .io import TilingFormatError, dumps, read_tiling
from .ngon import sample_disk_quadrangulation
from .render import render_svg
from .rng import RandomStream
from .tiling import farey_ref, sample_disk_triangulation, thin

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2
THIN_STREAM = 7  # stream path (seed, 7) drives --thin

STATS_DEFAULT_N = {"mobius": 20_000, "reversibility": 10_000, "target": 10_000,
                   "markov": 10_000, "coverage": 50, "dimension": 20, "duality": 10_000}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _positive(name):
    def parse(s):
        try:
            v = float(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {s!r}") from None
        if not (v > 0 and math.isfinite(v)):
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {s}")
        return v
    return parse


def _probability(s):
    v = float(s)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError(f"--thin must lie in [0, 1], got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyplane", description="Random ideal tilings of the hyperbolic plane.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", help="sample a tiling and write it as JSON")
    s.add_argument("kind", choices=["tri", "quad", "farey"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--resolution", type=_positive("--resolution"), default=1e-3)
    s.add_argument("--jump-cutoff", type=_positive("--jump-cutoff"), default=None)
    s.add_argument("--out", default="-", help="output path ('-' for stdout)")
    s.add_argument("--thin", type=_probability, default=None, metavar="P")

    r = sub.add_parser("render", help="draw a tiling document as SVG")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--svg", default="-")
    r.add_argument("--width", type=int, default=800)
    r.add_argument("--model", choices=[DISK, HALFPLANE], default=DISK)

    t = sub.add_parser("stats", help="run a statistical or geometric check")
    t.add_argument("mode", choices=list(STATS_DEFAULT_N))
    t.add_argument("--n", type=int, default=None)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--json", action="store_true", help="emit JSON lines")
    t.add_argument("--sampler", choices=["tri", "quad", "farey"], default="tri",
                   help="tiling used by the mobius mode")
    return p


def _write(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _sample(args) -> int:
    if args.kind == "tri":
        t = sample_disk_triangulation(args.seed, args.resolution, args.jump_cutoff)
    elif args.kind == "quad":
        t = sample_disk_quadrangulation(args.seed, args.resolution, args.jump_cutoff)
    else:
        t = farey_ref(resolution=args.resolution, seed=args.seed)
    if args.thin is not None:
        t = thin(t, args.thin, RandomStream(args.seed).split(THIN_STREAM))
    _write(dumps(t), args.out)
    return EXIT_OK


def _render(args) -> int:
    if args.width <= 0:
        raise UsageError("--width must be positive")
    t = read_tiling(args.inp)
    _write(render_svg(t, args.width, args.model), args.svg)
    return EXIT_OK


def _reports(args):
    n = args.n if args.n is not None else STATS_DEFAULT_N[args.mode]
    if n <= 0:
        raise UsageError("--n must be positive")
    if not 0 < args.alpha < 1:
        raise UsageError("--alpha must lie in (0, 1)")
    if args.mode in stats.MODES:
        if n < stats.MIN_N:
            raise UsageError(f"--n must be at least {stats.MIN_N} for {args.mode}")
        opts = {"sampler": args.sampler} if args.mode == "mobius" else {}
        return [stats.invariance_suite(args.mode, n, args.seed, args.alpha, **opts)]
    if args.mode == "coverage":
        return stats.coverage_reports(n, args.seed) + [stats.dyadic_report(n, args.seed)]
    if args.mode == "dimension":
        return stats.dimension_reports(n, args.seed)
    return [stats.duality_report(n, args.seed)]


def _stats(args) -> int:
    reports = _reports(args)
    for rep in reports:
        if args.json:
            print(rep.to_json())
        else:
            pv = "" if rep.p_value is None else f" p={rep.p_value:.4g}"
            tol = "" if rep.tolerance is None else f" tol={rep.tolerance:g}"
            verdict = "PASS" if rep.passed else "FAIL"
            print(f"{rep.name}: {verdict} statistic={rep.statistic:.6g}{pv}{tol}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return {"sample": _sample, "render": _render, "stats": _stats}[args.command](args)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except (TilingFormatError, OSError) as exc:
        print(f"hyplane: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())
