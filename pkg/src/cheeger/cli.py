"""Command-line surface: solve, necks, koch, render, oracle.

JSON goes to stdout, diagnostics to stderr.  Exit codes: 0 success, 1 input
or configuration error, 2 neck detected, 3 internal numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    CapExceeded,
    CheegerError,
    DegenerateDomain,
    DisconnectedDomain,
    NeckDetected,
    NonConvexInput,
    NoSignChange,
    ResolutionTooSmall,
)
from .geometry import JordanPolygon, is_convex, polygon_from_json
from .solver import CheegerConfig, bracket, neck_check, solve

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NECK = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for neck detection.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _read_polygon(path: str, trusted: bool) -> JordanPolygon:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if trusted:
        return JordanPolygon(obj["vertices"], trusted=True)
    return polygon_from_json(obj)


def _config(args) -> CheegerConfig:
    kwargs = {}
    if getattr(args, "resolution", None):
        kwargs["base_resolution"] = args.resolution
    if getattr(args, "tol", None):
        kwargs["tolerance_r"] = args.tol
    if getattr(args, "unsafe_skip_neck_check", False):
        kwargs["skip_neck_check"] = True
    return CheegerConfig(**kwargs)


def cmd_solve(args) -> int:
    p = _read_polygon(args.input, args.trusted_input)
    report = solve(p, _config(args))
    print(report.to_json())
    return EXIT_OK


def cmd_necks(args) -> int:
    p = _read_polygon(args.input, args.trusted_input)
    cfg = _config(args)
    b = bracket(p, cfg)
    result = neck_check(p, b, cfg)
    print(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK if result.verdict == "pass" else EXIT_NECK


def cmd_koch(args) -> int:
    from .koch import solve_koch

    if not 1 <= args.n <= 12:
        print(f"error: construction step must be in [1, 12], got {args.n}", file=sys.stderr)
        return EXIT_INPUT
    if args.table:
        solutions = [solve_koch(k) for k in range(1, args.n + 1)]
        print("n,x,r,h,tail_bound,h_lo,h_hi")
        for s in solutions:
            tail = f"{s.tail_bound:.6e}" if s.tail_bound is not None else ""
            lo = f"{s.h_interval[0]:.12f}" if s.h_interval else ""
            hi = f"{s.h_interval[1]:.12f}" if s.h_interval else ""
            print(f"{s.n},{s.x:.12f},{s.r:.12f},{s.h:.12f},{tail},{lo},{hi}")
        if args.fig:
            from .figures import koch_convergence_figure

            koch_convergence_figure(solutions, args.fig)
            print(f"figure written to {args.fig}", file=sys.stderr)
    else:
        print(json.dumps(solve_koch(args.n).to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_render(args) -> int:
    from .cheeger_set import dilate_convex, dilate_grid, render_svg
    from .retract import build_field, inner_retract_convex

    p = _read_polygon(args.input, args.trusted_input)
    cfg = _config(args)
    report = solve(p, cfg)
    if is_convex(p):
        retract = inner_retract_convex(p, report.r)
        cheeger = dilate_convex(retract, report.r)
    else:
        field = build_field(p, cfg.base_resolution, threads=cfg.threads)
        geom = dilate_grid(field, report.r)
        retract = geom.retract_boundary
        cheeger = geom
    render_svg(p, retract, cheeger, args.out, h=report.h, r=report.r)
    print(f"SVG written to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .tv_oracle import oracle_h

    p = _read_polygon(args.input, args.trusted_input)
    h, iters = oracle_h(p, args.grid)
    print(json.dumps({"h_approx": h, "iterations": iters, "resolution": args.grid},
                     indent=2, sort_keys=True))
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="cheeger", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, resolution=True):
        sp.add_argument("--input", required=True, help="polygon JSON file")
        sp.add_argument("--trusted-input", action="store_true",
                        help="skip the O(E^2) boundary simplicity validation")
        if resolution:
            sp.add_argument("--resolution", type=int, default=None,
                            help="base grid resolution (default 512)")

    sp = sub.add_parser("solve", help="solve the inner Cheeger equation")
    common(sp)
    sp.add_argument("--tol", type=float, default=None, help="radius tolerance")
    sp.add_argument("--unsafe-skip-neck-check", action="store_true")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("necks", help="verify inner parallel sets stay connected")
    common(sp)
    sp.set_defaults(func=cmd_necks)

    sp = sub.add_parser("koch", help="analytic snowflake pipeline")
    sp.add_argument("--n", type=int, required=True, help="construction step (1..12)")
    sp.add_argument("--table", action="store_true", help="CSV table for steps 1..n")
    sp.add_argument("--fig", default=None, help="write a convergence figure (with --table)")
    sp.set_defaults(func=cmd_koch)

    sp = sub.add_parser("render", help="solve and render domain/retract/Cheeger set")
    common(sp)
    sp.add_argument("--out", required=True, help="output SVG path")
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--unsafe-skip-neck-check", action="store_true")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("oracle", help="independent ratio-cut estimate")
    common(sp, resolution=False)
    sp.add_argument("--grid", type=int, required=True, help="oracle grid resolution (>= 64)")
    sp.set_defaults(func=cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NeckDetected as exc:
        print(f"neck detected: {exc}", file=sys.stderr)
        return EXIT_NECK
    except (NoSignChange, DegenerateDomain) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ResolutionTooSmall, CapExceeded, NonConvexInput, DisconnectedDomain) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CheegerError as exc:  # pragma: no cover - catch-all for new subtypes
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
