"""Command-line front end.

Exit codes: 0 ok, 1 usage or I/O error, 2 degenerate configuration (turning
point, branch crossing), 3 identity or tolerance failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .battery import failure_json, run_battery
from .dynamics import OdeSettings, compare_closed_form
from .errors import BranchCrossingError, ConvergenceError, GnchError, TurningPointError
from .moments import PRESETS, MomentSystem
from .numeric import check_mode, format_scalar
from .peakon import PeakonState, eval_u, peakon_state
from .spectral import drift_fit

EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE, EXIT_FAIL = 0, 1, 2, 3

DEFAULT_GRID = "-6:6:1201"
FIGURES = {
    1: ((1,), (0,), ("-1/2", "0", "1/2", "1")),
    2: ((1, -1), (0, 0), ("-1/2", "-1/8", "1/8", "1/2")),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _list(text: str) -> list[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad number list {text!r}: {exc}") from None


def _number(text: str) -> Fraction:
    vals = _list(text)
    if len(vals) != 1:
        raise UsageError(f"expected one number, got {text!r}")
    return vals[0]


def parse_grid(spec: str, mode: str = "exact") -> list:
    """``a:b:n`` -> n equally spaced points from a to b inclusive (``a`` alone when n = 1).

    A bare number is a one-point grid.
    """
    parts = spec.split(":")
    if len(parts) == 1:
        parts = [spec, spec, "1"]
    if len(parts) != 3:
        raise UsageError(f"grid must look like start:stop:count, got {spec!r}")
    a, b = _number(parts[0]), _number(parts[1])
    try:
        n = int(parts[2])
    except ValueError:
        raise UsageError(f"grid count must be an integer, got {parts[2]!r}") from None
    if n < 1:
        raise UsageError("grid count must be at least 1")
    pts = [a] if n == 1 else [a + (b - a) * i / (n - 1) for i in range(n)]
    return pts if mode == "exact" else [float(p) for p in pts]


def _window(spec: str) -> tuple[Fraction, Fraction]:
    parts = spec.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"window must look like t0:t1, got {spec!r}")
    return _number(parts[0]), _number(parts[1])


def build_system(args) -> MomentSystem:
    if args.system:
        text = args.system
        if not text.lstrip().startswith("{"):
            try:
                text = Path(text).read_text()
            except OSError as exc:
                raise UsageError(f"cannot read system file: {exc}") from None
        try:
            return MomentSystem.from_json(text)
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"bad system JSON: {exc}") from None
    if args.preset and (args.r is not None or args.s is not None):
        raise UsageError("give either --preset or --r/--s, not both")
    if args.preset is None and (args.r is None or args.s is None):
        raise UsageError("need --preset, --r and --s, or --system")
    if args.lam is None:
        raise UsageError("need --lambda")
    lams = _list(args.lam)
    a0s = _list(args.a0) if args.a0 is not None else [Fraction(0)] * len(lams)
    if len(a0s) != len(lams):
        raise UsageError("--lambda and --a0 lists differ in length")
    if args.preset:
        return MomentSystem.from_preset(args.preset, lams, a0s)
    return MomentSystem.build(_number(args.r), _number(args.s), lams, a0s)


def _check_exact(sys_: MomentSystem, mode: str) -> None:
    if mode == "exact" and sys_.params.r != 0:
        sys_.params.polynomial_offset()


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", newline="", encoding="utf-8"), True
    except OSError as exc:
        raise UsageError(f"cannot open {path}: {exc}") from None


def _emit(text: str, path: str | None) -> None:
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _fmt(v) -> str:
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    return format_scalar(v)


def states_csv(states: list[PeakonState], n: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"x{i + 1}" for i in range(n)] + [f"m{i + 1}" for i in range(n)] + ["valid"])
    for st in states:
        if st.valid:
            vals = [_fmt(v) for v in (*st.x, *st.m)]
        else:
            vals = ["nan"] * (2 * n)
        w.writerow([_fmt(st.t)] + vals + ["1" if st.valid else "0"])
    return buf.getvalue()


def profile_rows(state: PeakonState, xs: list[float], merge_peaks: bool) -> list[tuple[float, float]]:
    pts = sorted(set(xs) | set(float(v) for v in state.x)) if merge_peaks else list(xs)
    return [(x, eval_u(state, x)) for x in pts]


def profile_csv(frames: list[tuple[object, list[tuple[float, float]]]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "u"])
    for t, rows in frames:
        for x, u in rows:
            w.writerow([_fmt(t), repr(float(x)), repr(float(u))])
    return buf.getvalue()


def cmd_eval(args) -> int:
    if args.fig is not None:
        return cmd_figure(args)
    mode = check_mode(args.mode or "float")
    sys_ = build_system(args)
    _check_exact(sys_, mode)
    if not args.times:
        raise UsageError("eval needs --times")
    times = parse_grid(args.times, mode)
    states = [peakon_state(sys_, t, mode) for t in times]
    if args.format == "json":
        text = json.dumps([st.to_dict() for st in states]) + "\n"
    else:
        text = states_csv(states, sys_.n)
    if args.grid:
        xs = parse_grid(args.grid, "float")
        prof = profile_csv([(st.t, profile_rows(st, xs, False)) for st in states if st.valid])
        target = args.profile_out
        if target is None:
            if args.out in (None, "-"):
                raise UsageError("with --grid, give --out or --profile-out so the two CSVs do not mix")
            target = "-"
        _emit(prof, target)
    _emit(text, args.out)
    return EXIT_OK if all(st.valid for st in states) else EXIT_DEGENERATE


def figure_frames(fig: int, grid: str = DEFAULT_GRID):
    """Profile frames for figure ``fig``: list of (t, state, rows)."""
    if fig not in FIGURES:
        raise UsageError(f"unknown figure {fig}; expected 1 or 2")
    lams, a0s, ts = FIGURES[fig]
    sys_ = MomentSystem.from_preset("mixed", lams, a0s)
    xs = parse_grid(grid, "float")
    out = []
    for t in (Fraction(v) for v in ts):
        st = peakon_state(sys_, t, "exact")
        out.append((t, st, profile_rows(st, xs, True) if st.valid else []))
    return out


def cmd_figure(args) -> int:
    if args.fig is None:
        raise UsageError("figure needs --fig 1 or --fig 2")
    frames = figure_frames(args.fig, args.grid or DEFAULT_GRID)
    _emit(profile_csv([(t, rows) for t, _, rows in frames]), args.out)
    return EXIT_OK if all(st.valid for _, st, _ in frames) else EXIT_DEGENERATE


def cmd_identities(args, perturb: Callable | None = None) -> int:
    if (args.mode or "exact") != "exact":
        raise UsageError("identities run in exact mode only")
    res = run_battery(args.trials, args.max_n, args.seed, perturb=perturb)
    _emit("\n".join(res.lines()) + "\n", args.out)
    if not res.ok:
        print(failure_json(res), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_ode(args) -> int:
    sys_ = build_system(args)
    if not args.times:
        raise UsageError("ode needs --times t0:t1")
    t0, t1 = _window(args.times)
    report_box: list = []
    rep = compare_closed_form(sys_, OdeSettings(float(t0), float(t1), args.steps), report_box)
    _emit(rep.to_json() + "\n", args.out)
    if args.trajectory:
        _emit(report_box[0].to_csv(), args.trajectory)
    tol = 1e-7 if args.tol is None else args.tol
    return EXIT_OK if rep.max_dev <= tol else EXIT_FAIL


def cmd_spectrum(args) -> int:
    mode = check_mode(args.mode or "float")
    sys_ = build_system(args)
    _check_exact(sys_, mode)
    if not args.times:
        raise UsageError("spectrum needs --times t0:t1:n")
    rep = drift_fit(sys_, parse_grid(args.times, mode), mode)
    _emit(rep.to_json() + "\n", args.out)
    tol = 1e-6 if args.tol is None else args.tol
    return EXIT_OK if all(abs(b.slope - rep.expected_slope) <= tol for b in rep.branches) else EXIT_FAIL


def make_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--r")
    common.add_argument("--s")
    common.add_argument("--system", help="MomentSystem JSON, inline or a file path")
    common.add_argument("--lambda", dest="lam", help="comma list of spectral values")
    common.add_argument("--a0", help="comma list of initial a_j(0)")
    common.add_argument("--times", help="t0:t1:n")
    common.add_argument("--grid", help="x0:x1:n")
    common.add_argument("--mode", choices=["exact", "float"], help="default float (exact for identities)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", default="csv", choices=["csv", "json"])
    common.add_argument("--fig", type=int, choices=[1, 2])
    common.add_argument("--steps", type=int, default=4096)
    common.add_argument("--tol", type=float)
    common.add_argument("--profile-out", dest="profile_out")

    p = _Parser(prog="gnch", description="Multipeakon closed forms, identity checks and spectral drift.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("eval", parents=[common], help="peak positions/amplitudes over a time grid")
    sub.add_parser("figure", parents=[common], help="profile data for the two reference figures")
    ident = sub.add_parser("identities", parents=[common], help="randomized exact identity battery")
    ident.add_argument("--trials", type=int, default=200)
    ident.add_argument("--max-n", dest="max_n", type=int, default=5)
    ode = sub.add_parser("ode", parents=[common], help="RK4 against the closed form")
    ode.add_argument("--trajectory", help="write the integrated trajectory CSV here")
    sub.add_parser("spectrum", parents=[common], help="eigenvalue drift fit")
    return p


COMMANDS = {"eval": cmd_eval, "figure": cmd_figure, "identities": cmd_identities,
            "ode": cmd_ode, "spectrum": cmd_spectrum}


def _glue_negative_values(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Turn ``--times -1:1:5`` into ``--times=-1:1:5`` so argparse does not read the value as a flag."""
    flags = {opt for sp in parser._subparsers._group_actions[0].choices.values()
             for a in sp._actions for opt in a.option_strings if a.nargs is None and a.const is None
             and not isinstance(a, (argparse._StoreTrueAction, argparse._HelpAction))}
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in flags and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1] not in flags:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: list[str] | None = None, *, perturb: Callable | None = None) -> int:
    try:
        parser = make_parser()
        argv = list(sys.argv[1:] if argv is None else argv)
        args = parser.parse_args(_glue_negative_values(parser, argv))
        if args.command == "identities":
            return cmd_identities(args, perturb)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"gnch: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TurningPointError, BranchCrossingError, ConvergenceError) as exc:
        print(f"gnch: degenerate configuration: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (GnchError, ValueError, OSError) as exc:
        print(f"gnch: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
