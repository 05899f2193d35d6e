"""Command-line entry point.

Angles are exact ``p/q`` strings; complex numbers are ``re,im`` decimals.
Values starting with a minus sign must be attached with ``=``, e.g.
``--lambda=-1,0``. Exit status: 0 on success, 2 on usage errors, 1 on domain
errors (the machine-readable reason is printed on stderr as ``error: <Reason>: ...``).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .angle import Arc, RationalAngle, orbit, orbit_structure
from .dynamics import THREADS_ENV, CubicMap, Window, julia_raster
from .imageio import julia_rgb, slice_rgb, write_codes_csv, write_png, write_ppm
from .lamination import (
    Chord,
    DegenerateGap,
    InvalidMajor,
    NotInBasis,
    QuadGap,
    classify_major,
    gap_basis_members,
)
from .parameter import PHD_TOLERANCE, SliceSpec, WindowTooSmall, imr_heuristic, render_slice
from .rays import landing_estimate, trace_external_ray
from .seqlemma import (
    GapTooSmall,
    SeqSpec,
    check_contraction,
    constant_schedule,
    exponential_schedule,
    quadratic_schedule,
    simulate,
)

SCHEMA = "cubic-slice/1"


class DomainError(Exception):
    def __init__(self, reason: str, message: str):
        self.reason = reason
        super().__init__(message)


# -- flag value types -------------------------------------------------------

def _angle(text: str) -> RationalAngle:
    try:
        return RationalAngle.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _angle_pair(text: str) -> tuple[RationalAngle, RationalAngle]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two angles 'p/q,r/s', got {text!r}")
    return _angle(parts[0]), _angle(parts[1])


def _complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected a complex number 're,im', got {text!r}")


def _window(text: str) -> Window:
    try:
        return Window.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _resolution(text: str) -> tuple[int, int]:
    w, sep, h = text.lower().partition("x")
    try:
        res = (int(w), int(h)) if sep else (int(w), int(w))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if min(res) < 1:
        raise argparse.ArgumentTypeError("resolution must be at least 1x1")
    return res


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _schedule(text: str):
    kind, _, arg = text.partition(":")
    if kind in ("quadratic", "exp") and not arg:
        return kind, None
    if kind == "const":
        try:
            gap = int(arg) if arg else 1
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad constant gap in {text!r}") from None
        if gap < 1:
            raise argparse.ArgumentTypeError("constant gap must be positive")
        return kind, gap
    if kind == "list":
        try:
            return kind, tuple(int(x) for x in arg.split(",") if x)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad subscript list in {text!r}") from None
    raise argparse.ArgumentTypeError(
        f"schedule must be quadratic, exp, const:K or list:n1,n2,..., got {text!r}"
    )


# -- echo of flags ----------------------------------------------------------

def _echo(value):
    if isinstance(value, RationalAngle):
        return str(value)
    if isinstance(value, complex):
        return f"{value.real!r},{value.imag!r}"
    if isinstance(value, Window):
        c = value.center
        return f"{c.real!r},{c.imag!r},{value.width!r},{value.height!r}"
    if isinstance(value, tuple) and len(value) == 2 and all(isinstance(v, RationalAngle) for v in value):
        return f"{value[0]},{value[1]}"
    if isinstance(value, tuple) and len(value) == 2 and all(isinstance(v, int) for v in value):
        return f"{value[0]}x{value[1]}"
    if isinstance(value, tuple):
        kind, arg = value
        if arg is None:
            return kind
        if kind == "list":
            return "list:" + ",".join(map(str, arg))
        return f"{kind}:{arg}"
    if isinstance(value, float):
        return repr(value)
    return value


def flag_echo(args: argparse.Namespace) -> dict:
    skip = {"func", "command"}
    return {k: _echo(v) for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _envelope(args: argparse.Namespace) -> dict:
    return {"schema": SCHEMA, "version": __version__, "command": args.command, "flags": flag_echo(args)}


def _emit_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


# -- subcommands --------------------------------------------------------------

def cmd_orbit(args) -> int:
    pre, per = orbit_structure(args.d, args.angle)
    orb = orbit(args.d, args.angle)
    if args.json:
        payload = _envelope(args)
        payload.update(preperiod=pre, period=per, orbit=[str(a) for a in orb])
        _emit_json(payload, args.json)
    print(f"preperiod {pre}")
    print(f"period {per}")
    print("orbit " + " ".join(str(a) for a in orb))
    return 0


def _major(args):
    a, b = args.major
    if a == b:
        raise DomainError("InvalidChord", "major endpoints must be distinct")
    chord = Chord(a, b)
    hole = Arc(*args.hole)
    if {hole.start, hole.end} != {chord.a, chord.b}:
        raise DomainError("HoleMismatch", f"hole {hole} does not join the endpoints of {chord}")
    try:
        return classify_major(chord, hole)
    except InvalidMajor as exc:
        raise DomainError(exc.reason.value, str(exc)) from None


def cmd_gap(args) -> int:
    major = _major(args)
    payload = _envelope(args)
    if args.no_tau:
        payload.update(
            major=major.to_json(),
            basis=[str(a) for a in gap_basis_members(major, args.den_bound)],
            tau_table=None,
        )
    else:
        try:
            gap = QuadGap(major)
        except DegenerateGap as exc:
            raise DomainError(exc.reason, str(exc)) from None
        payload.update(gap.to_json(args.den_bound))
        if args.edges_depth:
            payload["edges"] = [[str(e.a), str(e.b)] for e in gap.edges(args.edges_depth)]
    _emit_json(payload, args.json)
    return 0


def cmd_tau(args) -> int:
    major = _major(args)
    try:
        gap = QuadGap(major)
    except DegenerateGap as exc:
        raise DomainError(exc.reason, str(exc)) from None
    for a in args.angle:
        try:
            print(f"{a} -> {gap.tau(a)}")
        except NotInBasis as exc:
            raise DomainError(exc.reason, str(exc)) from None
    return 0


def _write_image(rgb, args) -> None:
    fmt = args.format or ("png" if str(args.out).lower().endswith(".png") else "ppm")
    if fmt == "png":
        write_png(args.out, rgb)
    else:
        write_ppm(args.out, rgb)


def cmd_render_julia(args) -> int:
    m = CubicMap(args.lam, args.b)
    raster = julia_raster(m, args.window, args.res, args.max_iter, threads=args.threads)
    _write_image(julia_rgb(raster.codes, raster.max_iter), args)
    if args.csv:
        write_codes_csv(args.csv, raster.codes)
    payload = _envelope(args)
    payload.update(bounded_fraction=float(raster.bounded.mean()))
    print(json.dumps(payload))
    return 0


def cmd_render_slice(args) -> int:
    spec = SliceSpec(args.lam, args.window, args.res, args.max_iter, plane=args.plane)
    if args.layer in ("phd", "imr") and not spec.phd_enabled:
        raise DomainError("PhdUnavailable", "the phd layer needs |lambda| < 1")
    raster = render_slice(spec, threads=args.threads)
    imr = None
    if args.layer == "imr":
        try:
            imr = imr_heuristic(raster)
        except WindowTooSmall as exc:
            raise DomainError(exc.reason, str(exc)) from None
    _write_image(slice_rgb(raster, args.layer, imr), args)
    if args.csv:
        write_codes_csv(args.csv, raster.classes)
    payload = _envelope(args)
    payload.update(raster.metadata)
    payload["both_bounded_fraction"] = float(raster.both_bounded.mean())
    if raster.phd is not None:
        payload["phd_fraction"] = float(raster.phd.mean())
    if imr is not None:
        payload["imr_fraction"] = float(imr.mean())
    print(json.dumps(payload))
    return 0


def cmd_trace_ray(args) -> int:
    m = CubicMap(args.lam, args.b)
    try:
        trace = trace_external_ray(m, args.angle, args.t_start, args.t_end, args.steps)
    except ValueError as exc:
        raise DomainError("BadPotentialRange", str(exc)) from None
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["step", "potential", "re", "im", "converged_flag"])
        for k, t, x, y in trace.rows():
            writer.writerow([k, repr(t), repr(x), repr(y), 1])
        if trace.error is not None:
            writer.writerow([trace.error.step, "nan", "nan", "nan", 0])
    finally:
        if args.out:
            out.close()
    if len(trace) >= 2:
        point, ok = landing_estimate(trace, args.tol)
        print(f"landing {point.real!r},{point.imag!r} converged={ok}", file=sys.stderr)
    if trace.error is not None:
        print(f"warning: {trace.error}", file=sys.stderr)
    return 0


def cmd_check_seq(args) -> int:
    kind, arg = args.bad_schedule
    if kind == "quadratic":
        bad = quadratic_schedule(args.n_max)
    elif kind == "exp":
        bad = exponential_schedule(args.n_max)
    elif kind == "const":
        bad = constant_schedule(args.n_max, arg)
    else:
        bad = arg
    try:
        spec = SeqSpec(args.q, args.b, args.s0, bad, args.n_max)
    except ValueError as exc:
        raise DomainError("InvalidSequence", str(exc)) from None
    try:
        report = check_contraction(spec, args.eps, skip_small_gaps=not args.strict)
    except GapTooSmall as exc:
        raise DomainError(exc.reason, str(exc)) from None
    s = simulate(spec)
    at_bad = [s[n] for n in spec.bad_in_horizon]
    payload = _envelope(args)
    payload.update(report.to_json())
    payload["s_final"] = s[-1]
    payload["s_at_last_bad"] = at_bad[-1] if at_bad else None
    if args.json:
        _emit_json(payload, args.json)
    print(f"N = {report.N}")
    print(f"checked pairs = {len(report.pairs)}, skipped (gap < N) = {len(report.skipped)}")
    print(f"contraction {'passed' if report.passed else 'FAILED'}")
    if at_bad:
        print(f"s at last bad subscript {spec.bad_in_horizon[-1]} = {at_bad[-1]!r}")
    return 0 if report.passed else 1


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubicslice",
        description="Laminations, parameter slices and rays of cubic polynomials lam*z + b*z^2 + z^3.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="preperiod, period and orbit of p/q under doubling or tripling")
    p.add_argument("--d", type=int, choices=(2, 3), required=True, help="degree of the angle map")
    p.add_argument("--angle", type=_angle, required=True, help="angle p/q")
    p.add_argument("--json", help="also write the result as JSON to this path")
    p.set_defaults(func=cmd_orbit)

    def major_flags(p):
        p.add_argument("--major", type=_angle_pair, required=True, help="major endpoints p/q,r/s")
        p.add_argument(
            "--hole", type=_angle_pair, required=True,
            help="major hole start,end (positively oriented); must be given explicitly",
        )

    p = sub.add_parser("gap", help="basis and tau table of the invariant quadratic gap of a major")
    major_flags(p)
    p.add_argument("--den-bound", type=_positive_int, default=27, help="largest denominator listed (default 27)")
    p.add_argument("--edges-depth", type=int, default=0, help="also list pullback edges to this depth")
    p.add_argument("--no-tau", action="store_true", help="list the orbit-avoidance basis only")
    p.add_argument("--json", help="output path (default: stdout)")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("tau", help="evaluate tau at basis angles")
    major_flags(p)
    p.add_argument("--angle", type=_angle, action="append", required=True, help="basis angle (repeatable)")
    p.set_defaults(func=cmd_tau)

    def image_flags(p, iters):
        p.add_argument("--lambda", dest="lam", type=_complex, required=True, help="multiplier at 0, re,im")
        p.add_argument("--window", type=_window, default=Window.square(4.0), help="cx,cy,w,h (default 0,0,8,8)")
        p.add_argument("--res", type=_resolution, default=(512, 512), help="WxH pixels (default 512x512)")
        p.add_argument("--max-iter", type=_positive_int, default=iters, help=f"iteration cap (default {iters})")
        p.add_argument("--out", required=True, help="image path (.ppm, or .png with Pillow)")
        p.add_argument("--format", choices=("ppm", "png"), help="override the format implied by --out")
        p.add_argument("--csv", help="also write integer classification codes as CSV")
        p.add_argument(
            "--threads", type=_positive_int,
            help=f"worker threads (default ${THREADS_ENV} or the CPU count)",
        )

    p = sub.add_parser("render-julia", help="escape-time image of the filled Julia set")
    image_flags(p, 1000)
    p.add_argument("--b", type=_complex, default=0j, help="quadratic coefficient re,im")
    p.set_defaults(func=cmd_render_julia)

    p = sub.add_parser(
        "render-slice",
        help="parameter slice at fixed lambda in the a=b^2 plane",
        description=(
            "Classify both critical orbits for every parameter cell. With |lambda| < 1 the phd "
            f"layer marks cells whose critical orbits both reach |z| < {PHD_TOLERANCE:g} within "
            "--max-iter; the imr layer marks the unbounded complementary component of that region."
        ),
    )
    image_flags(p, 1000)
    p.add_argument("--layer", choices=("escape", "phd", "imr"), default="escape")
    p.add_argument("--plane", choices=("a", "b"), default="a", help="parameter plane (b is for debugging)")
    p.set_defaults(func=cmd_render_slice)

    p = sub.add_parser("trace-ray", help="trace an external ray, CSV of samples")
    p.add_argument("--lambda", dest="lam", type=_complex, default=0j)
    p.add_argument("--b", type=_complex, default=0j)
    p.add_argument("--angle", type=_angle, required=True)
    p.add_argument("--t-start", type=float, help="starting potential (default log R + 1)")
    p.add_argument("--t-end", type=float, default=1e-3)
    p.add_argument("--steps", type=_positive_int, default=200)
    p.add_argument("--tol", type=float, default=1e-6, help="landing convergence tolerance")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_trace_ray)

    p = sub.add_parser("check-seq", help="simulate the worst-case sequence and check the contraction step")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--s0", type=float, default=1.0)
    p.add_argument("--bad-schedule", type=_schedule, default=("quadratic", None),
                   help="quadratic | exp | const:K | list:n1,n2,...")
    p.add_argument("--n-max", type=int, default=400)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--strict", action="store_true", help="fail on any gap shorter than N instead of skipping it")
    p.add_argument("--json", help="also write the report as JSON to this path")
    p.set_defaults(func=cmd_check_seq)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        detail = str(exc)
        prefix = f"{exc.reason}: "
        if detail.startswith(prefix):
            detail = detail[len(prefix):]
        print(f"error: {exc.reason}: {detail}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    run()
