"""Command-line interface: ``lipz <command> ...``.

Exit codes: 0 success, 1 a verification found violations (or an analyzed
map does not conform), 2 bad arguments or input files.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import re
import sys
from fractions import Fraction

from . import __version__
from .enumerator import EnumSpec, default_workers, enumerate_maps, naive_count, verify_theorem_over
from .grid2d import (
    GRID_CSV_HEADER,
    apply,
    grid_folner_ratio,
    grid_from_json,
    grid_lipschitz_window,
    isometry_gap,
)
from .rigidity import FOLNER_CSV_HEADER, decompose, decompose_window, folner_curve, ray_profile
from .zline import EventuallyAffineMap, InvalidMap, WindowSample, parse_rational


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        q = parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected an integer or p/q, got {text!r}")
    return q


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    return vals


def _range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}")
    a, b = int(m.group(1)), int(m.group(2))
    if b <= a:
        raise argparse.ArgumentTypeError(f"window {text!r} needs at least 2 points")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lipz", description="Exact analysis of bi-Lipschitz bijections of Z and Z^2.")
    p.add_argument("--version", action="version", version=f"lipz {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--meta", action="store_true", help="include run metadata in the output")
        return sp

    sp = add("analyze", help="rigidity decomposition of a map or window")
    sp.add_argument("file")
    sp.add_argument("--window", type=_range, metavar="A..B",
                    help="analyze only f(A..B); use --window=-3..5 for negative A")

    sp = add("ray", help="shape of the image of the ray (-inf, x]")
    sp.add_argument("file")
    sp.add_argument("--x", type=int, required=True)

    for name in ("enumerate", "verify"):
        sp = add(name, help="enumerate bi-Lipschitz permutations of [0, n)" if name == "enumerate"
                 else "check the rigidity bound on every enumerated permutation")
        sp.add_argument("--n", type=_positive_int, required=True)
        sp.add_argument("--k1", type=_rational, required=True, help="forward Lipschitz cap")
        sp.add_argument("--k2", type=_rational, required=True, help="inverse Lipschitz cap")
        sp.add_argument("--threads", type=_positive_int, default=None)
        if name == "enumerate":
            sp.add_argument("--count-only", action="store_true")
            sp.add_argument("--emit", metavar="FILE", help="write every map as JSON lines")

    sp = add("golden", help="CSV table of enumeration counts cross-checked by the naive filter")
    sp.add_argument("--max-n", type=_positive_int, required=True)
    sp.add_argument("--caps", default="1,3/2,2,3")

    sp = add("folner", help="Følner ratios on [-n, n] as CSV")
    sp.add_argument("file")
    sp.add_argument("--ns", type=_int_list, required=True)

    sp = add("grid", help="Z^2 maps")
    sp.add_argument("action", choices=["apply", "lipschitz", "isogap", "folner"])
    sp.add_argument("file")
    sp.add_argument("--n", type=_positive_int)
    sp.add_argument("--point", type=_int_list)
    return p


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"file: cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise UsageError(f"file: malformed JSON in {path}: {e}")


def _load_map(path: str) -> EventuallyAffineMap:
    try:
        return EventuallyAffineMap.from_json(_load_json(path))
    except ValueError as e:
        raise UsageError(f"{path}: {e}")


def _meta() -> dict:
    return {"version": __version__, "generated": datetime.datetime.now(datetime.timezone.utc).isoformat()}


def _emit_json(out, obj: dict, meta: bool):
    if meta:
        obj = dict(obj, meta=_meta())
    out.write(json.dumps(obj, sort_keys=False) + "\n")


def _emit_csv(out, header, rows, meta: bool):
    if meta:
        out.write(f"# {json.dumps(_meta())}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _spec(args) -> EnumSpec:
    try:
        return EnumSpec(args.n, args.k1, args.k2)
    except ValueError as e:
        raise UsageError(str(e))


def _cmd_analyze(args, out) -> int:
    obj = _load_json(args.file)
    try:
        if isinstance(obj, dict) and "values" in obj:
            dec = decompose_window(WindowSample.from_json(obj))
        else:
            f = EventuallyAffineMap.from_json(obj)
            if args.window:
                dec = decompose_window(WindowSample.of(f, *args.window))
            else:
                dec = decompose(f)
    except ValueError as e:
        raise UsageError(f"{args.file}: {e}")
    _emit_json(out, dec.to_json(), args.meta)
    return 0 if dec.conforms else 1


def _cmd_ray(args, out) -> int:
    prof = ray_profile(_load_map(args.file), args.x)
    _emit_json(out, prof.to_json(), args.meta)
    return 0


def _cmd_enumerate(args, out) -> int:
    spec = _spec(args)
    workers = args.threads or default_workers()
    if args.emit:
        with open(args.emit, "w") as fh:
            res = enumerate_maps(spec, lambda b: fh.write(json.dumps(b.to_json()) + "\n"), workers=workers)
    else:
        res = enumerate_maps(spec, workers=workers)
    if args.count_only:
        out.write(f"{res.count}\n")
    else:
        _emit_json(out, {
            "n": spec.n,
            "k_forward": f"{spec.k_forward.numerator}/{spec.k_forward.denominator}",
            "k_backward": f"{spec.k_backward.numerator}/{spec.k_backward.denominator}",
            "count": res.count,
            "stats": res.stats.to_json(),
        }, args.meta)
    return 0


def _cmd_verify(args, out) -> int:
    res = verify_theorem_over(_spec(args), workers=args.threads or default_workers())
    if args.meta:
        out.write(f"# {json.dumps(_meta())}\n")
    out.write(f"{res.count} maps checked, {len(res.violations)} violations\n")
    for b in res.violations:
        out.write(json.dumps(b.to_json()) + "\n")
    return 1 if res.violations else 0


def _cmd_golden(args, out) -> int:
    try:
        caps = [_rational(t) for t in args.caps.split(",")]
    except argparse.ArgumentTypeError as e:
        raise UsageError(f"caps: {e}")
    if any(k < 1 for k in caps):
        raise UsageError("caps: every cap must be at least 1")
    rows = []
    for n in range(1, args.max_n + 1):
        for k1 in caps:
            for k2 in caps:
                spec = EnumSpec(n, k1, k2)
                count = enumerate_maps(spec).count
                if n <= 8 and naive_count(spec) != count:
                    raise RuntimeError(f"enumeration disagrees with naive filter at {spec}")
                rows.append([n, f"{k1.numerator}/{k1.denominator}", f"{k2.numerator}/{k2.denominator}", count])
    _emit_csv(out, ["n", "k_forward", "k_backward", "count"], rows, args.meta)
    return 0


def _cmd_folner(args, out) -> int:
    if any(n < 1 for n in args.ns):
        raise UsageError("ns: every entry must be a positive integer")
    reports = folner_curve(_load_map(args.file), args.ns)
    _emit_csv(out, FOLNER_CSV_HEADER, [r.csv_row() for r in reports], args.meta)
    return 0


def _cmd_grid(args, out) -> int:
    try:
        F = grid_from_json(_load_json(args.file))
    except ValueError as e:
        raise UsageError(f"{args.file}: {e}")
    if args.action == "apply":
        if args.point is None or len(args.point) != 2:
            raise UsageError("point: apply needs --point X,Y")
        _emit_json(out, {"point": args.point, "image": list(apply(F, tuple(args.point)))}, args.meta)
        return 0
    if args.n is None:
        raise UsageError(f"n: grid {args.action} needs --n N")
    if args.action == "lipschitz":
        rep = grid_lipschitz_window(F, args.n)
        inv = rep.inverse_value
        _emit_csv(out, GRID_CSV_HEADER + ["inverse_num", "inverse_den"],
                  [rep.csv_row() + [inv.numerator, inv.denominator]], args.meta)
        return 0
    rep = isometry_gap(F, args.n) if args.action == "isogap" else grid_folner_ratio(F, args.n)
    _emit_csv(out, GRID_CSV_HEADER, [rep.csv_row()], args.meta)
    return 0


COMMANDS = {
    "analyze": _cmd_analyze,
    "ray": _cmd_ray,
    "enumerate": _cmd_enumerate,
    "verify": _cmd_verify,
    "golden": _cmd_golden,
    "folner": _cmd_folner,
    "grid": _cmd_grid,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    old_err = sys.stderr
    sys.stderr = stderr
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    finally:
        sys.stderr = old_err
    try:
        return COMMANDS[args.command](args, stdout)
    except (UsageError, InvalidMap) as e:
        stderr.write(f"lipz {args.command}: error: {e}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
