"""Command-line interface: ``cycleguard {check,cycles,transform,scan,portrait}``.

Exit codes: 0 ok, 2 parse error, 3 invalid system, 4 inadmissible g, 5 internal error.
Numbers are printed with 12 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import (CycleguardError, DecompositionRequiredError, GNotAdmissibleError, InvalidSystemError,
                         NotPolynomialError, OutOfDomainError, ParseError)

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_G, EXIT_INTERNAL = 0, 2, 3, 4, 5


def rounded(obj):
    """Round every float in a JSON-able structure to 12 significant digits."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else None
    if isinstance(obj, (np.floating,)):
        return rounded(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def schema(name: str) -> dict:
    """Published JSON schema for ``name`` in report, cycles, scan, system, transform."""
    from importlib import resources

    return json.loads(resources.files("cycleguard").joinpath("schemas", f"{name}.schema.json").read_text())


def _emit_json(obj, out):
    out.write(json.dumps(rounded(obj), indent=2))
    out.write("\n")


def _range(text):
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise argparse.ArgumentTypeError("need a <= b and step > 0")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + i * step for i in range(n)]


def _window(text):
    try:
        xs, ys = text.split(",")
        x0, x1 = (float(t) for t in xs.split(":"))
        y0, y1 = (float(t) for t in ys.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x0:x1,y0:y1, got {text!r}") from None
    return ((x0, x1), (y0, y1))


def _res(text):
    try:
        parts = [int(t) for t in text.lower().split("x")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or NXxNY, got {text!r}") from None
    return (parts[0], parts[0]) if len(parts) == 1 else (parts[0], parts[1])


def _starts(text):
    out = []
    for chunk in text.split(";"):
        if chunk.strip():
            try:
                x, y = (float(t) for t in chunk.split(","))
            except ValueError:
                raise argparse.ArgumentTypeError(f"expected x,y;x,y..., got {text!r}") from None
            out.append((x, y))
    return out


def _load(spec):
    from .io import load_system

    return load_system(spec)


# ---------------------------------------------------------------------------
# commands

def cmd_check(args, out):
    from .conditions import full_report
    from .system import StructuredSystem

    s = _load(args.system)
    if not isinstance(s, StructuredSystem):
        raise InvalidSystemError("check needs a structured system (x' = y, y' = -g - sum f_j y^j)")
    report = full_report(s, eps=args.eps)
    _emit_json(report.to_dict(), out)


def cmd_cycles(args, out):
    from .dynamics import CycleFinder

    s = _load(args.system)
    grid = args.grid if args.grid is not None else _range("0.1:3:0.1")
    finder = CycleFinder(grid=grid, tol=args.tol, exponents=not args.no_exponents).fit(s)
    doc = {"system": s.name, "grid": {"start": grid[0], "stop": grid[-1], "points": len(grid)},
           "tol": args.tol, "degenerate": finder.degenerate_, "notes": finder.notes_,
           "count": len(finder.cycles_), "cycles": [c.to_dict() for c in finder.cycles_]}
    if args.polylines:
        d = Path(args.polylines)
        d.mkdir(parents=True, exist_ok=True)
        for k, c in enumerate(finder.cycles_):
            (d / f"cycle_{k}.csv").write_text(c.polyline_csv(), newline="")
    _emit_json(doc, out)


def cmd_transform(args, out):
    from .io import system_to_dict
    from .system import StructuredSystem
    from .transform import fit_transform_for, pushforward

    s = _load(args.system)
    if not isinstance(s, StructuredSystem):
        raise InvalidSystemError("transform needs a structured system")
    cf = fit_transform_for(s)
    pushed = pushforward(s, cf)
    lo, hi = cf.u_range_
    if args.emit == "u-system":
        doc = system_to_dict(pushed)
        doc["u_range"] = [_bound(lo), _bound(hi)]
        _emit_json(doc, out)
        return
    if args.grid is not None:
        us = args.grid
    else:
        a = max(lo, -3.0) if math.isinf(lo) else lo
        b = min(hi, 3.0) if math.isinf(hi) else hi
        us = list(np.linspace(a, b, 41)[1:-1]) if not (math.isinf(lo) or math.isinf(hi)) \
            else list(np.linspace(a, b, 41))
        if 0.0 not in us:
            us.append(0.0)
            us.sort()
    js = sorted(s.f)
    args.err.write(f"u_range: {_fmt(lo)} {_fmt(hi)}\n")
    w = csv.writer(out, lineterminator="\r\n")
    w.writerow(["u", "x"] + [f"f{j}" for j in js])
    for u in us:
        if not lo < u < hi:
            continue
        x = cf.beta(u)
        w.writerow([_fmt(u), _fmt(x)] + [_fmt(pushed.f[j](u)) for j in js])


def _bound(v):
    return "-inf" if v == -math.inf else "inf" if v == math.inf else v


def _fmt(v):
    return f"{float(v):.12g}"


def cmd_scan(args, out):
    from .scan import sign_grid, zero_curve_components

    s = _load(args.system)
    grid = sign_grid(s, args.field, args.window, args.res, args.atol)
    doc = {"system": s.name, "grid": grid.to_dict(), "mixed_signs": grid.mixed}
    if not args.no_components:
        comps = zero_curve_components(s, args.field, args.window, args.res, args.atol)
        doc["components"] = comps.to_dict()
        if args.polylines:
            Path(args.polylines).write_text(comps.polylines_csv(), newline="")
    if args.csv:
        Path(args.csv).write_text(grid.to_csv(signs=args.signs), newline="")
    _emit_json(doc, out)


def cmd_portrait(args, out):
    from .dynamics import integrate
    from .exceptions import IntegrationError

    s = _load(args.system)
    orbits = []
    for start in args.starts:
        try:
            orbit = integrate(s, start, args.horizon, args.tol, direction=-1 if args.backward else 1)
            reason = orbit.reason
        except IntegrationError as exc:
            orbit, reason = exc.orbit, str(exc)
        orbits.append((start, orbit, reason))
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        summary = []
        for k, (start, orbit, reason) in enumerate(orbits):
            path = d / f"orbit_{k}.csv"
            if orbit is not None:
                path.write_text(orbit.to_csv(n=args.samples or None), newline="")
            summary.append({"start": list(start), "file": str(path), "termination": reason})
        _emit_json({"system": s.name, "orbits": summary}, out)
        return
    w = csv.writer(out, lineterminator="\r\n")
    w.writerow(["start", "t", "x", "y"])
    for k, (start, orbit, reason) in enumerate(orbits):
        if orbit is None:
            continue
        if args.samples:
            ts = np.linspace(orbit.t[0], orbit.t[-1], args.samples)
            zs = [orbit(t) for t in ts]
        else:
            ts, zs = orbit.t, orbit.states
        for t, (x, y) in zip(ts, zs):
            w.writerow([k, _fmt(t), _fmt(x), _fmt(y)])


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="cycleguard", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="hypothesis report (JSON)")
    c.add_argument("system", help="gallery name or system JSON file")
    c.add_argument("--eps", type=float, default=None)
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("cycles", help="limit cycles and exponents (JSON)")
    c.add_argument("system")
    c.add_argument("--grid", type=_range, default=None, help="a:b:step on the section y = 0, x > 0")
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--no-exponents", action="store_true")
    c.add_argument("--polylines", metavar="DIR", help="write one CSV polyline per cycle")
    c.set_defaults(func=cmd_cycles)

    c = sub.add_parser("transform", help="Conti-Filippov pushforward")
    c.add_argument("system")
    c.add_argument("--emit", choices=("table", "u-system"), default="table")
    c.add_argument("--grid", type=_range, default=None, help="u grid a:b:step for the table")
    c.set_defaults(func=cmd_transform)

    c = sub.add_parser("scan", help="sign map and zero-set components")
    c.add_argument("system")
    c.add_argument("--field", choices=("A", "starshape", "edot", "phi", "div"), default="A")
    c.add_argument("--window", type=_window, default=((-3.0, 3.0), (-3.0, 3.0)), help="x0:x1,y0:y1")
    c.add_argument("--res", type=_res, default=(201, 201), help="N or NXxNY")
    c.add_argument("--atol", type=float, default=None)
    c.add_argument("--csv", metavar="FILE", help="write the value (or sign) matrix")
    c.add_argument("--signs", action="store_true", help="matrix of signs instead of values")
    c.add_argument("--polylines", metavar="FILE", help="write zero-set points per component")
    c.add_argument("--no-components", action="store_true")
    c.set_defaults(func=cmd_scan)

    c = sub.add_parser("portrait", help="orbit CSV data")
    c.add_argument("system")
    c.add_argument("--starts", type=_starts, required=True, help="x,y;x,y;...")
    c.add_argument("--horizon", type=float, default=50.0)
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--samples", type=int, default=0, help="resample each orbit uniformly in time")
    c.add_argument("--backward", action="store_true")
    c.add_argument("--out", metavar="DIR", help="write orbit_<k>.csv files instead of stdout")
    c.set_defaults(func=cmd_portrait)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    args.err = err
    try:
        args.func(args, buf)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except GNotAdmissibleError as exc:
        err.write(f"g not admissible: {exc}\n")
        return EXIT_G
    except (InvalidSystemError, DecompositionRequiredError, NotPolynomialError, OutOfDomainError) as exc:
        err.write(f"invalid system: {exc}\n")
        return EXIT_INVALID
    except CycleguardError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - the exit-code contract covers everything
        err.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    out.write(buf.getvalue())
    return EXIT_OK


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
