"""System-definition files (JSON) and their conversion to system objects."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

from . import expr as E
from .exceptions import InvalidSystemError, ParseError
from .system import GeneralSystem, StructuredSystem

INF = math.inf


def _bound(v):
    if isinstance(v, str):
        t = v.strip().lower().replace("‑", "-").replace("−", "-")
        if t in ("inf", "+inf", "infinity"):
            return INF
        if t in ("-inf", "-infinity"):
            return -INF
        try:
            return float(t)
        except ValueError:
            raise InvalidSystemError(f"bad domain bound {v!r}") from None
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    raise InvalidSystemError(f"bad domain bound {v!r}")


def _shifted(text, shift):
    e = E.parse(text) if isinstance(text, str) else E.as_expression(text)
    if shift == 0:
        return e
    return E.substitute_x(e, E.X + E.Const(Fraction(repr(shift))))


def system_from_dict(doc: dict):
    """Build a system from a SystemFile document.

    A nonzero ``shift`` moves the point ``x = shift`` to the origin, i.e. every
    expression is rewritten in the coordinate ``x - shift``.
    """
    if not isinstance(doc, dict):
        raise InvalidSystemError("system file must be a JSON object")
    kind = doc.get("kind", "structured")
    shift = doc.get("shift", 0) or 0
    if isinstance(shift, bool) or not isinstance(shift, (int, float)):
        raise InvalidSystemError("shift must be a number")
    domain = doc.get("domain", ["-inf", "inf"])
    if not isinstance(domain, (list, tuple)) or len(domain) != 2:
        raise InvalidSystemError("domain must be a pair [a, b]")
    a, b = (_bound(v) - shift for v in domain)
    name = str(doc.get("name", ""))
    if kind == "general":
        for key in ("P", "Q"):
            if not isinstance(doc.get(key), str):
                raise InvalidSystemError(f"general system needs an expression string {key!r}")
        return GeneralSystem(_shifted(doc["P"], shift), _shifted(doc["Q"], shift), name=name, domain=(a, b))
    if kind != "structured":
        raise InvalidSystemError(f"unknown kind {kind!r}")
    if doc.get("blackbox"):
        from .transform import pushforward

        src = doc.get("source")
        if not isinstance(src, dict):
            raise InvalidSystemError("black-box system needs its 'source' system")
        return pushforward(system_from_dict(src))
    if not isinstance(doc.get("g"), str):
        raise InvalidSystemError("structured system needs an expression string 'g'")
    f = doc.get("f", {})
    if not isinstance(f, dict):
        raise InvalidSystemError("'f' must map indices to expression strings")
    coeffs = {}
    for k, v in f.items():
        try:
            j = int(k)
        except (TypeError, ValueError):
            raise InvalidSystemError(f"bad coefficient index {k!r}") from None
        if not isinstance(v, str):
            raise InvalidSystemError(f"coefficient f_{k} must be an expression string")
        coeffs[j] = _shifted(v, shift)
    trinomials = doc.get("trinomials")
    if trinomials is not None:
        pieces = []
        for t in trinomials:
            try:
                pieces.append({"kappa": _shifted(str(t["kappa"]), shift), "tau": _shifted(str(t["tau"]), shift),
                               "eta": _shifted(str(t["eta"]), shift), "h": int(t["h"]), "r": int(t["r"])})
            except (KeyError, TypeError) as exc:
                raise InvalidSystemError(f"bad trinomial piece {t!r}") from exc
        trinomials = pieces
    return StructuredSystem(_shifted(doc["g"], shift), coeffs, (a, b), trinomials, name=name)


def system_to_dict(system) -> dict:
    """SystemFile document for ``system``; pushforwards become black-box-marked files."""
    source = getattr(system, "source", None)
    if source is not None:
        lo, hi = system.domain
        return {"kind": "structured", "name": system.name, "blackbox": True, "g": "x",
                "f": {str(j): "blackbox" for j in system.f},
                "domain": [_fmt_bound(lo), _fmt_bound(hi)],
                "transform": "conti-filippov", "source": system_to_dict(source)}
    out = system.to_dict()
    if system.name:
        out = {"name": system.name, **out}
    return out


def _fmt_bound(v):
    return "-inf" if v == -INF else "inf" if v == INF else float(f"{v:.12g}")


def load_system(spec):
    """Load from a gallery name, a JSON file path, or an already parsed document."""
    from . import gallery

    if isinstance(spec, dict):
        return system_from_dict(spec)
    spec = str(spec)
    if spec in gallery.names():
        return gallery.get(spec)
    path = Path(spec)
    if not path.exists():
        raise InvalidSystemError(f"no gallery entry or file named {spec!r}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{spec}: invalid JSON ({exc.msg})", exc.pos) from exc
    return system_from_dict(doc)
