"""Named example systems with their expected facts.

Each fact records where its value comes from: ``"published"`` for values
stated in the source literature, ``"derived"`` for values obtained here from a
closed-form reduction or a direct computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

from .io import system_from_dict

SQ5 = math.sqrt(5.0)
_R2 = "(x^2 + y^2)"
_S = f"({_R2} - {_R2}^2)"
_P = f"(1 - 3*{_R2} + {_R2}^2)"


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    description: str
    document: dict
    facts: List[dict] = field(default_factory=list)

    def system(self):
        return system_from_dict({"name": self.name, **self.document})


_ENTRIES = [
    GalleryEntry(
        "two-cycles",
        "x' = y s + x p, y' = -x s + y p with s = r^2 - r^4, p = 1 - 3r^2 + r^4; "
        "two cycles on the circles r^2 = (3 -+ sqrt 5)/2",
        {"kind": "general", "P": f"y*{_S} + x*{_P}", "Q": f"-x*{_S} + y*{_P}"},
        [
            {"kind": "cycles", "grid": [0.1, 3.0, 0.1], "count": 2,
             "radii": [math.sqrt((3 - SQ5) / 2), math.sqrt((3 + SQ5) / 2)], "tol": 1e-6,
             "source": "published"},
            {"kind": "exponents", "grid": [0.1, 3.0, 0.1],
             "div_integral": [2 * math.pi / (SQ5 - 2) * (5 - 3 * SQ5), 2 * math.pi / (2 + SQ5) * (5 + 3 * SQ5)],
             "rtol": 1e-2, "source": "derived"},
        ],
    ),
    GalleryEntry(
        "trig",
        "x' = y cos(r^2) - x sin(r^2), y' = -x cos(r^2) - y sin(r^2); cycles on r^2 = k pi",
        {"kind": "general", "P": f"y*cos{_R2} - x*sin{_R2}", "Q": f"-x*cos{_R2} - y*sin{_R2}"},
        [
            {"kind": "cycles", "grid": [0.5, 3.8, 0.05], "count": 4,
             "radii": [math.sqrt(k * math.pi) for k in range(1, 5)], "tol": 1e-6,
             "stability": ["repelling", "attracting", "repelling", "attracting"],
             "rotation": ["counterclockwise", "clockwise", "counterclockwise", "clockwise"],
             "source": "published"},
            {"kind": "exponents", "grid": [0.5, 3.8, 0.05],
             "div_integral": [(-1) ** (k + 1) * 4 * math.pi ** 2 * k for k in range(1, 5)],
             "rtol": 1e-2, "source": "derived"},
        ],
    ),
    GalleryEntry(
        "vdp",
        "van der Pol oscillator, f_1 = x^2 - 1",
        {"kind": "structured", "g": "x", "f": {"1": "x^2 - 1"}},
        [
            {"kind": "cycles", "grid": [0.1, 3.0, 0.1], "count": 1, "signs": [-1], "source": "published"},
            {"kind": "scan", "field": "A", "window": [[-3, 3], [-3, 3]], "mixed_signs": True, "source": "derived"},
        ],
    ),
    GalleryEntry(
        "fig2",
        "f_1 = x^2 - 1, f_2 = x^2/10, f_3 = x^2 + 1: unique limit cycle",
        {"kind": "structured", "g": "x", "f": {"1": "x^2 - 1", "2": "x^2/10", "3": "x^2 + 1"},
         "trinomials": [{"kappa": "x^2 + 1", "tau": "x^2/10", "eta": "x^2 - 1", "h": 1, "r": 0}]},
        [
            {"kind": "claim", "theorem": "Corollary 1", "status": "proved", "claim": "at-most-one",
             "source": "published"},
            {"kind": "cycles", "grid": [0.1, 5.0, 0.1], "count": 1, "signs": [-1], "source": "published"},
            {"kind": "scan", "field": "starshape", "window": [[-3, 3], [-3, 3]], "min_nonnegative": True,
             "source": "published"},
        ],
    ),
    GalleryEntry(
        "quartic-demo",
        "f_1 = x^2 - 1, f_3 = x^4 - x^2 + 1: exactly one limit cycle",
        {"kind": "structured", "g": "x", "f": {"1": "x^2 - 1", "3": "x^4 - x^2 + 1"},
         "trinomials": [{"kappa": "x^4 - x^2 + 1", "tau": "0", "eta": "x^2 - 1", "h": 1, "r": 0}]},
        [
            {"kind": "claim", "theorem": "Corollary 5", "status": "proved", "claim": "exactly-one",
             "source": "derived"},
            {"kind": "cycles", "grid": [0.1, 3.0, 0.1], "count": 1, "signs": [-1], "source": "derived"},
        ],
    ),
    GalleryEntry(
        "gauss",
        "f_1 = -exp(-x^2), f_3 = 1 - exp(-x^2): the energy rate vanishes on four unbounded curves",
        {"kind": "structured", "g": "x", "f": {"1": "-exp(-x^2)", "3": "1 - exp(-x^2)"}},
        [
            {"kind": "scan", "field": "edot", "window": [[-6, 6], [-4, 4]], "unbounded_components": 4,
             "source": "published"},
            {"kind": "claim", "theorem": "boundedness", "status": "refuted", "source": "published"},
        ],
    ),
    GalleryEntry(
        "linear-center",
        "harmonic oscillator x'' + x = 0: a continuum of closed orbits",
        {"kind": "structured", "g": "x", "f": {}},
        [
            {"kind": "cycles", "grid": [0.1, 3.0, 0.1], "count": 0, "degenerate": True, "source": "derived"},
            {"kind": "transform", "identity": True, "source": "derived"},
        ],
    ),
    GalleryEntry(
        "duffing-vdp",
        "g = x + x^3, f_1 = x^2 - 1: nonlinear restoring term",
        {"kind": "structured", "g": "x + x^3", "f": {"1": "x^2 - 1"}},
        [
            {"kind": "transform", "f_at_zero": {"1": -1.0}, "source": "derived"},
            {"kind": "cycles", "grid": [0.1, 3.0, 0.1], "count": 1, "signs": [-1], "source": "derived"},
        ],
    ),
    GalleryEntry(
        "soft-spring",
        "g = x exp(-x^2), f_1 = x^2 - 1: finite potential well, bounded u-range",
        {"kind": "structured", "g": "x*exp(-x^2)", "f": {"1": "x^2 - 1"}},
        [
            {"kind": "transform", "u_range": [-1.0, 1.0], "source": "derived"},
        ],
    ),
]

_BY_NAME = {e.name: e for e in _ENTRIES}


def names() -> List[str]:
    return list(_BY_NAME)


def entry(name: str) -> GalleryEntry:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise KeyError(f"no gallery entry {name!r}; known: {', '.join(_BY_NAME)}") from None


def get(name: str):
    """The system object of gallery entry ``name``."""
    return entry(name).system()


def entries() -> List[GalleryEntry]:
    return list(_ENTRIES)
