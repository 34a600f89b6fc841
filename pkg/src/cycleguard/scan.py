"""Sign maps of scalar fields on rectangular grids and connected components of
their zero sets.

Fields are sampled at cell centres. Zero-set components are formed on the dual
grid whose corners are those centres (marching-squares classification): a dual
cell is crossed by the zero set when its corners carry both signs or a zero,
and two crossed cells join when their shared edge carries a sign change.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.spatial import cKDTree
from sklearn.base import BaseEstimator

from ._validation import check_system, check_window
from .exceptions import CyclesNotNestedError, InvalidSystemError, OutOfDomainError

FIELDS = ("A", "starshape", "edot", "phi", "div")
_STRUCTURED_ONLY = ("starshape", "edot", "phi")


def default_atol(window) -> float:
    (x0, x1), (y0, y1) = window
    w = max(abs(x0), abs(x1), abs(y0), abs(y1))
    return 1e-9 * (1 + w * w)


@dataclass
class SignGrid:
    """Values and signs of a field at the cell centres of a window.

    ``values`` and ``signs`` have shape ``(ny, nx)``; row ``i`` is ``y = ys[i]``.
    """

    field: str
    window: tuple
    resolution: tuple
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray = field(repr=False)
    signs: np.ndarray = field(repr=False)
    atol: float = 0.0

    @property
    def counts(self) -> dict:
        return {"+": int(np.sum(self.signs > 0)), "-": int(np.sum(self.signs < 0)),
                "0": int(np.sum(self.signs == 0))}

    @property
    def mixed(self) -> bool:
        c = self.counts
        return c["+"] > 0 and c["-"] > 0

    @property
    def minimum(self):
        k = int(np.argmin(self.values))
        i, j = np.unravel_index(k, self.values.shape)
        return float(self.values[i, j]), (float(self.xs[j]), float(self.ys[i]))

    @property
    def maximum(self):
        k = int(np.argmax(self.values))
        i, j = np.unravel_index(k, self.values.shape)
        return float(self.values[i, j]), (float(self.xs[j]), float(self.ys[i]))

    def to_csv(self, signs: bool = False) -> str:
        """Matrix CSV: header ``y\\x, x_1, ..., x_n``; one row per ``y``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["y\\x"] + [f"{x:.12g}" for x in self.xs])
        data = self.signs if signs else self.values
        for y, row in zip(self.ys, data):
            w.writerow([f"{y:.12g}"] + [str(int(v)) if signs else f"{v:.12g}" for v in row])
        return buf.getvalue()

    def to_dict(self, include_values: bool = False) -> dict:
        vmin, pmin = self.minimum
        vmax, pmax = self.maximum
        out = {"field": self.field, "window": [list(self.window[0]), list(self.window[1])],
               "resolution": list(self.resolution), "atol": self.atol, "counts": self.counts,
               "min": {"value": _num(vmin), "at": [_num(v) for v in pmin]},
               "max": {"value": _num(vmax), "at": [_num(v) for v in pmax]}}
        if include_values:
            out["signs"] = self.signs.astype(int).tolist()
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(**kw))


def _num(v):
    v = float(v)
    return float(f"{v:.12g}") if math.isfinite(v) else None


def _field_name(system, name):
    from .system import StructuredSystem

    if name not in FIELDS:
        raise ValueError(f"unknown field {name!r}; choose from {FIELDS}")
    if name in _STRUCTURED_ONLY and not isinstance(system, StructuredSystem):
        raise InvalidSystemError(f"field {name!r} needs a structured system")
    return name


def _threads():
    try:
        return max(1, int(os.environ.get("CYCLEGUARD_THREADS", "1")))
    except ValueError:
        return 1


def _evaluate(system, name, xs, ys):
    """Field on the grid ``ys x xs``, evaluated row-block-wise (optionally threaded)."""
    X, Y = np.meshgrid(xs, ys)
    n = _threads()
    if n == 1:
        return np.asarray(system.field_values(name, X, Y), dtype=float).reshape(X.shape)
    blocks = np.array_split(np.arange(len(ys)), n)
    with ThreadPoolExecutor(max_workers=n) as pool:
        parts = list(pool.map(lambda rows: system.field_values(name, X[rows], Y[rows]), blocks))
    return np.vstack([np.asarray(p, dtype=float).reshape(len(b), len(xs)) for p, b in zip(parts, blocks)])


def sign_grid(system, field: str, window, resolution=(201, 201), atol: Optional[float] = None) -> SignGrid:
    """Evaluate ``field`` at the cell centres of ``window`` and classify signs.

    Zero means ``|value| <= atol`` (default ``1e-9 (1 + |window|^2)``).
    """
    system = check_system(system)
    name = _field_name(system, field)
    window = check_window(window)
    (x0, x1), (y0, y1) = window
    a, b = system.domain
    if not (a <= x0 and x1 <= b):
        raise OutOfDomainError(f"window x-range {window[0]} leaves the domain {system.domain}")
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    nx, ny = int(resolution[0]), int(resolution[1])
    if nx < 2 or ny < 2:
        raise ValueError("resolution must be at least 2 x 2")
    atol = default_atol(window) if atol is None else float(atol)
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    vals = _evaluate(system, name, xs, ys)
    if not np.all(np.isfinite(vals)):
        raise OutOfDomainError(f"field {name!r} is not finite somewhere in the window")
    signs = np.where(np.abs(vals) <= atol, 0, np.sign(vals)).astype(np.int8)
    return SignGrid(name, window, (nx, ny), xs, ys, vals, signs, atol)


# ---------------------------------------------------------------------------
# zero-set components

@dataclass
class ComponentSummary:
    count: int
    unbounded: List[bool]
    sizes: List[int]
    touches: List[bool] = field(repr=False, default_factory=list)
    labels: Optional[np.ndarray] = field(repr=False, default=None)
    grid: Optional[SignGrid] = field(repr=False, default=None)

    @property
    def n_unbounded(self) -> int:
        return int(sum(self.unbounded))

    def to_dict(self):
        return {"count": self.count, "unbounded": list(self.unbounded), "n_unbounded": self.n_unbounded,
                "sizes": list(self.sizes)}

    def polylines_csv(self) -> str:
        """Zero-set points (linear interpolation on crossed dual-cell edges): ``component,x,y``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["component", "x", "y"])
        g = self.grid
        v = g.values
        ny, nx = v.shape
        for i in range(ny - 1):
            for j in range(nx - 1):
                lab = self.labels[i, j]
                if lab < 0:
                    continue
                for (i0, j0), (i1, j1) in (((i, j), (i, j + 1)), ((i, j), (i + 1, j))):
                    a, b = v[i0, j0], v[i1, j1]
                    if a == b or (a > 0) == (b > 0) and a != 0 and b != 0:
                        continue
                    t = a / (a - b) if a != b else 0.0
                    x = g.xs[j0] + t * (g.xs[j1] - g.xs[j0])
                    y = g.ys[i0] + t * (g.ys[i1] - g.ys[i0])
                    w.writerow([int(lab), f"{x:.12g}", f"{y:.12g}"])
        return buf.getvalue()


def _scan_field(field):
    # the energy rate is -y^2 Phi; its zero set off the axis is the zero set of -Phi
    return "phi" if field == "edot" else field


def _label(grid: SignGrid, axis_barrier: bool):
    s = grid.signs
    ny, nx = s.shape
    c00, c01, c10, c11 = s[:-1, :-1], s[:-1, 1:], s[1:, :-1], s[1:, 1:]
    corners = np.stack([c00, c01, c10, c11])
    crossed = (corners == 0).any(axis=0) | ((corners > 0).any(axis=0) & (corners < 0).any(axis=0))
    if axis_barrier:
        ys = grid.ys
        straddle = (ys[:-1] <= 0) & (ys[1:] >= 0)
        crossed[straddle, :] = False

    def change(a, b):
        return (a == 0) | (b == 0) | (a != b)

    # horizontal neighbours share the vertical edge between corner columns j+1
    h_edge = change(s[:-1, 1:-1], s[1:, 1:-1])  # (ny-1, nx-2)
    v_edge = change(s[1:-1, :-1], s[1:-1, 1:])  # (ny-2, nx-1)
    ds = DisjointSet([(i, j) for i, j in zip(*np.nonzero(crossed))])
    hi, hj = np.nonzero(crossed[:, :-1] & crossed[:, 1:] & h_edge)
    for i, j in zip(hi, hj):
        ds.merge((i, j), (i, j + 1))
    vi, vj = np.nonzero(crossed[:-1, :] & crossed[1:, :] & v_edge)
    for i, j in zip(vi, vj):
        ds.merge((i, j), (i + 1, j))
    labels = -np.ones(crossed.shape, dtype=int)
    subsets = sorted(ds.subsets(), key=lambda sub: min(sub))
    touches = []
    for k, sub in enumerate(subsets):
        t = False
        for (i, j) in sub:
            labels[i, j] = k
            if i == 0 or j == 0 or i == ny - 2 or j == nx - 2:
                t = True
        touches.append(t)
    return labels, touches, [len(sub) for sub in subsets]


def _cell_centres(grid, labels):
    ii, jj = np.nonzero(labels >= 0)
    xs = 0.5 * (grid.xs[jj] + grid.xs[jj + 1])
    ys = 0.5 * (grid.ys[ii] + grid.ys[ii + 1])
    return np.column_stack([xs, ys]), labels[ii, jj]


def zero_curve_components(system, field: str, window, resolution=(201, 201), atol=None) -> ComponentSummary:
    """Connected components of the zero set of ``field`` inside ``window``.

    A component is unbounded when it reaches the window boundary and the
    component it continues into, in a scan of the window with doubled extent,
    reaches that boundary as well. For ``edot`` the axis factor ``y^2`` is
    removed: ``-Phi`` is scanned and the axis acts as a barrier between the
    half-planes.
    """
    system = check_system(system)
    _field_name(system, field)
    name = _scan_field(field)
    barrier = field == "edot"
    window = check_window(window)
    grid = sign_grid(system, name, window, resolution, atol)
    labels, touches, sizes = _label(grid, barrier)
    (x0, x1), (y0, y1) = window
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    big = ((cx - (x1 - x0), cx + (x1 - x0)), (cy - (y1 - y0), cy + (y1 - y0)))
    a, b = system.domain
    big = ((max(big[0][0], a), min(big[0][1], b)), big[1])
    unbounded = [False] * len(sizes)
    if any(touches):
        g2 = sign_grid(system, name, big, resolution, grid.atol)
        labels2, touches2, _ = _label(g2, barrier)
        pts2, lab2 = _cell_centres(g2, labels2)
        if len(pts2):
            tree = cKDTree(pts2)
            pts1, lab1 = _cell_centres(grid, labels)
            for k in range(len(sizes)):
                if not touches[k]:
                    continue
                mine = pts1[lab1 == k]
                _, idx = tree.query(mine)
                votes = np.bincount(lab2[idx])
                unbounded[k] = bool(touches2[int(np.argmax(votes))])
    return ComponentSummary(len(sizes), unbounded, sizes, touches, labels, grid)


# ---------------------------------------------------------------------------
# annulus check

@dataclass
class AnnulusVerdict:
    positive: bool
    min_value: float
    location: tuple
    samples: int

    def to_dict(self):
        return {"positive": self.positive, "min_value": _num(self.min_value),
                "location": [_num(v) for v in self.location], "samples": self.samples}


def _radial_profile(points, thetas):
    ang = np.arctan2(points[:, 1], points[:, 0])
    rad = np.hypot(points[:, 0], points[:, 1])
    order = np.argsort(ang)
    ang, rad = ang[order], rad[order]
    ang = np.concatenate([ang - 2 * np.pi, ang, ang + 2 * np.pi])
    rad = np.tile(rad, 3)
    return np.interp(thetas, ang, rad)


def annulus_positive_check(system, c_inner, c_outer, resolution=(360, 50)) -> AnnulusVerdict:
    """Sample ``A`` on a polar grid filling the closed annulus between two cycles."""
    system = check_system(system)
    n_theta, n_rad = (resolution, resolution) if isinstance(resolution, int) else resolution
    thetas = np.linspace(-np.pi, np.pi, int(n_theta), endpoint=False)
    r_in = _radial_profile(np.asarray(c_inner.points), thetas)
    r_out = _radial_profile(np.asarray(c_outer.points), thetas)
    if np.any(r_in >= r_out):
        raise CyclesNotNestedError("inner cycle is not strictly inside the outer cycle")
    frac = np.linspace(0.0, 1.0, int(n_rad))
    R = r_in[None, :] + frac[:, None] * (r_out - r_in)[None, :]
    X = R * np.cos(thetas)[None, :]
    Y = R * np.sin(thetas)[None, :]
    vals = np.asarray(system.field_values("A", X, Y), dtype=float).reshape(X.shape)
    k = int(np.argmin(vals))
    i, j = np.unravel_index(k, vals.shape)
    vmin = float(vals[i, j])
    return AnnulusVerdict(bool(vmin > 0), vmin, (float(X[i, j]), float(Y[i, j])), int(vals.size))


class SignGridScanner(BaseEstimator):
    """Estimator wrapper: ``SignGridScanner(field="A").fit(system)``.

    Attributes
    ----------
    grid_ : SignGrid
    components_ : ComponentSummary
    """

    def __init__(self, field: str = "A", window=((-3.0, 3.0), (-3.0, 3.0)), resolution=(201, 201),
                 atol=None, components: bool = True):
        self.field = field
        self.window = window
        self.resolution = resolution
        self.atol = atol
        self.components = components

    def fit(self, system, y=None):
        system = check_system(system)
        self.grid_ = sign_grid(system, self.field, self.window, self.resolution, self.atol)
        self.components_ = (zero_curve_components(system, self.field, self.window, self.resolution, self.atol)
                            if self.components else None)
        return self

    def transform(self, X):
        """Signs of the fitted field at the cell centres (shape ``(ny, nx)``)."""
        return self.grid_.signs
