"""Orbits, Poincare return maps, limit cycles and their characteristic exponents.

Integration uses the embedded Dormand-Prince 8(5,3) pair from scipy (with its
7th-order dense output) stepped manually, so the step budget, blow-up guard,
domain exits and section crossings stay under our control.

The Poincare section is the half-line ``{y = 0, x > 0}``. A return is the next
crossing in the same direction as the orbit leaves its starting point; for the
Lienard-type systems that direction is always ``y' < 0`` because ``y' = -g(x)``
on the section.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy import optimize
from scipy.integrate import DOP853
from sklearn.base import BaseEstimator

from ._validation import check_system
from .exceptions import (AngularSpeedZeroOnCycleError, BlowUpError, DomainExitError,
                         IntegrationError, NoReturnError)

BLOWUP = 1e8
MAX_STEPS = 1_000_000


# ---------------------------------------------------------------------------
# orbits

@dataclass
class Orbit:
    """Integrated trajectory with per-step dense output.

    ``t`` is the elapsed (non-negative) time; for ``direction == -1`` the
    states follow the reversed field.
    """

    t: np.ndarray
    states: np.ndarray
    segments: list = field(repr=False, default_factory=list)
    direction: int = 1
    reason: str = "horizon"

    def __call__(self, t):
        t = float(t)
        k = int(np.searchsorted(self.t, t, side="left"))
        k = min(max(k, 1), len(self.segments))
        return self.segments[k - 1](t)

    def sample(self, n: int = 1000) -> np.ndarray:
        ts = np.linspace(self.t[0], self.t[-1], n)
        return np.array([self(t) for t in ts])

    def dense_states(self, per_step: int = 4) -> np.ndarray:
        """Step endpoints plus ``per_step - 1`` interior dense-output points per step."""
        pts = [self.states[0]]
        for k, seg in enumerate(self.segments):
            t0, t1 = self.t[k], self.t[k + 1]
            for i in range(1, per_step):
                pts.append(seg(t0 + (t1 - t0) * i / per_step))
            pts.append(self.states[k + 1])
        return np.array(pts)

    def to_csv(self, fh=None, n: Optional[int] = None) -> str:
        """CSV rows ``t,x,y`` (12 significant digits); ``n`` resamples uniformly in time."""
        if n is None:
            ts, zs = self.t, self.states
        else:
            ts = np.linspace(self.t[0], self.t[-1], n)
            zs = np.array([self(t) for t in ts])
        buf = fh or io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(["t", "x", "y"])
        for t, (x, y) in zip(ts, zs):
            writer.writerow([f"{t:.12g}", f"{x:.12g}", f"{y:.12g}"])
        return buf.getvalue() if fh is None else ""


def _make_fun(system, direction, extra=None):
    P = system.scalar("P")
    Q = system.scalar("Q")
    d = float(direction)
    if extra is None:
        def fun(t, z):
            x, y = float(z[0]), float(z[1])
            return np.array([d * P(x, y), d * Q(x, y)])
    else:
        def fun(t, z):
            x, y = float(z[0]), float(z[1])
            return np.array([d * P(x, y), d * Q(x, y)] + [f(x, y) for f in extra])
    return fun


def _run(system, z0, t_max, tol, direction=1, extra=None, max_steps=MAX_STEPS, on_step=None,
         keep=True):
    """Step DOP853 from ``z0``; ``on_step(solver, t_old, z_old)`` may return a value to stop.

    Returns ``(orbit, stop_value)``.
    """
    fun = _make_fun(system, direction, extra)
    a, b = system.domain
    z0 = np.asarray(z0, dtype=float)
    ts = [0.0]
    zs = [z0[:2].copy()]
    segs = []
    try:
        solver = DOP853(fun, 0.0, z0, t_max, rtol=tol, atol=tol * 1e-2 if tol > 1e-12 else tol,
                        first_step=None)
    except (ZeroDivisionError, ValueError, OverflowError, ArithmeticError) as exc:
        raise DomainExitError(f"field undefined at start: {exc}", state=z0[:2].copy()) from exc

    def orbit(reason):
        return Orbit(np.array(ts), np.array(zs), segs, int(direction), reason)

    steps = 0
    while solver.status == "running":
        t_old = solver.t
        z_old = solver.y.copy()
        try:
            msg = solver.step()
        except (ZeroDivisionError, ValueError, OverflowError, ArithmeticError) as exc:
            raise DomainExitError(f"field undefined near {z_old[:2]}: {exc}", state=z_old[:2],
                                  orbit=orbit("domain")) from exc
        if solver.status == "failed":
            raise BlowUpError(f"integration failed: {msg}", state=z_old[:2], orbit=orbit("failed"))
        z = solver.y
        if not np.all(np.isfinite(z)) or abs(z[0]) > BLOWUP or abs(z[1]) > BLOWUP:
            raise BlowUpError("state exceeded the blow-up guard", state=z_old[:2], orbit=orbit("blowup"))
        if not a < z[0] < b:
            raise DomainExitError("orbit left the domain strip", state=z_old[:2], orbit=orbit("domain"))
        if keep:
            ts.append(solver.t)
            zs.append(z[:2].copy())
            dense = solver.dense_output()
            segs.append(_Segment(dense))
        if on_step is not None:
            stop = on_step(solver, t_old, z_old)
            if stop is not None:
                return orbit("event"), stop
        steps += 1
        if steps >= max_steps:
            return orbit("budget"), None
    return orbit("horizon"), None


class _Segment:
    __slots__ = ("dense",)

    def __init__(self, dense):
        self.dense = dense

    def __call__(self, t):
        return self.dense(t)[:2]


def integrate(system, start, horizon: float, tol: float = 1e-10, direction: int = 1,
              max_steps: int = MAX_STEPS) -> Orbit:
    """Integrate from ``start`` for ``horizon`` time units (``direction=-1`` reverses time).

    Raises :class:`BlowUpError` or :class:`DomainExitError` carrying the last
    state and the partial orbit.
    """
    if not 1e-13 <= tol <= 1e-3:
        raise ValueError("tol must lie in [1e-13, 1e-3]")
    system = check_system(system)
    x0, y0 = map(float, start)
    system._check(x0)
    orbit, _ = _run(system, (x0, y0), float(horizon), tol, direction, max_steps=max_steps)
    return orbit


# ---------------------------------------------------------------------------
# return map

def _locate(dense, t0, t1, fn):
    return optimize.brentq(lambda t: fn(dense(t)), t0, t1, xtol=1e-15, rtol=8.9e-16, maxiter=200)


def return_map(system, x0: float, tol: float = 1e-10, direction: int = 1, max_time: float = 1000.0,
               max_steps: int = MAX_STEPS):
    """First return ``(x1, T)`` of the orbit through ``(x0, 0)`` to ``{y = 0, x > 0}``.

    Raises :class:`NoReturnError` when the orbit leaves the domain, blows up,
    crosses the section the wrong way repeatedly, or exhausts the budget.
    """
    if not x0 > 0:
        raise ValueError("x0 must be positive")
    Q = system.scalar("Q")
    try:
        q0 = direction * Q(float(x0), 0.0)
    except (ZeroDivisionError, ValueError, OverflowError) as exc:
        raise NoReturnError(f"field undefined at ({x0}, 0)") from exc
    if q0 == 0:
        raise NoReturnError("section is not transversal at the start point")
    sgn = 1.0 if q0 > 0 else -1.0
    wrong = [0]

    def on_step(solver, t_old, z_old):
        y_old, y_new = sgn * z_old[1], sgn * solver.y[1]
        if y_old < 0 <= y_new:
            dense = solver.dense_output()
            tc = _locate(dense, t_old, solver.t, lambda z: z[1]) if y_new != 0 else solver.t
            zc = dense(tc)
            if zc[0] > 0:
                return float(zc[0]), float(tc)
        elif y_old > 0 >= y_new and (z_old[0] > 0 or solver.y[0] > 0):
            wrong[0] += 1
            if wrong[0] >= 3:
                return "wrong"
        return None

    try:
        _, hit = _run(system, (float(x0), 0.0), max_time, tol, direction, max_steps=max_steps,
                      on_step=on_step, keep=False)
    except IntegrationError as exc:
        raise NoReturnError(f"no return from x0={x0}: {exc}") from exc
    if hit is None:
        raise NoReturnError(f"no return from x0={x0} within the time/step budget")
    if hit == "wrong":
        raise NoReturnError(f"orbit from x0={x0} reverses its sense of rotation")
    return hit


# ---------------------------------------------------------------------------
# cycles

@dataclass
class Cycle:
    """A closed orbit located on the section ``{y = 0, x > 0}``."""

    x_star: float
    period: float
    stability: str  # "attracting" | "repelling"
    rotation: str  # "clockwise" | "counterclockwise"
    points: np.ndarray = field(repr=False)
    residual: float = 0.0
    closure_error: float = 0.0
    exponents: dict = field(default_factory=dict)
    min_abs_A: float = math.nan

    @property
    def stable_direction(self) -> int:
        return 1 if self.stability == "attracting" else -1

    def to_dict(self):
        out = {"x_star": _num(self.x_star), "period": _num(self.period),
               "stability": self.stability, "rotation": self.rotation,
               "residual": _num(self.residual), "closure_error": _num(self.closure_error),
               "min_abs_A": _num(self.min_abs_A),
               "exponents": {k: _num(v) for k, v in self.exponents.items()}}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def polyline_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["x", "y"])
        for x, y in self.points:
            w.writerow([f"{x:.12g}", f"{y:.12g}"])
        return buf.getvalue()


def _num(v):
    if v is None:
        return None
    v = float(v)
    if not math.isfinite(v):
        return None
    return float(f"{v:.12g}")


def _displacement(system, x0, tol, direction, max_time):
    try:
        x1, T = return_map(system, x0, tol, direction, max_time)
    except NoReturnError:
        return None
    return x1 - x0


def _threads():
    try:
        return max(1, int(os.environ.get("CYCLEGUARD_THREADS", "1")))
    except ValueError:
        return 1


def _map_grid(fn, items):
    n = _threads()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


class CycleFinder(BaseEstimator):
    """Locate isolated limit cycles as fixed points of the return map.

    Parameters
    ----------
    grid : sequence of float
        Positive section points to scan; sign changes of ``rho(x) - x`` in
        forward or backward time bracket the cycles.
    tol : float
        Integrator tolerance.
    max_time : float
        Time budget per return.
    exponents : bool
        Also compute the divergence and ``nu`` integrals and the log return
        derivative of each cycle.

    Attributes
    ----------
    cycles_ : list of Cycle
    degenerate_ : bool
        True when the displacement vanishes on a run of grid points (a
        continuum of closed orbits, as for a linear center).
    notes_ : list of str
    """

    def __init__(self, grid=None, tol: float = 1e-10, max_time: float = 1000.0, exponents: bool = True,
                 residual_tol: float = 1e-10, dedupe: float = 1e-6):
        self.grid = grid
        self.tol = tol
        self.max_time = max_time
        self.exponents = exponents
        self.residual_tol = residual_tol
        self.dedupe = dedupe

    def fit(self, system, y=None):
        system = check_system(system)
        grid = np.arange(0.1, 3.0 + 1e-9, 0.1) if self.grid is None else np.asarray(self.grid, dtype=float)
        if np.any(grid <= 0):
            raise ValueError("grid points must be positive")
        grid = np.array([x for x in np.unique(grid) if system.in_domain(x)])
        self.notes_ = []
        d = {}
        for direction in (1, -1):
            d[direction] = _map_grid(
                lambda x, _d=direction: _displacement(system, float(x), self.tol, _d, self.max_time), grid)
        self.displacements_ = {"grid": grid, "forward": d[1], "backward": d[-1]}

        if self._degenerate(grid, d[1]):
            self.degenerate_ = True
            self.notes_.append("displacement vanishes on consecutive grid points: continuum of "
                               "closed orbits, no isolated cycles reported")
            self.cycles_ = []
            return self
        self.degenerate_ = False

        roots = []
        for direction in (1, -1):
            vals = d[direction]
            for i in range(len(grid) - 1):
                da, db = vals[i], vals[i + 1]
                if da is None or db is None:
                    continue
                if da == 0:
                    roots.append((grid[i], grid[i], direction))
                elif da * db < 0:
                    roots.append((grid[i], grid[i + 1], direction))
            if vals and vals[-1] == 0:
                roots.append((grid[-1], grid[-1], direction))

        found: List[Cycle] = []
        for a, b, direction in sorted(roots):
            x_star = self._refine(system, a, b, direction)
            if x_star is None:
                continue
            if any(abs(x_star - c) <= self.dedupe for c in (cy.x_star for cy in found)):
                continue
            cycle = build_cycle(system, x_star, self.tol, self.max_time)
            if cycle is None:
                self.notes_.append(f"candidate near x={x_star:.8g} did not close")
                continue
            if any(abs(cycle.x_star - cy.x_star) <= self.dedupe for cy in found):
                continue
            if self.exponents:
                compute_exponents(system, cycle, self.tol)
            found.append(cycle)
        found.sort(key=lambda c: c.x_star)
        self.cycles_ = found
        return self

    def _degenerate(self, grid, forward):
        run = 0
        for x, v in zip(grid, forward):
            thr = max(1e-12, 100 * self.tol) * (1 + abs(x))
            if v is not None and abs(v) <= thr:
                run += 1
                if run >= 5:
                    return True
            else:
                run = 0
        return False

    def _refine(self, system, a, b, direction):
        tol, tmax = self.tol, self.max_time

        def disp(x, dr=direction):
            v = _displacement(system, x, tol, dr, tmax)
            if v is None:
                raise NoReturnError(x)
            return v

        if a == b:
            x = a
        else:
            try:
                x = optimize.brentq(disp, a, b, xtol=1e-13 * (1 + abs(a)), rtol=8.9e-16, maxiter=200)
            except (NoReturnError, ValueError):
                return None
        # polish on the map that contracts near the cycle
        best = x
        for dr in (direction, -direction):
            res = _displacement(system, x, tol, dr, tmax)
            if res is None:
                continue
            if abs(res) <= self.residual_tol * (1 + abs(x)):
                return x
            x_new = _secant_polish(system, x, dr, tol, tmax, self.residual_tol, width=max(b - a, 1e-6))
            if x_new is not None:
                return x_new
        return best


def _secant_polish(system, x, direction, tol, tmax, residual_tol, width, iterations=12):
    """Secant iterations on the displacement; None if the map will not converge here."""
    x0, x1 = x, x + 1e-7 * (1 + abs(x))
    f0 = _displacement(system, x0, tol, direction, tmax)
    f1 = _displacement(system, x1, tol, direction, tmax)
    if f0 is None or f1 is None:
        return None
    for _ in range(iterations):
        if abs(f1) <= residual_tol * (1 + abs(x1)):
            return x1
        if f1 == f0:
            return None
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not abs(x2 - x) <= width or x2 <= 0:
            return None
        x0, f0 = x1, f1
        x1 = x2
        f1 = _displacement(system, x1, tol, direction, tmax)
        if f1 is None:
            return None
    return x1 if abs(f1) <= 10 * residual_tol * (1 + abs(x1)) else None


def build_cycle(system, x_star: float, tol: float = 1e-10, max_time: float = 1000.0,
                n_points: int = 2000) -> Optional[Cycle]:
    """Assemble a :class:`Cycle` through ``(x_star, 0)``: stability, period, closed polyline."""
    best = None
    for direction in (1, -1):
        try:
            x1, T = return_map(system, x_star, tol, direction, max_time)
        except NoReturnError:
            continue
        res = abs(x1 - x_star)
        if best is None or res < best[0]:
            best = (res, direction, T)
    if best is None:
        return None
    res, direction, T = best
    orbit, _ = _run(system, (x_star, 0.0), T, tol, direction)
    closure = float(np.hypot(*(orbit.states[-1] - orbit.states[0])))
    pts = orbit.sample(n_points)
    A = system.field_values("A", pts[:, 0], pts[:, 1])
    min_abs_A = float(np.min(np.abs(A)))
    mean_A = float(np.mean(A))
    # stability is refined by the sign of the divergence integral when exponents are computed
    stability = "attracting" if direction == 1 else "repelling"
    rotation = "clockwise" if mean_A > 0 else "counterclockwise"
    return Cycle(float(x_star), float(T), stability, rotation, pts, residual=res,
                 closure_error=closure, min_abs_A=min_abs_A)


def cycle_integral(system, cycle: Cycle, field: str = "div", tol: float = 1e-10) -> float:
    """Time integral of ``div`` or ``nu`` over one period of ``cycle``."""
    if field not in ("div", "nu"):
        raise ValueError("field must be 'div' or 'nu'")
    if field == "nu":
        if cycle.min_abs_A < 1e-8:
            raise AngularSpeedZeroOnCycleError(
                f"A comes within {cycle.min_abs_A:.3g} of zero on the cycle")
        num = system.scalar("nu_num")
        Af = system.scalar("A")
        integrand = lambda x, y: num(x, y) / Af(x, y)  # noqa: E731
    else:
        integrand = system.scalar("div")
    return float(_last_extra(system, cycle, integrand, tol))


def _last_extra(system, cycle, integrand, tol):
    fun = _make_fun(system, cycle.stable_direction, [integrand])
    solver = DOP853(fun, 0.0, np.array([cycle.x_star, 0.0, 0.0]), cycle.period,
                    rtol=min(tol, 1e-10), atol=min(tol, 1e-10) * 1e-2)
    while solver.status == "running":
        solver.step()
    if solver.status == "failed":
        raise BlowUpError("integration failed on the cycle")
    return solver.y[2]


def log_return_derivative(system, cycle: Cycle, tol: float = 1e-12, rel_step: float = 1e-5,
                          max_sections: int = 1024) -> float:
    """Log of the return-map derivative at the cycle by finite differences.

    The period is cut into ``N`` pieces with transversal sections (lines
    normal to the flow) and the section-to-section maps are differentiated by
    Richardson-extrapolated central differences with step ``rel_step * x*``;
    the log derivative is the sum of the pieces. ``N`` doubles until every
    piece stays within a factor ``e^2.5``, which keeps strongly
    contracting or expanding cycles within double precision.
    """
    direction = cycle.stable_direction
    h = rel_step * cycle.x_star
    n = 16
    while True:
        logs = _section_logs(system, cycle, direction, n, h, tol)
        if logs is not None and max(abs(v) for v in logs) <= 2.5:
            break
        if n >= max_sections:
            if logs is None:
                raise NoReturnError("section maps did not return")
            break
        n *= 2
    total = float(sum(logs))
    return total if direction == 1 else -total


def _section_logs(system, cycle, direction, n, h, tol):
    T = cycle.period
    orbit, _ = _run(system, (cycle.x_star, 0.0), T, min(tol, 1e-11), direction)
    P = system.scalar("P")
    Q = system.scalar("Q")
    pts = [np.array([cycle.x_star, 0.0])]
    for i in range(1, n):
        pts.append(np.asarray(orbit(T * i / n), dtype=float))
    pts.append(pts[0])
    frames = []
    for p in pts:
        F = direction * np.array([P(*p), Q(*p)])
        tang = F / np.hypot(*F)
        frames.append((p, tang, np.array([-tang[1], tang[0]])))
    logs = []
    for i in range(n):
        p0, _, n0 = frames[i]
        p1, t1, n1 = frames[i + 1]

        def S(s):
            start = p0 + s * n0
            gap = lambda z: float(np.dot(np.asarray(z[:2]) - p1, t1))  # noqa: E731

            def on_step(solver, t_old, z_old):
                if gap(z_old) < 0 <= gap(solver.y):
                    dense = solver.dense_output()
                    tc = _locate(dense, t_old, solver.t, gap)
                    return float(np.dot(dense(tc)[:2] - p1, n1))
                return None

            _, hit = _run(system, start, 4.0 * T / n + 1.0, min(tol, 1e-11), direction,
                          on_step=on_step, keep=False)
            if hit is None:
                raise NoReturnError("section not reached")
            return hit

        try:
            d1 = (S(h) - S(-h)) / (2 * h)
            d2 = (S(h / 2) - S(-h / 2)) / h
        except (NoReturnError, IntegrationError):
            return None
        d = (4 * d2 - d1) / 3
        if not d > 0:
            return None
        logs.append(math.log(d))
    return logs


def compute_exponents(system, cycle: Cycle, tol: float = 1e-10) -> Cycle:
    """Fill ``cycle.exponents`` with the divergence and ``nu`` integrals and the log
    return derivative; also fixes ``stability`` from the divergence integral."""
    div = cycle_integral(system, cycle, "div", tol)
    cycle.exponents["div_integral"] = div
    try:
        cycle.exponents["nu_integral"] = cycle_integral(system, cycle, "nu", tol)
    except AngularSpeedZeroOnCycleError:
        cycle.exponents["nu_integral"] = None
    try:
        cycle.exponents["log_return_derivative"] = log_return_derivative(system, cycle)
    except NoReturnError:
        cycle.exponents["log_return_derivative"] = None
    if div != 0:
        cycle.stability = "attracting" if div < 0 else "repelling"
    return cycle


def find_cycles(system, radial_grid: Sequence[float] = None, tol: float = 1e-10, **kwargs) -> List[Cycle]:
    """Functional wrapper around :class:`CycleFinder`; returns cycles sorted by ``x*``."""
    return CycleFinder(grid=radial_grid, tol=tol, **kwargs).fit(system).cycles_


# ---------------------------------------------------------------------------
# boundedness probe

@dataclass
class ProbeResult:
    start: tuple
    verdict: str  # "enters_and_stays" | "escapes" | "undecided"
    entry_time: Optional[float] = None
    final_state: Optional[tuple] = None

    def to_dict(self):
        return {"start": list(self.start), "verdict": self.verdict,
                "entry_time": _num(self.entry_time),
                "final_state": None if self.final_state is None else [_num(v) for v in self.final_state]}


def boundedness_probe(system, starts, M: float, horizon: float = 200.0, tol: float = 1e-9,
                      slack: float = 1e-6) -> List[ProbeResult]:
    """Follow each start and report whether it enters the trapping set and stays.

    The trapping set is ``{2 E(x, y) <= M^2}`` with ``E = G(x) + y^2/2`` for
    structured systems (the disk ``x^2 + y^2 <= M^2`` when ``g(x) = x``) and the
    disk ``D_M`` for general systems.
    """
    from .system import StructuredSystem

    system = check_system(system)
    if isinstance(system, StructuredSystem):
        def two_e(z):
            return 2 * system.G(z[0]) + z[1] ** 2
    else:
        def two_e(z):
            return z[0] ** 2 + z[1] ** 2
    bound = M * M * (1 + slack)
    out = []
    for start in starts:
        start = (float(start[0]), float(start[1]))
        try:
            orbit = integrate(system, start, horizon, tol)
        except IntegrationError as exc:
            out.append(ProbeResult(start, "escapes", None, tuple(map(float, exc.state))))
            continue
        pts = orbit.dense_states(4)
        frac = np.arange(1, 5) / 4
        times = np.concatenate([[orbit.t[0]], (orbit.t[:-1, None] + np.diff(orbit.t)[:, None] * frac).ravel()])
        vals = np.array([two_e(z) for z in pts])
        inside = vals <= bound
        final = tuple(map(float, orbit.states[-1]))
        if not inside.any():
            out.append(ProbeResult(start, "undecided", None, final))
            continue
        k = int(np.argmax(inside))
        if inside[k:].all():
            out.append(ProbeResult(start, "enters_and_stays", float(times[k]), final))
        else:
            out.append(ProbeResult(start, "escapes", float(times[k]), final))
    return out


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two closed polylines (point-to-segment)."""
    return max(_directed(a, b), _directed(b, a))


def _directed(a, b):
    from scipy.spatial import cKDTree

    b_closed = np.vstack([b, b[:1]])
    tree = cKDTree(b)
    _, idx = tree.query(a, k=min(4, len(b)))
    idx = np.atleast_2d(idx)
    worst = 0.0
    for p, cand in zip(a, idx):
        best = math.inf
        for j in cand:
            for k in (j - 1, j):
                s0 = b_closed[k % len(b)]
                s1 = b_closed[(k + 1) % len(b)]
                seg = s1 - s0
                L = float(np.dot(seg, seg))
                t = 0.0 if L == 0 else min(1.0, max(0.0, float(np.dot(p - s0, seg)) / L))
                dist = float(np.hypot(*(p - (s0 + t * seg))))
                best = min(best, dist)
        worst = max(worst, best)
    return worst
