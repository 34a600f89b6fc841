"""Planar systems and the pointwise fields evaluated on them.

Two kinds of system are supported:

* :class:`StructuredSystem` -- ``x' = y, y' = -g(x) - sum_j f_j(x) y^j`` on a
  strip ``(a, b) x R``. These feed the hypothesis checkers.
* :class:`GeneralSystem` -- ``x' = P(x, y), y' = Q(x, y)`` for arbitrary
  expressions, used for the rotationally symmetric examples.

Both expose the same field evaluators (vector field, angular-speed form ``A``,
the divergence surrogate ``nu``, divergence) so the dynamics and scan modules
do not care which one they get.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional

import numpy as np

from . import expr as E
from .exceptions import (AngularSpeedZeroError, DecompositionRequiredError, EvaluationDomainError,
                         InvalidSystemError, NotPolynomialError, OutOfDomainError)
from .poly import Polynomial, poly_from_expression

INF = math.inf


class Coefficient:
    """A univariate coefficient function of ``x``.

    Backed by an exact :class:`Polynomial` when possible, otherwise by an
    :class:`~cycleguard.expr.Expression`, or by an opaque callable (used for
    Conti-Filippov pushforwards).
    """

    __slots__ = ("poly", "expr", "_fn", "label")

    def __init__(self, source, label: Optional[str] = None):
        self.poly = None
        self.expr = None
        self.label = label
        if isinstance(source, Coefficient):
            self.poly, self.expr, self._fn = source.poly, source.expr, source._fn
            self.label = label or source.label
            return
        if isinstance(source, (int, float, Fraction)):
            source = E.as_expression(source)
        if isinstance(source, str):
            source = E.parse(source)
        if isinstance(source, Polynomial):
            self.poly = source
            self.expr = source.to_expression()
            self._fn = source
        elif isinstance(source, E.Expression):
            if "y" in source.variables:
                raise InvalidSystemError(f"coefficient {E.to_string(source)} depends on y")
            self.expr = source
            try:
                self.poly = poly_from_expression(source)
            except NotPolynomialError:
                self.poly = None
            if self.poly is not None:
                self._fn = self.poly
            else:
                raw = E.compile_expression(source)
                self._fn = lambda x, _raw=raw: _raw(x, 0.0)
        elif callable(source):
            self._fn = source
        else:
            raise TypeError(f"cannot build a coefficient from {type(source).__name__}")

    @property
    def is_polynomial(self) -> bool:
        return self.poly is not None

    @property
    def is_blackbox(self) -> bool:
        return self.expr is None

    def is_zero(self) -> bool:
        if self.poly is not None:
            return self.poly.is_zero()
        return False

    def __call__(self, x):
        try:
            return float(self._fn(x))
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise EvaluationDomainError(f"coefficient undefined at x={x}: {exc}") from exc

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.expr is not None:
            return E.evaluate_array(self.expr, xs, 0.0)
        return np.array([self(x) for x in xs.ravel()]).reshape(xs.shape)

    def derivative(self) -> "Coefficient":
        if self.poly is not None:
            return Coefficient(self.poly.derivative())
        if self.expr is not None:
            return Coefficient(E.differentiate(self.expr, "x"))
        fn = self._fn

        def d(x, _fn=fn):
            h = 1e-6 * max(1.0, abs(x))
            return (_fn(x + h) - _fn(x - h)) / (2 * h)

        return Coefficient(d, label=f"d/dx {self.label or 'blackbox'}")

    def to_string(self) -> str:
        if self.expr is None:
            raise InvalidSystemError("black-box coefficient has no text form")
        return E.to_string(self.expr)

    def __repr__(self):
        if self.expr is not None:
            return f"Coefficient({E.to_string(self.expr)!r})"
        return f"Coefficient(<{self.label or 'blackbox'}>)"


def as_coefficient(value) -> Coefficient:
    return value if isinstance(value, Coefficient) else Coefficient(value)


@dataclass(frozen=True)
class TrinomialPiece:
    """``kappa(x) y^(2h+2r) + tau(x) y^(h+2r) + eta(x) y^(2r)``."""

    kappa: Coefficient
    tau: Coefficient
    eta: Coefficient
    h: int
    r: int

    def __post_init__(self):
        for name in ("kappa", "tau", "eta"):
            object.__setattr__(self, name, as_coefficient(getattr(self, name)))
        if int(self.h) < 1 or int(self.r) < 0:
            raise InvalidSystemError("trinomial needs h >= 1 and r >= 0")

    @property
    def exponents(self):
        return (2 * self.h + 2 * self.r, self.h + 2 * self.r, 2 * self.r)

    def __call__(self, x, y):
        ek, et, ee = self.exponents
        return self.kappa(x) * y ** ek + self.tau(x) * y ** et + self.eta(x) * y ** ee

    def to_dict(self):
        return {"kappa": self.kappa.to_string(), "tau": self.tau.to_string(),
                "eta": self.eta.to_string(), "h": self.h, "r": self.r}


class TrinomialDecomposition(tuple):
    """Tuple of :class:`TrinomialPiece` whose sum should equal ``sum_j f_j y^(j-1)``."""

    def __new__(cls, pieces=()):
        return super().__new__(cls, tuple(pieces))

    def __call__(self, x, y):
        return sum(p(x, y) for p in self)

    def exponent_coefficients(self):
        """Map y-exponent -> summed exact polynomial (requires polynomial pieces)."""
        out = {}
        for p in self:
            for exp, c in zip(p.exponents, (p.kappa, p.tau, p.eta)):
                if c.poly is None:
                    raise NotPolynomialError("non-polynomial trinomial coefficient")
                out[exp] = out.get(exp, Polynomial()) + c.poly
        return out

    def verify(self, system: "StructuredSystem", n_points: int = 200, rtol: float = 1e-9,
               seed: int = 0) -> bool:
        """Check the identity with ``phi``; exact when everything is polynomial."""
        try:
            mine = self.exponent_coefficients()
            theirs = {j - 1: c.poly for j, c in system.f.items()}
            if any(p is None for p in theirs.values()):
                raise NotPolynomialError("system coefficient")
            keys = set(mine) | set(theirs)
            return all(mine.get(k, Polynomial()) == (theirs.get(k) or Polynomial()) for k in keys)
        except NotPolynomialError:
            pass
        rng = random.Random(seed)
        lo, hi = system.sample_range()
        for _ in range(n_points):
            x = rng.uniform(lo, hi)
            y = rng.uniform(-3.0, 3.0)
            a, b = self(x, y), system.phi(x, y)
            if abs(a - b) > rtol * (1 + abs(b)):
                return False
        return True


def default_decomposition(f: Mapping[int, Coefficient]) -> TrinomialDecomposition:
    """Each odd term ``f_(2k+1) y^(2k)`` becomes the degenerate piece with
    ``kappa = tau = 0``, ``eta = f_(2k+1)``, ``h = 1``, ``r = k``."""
    pieces = []
    for j in sorted(f):
        c = f[j]
        if c.is_zero():
            continue
        if j % 2 == 0:
            raise DecompositionRequiredError(
                f"even-degree term f_{j} present; supply a trinomial decomposition")
        pieces.append(TrinomialPiece(Coefficient(0), Coefficient(0), c, 1, (j - 1) // 2))
    return TrinomialDecomposition(pieces)


# ---------------------------------------------------------------------------

class _Fields:
    """Compiled scalar and vectorised evaluators for named fields."""

    def __init__(self):
        self._scalar = {}
        self._vector = {}
        self._exprs = {}

    def add_expr(self, name, e):
        self._exprs[name] = e
        self._scalar[name] = E.compile_expression(e)

    def add_callable(self, name, fn):
        self._scalar[name] = fn

    def has(self, name):
        return name in self._scalar

    def scalar(self, name):
        return self._scalar[name]

    def expr(self, name):
        return self._exprs.get(name)

    def vector(self, name):
        fn = self._vector.get(name)
        if fn is None:
            e = self._exprs.get(name)
            if e is not None:
                fn = E.compile_expression(e, vectorized=True)
            else:
                scalar = self._scalar[name]
                fn = np.vectorize(scalar, otypes=[float])
            self._vector[name] = fn
        return fn


class PlanarSystem:
    """Common behaviour of structured and general systems."""

    name: str = ""
    domain = (-INF, INF)

    # subclasses populate self._fields

    def in_domain(self, x) -> bool:
        a, b = self.domain
        return a < x < b

    def _check(self, x):
        if not self.in_domain(x):
            raise OutOfDomainError(f"x = {x} outside the domain {self.domain}")

    def sample_range(self, cap: float = 5.0):
        a, b = self.domain
        return max(a, -cap), min(b, cap)

    def _call(self, name, x, y):
        self._check(x)
        try:
            return float(self._fields.scalar(name)(float(x), float(y)))
        except ZeroDivisionError as exc:
            raise EvaluationDomainError(f"division by zero in {name} at ({x}, {y})") from exc
        except (ValueError, OverflowError) as exc:
            raise EvaluationDomainError(f"{name} undefined at ({x}, {y}): {exc}") from exc

    def has_field(self, name) -> bool:
        return self._fields.has(name)

    def field_values(self, name, xs, ys) -> np.ndarray:
        """Vectorised evaluation of a named field on arrays (no domain check)."""
        fn = self._fields.vector(name)
        with np.errstate(all="ignore"):
            out = np.asarray(fn(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)), dtype=float)
        return np.broadcast_to(out, np.broadcast(np.asarray(xs), np.asarray(ys)).shape)

    def vector_field(self, x, y):
        return self._call("P", x, y), self._call("Q", x, y)

    def rhs(self) -> Callable:
        """Fast unchecked ``(x, y) -> (P, Q)`` for integrators."""
        P = self._fields.scalar("P")
        Q = self._fields.scalar("Q")
        return lambda x, y: (P(x, y), Q(x, y))

    def A(self, x, y):
        return self._call("A", x, y)

    def divergence(self, x, y):
        return self._call("div", x, y)

    def nu(self, x, y):
        a = self.A(x, y)
        if abs(a) < 1e-12 * (1 + x * x + y * y):
            raise AngularSpeedZeroError(f"A vanishes at ({x}, {y})")
        return self._call("nu_num", x, y) / a

    def scalar(self, name) -> Callable:
        return self._fields.scalar(name)


class GeneralSystem(PlanarSystem):
    """``x' = P(x, y)``, ``y' = Q(x, y)`` with symbolic partial derivatives."""

    kind = "general"

    def __init__(self, P, Q, name: str = "", domain=(-INF, INF)):
        self.P = E.as_expression(P)
        self.Q = E.as_expression(Q)
        self.name = name
        self.domain = tuple(float(d) for d in domain)
        P_, Q_ = self.P, self.Q
        Px, Py = E.differentiate(P_, "x"), E.differentiate(P_, "y")
        Qx, Qy = E.differentiate(Q_, "x"), E.differentiate(Q_, "y")
        self.partials = {"Px": Px, "Py": Py, "Qx": Qx, "Qy": Qy}
        fields = _Fields()
        fields.add_expr("P", P_)
        fields.add_expr("Q", Q_)
        fields.add_expr("A", E.Y * P_ - E.X * Q_)
        fields.add_expr("div", Px + Qy)
        fields.add_expr("nu_num", P_ * (E.X * Qx + E.Y * Qy) - Q_ * (E.X * Px + E.Y * Py))
        self._fields = fields

    def __repr__(self):
        return f"GeneralSystem(P={E.to_string(self.P)!r}, Q={E.to_string(self.Q)!r})"

    def to_dict(self):
        return {"kind": "general", "P": E.to_string(self.P), "Q": E.to_string(self.Q),
                "domain": _domain_json(self.domain)}


class StructuredSystem(PlanarSystem):
    """``x' = y``, ``y' = -g(x) - sum_j f_j(x) y^j`` on the strip ``(a, b) x R``."""

    kind = "structured"

    def __init__(self, g, f: Mapping, domain=(-INF, INF), trinomials=None, name: str = ""):
        self.g = as_coefficient(g)
        self.f = {int(j): as_coefficient(c) for j, c in dict(f).items()}
        if any(j < 1 for j in self.f):
            raise InvalidSystemError("coefficient indices must be >= 1")
        self.f = {j: c for j, c in sorted(self.f.items()) if not c.is_zero()}
        a, b = float(domain[0]), float(domain[1])
        if not a < 0 < b:
            raise InvalidSystemError(f"domain must satisfy a < 0 < b, got {(a, b)}")
        self.domain = (a, b)
        self.name = name
        if trinomials is not None and not isinstance(trinomials, TrinomialDecomposition):
            trinomials = TrinomialDecomposition(
                t if isinstance(t, TrinomialPiece) else TrinomialPiece(**t) for t in trinomials)
        self.trinomials = trinomials
        self._antiderivative = None
        self._build_fields()

    # -- construction -------------------------------------------------------
    @property
    def symbolic(self) -> bool:
        return self.g.expr is not None and all(c.expr is not None for c in self.f.values())

    def _build_fields(self):
        fields = _Fields()
        if self.symbolic:
            phi = E.ZERO
            phi_x = E.ZERO
            phi_y = E.ZERO
            star = E.ZERO
            Q = E.neg(self.g.expr)
            div = E.ZERO
            for j, c in self.f.items():
                fe = c.expr
                dfe = E.differentiate(fe, "x")
                yj1 = E.power(E.Y, j - 1)
                phi = phi + fe * yj1
                phi_x = phi_x + dfe * yj1
                if j > 1:
                    phi_y = phi_y + E.Const(Fraction(j - 1)) * fe * E.power(E.Y, j - 2)
                star = star + (E.X * dfe + E.Const(Fraction(j - 1)) * fe) * yj1
                Q = Q - fe * E.power(E.Y, j)
                div = div - E.Const(Fraction(j)) * fe * yj1
            P = E.Y
            gx = self.g.expr
            dg = E.differentiate(gx, "x")
            Qx = E.differentiate(Q, "x")
            Qy = E.differentiate(Q, "y")
            A = E.Y * P - E.X * Q
            fields.add_expr("P", P)
            fields.add_expr("Q", Q)
            fields.add_expr("phi", phi)
            fields.add_expr("phi_x", phi_x)
            fields.add_expr("phi_y", phi_y)
            fields.add_expr("starshape", star)
            fields.add_expr("A", A)
            fields.add_expr("div", div)
            fields.add_expr("edot", E.neg(E.power(E.Y, 2) * phi))
            fields.add_expr("g", gx)
            fields.add_expr("dg", dg)
            if self.is_unit_linear_g:
                fields.add_expr("nu_num", E.neg(E.power(E.Y, 2) * star))
            else:
                # general quotient with P = y: P_x = 0, P_y = 1
                fields.add_expr("nu_num", P * (E.X * Qx + E.Y * Qy) - Q * E.Y)
            self.expressions = {"P": P, "Q": Q, "phi": phi, "starshape": star, "A": A, "div": div}
        else:
            f_items = list(self.f.items())
            df_items = [(j, c.derivative()) for j, c in f_items]
            g = self.g
            dg = g.derivative()

            def phi(x, y):
                return sum(c(x) * y ** (j - 1) for j, c in f_items)

            def phi_x(x, y):
                return sum(c(x) * y ** (j - 1) for j, c in df_items)

            def phi_y(x, y):
                return sum((j - 1) * c(x) * y ** (j - 2) for j, c in f_items if j > 1)

            def Q(x, y):
                return -g(x) - y * phi(x, y)

            def star(x, y):
                return x * phi_x(x, y) + y * phi_y(x, y)

            def A(x, y):
                return y * y - x * Q(x, y)

            def div(x, y):
                return -sum(j * c(x) * y ** (j - 1) for j, c in f_items)

            def nu_num(x, y):
                Qx = -dg(x) - y * phi_x(x, y)
                Qy = -phi(x, y) - y * phi_y(x, y)
                return y * (x * Qx + y * Qy) - Q(x, y) * y

            fields.add_callable("P", lambda x, y: y)
            fields.add_callable("Q", Q)
            fields.add_callable("phi", phi)
            fields.add_callable("phi_x", phi_x)
            fields.add_callable("phi_y", phi_y)
            fields.add_callable("starshape", star)
            fields.add_callable("A", A)
            fields.add_callable("div", div)
            fields.add_callable("edot", lambda x, y: -y * y * phi(x, y))
            fields.add_callable("g", lambda x, y: g(x))
            fields.add_callable("dg", lambda x, y: dg(x))
            fields.add_callable("nu_num", nu_num)
            self.expressions = {}
        self._fields = fields

    # -- properties ---------------------------------------------------------
    @property
    def linear_k(self) -> Optional[Fraction]:
        """``k`` when ``g(x) = k x`` exactly, else ``None``."""
        p = self.g.poly
        if p is None or p.degree != 1 or p.coeffs[0] != 0:
            return None
        return p.coeffs[1]

    @property
    def is_linear_g(self) -> bool:
        k = self.linear_k
        return k is not None and k > 0

    @property
    def is_unit_linear_g(self) -> bool:
        return self.linear_k == 1

    @property
    def max_degree(self) -> int:
        return max(self.f, default=0)

    def decomposition(self) -> TrinomialDecomposition:
        if self.trinomials is not None:
            return self.trinomials
        return default_decomposition(self.f)

    def time_rescaled(self) -> "StructuredSystem":
        """For ``g = k x``: the equivalent system with ``g = x`` under ``t -> sqrt(k) t``.

        ``f_j`` picks up the factor ``k^((j-2)/2)``; this is exact when ``k`` is a
        rational square and a float approximation otherwise.
        """
        k = self.linear_k
        if k is None or k <= 0:
            raise InvalidSystemError("time rescaling needs g(x) = k x with k > 0")
        if k == 1:
            return self
        root = _rational_sqrt(k)
        new_f = {}
        for j, c in self.f.items():
            if root is not None:
                factor = root ** (j - 2)
            else:
                factor = Fraction(math.sqrt(k) ** (j - 2))
            if c.poly is not None:
                new_f[j] = Coefficient(c.poly * Polynomial([factor]))
            elif c.expr is not None:
                new_f[j] = Coefficient(E.Const(factor) * c.expr)
            else:
                new_f[j] = Coefficient(lambda x, _c=c, _k=float(factor): _k * _c(x))
        return StructuredSystem("x", new_f, self.domain, None, name=self.name)

    # -- fields -------------------------------------------------------------
    def phi(self, x, y):
        return self._call("phi", x, y)

    def starshape(self, x, y):
        return self._call("starshape", x, y)

    def G(self, x):
        if self._antiderivative is None:
            from .transform import Antiderivative
            self._antiderivative = Antiderivative(self.g)
        self._check(x)
        return self._antiderivative(x)

    def energy(self, x, y):
        return self.G(x) + 0.5 * y * y

    def energy_rate(self, x, y):
        return self._call("edot", x, y)

    def __repr__(self):
        fs = ", ".join(f"{j}: {c!r}" for j, c in self.f.items())
        return f"StructuredSystem(g={self.g!r}, f={{{fs}}}, domain={self.domain})"

    def to_dict(self):
        out = {"kind": "structured", "g": self.g.to_string(),
               "f": {str(j): c.to_string() for j, c in self.f.items()},
               "domain": _domain_json(self.domain)}
        if self.trinomials is not None:
            out["trinomials"] = [p.to_dict() for p in self.trinomials]
        return out


def _rational_sqrt(k: Fraction):
    k = Fraction(k)
    n, d = math.isqrt(k.numerator), math.isqrt(k.denominator)
    if n * n == k.numerator and d * d == k.denominator:
        return Fraction(n, d)
    return None


def _domain_json(domain):
    return [("-inf" if d == -INF else "inf" if d == INF else d) for d in domain]


# ---------------------------------------------------------------------------
# functional interface

def phi_eval(s: StructuredSystem, x, y) -> float:
    """``sum_j f_j(x) y^(j-1)``."""
    return s.phi(x, y)


def vector_field(s: PlanarSystem, x, y):
    return s.vector_field(x, y)


def A_eval(s: PlanarSystem, x, y) -> float:
    """Angular-speed form ``y x' - x y'``; its sign is opposite to the angular velocity."""
    return s.A(x, y)


def nu_eval(s: PlanarSystem, x, y) -> float:
    return s.nu(x, y)


def divergence(s: PlanarSystem, x, y) -> float:
    return s.divergence(x, y)


def starshape_form(s: StructuredSystem, x, y) -> float:
    """``x phi_x + y phi_y``."""
    return s.starshape(x, y)


def energy(s: StructuredSystem, x, y) -> float:
    return s.energy(x, y)


def energy_rate(s: StructuredSystem, x, y) -> float:
    return s.energy_rate(x, y)
