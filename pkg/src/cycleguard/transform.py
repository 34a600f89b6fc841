"""Conti-Filippov change of variables ``(u, v) = (sign(x) sqrt(2 G(x)), y)``.

It turns ``x' = y, y' = -g(x) - y Phi(x, y)`` into a system with the same
orbits and a linear restoring term, ``u' = v, v' = -u - v phi(u, v)`` with
``phi(u, v) = u Phi(beta(u), v) / g(beta(u))``.
"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, optimize
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points
from .exceptions import GNotAdmissibleError, OutOfDomainError, OutOfRangeError
from .poly import sign_on_interval, Polynomial
from .system import Coefficient, StructuredSystem, as_coefficient

INF = math.inf
_GL_NODES, _GL_WEIGHTS = leggauss(20)


class Antiderivative:
    """``G(x) = integral_0^x g``: exact for polynomials, otherwise a lazily grown
    table of panel integrals (20-point Gauss-Legendre per panel) plus one
    Gauss-Legendre correction from the nearest node."""

    def __init__(self, g, panel: float = 0.125):
        self.g = as_coefficient(g)
        self.poly = self.g.poly.antiderivative() if self.g.poly is not None else None
        self.panel = panel
        self._nodes = {0: 0.0}

    def _gl(self, a, b):
        if a == b:
            return 0.0
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        xs = mid + half * _GL_NODES
        return half * float(np.dot(_GL_WEIGHTS, self.g.values(xs)))

    def _node_value(self, k):
        val = self._nodes.get(k)
        if val is not None:
            return val
        step = 1 if k > 0 else -1
        # walk from the nearest cached node towards k
        i = k
        while i not in self._nodes:
            i -= step
        acc = self._nodes[i]
        while i != k:
            a, b = i * self.panel, (i + step) * self.panel
            acc += self._gl(a, b)
            i += step
            self._nodes[i] = acc
        return acc

    def __call__(self, x):
        if self.poly is not None:
            return float(self.poly(float(x)))
        k = int(round(x / self.panel))
        return self._node_value(k) + self._gl(k * self.panel, float(x))


def _quad_to_infinity(g, sign):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        try:
            val, _ = integrate.quad(lambda s: g(sign * s) * sign, 0, INF, limit=200)
        except (integrate.IntegrationWarning, RuntimeWarning, OverflowError, ValueError):
            return INF
    return val if math.isfinite(val) else INF


class ContiFilippov(TransformerMixin, BaseEstimator):
    """Estimator-style wrapper around the transformation for a given ``g``.

    Parameters
    ----------
    g : str, Expression, Polynomial or Coefficient
        Restoring term with ``x g(x) > 0`` off the origin and ``g'(0) > 0``.
    domain : tuple
        Open interval ``(a, b)`` with ``a < 0 < b``; infinite ends allowed.

    Attributes
    ----------
    G_ : Antiderivative
    gprime0_ : float
    u_range_ : tuple of float
        Image ``(u-, u+)`` of the domain.
    """

    def __init__(self, g="x", domain=(-INF, INF)):
        self.g = g
        self.domain = domain

    def fit(self, X=None, y=None):
        g = as_coefficient(self.g)
        a, b = float(self.domain[0]), float(self.domain[1])
        if not a < 0 < b:
            raise GNotAdmissibleError("domain must contain 0")
        check_admissible_g(g, (a, b))
        self.g_ = g
        self.dg_ = g.derivative()
        self.ddg_ = self.dg_.derivative()
        self.G_ = Antiderivative(g)
        self.gprime0_ = self.dg_(0.0)
        self.domain_ = (a, b)
        self.u_range_ = (-self._limit(a), self._limit(b))
        return self

    def _limit(self, end):
        if math.isfinite(end):
            return math.sqrt(2 * self.G_(end))
        if self.g_.poly is not None:
            # admissible polynomial g has odd degree and positive leading term
            return INF
        G = _quad_to_infinity(self.g_, 1 if end > 0 else -1)
        return math.sqrt(2 * G) if math.isfinite(G) else INF

    # -- scalar maps --------------------------------------------------------
    def _check_x(self, x):
        a, b = self.domain_
        if not a < x < b:
            raise OutOfDomainError(f"x = {x} outside {self.domain_}")

    def alpha(self, x):
        check_is_fitted(self, "G_")
        self._check_x(x)
        return self._alpha(x)

    def _alpha(self, x):
        if x == 0:
            return 0.0
        return math.copysign(math.sqrt(max(2 * self.G_(x), 0.0)), x)

    def beta(self, u):
        check_is_fitted(self, "G_")
        return self._beta(u)

    def _beta(self, u):
        lo, hi = self.u_range_
        if not lo < u < hi:
            raise OutOfRangeError(f"u = {u} outside {self.u_range_}")
        if u == 0:
            return 0.0
        tol = 1e-13 * (1 + abs(u))
        x = u / math.sqrt(self.gprime0_)
        a, b = self.domain_
        x = min(max(x, 0.5 * a if math.isfinite(a) else x), 0.5 * b if math.isfinite(b) else x)
        for _ in range(60):
            if not a < x < b or x == 0 or (x > 0) != (u > 0):
                break
            au = self._alpha(x)
            r = au - u
            if abs(r) <= tol:
                return x
            slope = self.g_(x) / au
            if slope <= 0 or not math.isfinite(slope):
                break
            x = x - r / slope
        return self._beta_bracket(u, tol)

    def _beta_bracket(self, u, tol):
        a, b = self.domain_
        end = b if u > 0 else a
        step = math.copysign(max(1.0, abs(u) / math.sqrt(self.gprime0_)), u)
        far = step
        while (self._alpha(far) - u) * math.copysign(1, u) < 0:
            far *= 2
            if not a < far < b:
                far = end - math.copysign(1e-15 * max(1.0, abs(end)), u)
                break
        lo, hi = (0.0, far) if u > 0 else (far, 0.0)
        return optimize.brentq(lambda x: self._alpha(x) - u, lo, hi,
                               xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)

    def u_over_g(self, u):
        """``u / g(beta(u))`` with its positive limit ``1/sqrt(g'(0))`` at ``u = 0``."""
        if abs(u) < 1e-6:
            k = self.gprime0_
            return 1 / math.sqrt(k) - self.ddg_(0.0) * u / (3 * k * k)
        return u / self.g_(self._beta(u))

    # -- sklearn surface ----------------------------------------------------
    def transform(self, X):
        """Map rows ``(x, y)`` to ``(u, v)``."""
        check_is_fitted(self, "G_")
        X = check_points(X)
        out = X.copy()
        out[:, 0] = [self.alpha(x) for x in X[:, 0]]
        return out

    def inverse_transform(self, X):
        check_is_fitted(self, "G_")
        X = check_points(X)
        out = X.copy()
        out[:, 0] = [self.beta(u) for u in X[:, 0]]
        return out


def check_admissible_g(g: Coefficient, domain, n_samples: int = 10_000):
    """Raise :class:`GNotAdmissibleError` unless ``x g(x) > 0`` for ``x != 0`` and ``g'(0) > 0``."""
    a, b = domain
    dg0 = g.derivative()(0.0)
    if not dg0 > 0:
        raise GNotAdmissibleError(f"g'(0) = {dg0} is not positive")
    if g.poly is not None:
        p = g.poly
        if p(0) != 0:
            raise GNotAdmissibleError("g(0) != 0")
        q = p.divmod(Polynomial.x())[0]
        v = sign_on_interval(q, (a, b), ">0")
        if not v.is_proved:
            raise GNotAdmissibleError(f"x g(x) > 0 fails near x = {float(v.witness)}")
        return
    lo, hi = max(a, -20.0), min(b, 20.0)
    xs = np.linspace(lo, hi, n_samples + 2)[1:-1]
    xs = xs[np.abs(xs) > 1e-8]
    vals = xs * g.values(xs)
    bad = np.flatnonzero(vals <= 0)
    if bad.size:
        raise GNotAdmissibleError(f"x g(x) > 0 fails at x = {xs[bad[0]]}")


# ---------------------------------------------------------------------------
# functional interface

def fit_transform_for(system: StructuredSystem) -> ContiFilippov:
    return ContiFilippov(system.g, system.domain).fit()


def G_eval(cf: ContiFilippov, x) -> float:
    cf._check_x(x)
    return cf.G_(x)


def alpha(cf: ContiFilippov, x) -> float:
    return cf.alpha(x)


def beta(cf: ContiFilippov, u) -> float:
    return cf.beta(u)


def pushforward(s: StructuredSystem, cf: ContiFilippov = None) -> StructuredSystem:
    """The transformed system ``u' = v, v' = -u - v sum_j ft_j(u) v^(j-1)``.

    ``ft_j(u) = u f_j(beta(u)) / g(beta(u))``; the coefficients are black-box
    callables (the removable singularity at ``u = 0`` uses the series limit).
    """
    cf = cf or fit_transform_for(s)
    new_f = {}
    for j, c in s.f.items():
        new_f[j] = Coefficient(_pushed(cf, c), label=f"pushforward f_{j}")
    lo, hi = cf.u_range_
    out = StructuredSystem("x", new_f, (lo, hi), None, name=f"{s.name} (u-plane)" if s.name else "")
    out.source = s
    out.transform = cf
    return out


def _pushed(cf, c):
    @lru_cache(maxsize=4096)
    def ft(u):
        u = float(u)
        x = cf._beta(u) if u != 0 else 0.0
        return c(x) * cf.u_over_g(u)
    return ft


def psi_eval(s: StructuredSystem, x, y, cf: ContiFilippov = None) -> float:
    """Star-shape quantity of the transformed system, expressed in ``(x, y)``.

    ``(sign(x) sqrt(2G) / g) [2G (Phi_x g - Phi g') / g^2 + Phi + y Phi_y]``;
    equals ``u phi_u + v phi_v`` at ``(u, v) = (alpha(x), y)``.
    """
    cf = cf or fit_transform_for(s)
    s._check(x)
    Phi_y = s.scalar("phi_y")(x, y)
    if x == 0:
        return y * Phi_y / math.sqrt(cf.gprime0_)
    G = cf.G_(x)
    g = cf.g_(x)
    dg = cf.dg_(x)
    Phi = s.scalar("phi")(x, y)
    Phi_x = s.scalar("phi_x")(x, y)
    factor = math.copysign(math.sqrt(2 * G), x) / g
    return factor * (2 * G * (Phi_x * g - Phi * dg) / (g * g) + Phi + y * Phi_y)


def psi_via_pushforward(pushed: StructuredSystem, u, v) -> float:
    """``u phi_u + v phi_v`` on the transformed system, ``phi_u`` by central difference."""
    h = 1e-5 * max(1.0, abs(u))
    lo, hi = pushed.domain
    if not (lo < u - h and u + h < hi):
        raise OutOfDomainError("too close to the edge of the u-range")
    phi = pushed.scalar("phi")
    phi_u = (phi(u + h, v) - phi(u - h, v)) / (2 * h)
    phi_v = pushed.scalar("phi_y")(u, v)
    return u * phi_u + v * phi_v
