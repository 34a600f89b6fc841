"""Exact rational polynomials and sign certificates on intervals.

Everything that can end in a *Proved* verdict runs on :class:`fractions.Fraction`
arithmetic: real roots are counted with Sturm sequences and the sign between
consecutive roots is read off at exact rational sample points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exceptions import KappaNotPositiveError, NotPolynomialError
from . import expr as E


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, float):
        if not math.isfinite(c):
            raise ValueError("polynomial coefficients must be finite")
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


class Polynomial:
    """Dense univariate polynomial with exact rational coefficients, ascending degree."""

    __slots__ = ("coeffs", "_float_coeffs")

    def __init__(self, coeffs: Sequence = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self._float_coeffs = None

    @classmethod
    def x(cls):
        return cls([0, 1])

    @classmethod
    def constant(cls, c):
        return cls([c])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial([other])
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial([{', '.join(str(c) for c in self.coeffs)}])"

    def __str__(self):
        return E.to_string(self.to_expression())

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial([p + q for p, q in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def antiderivative(self) -> "Polynomial":
        """Antiderivative vanishing at 0."""
        return Polynomial([Fraction(0)] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        if self._float_coeffs is None:
            self._float_coeffs = tuple(float(c) for c in self.coeffs)
        acc = 0.0
        for c in reversed(self._float_coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.leading
        dv = len(other.coeffs) - 1
        for k in range(len(rem) - 1 - dv, -1, -1):
            c = rem[k + dv] / lead
            q[k] = c
            if c:
                for i, b in enumerate(other.coeffs):
                    rem[k + i] -= c * b
        return Polynomial(q), Polynomial(rem[:dv] if dv > 0 else [])

    def monic(self):
        return self if self.is_zero() else Polynomial([c / self.leading for c in self.coeffs])

    def to_expression(self) -> E.Expression:
        out = E.ZERO
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            term = E.mul(E.Const(c), E.power(E.X, i)) if i else E.Const(c)
            out = E.add(out, term)
        return out

    def root_bound(self) -> Fraction:
        """Cauchy radius: every real root lies strictly inside (-R, R)."""
        if self.degree <= 0:
            return Fraction(1)
        lead = abs(self.leading)
        return 1 + max(abs(c) / lead for c in self.coeffs[:-1])


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


def poly_from_expression(e) -> Polynomial:
    """Exact coefficients of an expression that is a polynomial in ``x``.

    Raises :class:`NotPolynomialError` for transcendental nodes, negative
    powers of non-constants, division by non-constants or a ``y`` dependence.
    """
    if isinstance(e, str):
        e = E.parse(e)
    if isinstance(e, E.Const):
        return Polynomial([e.value])
    if isinstance(e, E.Var):
        if e.name != "x":
            raise NotPolynomialError("expression depends on y")
        return Polynomial.x()
    if isinstance(e, E.Neg):
        return -poly_from_expression(e.arg)
    if isinstance(e, E.Pow):
        base = poly_from_expression(e.base)
        if e.exponent < 0:
            if base.degree == 0:
                return Polynomial([base.coeffs[0] ** e.exponent])
            raise NotPolynomialError("negative power of a non-constant")
        return base ** e.exponent
    if isinstance(e, E.BinOp):
        a = poly_from_expression(e.left)
        b = poly_from_expression(e.right)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b.degree == 0:
            return a * Polynomial([1 / b.coeffs[0]])
        raise NotPolynomialError("division by a non-constant")
    if isinstance(e, E.Func):
        raise NotPolynomialError(f"transcendental function {e.name}")
    raise NotPolynomialError(repr(e))


# ---------------------------------------------------------------------------
# sign verdicts

@dataclass(frozen=True)
class SignVerdict:
    """Outcome of a sign question.

    ``kind`` is one of ``"proved"``, ``"refuted"``, ``"sampled"`` (passed on
    samples only) or ``"inconclusive"``. Refutations carry the witness ``x``
    and the offending ``value``.
    """

    kind: str
    witness: Optional[object] = None
    value: Optional[object] = None
    samples: int = 0
    reason: str = ""
    detail: dict = field(default_factory=dict, compare=False)

    @classmethod
    def proved(cls, reason="", **detail):
        return cls("proved", reason=reason, detail=detail)

    @classmethod
    def refuted(cls, witness, value, reason="", **detail):
        return cls("refuted", witness=witness, value=value, reason=reason, detail=detail)

    @classmethod
    def sampled(cls, samples, reason="", **detail):
        return cls("sampled", samples=samples, reason=reason, detail=detail)

    @classmethod
    def inconclusive(cls, reason, **detail):
        return cls("inconclusive", reason=reason, detail=detail)

    @property
    def is_proved(self):
        return self.kind == "proved"

    @property
    def is_refuted(self):
        return self.kind == "refuted"

    @property
    def passed(self):
        """True for proved or sampled verdicts."""
        return self.kind in ("proved", "sampled")

    def to_dict(self):
        out = {"kind": self.kind}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
            out["value"] = _jsonable(self.value)
            out["value_sign"] = (self.value > 0) - (self.value < 0)
        if self.kind == "sampled":
            out["samples"] = self.samples
        if self.reason:
            out["reason"] = self.reason
        for k, v in self.detail.items():
            out[k] = _jsonable(v)
        return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    if isinstance(v, dict):
        return {k: _jsonable(u) for k, u in v.items()}
    return v


def combine(verdicts) -> SignVerdict:
    """Conjunction of verdicts; the first refutation wins."""
    verdicts = list(verdicts)
    for v in verdicts:
        if v.is_refuted:
            return v
    for v in verdicts:
        if v.kind == "inconclusive":
            return v
    samples = sum(v.samples for v in verdicts if v.kind == "sampled")
    if any(v.kind == "sampled" for v in verdicts):
        return SignVerdict.sampled(samples)
    return SignVerdict.proved()


# ---------------------------------------------------------------------------
# Sturm machinery

def sturm_sequence(p: Polynomial):
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        r = seq[-2].divmod(seq[-1])[1]
        if r.is_zero():
            break
        seq.append(-r)
    return [q for q in seq if not q.is_zero()]


def _variations(seq, x: Fraction) -> int:
    count = 0
    last = 0
    for q in seq:
        v = q(x)
        if v == 0:
            continue
        s = 1 if v > 0 else -1
        if last and s != last:
            count += 1
        last = s
    return count


def squarefree(p: Polynomial) -> Polynomial:
    if p.degree <= 0:
        return p
    return p.divmod(poly_gcd(p, p.derivative()))[0]


def count_roots(p: Polynomial, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots of ``p`` in ``(lo, hi]``."""
    q = squarefree(p)
    if q.degree <= 0:
        return 0
    seq = sturm_sequence(q)
    return _variations(seq, Fraction(lo)) - _variations(seq, Fraction(hi))


def _nonroot_near(q, m: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    # nudge a split point off an exact root; q has finitely many roots
    k = 3
    while q(m) == 0:
        m = m + (hi - lo) / (k * 7)
        k += 1
    return m


def isolate_roots(p: Polynomial, lo: Fraction, hi: Fraction):
    """Disjoint open intervals ``(l, u)`` each holding exactly one root of ``p``
    in ``(lo, hi)``; ``l``/``u`` are never roots unless equal to ``lo``/``hi``."""
    q = squarefree(p)
    if q.degree <= 0:
        return []
    seq = sturm_sequence(q)
    lo, hi = Fraction(lo), Fraction(hi)

    def count(a, b):
        n = _variations(seq, a) - _variations(seq, b)
        # exclude b itself if it is a root
        if q(b) == 0:
            n -= 1
        return n

    out = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = count(a, b)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        m = _nonroot_near(q, (a + b) / 2, a, b)
        stack.append((m, b))
        stack.append((a, m))
    out.sort()
    return out


def _interval_limits(interval):
    a, b = interval
    a = None if a is None or (isinstance(a, float) and math.isinf(a)) else Fraction(a)
    b = None if b is None or (isinstance(b, float) and math.isinf(b)) else Fraction(b)
    return a, b


_REQUIREMENTS = (">=0", "<=0", ">0*", ">0", "<0")


def sign_on_interval(p: Polynomial, interval=(-math.inf, math.inf), required: str = ">=0",
                     closed: bool = False) -> SignVerdict:
    """Certify the sign of ``p`` on the open interval ``(a, b)``.

    ``required`` is ``">=0"``, ``"<=0"``, ``">0*"`` (non-negative and not the
    zero polynomial, so only finitely many zeros), or the strict ``">0"`` /
    ``"<0"``. Infinite endpoints are allowed. With ``closed=True`` finite
    endpoints are included.
    """
    if required not in _REQUIREMENTS:
        raise ValueError(f"required must be one of {_REQUIREMENTS}")
    if required in ("<=0", "<0"):
        flipped = {"<=0": ">=0", "<0": ">0"}[required]
        v = sign_on_interval(-p, interval, flipped, closed)
        if v.is_refuted:
            return SignVerdict.refuted(v.witness, -v.value, v.reason)
        return v

    a, b = _interval_limits(interval)
    if a is not None and b is not None and a >= b:
        raise ValueError("empty interval")
    strict = required == ">0"

    if p.is_zero():
        if required == ">=0":
            return SignVerdict.proved("zero polynomial")
        w = Fraction(0) if (a is None or a < 0) and (b is None or b > 0) else _midpoint(a, b)
        return SignVerdict.refuted(w, Fraction(0), "zero polynomial")

    R = p.root_bound() + 1
    lo = a if a is not None else -R
    hi = b if b is not None else R

    roots = isolate_roots(p, lo, hi)
    samples = _gap_samples(p, roots, lo, hi)
    for s in samples:
        v = p(s)
        if v < 0 or (strict and v == 0):
            return SignVerdict.refuted(s, v, "negative sample between roots")
    if strict and roots:
        # an isolating interval holds a root of p inside (lo, hi); pin it down to a witness
        w = _refine_root(p, *roots[0])
        return SignVerdict.refuted(w, p(w), "root inside interval")
    if closed:
        for end in (a, b):
            if end is not None:
                v = p(end)
                if v < 0 or (strict and v == 0):
                    return SignVerdict.refuted(end, v, "endpoint")
    return SignVerdict.proved("Sturm isolation", roots=len(roots))


def _midpoint(a, b):
    if a is None and b is None:
        return Fraction(0)
    if a is None:
        return b - 1
    if b is None:
        return a + 1
    return (a + b) / 2


def _refine_root(p, l, u, iterations=60):
    """Bisect an isolating interval; returns an exact root if one is hit, else a midpoint."""
    q = squarefree(p)
    fl = q(l)
    for _ in range(iterations):
        m = (l + u) / 2
        fm = q(m)
        if fm == 0:
            return m
        if (fm > 0) == (fl > 0):
            l, fl = m, fm
        else:
            u = m
    mid = (l + u) / 2
    guess = mid.limit_denominator(10**6)
    if q(guess) == 0:
        return guess
    return mid


def _gap_samples(p, roots, lo, hi):
    """One rational point in every root-free gap of (lo, hi)."""
    q = squarefree(p)
    if not roots:
        return [(lo + hi) / 2]
    pts = []
    # left of the first root
    l, u = roots[0]
    if l > lo:
        pts.append(l if q(l) != 0 else (lo + l) / 2)
    else:
        pts.append(_point_left_of_root(q, l, u))
    for (l1, u1), (l2, u2) in zip(roots, roots[1:]):
        pts.append(u1 if u1 < l2 or q(u1) != 0 else (u1 + l2) / 2)
        if u1 == l2 and q(u1) == 0:
            # should not happen: isolate_roots keeps split points off roots
            pts[-1] = _point_right_of_root(q, l1, u1)
    l, u = roots[-1]
    if u < hi:
        pts.append(u if q(u) != 0 else (u + hi) / 2)
    else:
        pts.append(_point_right_of_root(q, l, u))
    return pts


def _point_left_of_root(q, l, u):
    """Rational in (l, root) where (l, u) isolates exactly one root."""
    seq = sturm_sequence(q)
    while True:
        m = _nonroot_near(q, (l + u) / 2, l, u)
        n = _variations(seq, l) - _variations(seq, m)
        if n == 0:
            return m
        u = m


def _point_right_of_root(q, l, u):
    seq = sturm_sequence(q)
    while True:
        m = _nonroot_near(q, (l + u) / 2, l, u)
        n = _variations(seq, m) - _variations(seq, u) - (1 if q(u) == 0 else 0)
        if n == 0:
            return m
        l = m


# ---------------------------------------------------------------------------
# interval evaluation and the Cauchy root radius

def interval_eval(p: Polynomial, lo: Fraction, hi: Fraction):
    """Enclosure ``[m, M]`` of ``p`` over ``[lo, hi]`` by interval Horner."""
    a, b = Fraction(0), Fraction(0)
    for c in reversed(p.coeffs):
        # [a, b] * [lo, hi]
        prods = (a * lo, a * hi, b * lo, b * hi)
        a, b = min(prods) + c, max(prods) + c
    return a, b


def _abs_upper(p, lo, hi):
    m, M = interval_eval(p, lo, hi)
    return max(abs(m), abs(M))


def cauchy_bound(kappa: Polynomial, tau: Polynomial, eta: Polynomial, eps, pieces: int = 512) -> float:
    """Upper bound on every real ``z``-root of ``kappa z^2 + tau z + eta`` for
    ``x`` in ``[-eps, eps]``.

    Maximises ``1 + max(|tau|, |eta|) / |kappa|`` over the interval using exact
    interval enclosures on ``pieces`` sub-intervals, so the result is an upper
    bound rather than a sampled estimate.
    """
    eps = Fraction(eps)
    if not sign_on_interval(kappa, (-eps, eps), ">0", closed=True).is_proved:
        raise KappaNotPositiveError("kappa is not positive on [-eps, eps]")
    if eps == 0:
        x0 = Fraction(0)
        return float(1 + max(abs(tau(x0)), abs(eta(x0))) / kappa(x0))
    best = Fraction(0)
    step = 2 * eps / pieces
    stack = [(-eps + i * step, -eps + (i + 1) * step, 0) for i in range(pieces)]
    while stack:
        lo, hi, depth = stack.pop()
        kmin, _ = interval_eval(kappa, lo, hi)
        if kmin <= 0:
            if depth > 30:
                raise KappaNotPositiveError("could not separate kappa from zero")
            mid = (lo + hi) / 2
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
            continue
        z = 1 + max(_abs_upper(tau, lo, hi), _abs_upper(eta, lo, hi)) / kmin
        if z > best:
            best = z
    return float(best)
