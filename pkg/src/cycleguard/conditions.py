"""Hypothesis checkers for the uniqueness and existence theorems.

Polynomial inputs get exact verdicts (``proved``/``refuted``) from Sturm
isolation; anything transcendental is sampled (``sampled``/``refuted``) and a
sampled pass never counts as a proof.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_system
from .exceptions import (ConstructionFailsError, DecompositionRequiredError, GNotAdmissibleError,
                         KappaNotPositiveError)
from .poly import Polynomial, SignVerdict, cauchy_bound, combine, interval_eval, sign_on_interval
from .system import Coefficient, StructuredSystem, TrinomialDecomposition, as_coefficient

N_SAMPLES = 10_000
SAMPLE_CAP = 10.0
TOL = 1e-12
EPS_GRID = [2.0 ** i for i in range(-6, 7)]
INF = math.inf
_X = Polynomial.x()


# ---------------------------------------------------------------------------
# deciding one sign question

class _Quantity:
    """A univariate quantity: exact polynomial when available, else a vectorised callable."""

    def __init__(self, poly: Optional[Polynomial], fn):
        self.poly = poly
        self.fn = fn

    def values(self, xs):
        if self.poly is not None:
            return np.array([float(self.poly(float(x))) for x in np.ravel(xs)])
        with np.errstate(all="ignore"):
            return np.asarray(self.fn(np.asarray(xs, dtype=float)), dtype=float)

    def __call__(self, x):
        if self.poly is not None:
            return float(self.poly(float(x)))
        return float(self.values(np.array([float(x)]))[0])

    def is_zero(self):
        return self.poly is not None and self.poly.is_zero()


def _q_coef(c: Coefficient) -> _Quantity:
    return _Quantity(c.poly, c.values)


def _q_combo(terms):
    """``sum_i factor_i(x) * coef_i`` where each term is ``(poly_multiplier, Coefficient)``."""
    polys = [c.poly for _, c in terms]
    if all(p is not None for p in polys):
        out = Polynomial()
        for (m, _), p in zip(terms, polys):
            out = out + m * p
        return _Quantity(out, None)

    def fn(xs):
        total = np.zeros_like(xs, dtype=float)
        for m, c in terms:
            total = total + np.array([float(m(float(x))) for x in xs]) * c.values(xs)
        return total
    return _Quantity(None, fn)


def _grid(interval, n, closed=False, exclude_zero=False):
    a, b = interval
    lo = a if math.isfinite(a) else min(-SAMPLE_CAP, b - SAMPLE_CAP)
    hi = b if math.isfinite(b) else max(SAMPLE_CAP, a + SAMPLE_CAP)
    xs = np.linspace(lo, hi, n)
    if lo <= 0 <= hi:
        xs = np.union1d(xs, [0.0])
    if not closed:
        xs = xs[(xs > a) & (xs < b)]
    if exclude_zero:
        xs = xs[np.abs(xs) > 1e-8]
    return xs


def _sampled(q: _Quantity, interval, required, n=N_SAMPLES, closed=False, exclude_zero=False):
    """Sampled verdict; any sample of the wrong sign refutes, with the worst sample as witness."""
    xs = _grid(interval, n, closed, exclude_zero)
    vals = q.values(xs)
    if not np.all(np.isfinite(vals)):
        k = int(np.flatnonzero(~np.isfinite(vals))[0])
        return SignVerdict.inconclusive(f"non-finite value at x = {xs[k]:.6g}")
    if required in ("<=0", "<0"):
        vals = -vals
    bad = vals <= 0 if required in (">0", "<0") else vals < 0
    sign = -1.0 if required in ("<=0", "<0") else 1.0
    if bad.any():
        k = int(np.argmin(vals))
        return SignVerdict.refuted(float(xs[k]), sign * float(vals[k]), "sampled counterexample")
    if required == ">0*" and not np.any(vals > 0):
        return SignVerdict.refuted(float(xs[0]), float(vals[0]), "identically zero on samples")
    return SignVerdict.sampled(int(xs.size))


def decide(q: _Quantity, interval, required, n=N_SAMPLES, closed=False, exclude_zero=False) -> SignVerdict:
    if q.poly is not None:
        a, b = interval
        if closed and a == b:
            v = q.poly(Fraction(a))
            ok = {">=0": v >= 0, ">0*": v >= 0, "<=0": v <= 0, ">0": v > 0, "<0": v < 0}[required]
            return SignVerdict.proved("point check") if ok else SignVerdict.refuted(Fraction(a), v, "point")
        return sign_on_interval(q.poly, interval, required, closed)
    return _sampled(q, interval, required, n, closed, exclude_zero)


def _outside(interval, eps):
    """Parts of ``interval`` with ``|x| > eps``."""
    a, b = interval
    parts = []
    if a < -eps:
        parts.append((a, -eps))
    if b > eps:
        parts.append((eps, b))
    return parts


def _tagged(v: SignVerdict, **detail) -> SignVerdict:
    return SignVerdict(v.kind, v.witness, v.value, v.samples, v.reason, {**v.detail, **detail})


# ---------------------------------------------------------------------------
# trinomial conditions

def _piece_quantities(piece):
    """``K, Tm, H`` of the radial derivative of a piece, as quantities in ``x``."""
    h, r = piece.h, piece.r
    out = []
    for c, m in ((piece.kappa, 2 * h + 2 * r), (piece.tau, h + 2 * r), (piece.eta, 2 * r)):
        out.append(_q_combo([(_X, c.derivative()), (Polynomial.constant(m), c)]))
    return out


def _discriminant(Tm: _Quantity, H: _Quantity, K: _Quantity) -> _Quantity:
    if Tm.poly is not None and H.poly is not None and K.poly is not None:
        return _Quantity(Tm.poly * Tm.poly - 4 * H.poly * K.poly, None)
    return _Quantity(None, lambda xs: Tm.values(xs) ** 2 - 4 * H.values(xs) * K.values(xs))


def transformed_trinomial(piece):
    """Coefficients ``(K, Tm, H)`` of ``x P_x + y P_y = y^(2r) (K z^2 + Tm z + H)``, ``z = y^h``,
    and the discriminant ``Tm^2 - 4 H K`` (exact polynomials when available)."""
    K, Tm, H = _piece_quantities(piece)
    D = _discriminant(Tm, H, K)
    return {"K": K.poly, "Tm": Tm.poly, "H": H.poly, "D": D.poly}


def _check_T(d, interval, sign):
    d = _as_decomposition(d)
    req_lead = ">=0" if sign > 0 else "<=0"
    out = []
    for piece in d:
        K, Tm, H = _piece_quantities(piece)
        D = _discriminant(Tm, H, K)
        parts = {"discriminant": decide(D, interval, "<=0"),
                 "leading": decide(K, interval, req_lead),
                 "constant": decide(H, interval, req_lead)}
        v = combine(parts.values())
        detail = {"parts": {k: p.kind for k, p in parts.items()}}
        if D.poly is not None:
            detail.update(K=str(K.poly), Tm=str(Tm.poly), H=str(H.poly), discriminant=str(D.poly))
        out.append(_tagged(v, **detail))
    return out


def check_Tplus(d, interval=(-INF, INF)) -> List[SignVerdict]:
    """Per-piece verdicts for ``(x tau' + (h+2r) tau)^2 - 4 (x eta' + 2r eta)(x kappa' + (2h+2r) kappa) <= 0``
    together with ``x kappa' + (2h+2r) kappa >= 0`` on the interval.

    The ``x eta' + 2r eta >= 0`` part is checked as well; it follows from the
    other two wherever the leading coefficient is positive and carries the
    condition alone when the leading coefficient vanishes identically.
    """
    return _check_T(d, interval, +1)


def check_Tminus(d, interval=(-INF, INF)) -> List[SignVerdict]:
    """Mirror image of :func:`check_Tplus` (non-positive radial derivative)."""
    return _check_T(d, interval, -1)


def _Tpp_piece(piece, eps, interval):
    k = _q_coef(piece.kappa)
    t = _q_coef(piece.tau)
    e = _q_coef(piece.eta)
    if k.poly is not None and t.poly is not None and e.poly is not None:
        disc = _Quantity(t.poly * t.poly - 4 * e.poly * k.poly, None)
    else:
        disc = _Quantity(None, lambda xs: t.values(xs) ** 2 - 4 * e.values(xs) * k.values(xs))
    parts = []
    for part in _outside(interval, eps):
        parts.append(decide(disc, part, "<=0"))
        parts.append(decide(k, part, ">=0"))
    inner = (max(interval[0], -eps), min(interval[1], eps))
    kpos = decide(k, inner, ">0", closed=True)
    return combine(parts), kpos


def check_Tplusplus(d, eps=None, interval=(-INF, INF)) -> List[SignVerdict]:
    """Per-piece verdicts for ``tau^2 - 4 eta kappa <= 0`` and ``kappa >= 0`` on ``|x| > eps``,
    plus ``kappa > 0`` on ``[-eps, eps]``.

    Without ``eps`` the smallest working value in ``2^-6 .. 2^6`` is used (the
    largest one if none works). The chosen value is in each verdict's detail.
    """
    d = _as_decomposition(d)
    if eps is not None:
        return _Tpp_at(d, float(eps), interval)
    last = None
    for e in EPS_GRID:
        last = _Tpp_at(d, e, interval)
        if all(v.passed for v in last):
            return last
    return last


def _Tpp_at(d, eps, interval):
    out = []
    for piece in d:
        outer, kpos = _Tpp_piece(piece, eps, interval)
        v = combine([outer, kpos])
        out.append(_tagged(v, eps=eps, outer=outer.kind, kappa_positive=kpos.kind))
    return out


def _as_decomposition(d):
    if isinstance(d, StructuredSystem):
        return d.decomposition()
    if isinstance(d, TrinomialDecomposition):
        return d
    return TrinomialDecomposition(d)


# ---------------------------------------------------------------------------
# (Seq), odd systems, (L2)/(L3)

def _h(c: Coefficient, j: int) -> _Quantity:
    """``x f' + (j - 1) f``."""
    return _q_combo([(_X, c.derivative()), (Polynomial.constant(j - 1), c)])


def check_seq(s: StructuredSystem) -> SignVerdict:
    """Some ``x f_j' + (j-1) f_j`` is nonzero on a sequence tending to 0 inside the domain."""
    hs = {j: _h(c, j) for j, c in s.f.items()}
    if not hs:
        return SignVerdict.refuted(Fraction(0), Fraction(0), "phi vanishes identically")
    for j, q in hs.items():
        if q.poly is not None and not q.poly.is_zero():
            return SignVerdict.proved(f"x f_{j}' + {j - 1} f_{j} is a nonzero polynomial", index=j)
    numeric = {j: q for j, q in hs.items() if q.poly is None}
    if not numeric:
        return SignVerdict.refuted(Fraction(0), Fraction(0), "every x f_j' + (j-1) f_j vanishes identically")
    a, b = s.domain
    for i in range(1, 41):
        pts = [p for p in (2.0 ** -i, -(2.0 ** -i)) if a < p < b]
        if not any(q(p) != 0 for q in numeric.values() for p in pts):
            return SignVerdict.refuted(pts[0] if pts else 0.0, 0.0, f"all vanish at scale 2^-{i}")
    return SignVerdict.sampled(80, "nonzero at every dyadic scale 2^-1 .. 2^-40")


def check_even_vanish(s: StructuredSystem) -> SignVerdict:
    for j, c in s.f.items():
        if j % 2 == 0:
            w = _nonzero_point(c, s.domain)
            return SignVerdict.refuted(w, c(w), f"f_{j} is not identically zero", index=j)
    return SignVerdict.proved("no even-index coefficients")


def _nonzero_point(c, domain):
    a, b = domain
    for x in (1.0, 0.5, -0.5, -1.0, 0.25, 0.125, 2.0, 0.0):
        if a < x < b and c(x) != 0:
            return x
    return 0.0


def check_corollary_odd(s: StructuredSystem) -> dict:
    """Verdicts for the odd-system route: even terms vanish, each
    ``x f_j' + (j-1) f_j >= 0`` on the domain, and (Seq)."""
    out = {"even_terms_vanish": check_even_vanish(s), "odd": {}}
    for j, c in s.f.items():
        if j % 2 == 1:
            out["odd"][j] = decide(_h(c, j), s.domain, ">=0")
    out["seq"] = check_seq(s)
    out["verdict"] = combine([out["even_terms_vanish"], *out["odd"].values(), out["seq"]])
    return out


def check_L2L3(s: StructuredSystem) -> dict:
    """Sign condition (L2) ``f_(2k+1) >= 0`` for ``k >= 1`` and monotonicity (L3)
    ``x f_(2k+1)' >= 0`` for ``k >= 0``, with per-coefficient verdicts (the sign
    entry for ``f_1`` is informational and not part of (L2))."""
    sign, mono = {}, {}
    for j, c in s.f.items():
        if j % 2 == 0:
            continue
        sign[j] = decide(_q_coef(c), s.domain, ">=0")
        mono[j] = decide(_q_combo([(_X, c.derivative())]), s.domain, ">=0")
    L2 = combine([v for j, v in sign.items() if j >= 3])
    L3 = combine(mono.values())
    odd = check_corollary_odd(s)
    implication = None
    if odd["verdict"].is_proved:
        # our hypothesis implies (L2): a failure here would contradict the theory
        implication = L2.is_proved
    return {"L2": L2, "L3": L3, "sign": sign, "monotone": mono, "hypothesis_implies_L2": implication}


# ---------------------------------------------------------------------------
# nonlinear restoring term

def hg_cleared(f: Polynomial, g: Polynomial, j: int) -> Polynomial:
    """``x [ j f g^3 + 2 G g (f' g - f g') ]``: the (H_g^j) bracket times ``g^2 > 0``."""
    G = g.antiderivative()
    return _X * (j * f * g * g * g + 2 * G * g * (f.derivative() * g - f * g.derivative()))


def check_Hg(f, g, j: int, interval=(-INF, INF), n_samples: int = N_SAMPLES) -> SignVerdict:
    """``x [ j f g + 2G (f' g - f g') / g ] >= 0`` for ``x != 0`` in the interval.

    The verdict's detail carries ``strict``: whether the quantity is not
    identically zero (exact for polynomials, sampled otherwise).
    """
    from .transform import Antiderivative, check_admissible_g

    f = as_coefficient(f)
    g = as_coefficient(g)
    check_admissible_g(g, interval)
    if f.poly is not None and g.poly is not None:
        q = hg_cleared(f.poly, g.poly, j)
        v = sign_on_interval(q, interval, ">=0")
        return _tagged(v, strict=not q.is_zero(), cleared=str(q))
    G = Antiderivative(g)
    df, dg = f.derivative(), g.derivative()

    def fn(xs):
        Gs = np.array([G(x) for x in xs])
        gs, fs = g.values(xs), f.values(xs)
        return xs * (j * fs * gs + 2 * Gs * (df.values(xs) * gs - fs * dg.values(xs)) / gs)

    q = _Quantity(None, fn)
    v = _sampled(q, interval, ">=0", n_samples, exclude_zero=True)
    strict = True
    for i in range(1, 41):
        pts = [p for p in (2.0 ** -i, -(2.0 ** -i)) if interval[0] < p < interval[1]]
        if not any(q(p) != 0 for p in pts):
            strict = False
            break
    return _tagged(v, strict=strict)


def check_Hg_strict_seq(s: StructuredSystem) -> SignVerdict:
    """Some strict (H_g^j) holds on a sequence tending to 0 (nonzero cleared form)."""
    verdicts = {j: check_Hg(c, s.g, j, s.domain) for j, c in s.f.items() if j % 2 == 1}
    if any(v.detail.get("strict") and v.kind != "sampled" for v in verdicts.values()):
        return SignVerdict.proved("cleared form is a nonzero polynomial")
    if any(v.detail.get("strict") for v in verdicts.values()):
        return SignVerdict.sampled(80, "nonzero at every dyadic scale")
    return SignVerdict.refuted(Fraction(0), Fraction(0), "no strict (H_g) condition near 0")


def psi_sampled(s: StructuredSystem, n: int = 100, cap: float = 5.0) -> SignVerdict:
    """``Psi >= 0`` on an ``n x n`` grid of the strip (sampled only)."""
    from .transform import fit_transform_for, psi_eval

    cf = fit_transform_for(s)
    a, b = s.sample_range(cap)
    xs = np.linspace(a, b, n + 2)[1:-1]
    ys = np.linspace(-cap, cap, n)
    count = 0
    for x in xs:
        for y in ys:
            v = psi_eval(s, float(x), float(y), cf)
            count += 1
            if v < -TOL * (1 + abs(x) + abs(y)):
                return SignVerdict.refuted((float(x), float(y)), float(v), "sampled counterexample")
    return SignVerdict.sampled(count)


# ---------------------------------------------------------------------------
# boundedness

@dataclass
class BoundednessCertificate:
    """Trapping set ``{2 E <= M^2}`` (the disk ``D_M`` when ``g(x) = x``)."""

    M: float
    eps: float
    Ybar: float
    route: str
    rectangle: tuple

    def to_dict(self):
        return {"M": _num(self.M), "eps": _num(self.eps), "Ybar": _num(self.Ybar), "route": self.route,
                "rectangle": [[_num(v) for v in side] for side in self.rectangle]}


def _num(v):
    return None if v is None or not math.isfinite(v) else float(f"{float(v):.12g}")


def _max_abs_over(q: _Quantity, lo, hi, n=2001):
    if q.poly is not None:
        if lo == hi:
            return abs(float(q.poly(Fraction(lo))))
        top = Fraction(0)
        step = (Fraction(hi) - Fraction(lo)) / 256
        for i in range(256):
            a = Fraction(lo) + i * step
            vlo, vhi = interval_eval(q.poly, a, a + step)
            top = max(top, abs(vlo), abs(vhi))
        return float(top)
    xs = np.linspace(lo, hi, n)
    return float(np.max(np.abs(q.values(xs))))


def _min_over(q: _Quantity, lo, hi, n=2001):
    if q.poly is not None:
        bottom = None
        step = (Fraction(hi) - Fraction(lo)) / 256
        for i in range(256):
            a = Fraction(lo) + i * step
            vlo, _ = interval_eval(q.poly, a, a + step)
            bottom = vlo if bottom is None else min(bottom, vlo)
        return float(bottom)
    xs = np.linspace(lo, hi, n)
    return float(np.min(q.values(xs)))


def _trinomial_ybar(d, eps):
    ybar = 0.0
    for piece in d:
        k, t, e = (_q_coef(piece.kappa), _q_coef(piece.tau), _q_coef(piece.eta))
        if k.poly is not None and t.poly is not None and e.poly is not None:
            z = cauchy_bound(k.poly, t.poly, e.poly, Fraction(eps))
        else:
            xs = np.linspace(-eps, eps, 2001)
            kv = k.values(xs)
            if not np.all(kv > 0):
                raise KappaNotPositiveError("kappa is not positive on [-eps, eps]")
            z = float(np.max(1 + np.maximum(np.abs(t.values(xs)), np.abs(e.values(xs))) / kv))
        ybar = max(ybar, z ** (1.0 / piece.h))
    return ybar


def _odd_route(s: StructuredSystem, eps):
    """``f_1 >= 0`` off ``[-eps, eps]`` and some ``f_(2k+1) > 0`` on it: returns ``(kbar, Ybar)`` or None."""
    f1 = s.f.get(1)
    if any(j % 2 == 0 for j in s.f):
        return None
    if f1 is not None:
        for part in _outside(s.domain, eps):
            if not decide(_q_coef(f1), part, ">=0").passed:
                return None
    for j in sorted(s.f):
        if j < 3:
            continue
        q = _q_coef(s.f[j])
        if decide(q, (-eps, eps), ">0", closed=True).passed:
            lo = _min_over(q, -eps, eps)
            top = _max_abs_over(_q_coef(f1), -eps, eps) if f1 is not None else 0.0
            ybar = (top / lo) ** (1.0 / (j - 1)) if lo > 0 else INF
            return (j - 1) // 2, ybar * (1 + 1e-9) + 1e-12
    return None


def boundedness_construction(s: StructuredSystem, eps=None, n_points: int = 1000) -> BoundednessCertificate:
    """Radius ``M`` with ``phi >= 0`` outside ``{2E <= M^2}``.

    Tries the trinomial route (positive leading coefficients near the axis)
    first, then the odd-system route. The result is checked by sampling
    ``phi`` on the level curves ``2E = (c M)^2``, ``c = 1, 2, 4, 8``; a negative
    sample raises :class:`ConstructionFailsError` carrying the point.
    """
    s = check_system(s, structured=True)
    if not s.f:
        return BoundednessCertificate(0.0, 0.0, 0.0, "trivial", ((0.0, 0.0), (0.0, 0.0)))
    eps_list = [float(eps)] if eps is not None else EPS_GRID
    found = None
    for e in eps_list:
        try:
            d = s.decomposition()
            if all(v.passed for v in _Tpp_at(d, e, s.domain)):
                found = (e, _trinomial_ybar(d, e), "trinomial")
                break
        except (DecompositionRequiredError, KappaNotPositiveError):
            pass
        odd = _odd_route(s, e)
        if odd is not None and math.isfinite(odd[1]):
            found = (e, odd[1], "odd")
            break
    if found is None:
        e, ybar, route = (eps_list[0], 0.0, "none")
    else:
        e, ybar, route = found
    M = math.sqrt(2 * max(s.G(-e), s.G(e)) + ybar * ybar) if route != "none" else 1.0
    cert = BoundednessCertificate(M, e, ybar, route, ((-e, e), (-ybar, ybar)))
    _verify_outside(s, M, n_points)
    if route == "none":
        raise ConstructionFailsError("no trapping-set construction applies", point=None, value=None)
    return cert


def _verify_outside(s, M, n_points):
    from .transform import fit_transform_for

    phi = s.scalar("phi")
    cf = None if s.is_unit_linear_g else fit_transform_for(s)
    theta = np.linspace(0.0, 2 * math.pi, n_points, endpoint=False)
    for c in (1, 2, 4, 8):
        R = c * M
        if R == 0:
            continue
        for th in theta:
            u, v = R * math.cos(th), R * math.sin(th)
            if cf is None:
                x = u
            else:
                lo, hi = cf.u_range_
                if not lo < u < hi:
                    continue
                x = cf.beta(u)
            if not s.in_domain(x):
                continue
            val = phi(x, v)
            if val < -TOL:
                raise ConstructionFailsError(
                    f"phi({x:.6g}, {v:.6g}) = {val:.6g} < 0 outside the trapping set of radius {M:.6g}",
                    point=(float(x), float(v)), value=float(val))


# ---------------------------------------------------------------------------
# full report

_RANK = {"proved": 3, "sampled": 2, "inconclusive": 1, "refuted": 0, "not-applicable": -1}
_CLAIM_TEXT = {
    "at-most-one": "at most one limit cycle, which is hyperbolic",
    "exactly-one": "exactly one limit cycle, which is hyperbolic and attracts every non-constant solution",
    "bounded": "every solution enters a bounded trapping set and stays there",
    "no-claim": "no claim",
}


@dataclass
class TheoremEntry:
    name: str
    status: str
    hypotheses: List[str]
    claim: str
    via: Optional[str] = None

    @property
    def applicable(self):
        return self.status in ("proved", "sampled")

    def to_dict(self):
        out = {"name": self.name, "status": self.status, "applicable": self.applicable,
               "hypotheses": list(self.hypotheses), "claim": self.claim}
        if self.via:
            out["via"] = self.via
        return out


@dataclass
class HypothesisReport:
    system: dict
    hypotheses: Dict[str, SignVerdict]
    theorems: List[TheoremEntry]
    claim: str
    claim_status: str
    via: Optional[str]
    boundedness: dict
    extras: dict = field(default_factory=dict)

    def theorem(self, name) -> TheoremEntry:
        for t in self.theorems:
            if t.name == name:
                return t
        raise KeyError(name)

    @property
    def applicable(self) -> List[str]:
        return [t.name for t in self.theorems if t.applicable]

    def to_dict(self):
        return {
            "system": self.system,
            "hypotheses": {k: v.to_dict() for k, v in self.hypotheses.items()},
            "theorems": [t.to_dict() for t in self.theorems],
            "applicable": self.applicable,
            "claim": self.claim,
            "claim_status": self.claim_status,
            "claim_text": _CLAIM_TEXT[self.claim],
            "via": self.via,
            "boundedness": self.boundedness,
            **({"extras": self.extras} if self.extras else {}),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _status(verdicts) -> str:
    verdicts = list(verdicts)
    if any(v is None for v in verdicts):
        return "not-applicable"
    kinds = [v.kind for v in verdicts]
    if "refuted" in kinds:
        return "refuted"
    if "inconclusive" in kinds:
        return "inconclusive"
    if "sampled" in kinds:
        return "sampled"
    return "proved"


def _best(entries):
    return max(entries, key=lambda t: _RANK[t.status])


def _na(reason):
    return SignVerdict.inconclusive(reason)


def full_report(s, eps=None, n_samples: int = N_SAMPLES) -> HypothesisReport:
    """Check every hypothesis and list which theorems apply, with the strongest claim."""
    from .transform import check_admissible_g, fit_transform_for

    s = check_system(s, structured=True)
    hyp: Dict[str, SignVerdict] = {}
    a, b = s.domain
    plane = not (math.isfinite(a) or math.isfinite(b))
    hyp["domain_is_plane"] = (SignVerdict.proved("domain is the whole plane") if plane
                              else SignVerdict.refuted(None, None, "domain is a proper strip"))
    try:
        check_admissible_g(s.g, s.domain)
        hyp["g_admissible"] = SignVerdict.proved() if s.g.poly is not None else SignVerdict.sampled(N_SAMPLES)
        admissible = True
    except GNotAdmissibleError as exc:
        hyp["g_admissible"] = SignVerdict.refuted(None, None, str(exc))
        admissible = False
    linear = s.is_linear_g
    hyp["g_linear"] = (SignVerdict.proved(f"g = {s.linear_k} x") if linear
                       else SignVerdict.refuted(None, None, "g is not linear"))
    phi00 = s.phi(0.0, 0.0)
    hyp["phi00_negative"] = (SignVerdict.proved(value=phi00) if phi00 < 0
                             else SignVerdict.refuted((0.0, 0.0), phi00, "phi(0, 0) >= 0"))
    hyp["seq"] = check_seq(s)
    odd = check_corollary_odd(s)
    hyp["even_terms_vanish"] = odd["even_terms_vanish"]
    for j, v in odd["odd"].items():
        hyp[f"odd_radial[{j}]"] = v
    odd_all = combine(list(odd["odd"].values()))
    odd_higher = combine([v for j, v in odd["odd"].items() if j >= 3])

    # trinomial decomposition
    try:
        d = s.decomposition()
        if s.trinomials is not None and not d.verify(s):
            raise DecompositionRequiredError("trinomial decomposition does not sum to phi")
        tplus = check_Tplus(d, s.domain)
        tminus = check_Tminus(d, s.domain)
        hyp["Tplus"] = combine(tplus) if tplus else SignVerdict.proved("no pieces")
        hyp["Tminus"] = combine(tminus) if tminus else SignVerdict.proved("no pieces")
        for i, v in enumerate(tplus):
            hyp[f"Tplus[{i}]"] = v
        tpp = check_Tplusplus(d, eps, s.domain) if len(d) else []
        if tpp:
            e = tpp[0].detail["eps"]
            hyp["Tplusplus"] = _tagged(combine(_outer_verdicts(d, e, s.domain)), eps=e)
            hyp["kappa_positive_near_axis"] = _tagged(combine(_kpos_verdicts(d, e, s.domain)), eps=e)
        else:
            hyp["Tplusplus"] = hyp["kappa_positive_near_axis"] = _na("no pieces")
    except DecompositionRequiredError as exc:
        for k in ("Tplus", "Tminus", "Tplusplus", "kappa_positive_near_axis"):
            hyp[k] = _na(str(exc))

    # star-shape sampled directly (Theorem 1 without a decomposition)
    hyp["starshape_sampled"] = _starshape_sampled(s)

    # odd-system boundedness conditions
    odd_eps = _odd_eps(s)
    hyp.update(odd_eps)

    hyp["L2"] = check_L2L3(s)["L2"] if not any(j % 2 == 0 for j in s.f) else _na("even terms present")

    # nonlinear g
    if admissible:
        hg = {}
        for j, c in s.f.items():
            if j % 2 == 1:
                hg[j] = check_Hg(c, s.g, j, s.domain)
                hyp[f"Hg[{j}]"] = hg[j]
        hyp["Hg_strict_seq"] = check_Hg_strict_seq(s) if hg else SignVerdict.refuted(
            Fraction(0), Fraction(0), "no odd coefficients")
        hyp["psi_nonnegative"] = psi_sampled(s)
        cf = fit_transform_for(s)
        lo, hi = cf.u_range_
        hyp["energy_unbounded"] = (SignVerdict.proved("both ends of the u-range are infinite")
                                   if lo == -INF and hi == INF else
                                   SignVerdict.refuted(None, None, f"u-range is ({lo:.6g}, {hi:.6g})"))
    else:
        for k in ("Hg_strict_seq", "psi_nonnegative", "energy_unbounded"):
            hyp[k] = _na("g not admissible")

    nlg = [hyp["g_admissible"]]
    lin = [hyp["g_admissible"], hyp["g_linear"]]
    H = hyp
    hg_all = [v for k, v in hyp.items() if k.startswith("Hg[")]

    th: List[TheoremEntry] = []

    def add(name, keys, claim, extra=(), via=None, gate=()):
        vs = [H[k] for k in keys] + list(extra)
        status = _status(list(gate) + vs)
        if any(v.kind == "refuted" for v in gate):
            status = "not-applicable"
        entry = TheoremEntry(name, status, list(keys), claim, via)
        th.append(entry)
        return entry

    c1 = add("Corollary 1", ["Tplus", "seq"], "at-most-one", gate=lin)
    c2 = add("Corollary 2", ["even_terms_vanish", "seq"], "at-most-one", extra=[odd_all], gate=lin)
    c2.hypotheses.insert(1, "odd_radial[*]")
    t1_direct = _status(lin + [H["starshape_sampled"], H["seq"]])
    t1_routes = [c1, c2, TheoremEntry("direct", t1_direct, [], "")]
    best1 = _best(t1_routes)
    if not linear or not admissible:
        best1 = TheoremEntry("direct", "not-applicable", [], "")
    th.insert(0, TheoremEntry("Theorem 1", best1.status, ["starshape", "non-invariance"], "at-most-one",
                              via=best1.name if best1.name != "direct" else "sampled star-shape"))
    c3 = add("Corollary 3", ["domain_is_plane", "Tplusplus", "kappa_positive_near_axis"], "bounded", gate=lin)
    c4 = add("Corollary 4", ["domain_is_plane", "even_terms_vanish", "f1_nonnegative_off_eps",
                             "f_odd_positive_near_axis"], "bounded", extra=[odd_higher], gate=lin)
    bnd = _best([c3, c4])
    uniq = _best([c1, c2])
    t3 = TheoremEntry("Theorem 3", _status([_as_v(uniq.status), _as_v(bnd.status), H["phi00_negative"]]),
                      ["Theorem 1", "boundedness", "phi00_negative"], "exactly-one",
                      via=f"{uniq.name} + {bnd.name}")
    if not linear or not admissible:
        t3.status = "not-applicable"
    th.append(t3)
    add("Corollary 5", ["Tplus", "Tplusplus", "seq", "kappa_positive_near_axis", "phi00_negative"],
        "exactly-one", gate=lin)
    add("Corollary 6", ["even_terms_vanish", "seq", "f1_zero_negative", "f1_positive_off_eps",
                        "f_odd_positive_near_axis"], "exactly-one", extra=[odd_all], gate=lin)
    c7 = add("Corollary 7", ["even_terms_vanish", "Hg_strict_seq"], "at-most-one", extra=hg_all, gate=nlg)
    t4_direct = TheoremEntry("direct", _status(nlg + [H["psi_nonnegative"], H["Hg_strict_seq"]]), [], "")
    best4 = _best([c7, t4_direct])
    th.append(TheoremEntry("Theorem 4", best4.status, ["psi_nonnegative", "non-invariance"], "at-most-one",
                           via=best4.name if best4.name != "direct" else "sampled Psi"))
    # Theorem 5 needs Theorem 4, the energy condition and a boundedness argument on the u-plane
    add("Corollary 8", ["even_terms_vanish", "Hg_strict_seq", "energy_unbounded", "f1_zero_negative",
                        "f1_positive_off_eps", "f_odd_positive_near_axis"], "exactly-one",
        extra=hg_all, gate=nlg)
    t5 = TheoremEntry("Theorem 5", _status([_as_v(best4.status), H["energy_unbounded"],
                                            _as_v(_bound_status(s, admissible)), H["phi00_negative"]]),
                      ["Theorem 4", "energy_unbounded", "boundedness", "phi00_negative"], "exactly-one")
    if not admissible:
        t5.status = "not-applicable"
    th.append(t5)

    order = ["Theorem 1", "Corollary 1", "Corollary 2", "Corollary 3", "Corollary 4", "Theorem 3",
             "Corollary 5", "Corollary 6", "Theorem 4", "Corollary 7", "Theorem 5", "Corollary 8"]
    th.sort(key=lambda t: order.index(t.name))

    # strongest claim
    claim, claim_status, via = "no-claim", "none", None
    for wanted in ("exactly-one", "at-most-one"):
        cands = [t for t in th if t.claim == wanted and t.applicable]
        if cands:
            # a corollary names the concrete hypotheses that were certified, so it is the better citation
            top = max(cands, key=lambda t: (_RANK[t.status], t.name.startswith("Corollary"),
                                            -order.index(t.name)))
            claim, claim_status, via = wanted, top.status, top.name
            break

    bounded = _boundedness_summary(s, eps, [c3, c4])
    return HypothesisReport(s.to_dict() if not getattr(s, "source", None) else {"name": s.name},
                            hyp, th, claim, claim_status, via, bounded)


def _as_v(status):
    return {"proved": SignVerdict.proved(), "sampled": SignVerdict.sampled(0),
            "inconclusive": SignVerdict.inconclusive(""), "refuted": SignVerdict.refuted(None, None),
            "not-applicable": SignVerdict.refuted(None, None, "not applicable")}[status]


def _bound_status(s, admissible):
    if not admissible:
        return "not-applicable"
    try:
        boundedness_construction(s)
        return "sampled"
    except ConstructionFailsError:
        return "refuted"


def _outer_verdicts(d, eps, interval):
    return [_Tpp_piece(p, eps, interval)[0] for p in d]


def _kpos_verdicts(d, eps, interval):
    return [_Tpp_piece(p, eps, interval)[1] for p in d]


def _starshape_sampled(s, n=100, cap=5.0):
    a, b = s.sample_range(cap)
    xs, ys = np.meshgrid(np.linspace(a, b, n + 2)[1:-1], np.linspace(-cap, cap, n))
    vals = s.field_values("starshape", xs.ravel(), ys.ravel())
    tol = TOL * (1 + float(np.max(np.abs(vals))))
    bad = np.flatnonzero(vals < -tol)
    if bad.size:
        k = int(bad[0])
        return SignVerdict.refuted((float(xs.ravel()[k]), float(ys.ravel()[k])), float(vals[k]),
                                   "sampled counterexample")
    return SignVerdict.sampled(int(vals.size))


def _odd_eps(s):
    """f_1 sign conditions off ``[-eps, eps]`` and positivity of some higher odd coefficient on it."""
    f1 = s.f.get(1)
    out = {}
    if f1 is None:
        out["f1_zero_negative"] = SignVerdict.refuted(Fraction(0), Fraction(0), "f_1 vanishes")
    else:
        v0 = f1(0.0)
        out["f1_zero_negative"] = (SignVerdict.proved(value=v0) if v0 < 0
                                   else SignVerdict.refuted(0.0, v0, "f_1(0) >= 0"))
    chosen = None
    for e in EPS_GRID:
        nonneg = combine([decide(_q_coef(f1), p, ">=0") for p in _outside(s.domain, e)]) if f1 is not None \
            else SignVerdict.proved("f_1 = 0")
        pos = combine([decide(_q_coef(f1), p, ">0") for p in _outside(s.domain, e)]) if f1 is not None \
            else SignVerdict.refuted(None, None, "f_1 = 0")
        near = None
        for j in sorted(s.f):
            if j >= 3 and j % 2 == 1:
                v = decide(_q_coef(s.f[j]), (-e, e), ">0", closed=True)
                if v.passed:
                    near = _tagged(v, index=j)
                    break
        if near is None:
            near = SignVerdict.refuted(None, None, "no higher odd coefficient is positive near the axis")
        current = (e, nonneg, pos, near)
        if chosen is None:
            chosen = current
        if nonneg.passed and near.passed:
            chosen = current
            break
    e, nonneg, pos, near = chosen
    out["f1_nonnegative_off_eps"] = _tagged(nonneg, eps=e)
    out["f1_positive_off_eps"] = _tagged(pos, eps=e)
    out["f_odd_positive_near_axis"] = _tagged(near, eps=e)
    return out


def _boundedness_summary(s, eps, routes):
    out = {"routes": {t.name: t.status for t in routes}}
    try:
        cert = boundedness_construction(s, eps)
        best = _best(routes).status
        out.update(status=best if best in ("proved", "sampled") else "sampled", certificate=cert.to_dict())
    except ConstructionFailsError as exc:
        out.update(status="refuted", reason=str(exc),
                   witness=None if exc.point is None else list(exc.point),
                   value=exc.value)
    return out


class HypothesisChecker(BaseEstimator):
    """Estimator wrapper: ``HypothesisChecker().fit(system).report_``.

    Parameters
    ----------
    eps : float or None
        Half-width of the axis strip for the existence conditions; searched
        over powers of two when None.
    n_samples : int
        Sample count for transcendental coefficients.
    """

    def __init__(self, eps=None, n_samples: int = N_SAMPLES):
        self.eps = eps
        self.n_samples = n_samples

    def fit(self, system, y=None):
        self.report_ = full_report(system, self.eps, self.n_samples)
        self.claim_ = self.report_.claim
        return self

    def predict(self, systems):
        """Claim string for each system in ``systems``."""
        return [full_report(s, self.eps, self.n_samples).claim for s in systems]
