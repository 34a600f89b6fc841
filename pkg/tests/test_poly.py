import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cycleguard import expr as E
from cycleguard.exceptions import KappaNotPositiveError, NotPolynomialError
from cycleguard.poly import (Polynomial, SignVerdict, cauchy_bound, combine, count_roots, poly_from_expression,
                             sign_on_interval)

F = Fraction
X = Polynomial.x()


def P(text):
    return poly_from_expression(E.parse(text))


def test_from_expression():
    assert P("x^4-x^2+1").coeffs == (1, 0, -1, 0, 1)
    assert P("0").is_zero()
    assert (P("x^2+1") * P("x^2+1")).coeffs == (1, 0, 2, 0, 1)
    assert P("x^2/10").coeffs == (0, 0, F(1, 10))
    with pytest.raises(NotPolynomialError):
        P("exp(x)")
    with pytest.raises(NotPolynomialError):
        P("x*y")


def test_arithmetic():
    f = P("x^4-x^2+1")
    assert f.derivative() == P("4*x^3-2*x")
    assert (f * Polynomial()).is_zero()
    assert X * f.derivative() + 2 * f == P("6*x^4-4*x^2+2")


def test_sign_examples():
    v = sign_on_interval(P("6*x^4-4*x^2+2"), required=">=0")
    assert v.kind == "proved"
    v = sign_on_interval(P("x^2-1"), required=">=0")
    assert v.kind == "refuted"
    assert v.witness == 0 and v.value == -1
    v = sign_on_interval(Polynomial([0, 0, -16, 0, F(-3191, 100)]), required="<=0")
    assert v.kind == "proved"


@pytest.mark.parametrize("k", [1, 2, 3])
def test_remark_quartic_family(k):
    p = (4 + 2 * k) * X ** 4 - (2 + 2 * k) * X ** 2 + 2 * k
    assert sign_on_interval(p, required=">0").is_proved
    # quadratic in z = x^2: discriminant (2+2k)^2 - 8k(4+2k) = 4 - 24k - 12k^2
    assert (2 + 2 * k) ** 2 - 4 * (4 + 2 * k) * 2 * k == 4 - 24 * k - 12 * k * k < 0


def test_open_and_closed_intervals():
    p = X * X - 1
    assert sign_on_interval(p, (-1, 1), "<=0").is_proved
    assert sign_on_interval(p, (-1, 1), "<0").is_proved
    assert not sign_on_interval(p, (-1, 1), "<0", closed=True).is_proved
    assert sign_on_interval(p, (1, math.inf), ">0").is_proved
    assert sign_on_interval(X * X, required=">0*").is_proved
    assert not sign_on_interval(Polynomial(), required=">0*").is_proved


def test_cauchy_bound():
    one, zero = Polynomial([1]), Polynomial()
    assert cauchy_bound(one, zero, Polynomial([-1]), 3) == 2
    assert cauchy_bound(one, zero, zero, 1) == 1
    kappa, tau, eta = P("x^2+1"), P("x^2/10"), P("x^2-1")
    zbar = cauchy_bound(kappa, tau, eta, 1)
    assert zbar == pytest.approx(2.0, abs=1e-12)
    # every real z-root is inside [-zbar, zbar]
    for x in np.linspace(-1, 1, 101):
        roots = np.roots([float(kappa(x)), float(tau(x)), float(eta(x))])
        assert np.all(np.abs(roots[np.isreal(roots)].real) <= zbar + 1e-12)
    with pytest.raises(KappaNotPositiveError):
        cauchy_bound(X, one, one, 1)


def test_combine_and_dict():
    ok = SignVerdict.proved("a")
    bad = SignVerdict.refuted(F(1, 2), F(-1), "b")
    assert combine([ok, ok]).is_proved
    assert combine([ok, bad]).is_refuted
    d = bad.to_dict()
    # exact rationals stay exact in JSON
    assert d["kind"] == "refuted" and d["witness"] == "1/2" and d["value"] == -1 and d["value_sign"] == -1


# -- properties --------------------------------------------------------------

coeff = st.integers(-6, 6)
polys = st.lists(coeff, min_size=1, max_size=7).map(Polynomial)


@settings(max_examples=200, deadline=None)
@given(polys, st.integers(-4, 3), st.integers(1, 5))
def test_sturm_count_matches_dense_scan(p, a, width):
    lo, hi = F(a), F(a + width)
    if p.is_zero() or p(lo) == 0 or p(hi) == 0:
        return
    n = count_roots(p, lo, hi)
    roots = np.roots([float(c) for c in reversed(p.coeffs)]) if p.degree > 0 else np.array([])
    real = sorted({round(r.real, 6) for r in roots if abs(r.imag) < 1e-7 and float(lo) < r.real < float(hi)})
    assert n == len(real)


@settings(max_examples=200, deadline=None)
@given(polys, st.sampled_from([">=0", "<=0", ">0", "<0"]))
def test_witnesses_are_sound(p, required):
    v = sign_on_interval(p, (-3, 3), required)
    if v.is_refuted:
        w = F(v.witness)
        assert -3 < w < 3
        val = p(w)
        assert val == v.value
        bad = {">=0": val < 0, "<=0": val > 0, ">0": val <= 0, "<0": val >= 0}[required]
        assert bad
    elif v.is_proved:
        xs = np.linspace(-3, 3, 2001)[1:-1]
        vals = np.array([float(p(F(x))) for x in xs])
        ok = {">=0": vals >= 0, "<=0": vals <= 0, ">0": vals > 0, "<0": vals < 0}[required]
        assert ok.all()
