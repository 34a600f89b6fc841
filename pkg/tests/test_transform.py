import math

import numpy as np
import pytest

from cycleguard import gallery
from cycleguard.exceptions import GNotAdmissibleError, OutOfDomainError, OutOfRangeError
from cycleguard.system import StructuredSystem
from cycleguard.transform import (Antiderivative, ContiFilippov, fit_transform_for, psi_eval, psi_via_pushforward,
                                  pushforward)


def test_identity_for_linear_g():
    cf = ContiFilippov("x").fit()
    for x in (-2.5, -0.1, 0.0, 0.7, 3.0):
        assert cf.alpha(x) == pytest.approx(x, abs=1e-15)
        assert cf.beta(x) == pytest.approx(x, abs=1e-15)
    assert cf.u_range_ == (-math.inf, math.inf)
    p = pushforward(gallery.get("vdp"))
    for u in (-2.0, 0.0, 0.5, 1.5):
        assert p.f[1](u) == pytest.approx(u * u - 1, rel=1e-13, abs=1e-13)


def test_cubic_spring_alpha():
    cf = ContiFilippov("x + x^3").fit()
    # G = x^2/2 + x^4/4
    assert cf.alpha(1.0) == pytest.approx(math.sqrt(1.5), rel=1e-15)
    assert cf.alpha(-1.0) == pytest.approx(-math.sqrt(1.5), rel=1e-15)


def test_finite_u_range_from_quadrature():
    cf = fit_transform_for(gallery.get("soft-spring"))
    # integral of x exp(-x^2) over (0, inf) is 1/2, so u+ = sqrt(2 * 1/2) = 1
    assert cf.u_range_[0] == pytest.approx(-1.0, rel=1e-9)
    assert cf.u_range_[1] == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(OutOfRangeError):
        cf.beta(1.0)


def test_finite_domain():
    cf = ContiFilippov("x", (-1.0, 2.0)).fit()
    assert cf.u_range_ == pytest.approx((-1.0, 2.0))
    with pytest.raises(OutOfDomainError):
        cf.alpha(2.0)


@pytest.mark.parametrize("g", ["x^3", "-x", "x^2", "x - x^3"])
def test_inadmissible(g):
    with pytest.raises(GNotAdmissibleError):
        ContiFilippov(g).fit()


def test_antiderivative_quadrature_matches_closed_form():
    G = Antiderivative(gallery.get("soft-spring").g)
    for x in (-3.0, -0.4, 0.0, 0.3, 1.0, 7.5):
        assert G(x) == pytest.approx((1 - math.exp(-x * x)) / 2, rel=1e-13, abs=1e-16)


@pytest.mark.parametrize("name", ["duffing-vdp", "soft-spring", "vdp"])
def test_beta_alpha_identity(name, rng):
    s = gallery.get(name)
    cf = fit_transform_for(s)
    lo, hi = s.sample_range(3.0)
    xs = rng.uniform(lo, hi, 1000)
    back = cf.inverse_transform(cf.transform(np.column_stack([xs, np.zeros_like(xs)])))[:, 0]
    assert np.max(np.abs(back - xs)) <= 1e-9


@pytest.mark.parametrize("name", ["duffing-vdp", "soft-spring"])
def test_root_limit(name):
    cf = fit_transform_for(gallery.get(name))
    for u in (1e-2, 1e-4, 1e-6, -1e-5):
        assert cf.g_(cf.beta(u)) / u == pytest.approx(math.sqrt(cf.gprime0_), rel=5 * abs(u))
    assert 1 / cf.u_over_g(0.0) == pytest.approx(math.sqrt(cf.gprime0_))


def test_pushed_coefficient_at_zero():
    p = pushforward(gallery.get("duffing-vdp"))
    assert p.f[1](0.0) == pytest.approx(-1.0, abs=1e-15)
    # continuity across the removable singularity
    assert p.f[1](1e-7) == pytest.approx(-1.0, abs=1e-6)


@pytest.mark.parametrize("name", ["duffing-vdp", "soft-spring", "fig2"])
def test_psi_dual_evaluation(name, rng):
    s = gallery.get(name)
    cf = fit_transform_for(s)
    p = pushforward(s, cf)
    lo, hi = s.sample_range(2.0)
    for x, y in zip(rng.uniform(0.8 * lo, 0.8 * hi, 200), rng.uniform(-2, 2, 200)):
        u = cf.alpha(x)
        direct = psi_eval(s, x, y, cf)
        other = psi_via_pushforward(p, u, y)
        assert direct == pytest.approx(other, rel=1e-6, abs=1e-6)


def test_blackbox_round_trip():
    from cycleguard.io import system_from_dict, system_to_dict

    p = pushforward(gallery.get("duffing-vdp"))
    doc = system_to_dict(p)
    assert doc["blackbox"] is True and doc["f"] == {"1": "blackbox"}
    again = system_from_dict(doc)
    assert again.f[1](0.7) == pytest.approx(p.f[1](0.7), rel=1e-15)
