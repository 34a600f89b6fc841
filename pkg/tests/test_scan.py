import math

import numpy as np
import pytest

from cycleguard import gallery
from cycleguard.dynamics import find_cycles
from cycleguard.exceptions import CyclesNotNestedError, OutOfDomainError
from cycleguard.scan import (SignGridScanner, annulus_positive_check, default_atol, sign_grid,
                             zero_curve_components)
from cycleguard.system import StructuredSystem

GAUSS_WINDOW = ((-6.0, 6.0), (-4.0, 4.0))


def test_linear_center_A():
    g = sign_grid(gallery.get("linear-center"), "A", ((-2, 2), (-2, 2)), (41, 41))
    assert g.values.shape == (41, 41)
    assert g.counts == {"+": 41 * 41 - 1, "-": 0, "0": 1}
    assert g.signs[20, 20] == 0 and g.xs[20] == 0 and g.ys[20] == 0
    comps = zero_curve_components(gallery.get("linear-center"), "A", ((-2, 2), (-2, 2)), (41, 41))
    assert comps.count == 1 and comps.n_unbounded == 0


def test_vdp_A_mixed():
    g = sign_grid(gallery.get("vdp"), "A", ((-3, 3), (-3, 3)))
    assert g.mixed
    assert g.counts["-"] > 0 and g.counts["+"] > 0


def test_fig2_starshape_nonnegative():
    g = sign_grid(gallery.get("fig2"), "starshape", ((-3, 3), (-3, 3)))
    assert g.counts["-"] == 0
    assert g.minimum[0] >= -g.atol


def test_fig2_phi_oval():
    comps = zero_curve_components(gallery.get("fig2"), "phi", ((-3, 3), (-3, 3)))
    assert comps.count == 1 and comps.n_unbounded == 0


@pytest.mark.parametrize("res", [(201, 201), (402, 402)])
def test_gauss_four_unbounded(res):
    comps = zero_curve_components(gallery.get("gauss"), "edot", GAUSS_WINDOW, res)
    assert comps.n_unbounded == 4


def test_default_atol():
    assert default_atol(((-3, 3), (-2, 2))) == pytest.approx(1e-9 * 10)


def test_out_of_domain():
    s = StructuredSystem("x", {1: "x^2-1"}, domain=(-1, 1))
    with pytest.raises(OutOfDomainError):
        sign_grid(s, "A", ((-2, 2), (-1, 1)))


def test_csv_export():
    g = sign_grid(gallery.get("linear-center"), "A", ((-1, 1), (-1, 1)), (3, 3))
    rows = g.to_csv(signs=True).split("\r\n")
    assert rows[0].startswith("y\\x,")
    assert len(rows) == 5 and rows[-1] == ""
    assert rows[2].split(",")[1:] == ["1", "0", "1"]


def test_annulus_two_cycles():
    s = gallery.get("two-cycles")
    inner, outer = find_cycles(s, np.arange(0.1, 3.0 + 1e-9, 0.1))
    v = annulus_positive_check(s, inner, outer)
    # A = r^2 (r^2 - r^4), most negative on the outer cycle r^2 = (3 + sqrt 5)/2
    z = (3 + math.sqrt(5)) / 2
    assert not v.positive
    assert v.min_value == pytest.approx(z * (z - z * z), rel=1e-6)
    with pytest.raises(CyclesNotNestedError):
        annulus_positive_check(s, outer, inner)


def test_annulus_not_nested_duplicate():
    s = gallery.get("vdp")
    [c] = find_cycles(s, np.arange(1.5, 2.5, 0.1))
    with pytest.raises(CyclesNotNestedError):
        annulus_positive_check(s, c, c)


def test_scanner_estimator():
    est = SignGridScanner(field="A", window=((-1, 1), (-1, 1)), resolution=(11, 11))
    assert est.get_params()["field"] == "A"
    signs = est.fit("linear-center").transform(None)
    assert signs.shape == (11, 11)
    assert est.components_.count == 1
