import math
from fractions import Fraction

import numpy as np
import pytest

from cycleguard import gallery
from cycleguard.conditions import (HypothesisChecker, boundedness_construction, check_corollary_odd, check_Hg,
                                   check_L2L3, check_seq, check_Tminus, check_Tplus, check_Tplusplus, full_report,
                                   hg_cleared, transformed_trinomial)
from cycleguard.exceptions import ConstructionFailsError, InvalidSystemError
from cycleguard.poly import Polynomial
from cycleguard.system import StructuredSystem, TrinomialDecomposition, TrinomialPiece

F = Fraction
X = Polynomial.x()


def D(*pieces):
    return TrinomialDecomposition(TrinomialPiece(*p) for p in pieces)


FIG2 = D(("x^2+1", "x^2/10", "x^2-1", 1, 0))


def test_fig2_transformed_trinomial():
    q = transformed_trinomial(FIG2[0])
    assert q["K"] == 4 * X ** 2 + 2
    assert q["Tm"] == F(3, 10) * X ** 2
    assert q["H"] == 2 * X ** 2
    assert q["D"] == F(-3191, 100) * X ** 4 - 16 * X ** 2


def test_Tplus_examples():
    [v] = check_Tplus(FIG2)
    assert v.is_proved
    [v] = check_Tplus(D(("0", "0", "x^4-x^2+1", 1, 1)))
    assert v.is_proved
    [v] = check_Tplus(D(("0", "0", "-x^2", 1, 1)))
    assert v.is_refuted


def test_Tminus_examples():
    [v] = check_Tminus(D(("0", "0", "-x^2", 1, 1)))
    assert v.is_proved
    [v] = check_Tminus(FIG2)
    assert v.is_refuted
    assert check_Tminus(TrinomialDecomposition()) == [] or all(u.is_proved for u in check_Tminus(TrinomialDecomposition()))


def test_Tplusplus_examples():
    [v] = check_Tplusplus(FIG2, eps=2)
    assert v.is_proved
    # at |x| = 2 the discriminant is -3.99 x^4 + 4 = -59.84
    assert (F(1, 100) - 4) * 16 + 4 == F(-5984, 100)
    [v] = check_Tplusplus(D(("0", "0", "x^4-x^2+1", 1, 1)), eps=1)
    assert not v.is_proved
    for eps in (0.125, 1, 8):
        [v] = check_Tplusplus(D(("1", "0", "1", 1, 0)), eps=eps)
        assert v.is_proved


def test_Tplusplus_search():
    [v] = check_Tplusplus(FIG2)
    assert v.is_proved
    assert v.detail["eps"] in [2.0 ** i for i in range(-6, 7)]


def test_seq():
    assert check_seq(gallery.get("vdp")).is_proved
    assert check_seq(StructuredSystem("x", {1: "2"})).is_refuted
    assert check_seq(gallery.get("fig2")).is_proved
    assert check_seq(gallery.get("gauss")).kind == "sampled"


def test_corollary_odd():
    out = check_corollary_odd(StructuredSystem("x", {1: "x^2-1", 3: "x^4-x^2+1"}))
    assert out["verdict"].is_proved
    out = check_corollary_odd(StructuredSystem("x", {1: "x^2-1", 2: "x"}))
    assert out["even_terms_vanish"].is_refuted
    out = check_corollary_odd(StructuredSystem("x", {1: "x^2-1", 3: "-1"}))
    v = out["odd"][3]
    assert v.is_refuted and v.value == -2


def test_L2L3():
    rep = check_L2L3(StructuredSystem("x", {3: "x^4-x^2+1"}))
    assert rep["L2"].is_proved and rep["L3"].is_refuted
    w = F(rep["L3"].witness)
    # f3' = 4x^3 - 2x has the wrong sign at the witness for monotonicity away from 0
    assert (4 * w ** 3 - 2 * w) * w < 0
    rep = check_L2L3(StructuredSystem("x", {3: "x^2"}))
    assert rep["L2"].is_proved and rep["L3"].is_proved
    # (L2) only constrains f_(2k+1) with k >= 1; the f_1 sign entry is reported separately
    rep = check_L2L3(StructuredSystem("x", {1: "-exp(-x^2)"}))
    assert rep["L2"].is_proved
    v = rep["sign"][1]
    assert v.is_refuted and float(v.witness) == 0 and float(v.value) == -1


def test_Hg_examples():
    assert check_Hg("x^2-1", "x", 1).is_proved
    assert check_Hg("1", "x", 3).is_proved
    # x [3 x^3 + 2 (x^2/2) x (0 - 1)] = 2 x^4
    assert hg_cleared(Polynomial([1]), X, 3) == 2 * X ** 4
    assert hg_cleared(Polynomial([-1]), X, 3) == -2 * X ** 4
    v = check_Hg("-1", "x", 3)
    assert v.is_refuted


def test_Hg_agrees_with_corollary_odd_for_linear_g():
    for f in ("x^2-1", "x^4-x^2+1", "-1", "x^2", "1-x^2"):
        for k in (0, 1, 2):
            j = 2 * k + 1
            odd = check_corollary_odd(StructuredSystem("x", {j: f}))["odd"][j]
            assert check_Hg(f, "x", j).is_proved == odd.is_proved


def test_Hg_nonpolynomial_sampled():
    v = check_Hg("x^2-1", "x*exp(-x^2)", 1, interval=(-1.5, 1.5))
    assert v.kind in ("sampled", "refuted")


def test_boundedness_construction():
    cert = boundedness_construction(gallery.get("fig2"), eps=2)
    assert math.isfinite(cert.M) and cert.M > 0
    s = gallery.get("fig2")
    for y in np.linspace(cert.Ybar + 1e-9, cert.Ybar + 10, 20):
        assert s.phi(0, y) > 0
    cert = boundedness_construction(gallery.get("linear-center"))
    assert cert.M == 0 and cert.route == "trivial"
    with pytest.raises(ConstructionFailsError) as info:
        boundedness_construction(gallery.get("gauss"))
    x, y = info.value.point
    assert y == 0 and info.value.value < 0
    assert gallery.get("gauss").phi(x, 0) == pytest.approx(info.value.value)


def test_report_fig2():
    rep = full_report(gallery.get("fig2"))
    assert rep.theorem("Corollary 1").status == "proved"
    assert rep.theorem("Corollary 1").claim == "at-most-one"
    assert rep.theorem("Theorem 1").applicable
    assert rep.claim == "exactly-one" and rep.claim_status == "proved"


def test_report_quartic_demo():
    rep = full_report(gallery.get("quartic-demo"))
    assert rep.theorem("Corollary 5").status == "proved"
    assert rep.claim == "exactly-one"


def test_report_gauss():
    rep = full_report(gallery.get("gauss"))
    assert rep.claim != "exactly-one"
    assert rep.boundedness["status"] == "refuted"
    assert rep.theorem("Theorem 3").status != "proved"


def test_report_no_claim_and_general():
    assert full_report(gallery.get("linear-center")).claim == "no-claim"
    with pytest.raises(InvalidSystemError):
        full_report(gallery.get("two-cycles"))


def test_sampled_never_upgrades():
    rep = full_report(gallery.get("gauss"))
    for t in rep.theorems:
        if t.status == "proved":
            for h in t.hypotheses:
                v = rep.hypotheses.get(h)
                assert v is None or v.kind == "proved"


def test_checker_estimator():
    est = HypothesisChecker()
    assert est.get_params() == {"eps": None, "n_samples": 10000}
    est.fit("fig2")
    assert est.claim_ == "exactly-one"
    assert list(est.predict(["fig2", "linear-center"])) == ["exactly-one", "no-claim"]


# -- soundness of witnesses over the gallery ---------------------------------------

REQ = {">=0": lambda v: v >= 0, "<=0": lambda v: v <= 0, ">0": lambda v: v > 0, "<0": lambda v: v < 0}


@pytest.mark.parametrize("name", [n for n in gallery.names() if n not in ("two-cycles", "trig")])
def test_refutations_violate_at_witness(name):
    rep = full_report(gallery.get(name))
    for key, v in rep.hypotheses.items():
        if v.is_refuted and v.value is not None:
            assert float(v.value) != 0 or "value_sign" in v.to_dict()
            sign = v.to_dict()["value_sign"]
            assert sign == (float(v.value) > 0) - (float(v.value) < 0)
