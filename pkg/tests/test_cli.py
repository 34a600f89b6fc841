"""Every gallery fact is re-derived through the command line."""

import csv
import io
import json
import math

import jsonschema
import pytest

from cycleguard import gallery
from cycleguard.cli import rounded, schema
from cycleguard.io import system_to_dict

from conftest import run_cli, run_json

FACTS = [(e.name, i) for e in gallery.entries() for i in range(len(e.facts))]


def _grid_arg(grid):
    return ":".join(repr(v) for v in grid)


def _read_file(path):
    with open(path, newline="") as fh:
        return fh.read()


def _read_table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[float(v) for v in r] for r in rows[1:]]


@pytest.mark.parametrize("name,index", FACTS, ids=[f"{n}-{i}" for n, i in FACTS])
def test_gallery_fact(name, index):
    fact = gallery.entry(name).facts[index]
    assert fact["source"] in ("published", "derived")
    kind = fact["kind"]
    if kind in ("cycles", "exponents"):
        args = ["cycles", name, "--grid", _grid_arg(fact["grid"])]
        if kind == "cycles" and "signs" not in fact:
            args.append("--no-exponents")
        doc = run_json(*args)
        jsonschema.validate(doc, schema("cycles"))
        cycles = doc["cycles"]
        if kind == "cycles":
            assert doc["count"] == fact["count"] == len(cycles)
            if "radii" in fact:
                assert [c["x_star"] for c in cycles] == pytest.approx(fact["radii"], abs=fact["tol"])
            for key in ("stability", "rotation"):
                if key in fact:
                    assert [c[key] for c in cycles] == fact[key]
            if "signs" in fact:
                signs = [math.copysign(1, c["exponents"]["div_integral"]) for c in cycles]
                assert signs == fact["signs"]
            if "degenerate" in fact:
                assert doc["degenerate"] is fact["degenerate"]
        else:
            got = [c["exponents"]["div_integral"] for c in cycles]
            assert got == pytest.approx(fact["div_integral"], rel=fact["rtol"])
    elif kind == "claim":
        doc = run_json("check", name)
        jsonschema.validate(doc, schema("report"))
        if fact["theorem"] == "boundedness":
            assert doc["boundedness"]["status"] == fact["status"]
        else:
            [t] = [t for t in doc["theorems"] if t["name"] == fact["theorem"]]
            assert t["status"] == fact["status"]
            assert t["claim"] == fact["claim"]
    elif kind == "scan":
        (x0, x1), (y0, y1) = fact["window"]
        doc = run_json("scan", name, "--field", fact["field"], f"--window={x0}:{x1},{y0}:{y1}")
        jsonschema.validate(doc, schema("scan"))
        if "mixed_signs" in fact:
            assert doc["mixed_signs"] is fact["mixed_signs"]
        if "min_nonnegative" in fact:
            assert doc["grid"]["counts"]["-"] == 0
        if "unbounded_components" in fact:
            assert doc["components"]["n_unbounded"] == fact["unbounded_components"]
    elif kind == "transform":
        code, out, err = run_cli("transform", name)
        assert code == 0, err
        header, rows = _read_table(out)
        if fact.get("identity"):
            assert all(abs(r[0] - r[1]) < 1e-12 for r in rows)
        if "f_at_zero" in fact:
            [zero] = [r for r in rows if r[0] == 0]
            for j, v in fact["f_at_zero"].items():
                assert zero[header.index(f"f{j}")] == pytest.approx(v, abs=1e-12)
        if "u_range" in fact:
            lo, hi = (float(v) for v in err.split(":")[1].split())
            assert [lo, hi] == pytest.approx(fact["u_range"], rel=1e-9)
    else:
        pytest.fail(f"unknown fact kind {kind}")


def test_check_outputs():
    doc = run_json("check", "quartic-demo")
    assert doc["claim"] == "exactly-one"
    assert any(t["name"] == "Corollary 5" and t["status"] == "proved" for t in doc["theorems"])
    assert "Corollary 5" in doc["applicable"]


def test_exit_codes(tmp_path):
    bad_expr = tmp_path / "bad.json"
    bad_expr.write_text(json.dumps({"kind": "structured", "g": "x +", "f": {}}))
    assert run_cli("check", bad_expr)[0] == 2
    bad_json = tmp_path / "broken.json"
    bad_json.write_text("{not json")
    assert run_cli("check", bad_json)[0] == 2
    assert run_cli("cycles", "vdp", "--grid", "1:x")[0] == 2
    assert run_cli("check", tmp_path / "missing.json")[0] == 3
    assert run_cli("check", "two-cycles")[0] == 3            # report needs a structured system
    even = tmp_path / "even.json"
    even.write_text(json.dumps({"kind": "structured", "g": "x", "f": {"2": "x"}}))
    # without a decomposition the trinomial hypotheses are reported as inconclusive
    doc = run_json("check", even)
    assert doc["hypotheses"]["Tplus"]["kind"] == "inconclusive" and doc["claim"] == "no-claim"
    domain = tmp_path / "domain.json"
    domain.write_text(json.dumps({"kind": "structured", "g": "x", "f": {}, "domain": [-1, 1]}))
    assert run_cli("scan", domain, "--window=-2:2,-1:1")[0] == 3
    cubic = tmp_path / "cubic.json"
    cubic.write_text(json.dumps({"kind": "structured", "g": "x^3", "f": {"1": "x^2-1"}}))
    code, _, err = run_cli("transform", cubic)
    assert code == 4 and "g'(0)" in err


def test_system_files_and_shift(tmp_path):
    # x'' + (x - 1)' ... : a shifted van der Pol with its equilibrium at x = 1
    doc = {"kind": "structured", "g": "x - 1", "f": {"1": "(x-1)^2 - 1"}, "shift": 1}
    path = tmp_path / "shifted.json"
    path.write_text(json.dumps(doc))
    out = run_json("cycles", path, "--grid", "1.5:2.5:0.1", "--no-exponents")
    assert out["count"] == 1
    assert out["cycles"][0]["x_star"] == pytest.approx(2.00861986, abs=1e-6)
    for name in gallery.names():
        jsonschema.validate(system_to_dict(gallery.get(name)), schema("system"))


def test_transform_u_system_round_trip(tmp_path):
    doc = run_json("transform", "duffing-vdp", "--emit", "u-system")
    jsonschema.validate(doc, schema("transform"))
    path = tmp_path / "u.json"
    path.write_text(json.dumps(doc))
    code, out, err = run_cli("transform", "duffing-vdp", "--grid", "0:1:0.5")
    header, rows = _read_table(out)
    assert header == ["u", "x", "f1"] and [r[0] for r in rows] == [0, 0.5, 1]
    # the black-box file loads and can be scanned
    assert run_cli("scan", path, "--field", "A", "--res", "21")[0] == 0


def test_scan_files(tmp_path):
    csv_path, poly_path = tmp_path / "m.csv", tmp_path / "p.csv"
    doc = run_json("scan", "linear-center", "--field", "A", "--window=-1:1,-1:1", "--res", "5x3",
                   "--csv", csv_path, "--signs", "--polylines", poly_path)
    assert doc["grid"]["resolution"] == [5, 3]
    rows = list(csv.reader(io.StringIO(_read_file(csv_path))))
    assert len(rows) == 4 and len(rows[0]) == 6
    assert csv_path.read_bytes().count(b"\r\n") == 4
    assert poly_path.exists()


def test_portrait(tmp_path):
    code, out, err = run_cli("portrait", "two-cycles", "--starts", "0.3,0", "--horizon", "300",
                             "--samples", "50")
    assert code == 0, err
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["start", "t", "x", "y"] and len(rows) == 51
    x, y = float(rows[-1][2]), float(rows[-1][3])
    assert math.hypot(x, y) == pytest.approx(math.sqrt((3 - math.sqrt(5)) / 2), abs=1e-4)

    doc = run_json("portrait", "linear-center", "--starts", "1,0;2,0", "--horizon", "10", "--out", tmp_path)
    assert len(doc["orbits"]) == 2
    for k, r in ((0, 1.0), (1, 2.0)):
        rows = list(csv.reader(io.StringIO(_read_file(tmp_path / f"orbit_{k}.csv"))))
        assert rows[0] == ["t", "x", "y"]
        radii = [math.hypot(float(a), float(b)) for _, a, b in rows[1:]]
        assert max(abs(v - r) for v in radii) < 1e-6

    code, out, _ = run_cli("portrait", "fig2", "--starts", "5,5", "--horizon", "100", "--samples", "20")
    last = list(csv.reader(io.StringIO(out)))[-1]
    assert math.hypot(float(last[2]), float(last[3])) < 3


def test_rounding():
    assert rounded({"a": [1 / 3, float("inf")], "b": 2}) == {"a": [0.333333333333, None], "b": 2}
