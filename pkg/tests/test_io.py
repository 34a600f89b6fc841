import json
import math

import pytest

from cycleguard import gallery
from cycleguard.exceptions import InvalidSystemError, ParseError
from cycleguard.io import load_system, system_from_dict, system_to_dict
from cycleguard.system import GeneralSystem, StructuredSystem


def test_round_trip_all_gallery(gallery_system, rng):
    s = gallery_system
    again = system_from_dict(json.loads(json.dumps(system_to_dict(s))))
    assert type(again) is type(s)
    for x, y in rng.uniform(-2, 2, size=(20, 2)):
        assert again.vector_field(x, y) == pytest.approx(s.vector_field(x, y), rel=1e-13, abs=1e-13)


def test_domain_bounds():
    s = system_from_dict({"g": "x", "f": {}, "domain": ["-inf", 3]})
    assert s.domain == (-math.inf, 3.0)
    s = system_from_dict({"g": "x", "f": {}, "domain": ["‑inf", "inf"]})   # non-breaking hyphen
    assert s.domain == (-math.inf, math.inf)


def test_shift_moves_equilibrium_to_origin():
    s = system_from_dict({"g": "x - 2", "f": {"1": "(x-2)^2 - 1"}, "shift": 2, "domain": [0, 5]})
    assert s.domain == (-2.0, 3.0)
    assert s.vector_field(0, 0) == (0, 0)
    assert s.phi(0, 0) == -1


def test_general_kind():
    s = system_from_dict({"kind": "general", "P": "y", "Q": "-x"})
    assert isinstance(s, GeneralSystem)
    assert s.vector_field(1, 2) == (2, -1)


@pytest.mark.parametrize("doc", [
    [], {"kind": "other"}, {"kind": "general", "P": "y"}, {"g": 3}, {"g": "x", "f": {"a": "1"}},
    {"g": "x", "f": {"1": 2}}, {"g": "x", "domain": [1]}, {"g": "x", "shift": "1"},
    {"g": "x", "trinomials": [{"kappa": "1"}]}, {"g": "x", "blackbox": True},
])
def test_invalid_documents(doc):
    with pytest.raises(InvalidSystemError):
        system_from_dict(doc)


def test_load_system(tmp_path):
    assert isinstance(load_system("vdp"), StructuredSystem)
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"g": "x", "f": {"1": "x^2-1"}, "name": "mine"}))
    assert load_system(p).name == "mine"
    p.write_text("{")
    with pytest.raises(ParseError):
        load_system(p)
    with pytest.raises(InvalidSystemError):
        load_system(tmp_path / "nope.json")
