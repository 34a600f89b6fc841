import io
import json

import numpy as np
import pytest

from cycleguard import gallery
from cycleguard.cli import main


def run_cli(*args):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in args], out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*args):
    code, out, err = run_cli(*args)
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture(params=gallery.names())
def gallery_system(request):
    return gallery.get(request.param)


# acceptance criteria record (number, title, passed, seconds, limit, note)
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k, title, ok, secs, limit, note in sorted(ACCEPTANCE):
        status = "PASS" if ok else "FAIL"
        line = f"criterion {k}: {status}  {title}  ({secs:.2f} s, limit {limit:g} s)"
        if note:
            line += f"  -- {note}"
        terminalreporter.write_line(line)
