import random

import pytest

from rvdc import params as P
from rvdc.ring import keygen

ALL_SETS = list(P.CANONICAL)
SET_IDS = [p.name for p in ALL_SETS]

_keys = {}


def keypair_for(params, seed=1234):
    key = (params.name, seed)
    if key not in _keys:
        _keys[key] = keygen(params.ring, params.r, random.Random(seed))
    return _keys[key]


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture(params=ALL_SETS, ids=SET_IDS)
def pset(request):
    return request.param


@pytest.fixture
def toy():
    return P.TOY


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def record_criterion(number, ok, detail):
    prev = ACCEPTANCE_LINES.get(number)
    if prev is not None:
        ok = ok and prev[0]
        detail = prev[1] + "; " + detail
    ACCEPTANCE_LINES[number] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        ok, detail = ACCEPTANCE_LINES[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'} - {detail}")
