import random
from functools import lru_cache

import pytest

from btq.exactring import Poly
from btq.quotient import GroupSpec, build_quotient


@lru_cache(maxsize=None)
def quotient(q: int, d: int, ideal: str, alpha: int):
    """Shared quotient builds; every test treats the result as read-only."""
    return build_quotient(GroupSpec.parse(q, d, ideal), alpha)


@pytest.fixture
def rng():
    return random.Random(20240611)


def poly(s: str, p: int) -> Poly:
    return Poly.parse(s, p)


def random_poly(rng, p: int, max_deg: int) -> Poly:
    return Poly([rng.randrange(p) for _ in range(max_deg + 1)], p)


# criterion number -> one PASS/FAIL line, filled by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
