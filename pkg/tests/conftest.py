from __future__ import annotations

from collections import defaultdict

import pytest

from blowgraph import parse_graph

CUSP = """
vertex E1 odd
vertex E2 even
vertex E3 odd
edge E1 E3
edge E2 E3
branch b1 E3
"""

STAR_WITH_Q = """
vertex c even
vertex q even
edge c q
branch b1 c
branch b2 c
branch b3 c
"""

CHAIN = """
vertex v1 odd
vertex v2 odd
edge v1 v2
branch b1 v1
branch b2 v1
branch b3 v2
"""

TWO_Q = """
vertex c even
vertex q1 even
vertex q2 even
edge c q1
edge c q2
branch b1 c
"""


@pytest.fixture
def cusp():
    return parse_graph(CUSP)


@pytest.fixture
def star_with_q():
    return parse_graph(STAR_WITH_Q)


@pytest.fixture
def chain():
    return parse_graph(CHAIN)


# Acceptance bookkeeping: each check records (criterion, ok, detail); the
# summary prints one line per criterion.
_RESULTS: dict[int, list[tuple[bool, str]]] = defaultdict(list)


@pytest.fixture
def record():
    def _record(criterion: int, ok: bool, detail: str = "") -> None:
        _RESULTS[criterion].append((bool(ok), detail))

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_RESULTS):
        entries = _RESULTS[crit]
        ok = all(e[0] for e in entries)
        failed = [d for good, d in entries if not good]
        detail = "; ".join(failed) if failed else "; ".join(d for _, d in entries if d)
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}  {detail}")
