from __future__ import annotations

import pytest

from congest_planarity.graph.core import Graph

from .builders import complete, complete_bipartite


@pytest.fixture
def k5() -> Graph:
    return complete(5)


@pytest.fixture
def k33() -> Graph:
    return complete_bipartite(3, 3)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(number: int, ok: bool, detail: str) -> None:
        lines.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        print(lines[-1])
        assert ok, detail

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
