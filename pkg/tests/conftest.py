from __future__ import annotations

import pytest

from gpdatlas.algebra.groups import symmetric_group
from gpdatlas.corpus import build, d3_atlas


@pytest.fixture
def d3_group():
    return symmetric_group(3)


@pytest.fixture
def d3():
    return d3_atlas("discrete")


@pytest.fixture
def rombitos():
    return build("rombitos")


@pytest.fixture
def circle():
    return build("sphere1")


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
