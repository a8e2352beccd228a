from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hopfforge import corpus  # noqa: E402
from hopfforge.instance import parse_instance  # noqa: E402

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def instance(name: str):
    """Fresh parse each call so cached canonical maps never leak between tests."""
    return parse_instance(corpus.generate(name), name)


@pytest.fixture
def golden_dir():
    return GOLDEN


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
