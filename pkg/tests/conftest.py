"""Shared test plumbing: the acceptance result registry.

Acceptance tests call record_acceptance(criterion, passed, detail); the
terminal summary then prints one PASS/FAIL line per criterion so the
gate is readable straight off a plain pytest run.
"""

from __future__ import annotations

import pytest

_RESULTS: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def record_acceptance():
    def _record(criterion: int, name: str, passed: bool, detail: str = "") -> None:
        _RESULTS[criterion] = (name, passed, detail)

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_RESULTS):
        name, passed, detail = _RESULTS[criterion]
        verdict = "PASS" if passed else "FAIL"
        suffix = f" ({detail})" if detail else ""
        terminalreporter.write_line(f"ACCEPTANCE {criterion} {name}: {verdict}{suffix}")
