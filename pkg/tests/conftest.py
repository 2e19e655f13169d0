from __future__ import annotations

import time

import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


class Criterion:
    """Times one acceptance criterion and records a single pass/fail line."""

    def __init__(self, lines: list):
        self.lines = lines
        self.start = time.perf_counter()

    def finish(self, number: int, ok: bool, detail: str, limit: float) -> None:
        elapsed = time.perf_counter() - self.start
        within = elapsed < limit
        status = "PASS" if ok and within else "FAIL"
        line = f"criterion {number}: {status} ({detail}; {elapsed:.2f}s of {limit:g}s)"
        self.lines.append(line)
        print(line)
        assert ok, line
        assert within, line


@pytest.fixture
def criterion(request):
    return Criterion(request.config.stash[_LINES])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
