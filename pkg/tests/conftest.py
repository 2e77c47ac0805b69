import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


import time
from contextlib import contextmanager

import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def criterion():
    """Context manager timing one acceptance criterion and recording its outcome."""

    @contextmanager
    def run(number, title, limit):
        start = time.perf_counter()
        try:
            yield
        except BaseException as e:
            ACCEPTANCE[number] = (False, title, time.perf_counter() - start, limit, f"{type(e).__name__}: {e}"[:200])
            raise
        elapsed = time.perf_counter() - start
        ok = elapsed <= limit
        ACCEPTANCE[number] = (ok, title, elapsed, limit, "" if ok else "over the time budget")
        assert ok, f"criterion {number} took {elapsed:.1f}s, budget {limit}s"

    return run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, title, elapsed, limit, why = ACCEPTANCE[number]
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} ({elapsed:.2f}s / {limit}s)"
        terminalreporter.write_line(line + (f" -- {why}" if why else ""))
