import contextlib
import time

import pytest

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


class _Check:
    def __init__(self):
        self.detail = ""


@pytest.fixture
def criterion(request):
    """Time one acceptance criterion and record a PASS/FAIL line for the summary."""
    results = request.config.stash[_RESULTS]

    @contextlib.contextmanager
    def run(name: str, limit: float):
        check = _Check()
        t0 = time.perf_counter()
        ok = False
        try:
            yield check
            elapsed = time.perf_counter() - t0
            assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
            ok = True
        finally:
            elapsed = time.perf_counter() - t0
            line = f"{'PASS' if ok else 'FAIL'}  {name}  ({elapsed:.2f}s / {limit:g}s)"
            if check.detail:
                line += f"  {check.detail}"
            results.append(line)
            print(line)

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_RESULTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
