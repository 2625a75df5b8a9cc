import contextlib
import time

import pytest

ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Context manager recording one pass/fail line per acceptance criterion."""

    @contextlib.contextmanager
    def record(number, title):
        t0 = time.perf_counter()
        info = {}
        try:
            yield info
        except BaseException as e:
            ACCEPTANCE[number] = (title, False, f"{type(e).__name__}: {str(e).splitlines()[0]}",
                                  time.perf_counter() - t0)
            raise
        ACCEPTANCE[number] = (title, True, info.get("detail", ""), time.perf_counter() - t0)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail, secs = ACCEPTANCE[number]
        mark = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number}. {title} ({secs:.1f}s) {detail}")
