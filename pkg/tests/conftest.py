import pytest

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for an acceptance criterion.

    Usage: ``with criterion(3, "derandomization") as note: ...``; ``note``
    collects details that are appended to the line.
    """
    import time
    from contextlib import contextmanager

    @contextmanager
    def run(number: int, title: str):
        details: list[str] = []
        t0 = time.perf_counter()
        try:
            yield details
        except BaseException:
            ACCEPTANCE_LINES[number] = _line("FAIL", number, title, time.perf_counter() - t0, details)
            raise
        ACCEPTANCE_LINES[number] = _line("PASS", number, title, time.perf_counter() - t0, details)

    return run


def _line(status, number, title, seconds, details):
    extra = f" ({'; '.join(details)})" if details else ""
    return f"{status} criterion {number:2d} {title} [{seconds:.1f} s]{extra}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
