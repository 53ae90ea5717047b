import pytest

_verdicts: dict[int, tuple[str, str]] = {}


@pytest.fixture
def verdict():
    """Record the outcome line for an acceptance criterion."""
    def record(number: int, ok, detail: str):
        status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
        _verdicts[number] = (status, detail)
        print(f"criterion {number}: {status} ({detail})")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_verdicts):
        status, detail = _verdicts[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status:4s}  {detail}")
