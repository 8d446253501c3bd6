import pytest

_CRITERIA: dict[int, list[tuple[bool, str]]] = {}


class _Recorder:
    def __call__(self, number: int, passed: bool, detail: str) -> bool:
        _CRITERIA.setdefault(number, []).append((bool(passed), detail))
        return passed


@pytest.fixture
def criterion():
    """Record a pass/fail outcome for a numbered acceptance criterion."""
    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        details = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {details}")
