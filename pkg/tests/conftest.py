import pytest

_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance outcome: ``criterion(key, passed, detail)``."""
    def record(key: str, passed: bool, detail: str = "") -> bool:
        _CRITERIA[key] = (bool(passed), detail)
        return bool(passed)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        passed, detail = _CRITERIA[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {key}  {detail}")
