import pytest

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line; call with (number, name, passed, detail)."""

    def record(number, name, passed, detail=""):
        _CRITERIA.append((number, name, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] {number}. {name} {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_CRITERIA, key=lambda c: c[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {name}: {detail}")
