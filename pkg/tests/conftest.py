import pytest

_ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store ``(passed, detail)`` for an acceptance criterion; printed in the summary."""
    def _record(criterion, passed, detail):
        _ACCEPTANCE[criterion] = (bool(passed), detail)
        print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}")
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'} - {detail}")
