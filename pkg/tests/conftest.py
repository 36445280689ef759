import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def _report(criterion: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
