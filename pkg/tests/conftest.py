import pytest

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance_report():
    def report(number, title, ok, detail=""):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
