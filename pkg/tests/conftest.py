import pytest

LINES = []


@pytest.fixture
def criterion():
    """record(n, passed, text): one summary line per acceptance criterion."""
    def record(n, passed, text=""):
        LINES.append("CRITERION %2d: %s  %s" % (n, "PASS" if passed else "FAIL", text))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES):
            terminalreporter.write_line(line)
