import pytest

_VERDICTS = []


class Gate:
    """Collects one verdict line per acceptance criterion."""

    def record(self, number, title, passed, detail):
        line = f"ACCEPTANCE {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        _VERDICTS.append((number, line))
        print(line)
        return passed


@pytest.fixture(scope="session")
def gate():
    return Gate()


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_VERDICTS):
        terminalreporter.write_line(line)
