"""Shared test plumbing: collects acceptance-criterion verdict lines and
echoes them in the terminal summary so they are visible under capture."""

_CRITERION_LINES = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number:2d} [{status}] {detail}"
    _CRITERION_LINES.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_CRITERION_LINES):
        terminalreporter.write_line(line)
