"""Shared test plumbing.

Collects acceptance-gate results during the run and prints one
`[acceptance] <criterion>: PASS/FAIL` line per criterion in the
terminal summary, where output capture cannot swallow them.
"""

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(name: str, passed: bool) -> None:
    _ACCEPTANCE_LINES.append(
        f"[acceptance] {name}: {'PASS' if passed else 'FAIL'}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance gate")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
