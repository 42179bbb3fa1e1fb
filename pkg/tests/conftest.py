"""Shared test plumbing.

The acceptance tests register one line per criterion here; the terminal
summary hook prints them all at the end of the run so the pass/fail state
of every criterion is visible even when a single test covers several.
"""

from __future__ import annotations

# criterion number -> (description, passed, detail)
_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record_criterion(number: int, description: str, passed: bool, detail: str) -> None:
    """Log a criterion outcome for the end-of-run summary.

    Call before asserting so the line prints even when the assert fires.
    """
    _ACCEPTANCE[number] = (description, bool(passed), detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        description, passed, detail = _ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(
            f"{status}  criterion {number:2d}: {description} [{detail}]"
        )
