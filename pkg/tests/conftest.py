from __future__ import annotations

import pytest

# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(criterion: int, passed: bool, detail: str = "") -> None:
        ACCEPTANCE[criterion] = (passed, detail)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        line = f"criterion {k}: {'PASS' if passed else 'FAIL'}"
        terminalreporter.write_line(f"{line} - {detail}" if detail else line)
