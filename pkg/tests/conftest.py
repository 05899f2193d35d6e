from __future__ import annotations

import pytest

# criterion number -> (passed, description, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, name, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {k}. {name}: {detail}")


@pytest.fixture
def criterion():
    """Context helper: ``with criterion(n, name) as note: ...; note(detail)``."""
    from contextlib import contextmanager

    @contextmanager
    def record(number: int, name: str):
        details: list[str] = []
        try:
            yield details.append
        except BaseException:
            ACCEPTANCE[number] = (False, name, "; ".join(details) or "assertion failed")
            print(f"[FAIL] {number}. {name}")
            raise
        ACCEPTANCE[number] = (True, name, "; ".join(details))
        print(f"[PASS] {number}. {name}: {'; '.join(details)}")

    return record
