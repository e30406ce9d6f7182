import pytest

#: (criterion, passed, detail) lines filled in by the acceptance tests
ACCEPTANCE = []


@pytest.fixture
def report():
    def record(criterion, checks):
        """``checks`` maps a label to ``(value, ok)``; returns overall pass."""
        ok = all(flag for _, flag in checks.values())
        detail = "; ".join(
            f"{k}={v:.6g}{'' if flag else ' (FAIL)'}" if isinstance(v, float)
            else f"{k}={v}{'' if flag else ' (FAIL)'}"
            for k, (v, flag) in checks.items()
        )
        ACCEPTANCE.append((criterion, ok, detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(ACCEPTANCE, key=lambda x: x[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
