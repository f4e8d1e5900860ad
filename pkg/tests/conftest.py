import pytest

# criterion -> list of (label, passed, detail), filled by the acceptance tests
ACCEPTANCE = {}


def record(criterion, label, passed, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((label, bool(passed), detail))


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        items = ACCEPTANCE[crit]
        ok = all(p for _, p, _ in items)
        parts = "; ".join(f"{lbl}: {'ok' if p else 'FAIL'} {d}".strip() for lbl, p, d in items)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {crit}: {parts}")
