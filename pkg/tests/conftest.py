import pytest

# criterion number -> (passed, note); filled by test_acceptance
ACCEPTANCE: dict[int, list] = {}


def record(n: int, ok: bool, note: str = ""):
    prev = ACCEPTANCE.get(n)
    if prev is None:
        prev = ACCEPTANCE[n] = [True, ""]
    prev[0] = prev[0] and ok
    if note and not ok:
        prev[1] = note if not prev[1] else prev[1] + "; " + note


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[n]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}"
        if note and not ok:
            line += f"  ({note})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def b3_series():
    from rp2series import rp2
    return rp2.braid_series(3)


@pytest.fixture(scope="session")
def b4_series():
    from rp2series import rp2
    return rp2.braid_series(4)
