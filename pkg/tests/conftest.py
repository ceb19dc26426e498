import pytest

from capakb.fixtures import pepper_kb

# criterion number -> (ok, line); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def pepper():
    """The Pepper knowledge base, materialized."""
    kb = pepper_kb()
    kb.rebuild()
    return kb


@pytest.fixture
def pepper_raw():
    """The Pepper knowledge base before materialization."""
    return pepper_kb()


@pytest.fixture(scope="session")
def acceptance_report():
    def report(number: int, title: str, ok: bool, detail: str) -> None:
        status = "PASS" if ok else "FAIL"
        ACCEPTANCE[number] = (ok, f"{status}  criterion {number}: {title} ({detail})")

    return report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number][1])
