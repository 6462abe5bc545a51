from pathlib import Path

import pytest

from nodal_atlas.fileio import load_form

FIXTURES = Path(__file__).parent / "fixtures"
EVEN_PATH = FIXTURES / "even_13p78.mf"
ODD_PATH = FIXTURES / "odd_9p53.mf"


@pytest.fixture(scope="session")
def even():
    return load_form(EVEN_PATH)


@pytest.fixture(scope="session")
def odd():
    return load_form(ODD_PATH)


# criterion number -> (status, detail), filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {status:9s} {detail}")
