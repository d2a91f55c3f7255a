import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CORPUS = Path(__file__).resolve().parent.parent / "src" / "teleo" / "corpus"

ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def corpus():
    return CORPUS


def load(name: str):
    from teleo.parser import parse_program

    return parse_program((CORPUS / name).read_text())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, line = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {line}")
