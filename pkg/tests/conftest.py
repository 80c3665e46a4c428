import json
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]

ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def report_schema():
    return json.loads((ROOT / "docs" / "report.schema.json").read_text())


@pytest.fixture
def record_criterion():
    def record(number, title, passed, detail=""):
        ACCEPTANCE_RESULTS[number] = (title, passed, detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, passed, detail = ACCEPTANCE_RESULTS[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}  {detail}")
