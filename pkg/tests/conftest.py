from __future__ import annotations

from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
TEST_DATA = ROOT / "tests" / "data"
GOLDEN = ROOT / "tests" / "golden"

_criteria: list[str] = []


class CriterionLog:
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(self, number: int, title: str, passed: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] AC{number} {title}"
        if detail:
            line += f" :: {detail}"
        print(line)
        _criteria.append(line)
        return passed


@pytest.fixture(scope="session")
def criterion() -> CriterionLog:
    return CriterionLog()


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criteria, key=lambda s: int(s.split("AC")[1].split()[0])):
            terminalreporter.write_line(line)
