import pytest

from fdnag.codec import Genotype, SearchSpaceShape
from fdnag.oracle import build_planted_tabular

EXAMPLE_TABLE = "genotype,fitness\n0-0,0.5\n0-1,0.9\n1-0,0.1\n1-1,0.7\n"
PLANTED_OPTIMUM = "4-0-3-1-4-0"

_criteria: list[tuple[str, bool, str]] = []


@pytest.fixture
def example_table(tmp_path):
    p = tmp_path / "small.csv"
    p.write_text(EXAMPLE_TABLE, encoding="utf-8")
    return p


@pytest.fixture(scope="session")
def planted_bench():
    return build_planted_tabular(SearchSpaceShape(6, 5), Genotype.parse(PLANTED_OPTIMUM), 0.05, 7)


@pytest.fixture
def criterion():
    """Record an acceptance line, then assert it."""

    def check(name: str, ok: bool, detail: str = ""):
        _criteria.append((name, bool(ok), detail))
        assert ok, f"{name}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
