import pytest

from trapdist.geom import Case

ALL_CASES = list(Case)

_acceptance_lines: list[str] = []


@pytest.fixture(params=ALL_CASES, ids=lambda c: c.value)
def case(request):
    return request.param


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion for the summary."""

    def record(label: str, ok: bool, detail: str = "") -> None:
        _acceptance_lines.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
