from fractions import Fraction

import pytest

from semicert.polycore import Polynomial


@pytest.fixture
def xyz():
    return [Polynomial.var(i, 3) for i in range(3)]


@pytest.fixture
def xy():
    return [Polynomial.var(i, 2) for i in range(2)]


@pytest.fixture
def t():
    return Polynomial.var(0, 1)


def F(*vals):
    return tuple(Fraction(v) for v in vals)


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the summary is printed at the end of the run."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])

    def record(number: int, ok: bool, text: str, seconds: float, limit: float | None = None):
        timing = f"{seconds:.2f}s" + (f" (limit {limit:g}s)" if limit is not None else "")
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {text}; runtime {timing}"
        lines.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
