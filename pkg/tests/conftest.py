from __future__ import annotations

import pytest

from bbm_qp.problem import ForcingDescriptor, FunctionDescriptor, ProblemSpec

ACCEPTANCE_LINES: list[str] = []


def bump(a: float = 1.0) -> FunctionDescriptor:
    return FunctionDescriptor.gaussian(a, 3.0, 0.5)


def make_spec(alpha=1.0, gamma=1.0, u0=None, g=None, f=None, beta_nl=0.0, period=None) -> ProblemSpec:
    return ProblemSpec(
        alpha=alpha, gamma=gamma,
        u0=u0 if u0 is not None else FunctionDescriptor.zero(),
        g=g if g is not None else FunctionDescriptor.zero(),
        f=f if f is not None else ForcingDescriptor(),
        beta_nl=beta_nl, period=period,
    )


@pytest.fixture
def record_acceptance():
    """Collect one summary line per acceptance criterion."""

    def record(number: int, title: str, passed: bool, detail: str) -> None:
        line = f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
