"""Shared fixtures: kernel warmup and cached convergence studies.

The expensive ladder studies are session-scoped so the acceptance tests
and the unit tests share one run of each.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

import fractrap as ft
from fractrap._kernels import warmup

#: one human-readable pass/fail line per acceptance criterion, echoed in
#: the terminal summary so they are visible even for passing tests
ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> bool:
    line = f"criterion {number:02d}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    warmup()


@pytest.fixture(scope="session")
def linear_half():
    return ft.make_linear(0.5, -2.0, T=2.0, y0=1.0)


@pytest.fixture(scope="session")
def study_alpha_half(linear_half):
    """All five methods on the alpha=0.5 linear problem, N=32..4096."""
    tic = time.perf_counter()
    study = ft.convergence_study(
        linear_half,
        ["PIU", "PIG", "FT", "NG", "FBDF"],
        [32, 64, 128, 256, 512, 1024, 2048, 4096],
    )
    return study, time.perf_counter() - tic


@pytest.fixture(scope="session")
def study_alpha_three_halves():
    """All five methods on the alpha=1.5 linear problem, N=64..4096."""
    problem = ft.make_linear(1.5, -2.0, T=2.0, y0=[1.0, 0.0])
    tic = time.perf_counter()
    study = ft.convergence_study(
        problem,
        ["PIU", "PIG", "FT", "NG", "FBDF"],
        [64, 128, 256, 512, 1024, 2048, 4096],
    )
    return study, time.perf_counter() - tic


@pytest.fixture(scope="session")
def exact_linear_half_endpoint():
    """Series value of the alpha=0.5, lambda=-2 solution at t=2."""
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 30
    z = -2 * mp.sqrt(2)
    return float(sum(z**k / mp.gamma(mp.mpf("0.5") * k + 1) for k in range(300)))
