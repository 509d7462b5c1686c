"""Shared fixtures and random-prior generators."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from clarity import distributions as D


def random_symmetric_prior(rng: np.random.Generator, null_atom: bool = True) -> D.SignalDistribution:
    """A symmetric mixture: optional atom at 0, centred continuous parts, atom pairs at +-a."""
    parts = []
    if null_atom:
        parts.append((rng.uniform(0.1, 0.8), D.point_mass(0.0)))
    for _ in range(rng.integers(1, 4)):
        kind = rng.choice(["cauchy", "normal", "laplace", "student_t", "pair"])
        w = rng.uniform(0.05, 1.0)
        scale = float(np.exp(rng.uniform(np.log(0.1), np.log(4.0))))
        if kind == "cauchy":
            parts.append((w, D.cauchy(scale)))
        elif kind == "normal":
            parts.append((w, D.normal(scale)))
        elif kind == "laplace":
            parts.append((w, D.laplace(scale)))
        elif kind == "student_t":
            parts.append((w, D.student_t(float(rng.uniform(0.5, 4.0)), scale)))
        else:
            parts.append((0.5 * w, D.point_mass(scale)))
            parts.append((0.5 * w, D.point_mass(-scale)))
    total = sum(w for w, _ in parts)
    return D.SignalDistribution.mixture(*((w / total, c) for w, c in parts))


@st.composite
def symmetric_priors(draw, null_atom: bool | None = None):
    seed = draw(st.integers(0, 2**32 - 1))
    with_atom = draw(st.booleans()) if null_atom is None else null_atom
    return random_symmetric_prior(np.random.default_rng(seed), with_atom)


@pytest.fixture
def dirac_cauchy_mix():
    """``0.6 delta_0 + 0.4 C(0.5)``."""
    return D.dirac_cauchy(0.4, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# -- acceptance reporting --------------------------------------------------

_ACCEPTANCE_LINES: list[tuple[int, str]] = []


@pytest.fixture
def criterion(request):
    """Record and print one PASS/FAIL line, then assert."""
    def check(number: int, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {detail}"
        _ACCEPTANCE_LINES.append((number, line))
        print(line)
        assert ok, line
    return check


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
