from __future__ import annotations

import itertools
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lpcons.model import BinarySystem, LinIneq
from lpcons.modelfile import load_model

MODELS = Path(__file__).resolve().parent.parent / "models"

settings.register_profile("repo", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def model(name: str):
    return load_model(str(MODELS / name))


@pytest.fixture
def ex1() -> BinarySystem:
    return model("example1.mod").system


@pytest.fixture
def ex3() -> BinarySystem:
    return model("example3.mod").system


@pytest.fixture
def ex7() -> BinarySystem:
    return model("example7.mod").system


@pytest.fixture
def sec7() -> BinarySystem:
    return model("section7.mod").system


def points(n: int):
    return list(itertools.product((0, 1), repeat=n))


def brute_feasible(S: BinarySystem) -> set[tuple[int, ...]]:
    return {p for p in points(S.n) if all(sum(c * p[j - 1] for j, c in r.coeffs) >= r.rhs for r in S.rows)}


@st.composite
def systems(draw, max_n: int = 4, max_m: int = 4, coeff: int = 4, min_n: int = 1):
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(0, max_m))
    rows = []
    for _ in range(m):
        coeffs = {j: draw(st.integers(-coeff, coeff)) for j in range(1, n + 1)}
        rows.append(LinIneq.make(coeffs, draw(st.integers(-coeff, coeff))))
    return BinarySystem(n, tuple(rows))


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6).map(Fraction)


def _solve_square(A, b):
    n = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def polytope_vertices(rows, n):
    """Vertices of {x in R^n : rows} by brute force over n-row subsets."""
    rows = list(rows)
    out = set()
    for combo in itertools.combinations(rows, n):
        A = [[r.coef.get(j, Fraction(0)) for j in range(1, n + 1)] for r in combo]
        x = _solve_square(A, [r.rhs for r in combo])
        if x is not None and all(r.satisfied_by(x) for r in rows):
            out.add(tuple(x))
    return out


def vertices(S: BinarySystem, fix=None):
    """Vertices of S_LP, optionally with some variables fixed."""
    rows = list(S.rows_with_box())
    for j, v in (fix or {}).items():
        rows += [LinIneq.make({j: 1}, v), LinIneq.make({j: -1}, -v)]
    return polytope_vertices(rows, S.n)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
