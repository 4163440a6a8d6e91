"""Ground truth by enumeration, and literal checkers for each consistency notion.

Nothing here is clever: every checker walks the quantifiers of its
definition over 0-1 partial assignments.  Counterexamples are reported as the
smallest violating partial assignment (fewest variables, then lexicographic
in the variable set, then in the values) so that results are reproducible.
"""

from __future__ import annotations

import enum
import itertools
import os
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .lp import LpProblem, lp_feasible
from .model import BinarySystem, Clause, LinIneq, PartialAssignment

DEFAULT_CAP = 22
CAP_ENV = "LPCONS_ENUM_CAP"


class EnumerationCapExceeded(ValueError):
    pass


class Relaxation(enum.Enum):
    EXACT = "exact"
    SUBSET = "subset"  # only rows whose variables are all assigned
    LP = "lp"


class Property(enum.Enum):
    CONSISTENT = "consistent"
    DOMAIN = "domain"
    K = "k"
    STRONG_K = "strong-k"
    SEQUENTIAL_K = "seq-k"
    LP = "lp"
    SEQUENTIAL_LP_K = "seq-lp-k"

    @property
    def needs_k(self) -> bool:
        return self in (Property.K, Property.STRONG_K, Property.SEQUENTIAL_K, Property.SEQUENTIAL_LP_K)


@dataclass(frozen=True)
class ConsistencyReport:
    property: Property
    verdict: bool
    k: int | None = None
    witness: PartialAssignment | None = None
    detail: str = ""
    evidence: tuple = ()

    def __bool__(self) -> bool:
        return self.verdict

    def label(self) -> str:
        return self.property.value if self.k is None else f"{self.property.value}:{self.k}"


@dataclass
class SuiteReport:
    """Outcome of a seeded property suite; ``violations`` hold replayable instances."""

    name: str
    checked: int = 0
    applicable: int = 0
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def summary(self) -> str:
        verdict = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        return f"{self.name}: {verdict}; {self.checked} checked, {self.applicable} with preconditions met"


@dataclass(frozen=True)
class FeasibleSet:
    n: int
    points: frozenset[tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.points

    def __iter__(self):
        return iter(sorted(self.points))


def default_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_CAP


def _check_cap(n: int, cap: int | None):
    cap = default_cap() if cap is None else cap
    if n > cap:
        raise EnumerationCapExceeded(f"{n} variables exceed the enumeration cap of {cap}")


def _search_points(S: BinarySystem, fixed: dict[int, int], first_only: bool) -> list[tuple[int, ...]]:
    """Lexicographic DFS with bound pruning; returns satisfying points."""
    n = S.n
    rows = [([(j - 1, c) for j, c in r.coeffs], r.rhs) for r in S.rows]
    if any(not terms and rhs > 0 for terms, rhs in rows):
        return []
    touching: list[list[int]] = [[] for _ in range(n)]
    for i, (terms, _) in enumerate(rows):
        for j, _ in terms:
            touching[j].append(i)
    # slack[i] = best achievable lhs - rhs given the current partial point
    slack = [sum(c for _, c in terms if c > 0) - rhs for terms, rhs in rows]
    coef = [dict(terms) for terms, _ in rows]
    order_vals = [(fixed[j + 1],) if j + 1 in fixed else (0, 1) for j in range(n)]
    point = [0] * n
    found: list[tuple[int, ...]] = []

    def assign(j, v, sign):
        ok = True
        for i in touching[j]:
            c = coef[i][j]
            # moving x_j from "best case" to v costs max(c,0) - c*v
            delta = (c if c > 0 else 0) - c * v
            slack[i] -= sign * delta
            if slack[i] < 0:
                ok = False
        return ok

    def rec(j):
        if j == n:
            p = tuple(point)
            if S.satisfied_by(p):
                found.append(p)
            return first_only and bool(found)
        for v in order_vals[j]:
            point[j] = v
            ok = assign(j, v, 1)
            stop = ok and rec(j + 1)
            assign(j, v, -1)
            if stop:
                return True
        return False

    if all(s >= 0 for s in slack):
        rec(0)
    return found


def enumerate_feasible(S: BinarySystem, cap: int | None = None) -> FeasibleSet:
    _check_cap(S.n, cap)
    return FeasibleSet(S.n, frozenset(_search_points(S, {}, False)))


def has_extension(S: BinarySystem, a: PartialAssignment, cap: int | None = None) -> bool:
    _check_cap(S.n, cap)
    return bool(_search_points(S, a.as_dict, True))


def project(F: FeasibleSet, J: Iterable[int]) -> set[tuple[int, ...]]:
    J = sorted(J)
    return {tuple(p[j - 1] for j in J) for p in F.points}


def violates_no_row(S: BinarySystem, a: PartialAssignment) -> bool:
    """Does ``a`` satisfy every row of ``S_J`` (J = assigned variables)?"""
    vals = a.as_dict
    return all(r.satisfied_by(vals) for r in S.rows_within(vals))


def lp_consistent(S: BinarySystem, a: PartialAssignment) -> bool:
    return lp_feasible(LpProblem.relaxation(S, a)).feasible


def consistent_with(S: BinarySystem, a: PartialAssignment, relaxation: Relaxation = Relaxation.EXACT) -> bool:
    if any(j > S.n for j in a.variables):
        raise ValueError("assignment mentions variables outside 1..n")
    if relaxation is Relaxation.EXACT:
        return has_extension(S, a)
    if relaxation is Relaxation.SUBSET:
        return violates_no_row(S, a)
    return lp_consistent(S, a)


def assignments_over(J: Sequence[int]) -> Iterator[PartialAssignment]:
    for vals in itertools.product((0, 1), repeat=len(J)):
        yield PartialAssignment(tuple(zip(J, vals)))


def subsets(n: int, sizes: Iterable[int] | None = None) -> Iterator[tuple[int, ...]]:
    for size in (range(n + 1) if sizes is None else sizes):
        yield from itertools.combinations(range(1, n + 1), size)


def _fail(prop, k, witness, detail) -> ConsistencyReport:
    return ConsistencyReport(prop, False, k, witness, detail)


def _check_consistent(S: BinarySystem, F: FeasibleSet) -> ConsistencyReport:
    for J in subsets(S.n):
        proj = project(F, J)
        for a in assignments_over(J):
            if violates_no_row(S, a) and a.values not in proj:
                return _fail(Property.CONSISTENT, None, a, "violates no row but has no feasible extension")
    return ConsistencyReport(Property.CONSISTENT, True)


def _check_domain(S: BinarySystem, F: FeasibleSet) -> ConsistencyReport:
    for j in range(1, S.n + 1):
        proj = project(F, [j])
        for v in (0, 1):
            if (v,) not in proj:
                return _fail(Property.DOMAIN, None, PartialAssignment(((j, v),)), "value occurs in no solution")
    return ConsistencyReport(Property.DOMAIN, True)


def _check_k(S: BinarySystem, k: int) -> ConsistencyReport:
    for J in subsets(S.n, [k - 1]):
        others = [j for j in range(1, S.n + 1) if j not in J]
        for a in assignments_over(J):
            if not violates_no_row(S, a):
                continue
            for j in others:
                if not any(violates_no_row(S, a.extend(j, v)) for v in (0, 1)):
                    return _fail(Property.K, k, a, f"no value of x{j} extends it")
    return ConsistencyReport(Property.K, True, k)


def _check_sequential_k(S: BinarySystem, k: int) -> ConsistencyReport:
    J = tuple(range(1, k))
    for a in assignments_over(J):
        if violates_no_row(S, a) and not any(violates_no_row(S, a.extend(k, v)) for v in (0, 1)):
            return _fail(Property.SEQUENTIAL_K, k, a, f"no value of x{k} extends it")
    return ConsistencyReport(Property.SEQUENTIAL_K, True, k)


def _check_lp(S: BinarySystem, F: FeasibleSet) -> ConsistencyReport:
    infeasible: set[PartialAssignment] = set()
    for J in subsets(S.n):
        proj = project(F, J)
        for a in assignments_over(J):
            if a.values in proj:
                continue
            # any LP-infeasible restriction makes this one LP-infeasible too
            if any(PartialAssignment(a.bindings[:i] + a.bindings[i + 1:]) in infeasible
                   for i in range(len(a))):
                infeasible.add(a)
                continue
            if lp_consistent(S, a):
                return _fail(Property.LP, None, a, "LP-feasible but has no 0-1 extension")
            infeasible.add(a)
    return ConsistencyReport(Property.LP, True)


def _check_sequential_lp_k(S: BinarySystem, k: int) -> ConsistencyReport:
    J = tuple(range(1, k))
    for a in assignments_over(J):
        if lp_consistent(S, a) and not any(lp_consistent(S, a.extend(k, v)) for v in (0, 1)):
            return _fail(Property.SEQUENTIAL_LP_K, k, a, f"no value of x{k} keeps the LP feasible")
    return ConsistencyReport(Property.SEQUENTIAL_LP_K, True, k)


def check(S: BinarySystem, prop: Property, k: int | None = None, cap: int | None = None) -> ConsistencyReport:
    _check_cap(S.n, cap)
    if prop.needs_k:
        if k is None or not 1 <= k <= max(S.n, 1):
            raise ValueError(f"{prop.value} needs k in 1..{S.n}")
    if prop is Property.CONSISTENT:
        return _check_consistent(S, enumerate_feasible(S, cap))
    if prop is Property.DOMAIN:
        return _check_domain(S, enumerate_feasible(S, cap))
    if prop is Property.K:
        return _check_k(S, k)
    if prop is Property.STRONG_K:
        for kk in range(1, k + 1):
            r = _check_k(S, kk)
            if not r.verdict:
                return ConsistencyReport(Property.STRONG_K, False, k, r.witness, f"not {kk}-consistent: {r.detail}")
        return ConsistencyReport(Property.STRONG_K, True, k)
    if prop is Property.SEQUENTIAL_K:
        return _check_sequential_k(S, k)
    if prop is Property.LP:
        return _check_lp(S, enumerate_feasible(S, cap))
    return _check_sequential_lp_k(S, k)


def is_counterexample(S: BinarySystem, report: ConsistencyReport) -> bool:
    """Independently re-check that a failed report's witness breaks the definition."""
    a = report.witness
    if report.verdict or a is None:
        return False
    prop, k = report.property, report.k
    free = [j for j in range(1, S.n + 1) if j not in a]
    if prop is Property.CONSISTENT:
        return violates_no_row(S, a) and not has_extension(S, a)
    if prop is Property.DOMAIN:
        return len(a) == 1 and not has_extension(S, a)
    if prop in (Property.K, Property.STRONG_K):
        size = len(a) + 1
        return (size <= k and violates_no_row(S, a)
                and any(not any(violates_no_row(S, a.extend(j, v)) for v in (0, 1)) for j in free))
    if prop is Property.SEQUENTIAL_K:
        return (a.variables == tuple(range(1, k)) and violates_no_row(S, a)
                and not any(violates_no_row(S, a.extend(k, v)) for v in (0, 1)))
    if prop is Property.LP:
        return lp_consistent(S, a) and not has_extension(S, a)
    return (a.variables == tuple(range(1, k)) and lp_consistent(S, a)
            and not any(lp_consistent(S, a.extend(k, v)) for v in (0, 1)))


def dependency_width(S: BinarySystem, order: Sequence[int] | None = None) -> int:
    """Largest number of earlier-ordered variables sharing a row with a variable."""
    order = list(range(1, S.n + 1)) if order is None else list(order)
    if sorted(order) != list(range(1, S.n + 1)):
        raise ValueError("order must be a permutation of 1..n")
    pos = {j: i for i, j in enumerate(order)}
    earlier: dict[int, set[int]] = {j: set() for j in order}
    for r in S.rows:
        vs = r.variables
        for a in vs:
            for b in vs:
                if pos[b] < pos[a]:
                    earlier[a].add(b)
    return max((len(s) for s in earlier.values()), default=0)


def random_system(n: int, m: int, coeff_range: int | tuple[int, int] = 3, rhs_policy: str = "feasible",
                  seed: int = 0, cap: int | None = None) -> BinarySystem:
    """Seeded random 0-1 system.

    ``rhs_policy="feasible"`` picks a hidden 0-1 point and keeps every rhs at
    or below that point's row value, so the system is always satisfiable;
    ``"tight"`` sets every rhs to that value (satisfiable, usually fractional
    LP vertices); ``"free"`` draws the rhs from the coefficient range.
    """
    _check_cap(n, cap)
    lo, hi = (-coeff_range, coeff_range) if isinstance(coeff_range, int) else coeff_range
    rng = random.Random(seed)
    if rhs_policy not in ("feasible", "tight", "free"):
        raise ValueError(f"unknown rhs policy {rhs_policy!r}")
    hidden = [rng.randint(0, 1) for _ in range(n)]
    rows = []
    for _ in range(m):
        if n == 0:
            break
        while True:
            coeffs = {j: rng.randint(lo, hi) for j in range(1, n + 1)}
            if any(coeffs.values()):
                break
        if rhs_policy != "free":
            value = sum(c * hidden[j - 1] for j, c in coeffs.items())
            rhs = value - (rng.randint(0, max(hi, 0)) if rhs_policy == "feasible" else 0)
        else:
            rhs = rng.randint(lo, hi)
        rows.append(LinIneq.make(coeffs, rhs))
    return BinarySystem(n, tuple(rows))


def random_clauses(n: int, m: int, seed: int = 0, max_len: int | None = None) -> list[Clause]:
    """Seeded random nonempty clauses over x1..xn."""
    rng = random.Random(seed)
    max_len = n if max_len is None else max_len
    out = []
    for _ in range(m):
        size = rng.randint(1, max(1, max_len))
        vs = rng.sample(range(1, n + 1), size)
        signs = [rng.randint(0, 1) for _ in vs]
        out.append(Clause(frozenset(v for v, s in zip(vs, signs) if s), frozenset(v for v, s in zip(vs, signs) if not s)))
    return out
