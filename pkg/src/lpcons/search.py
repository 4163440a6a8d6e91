"""Depth-first branching with node and backtrack accounting.

``feasibility_search`` fixes variables in a given order and opens a child only
when the extended partial assignment passes the pruning test.  A backtrack is
counted for every opened node, other than the root, whose subtree holds no
solution: the search has to retract that assignment.  A node that opens no
child at all is still a dead end, which is the situation a branching order
without consistency runs into.

``branch_and_bound`` solves an LP at every opened node, branches on a most
fractional variable and explores children depth first in the value order.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .liftproject import Mode, disjunctive_cuts, sequentialize_all
from .lp import LpProblem, Status, lp_feasible, lp_optimize
from .model import BinarySystem, LinIneq, PartialAssignment, RatLike, rat
from .oracle import (
    Property,
    SuiteReport,
    check,
    dependency_width,
    random_system,
    violates_no_row,
)
from .resolution import augment_with_closure, clausal_core, full_closure

HALF = Fraction(1, 2)


class Prune(enum.Enum):
    NONE = "none"
    ROWS = "rows"  # violates no row of S_J
    LP = "lp"  # feasible for S_LP with the fixings


class ValueOrder(enum.Enum):
    ZERO_FIRST = "zero-first"
    ONE_FIRST = "one-first"
    LP_GUIDED = "lp-guided"  # value nearest the LP solution first, 0 on ties


@dataclass(frozen=True)
class Strategy:
    order: tuple[int, ...] | None = None
    prune: Prune = Prune.LP
    value_order: ValueOrder = ValueOrder.ZERO_FIRST

    def resolved_order(self, n: int) -> tuple[int, ...]:
        order = tuple(range(1, n + 1)) if self.order is None else tuple(self.order)
        if sorted(order) != list(range(1, n + 1)):
            raise ValueError(f"order {order} is not a permutation of 1..{n}")
        return order


@dataclass(frozen=True)
class NodeLog:
    depth: int
    assignment: PartialAssignment
    event: str  # "open", "pruned:<test>", "solution", "dead-end", "infeasible", "bound", "integral", ...
    value: Fraction | None = None


@dataclass
class SearchTrace:
    nodes: int = 0
    backtracks: int = 0
    solution: tuple[int, ...] | None = None
    objective_value: Fraction | None = None
    log: list[NodeLog] = field(default_factory=list)
    cuts: tuple[LinIneq, ...] = ()

    def note(self, depth: int, a: PartialAssignment, event: str, value=None):
        self.log.append(NodeLog(depth, a, event, value))


def _passes(S: BinarySystem, a: PartialAssignment, prune: Prune) -> bool:
    if prune is Prune.ROWS:
        return violates_no_row(S, a)
    if prune is Prune.LP:
        return lp_feasible(LpProblem.relaxation(S, a)).feasible
    return True


def _value_order(S: BinarySystem, a: PartialAssignment, j: int, how: ValueOrder) -> tuple[int, int]:
    if how is ValueOrder.ONE_FIRST:
        return (1, 0)
    if how is ValueOrder.LP_GUIDED:
        out = lp_feasible(LpProblem.relaxation(S, a))
        if out.feasible and out.witness[j - 1] > HALF:
            return (1, 0)
    return (0, 1)


def feasibility_search(S: BinarySystem, strat: Strategy = Strategy()) -> SearchTrace:
    order = strat.resolved_order(S.n)
    trace = SearchTrace(nodes=1)
    trace.note(0, PartialAssignment(), "open")

    def visit(a: PartialAssignment, depth: int) -> bool:
        if depth == S.n:
            point = tuple(a[j] for j in range(1, S.n + 1))
            if S.satisfied_by(point):
                trace.solution = point
                trace.note(depth, a, "solution")
                return True
            trace.note(depth, a, "dead-end")
            return False
        j = order[depth]
        for v in _value_order(S, a, j, strat.value_order):
            child = a.extend(j, v)
            if not _passes(S, child, strat.prune):
                trace.note(depth + 1, child, f"pruned:{strat.prune.value}")
                continue
            trace.nodes += 1
            trace.note(depth + 1, child, "open")
            if visit(child, depth + 1):
                return True
            trace.backtracks += 1
        if depth:
            trace.note(depth, a, "dead-end")
        return False

    visit(PartialAssignment(), 0)
    return trace


def _most_fractional(x: Sequence[Fraction], n: int) -> int | None:
    best = None
    for j in range(1, n + 1):
        v = x[j - 1]
        if v.denominator == 1:
            continue
        key = (abs(v - HALF), j)
        if best is None or key < best[0]:
            best = (key, j)
    return None if best is None else best[1]


def branch_and_bound(S: BinarySystem, objective: Mapping[int, RatLike], direction: str = "max",
                     root_cut_variables: Sequence[int] = (),
                     strat: Strategy = Strategy(prune=Prune.NONE)) -> SearchTrace:
    """LP-based branch and bound; every LP solve at an opened node is one node.

    Disjunctive cuts for each variable in ``root_cut_variables`` are separated
    against the first root LP optimum and added before the root is re-solved.
    Children are explored depth first in ``strat.value_order``; with
    ``Prune.ROWS`` or ``Prune.LP`` a child failing the test is never opened.
    """
    if direction not in ("max", "min"):
        raise ValueError("direction must be 'max' or 'min'")
    obj = {j: rat(c) for j, c in objective.items()}
    if any(not 1 <= j <= S.n for j in obj):
        raise ValueError("objective mentions variables outside 1..n")
    better = (lambda a, b: a > b) if direction == "max" else (lambda a, b: a < b)
    trace = SearchTrace(nodes=1)

    def solve(system: BinarySystem, a: PartialAssignment):
        return lp_optimize(LpProblem.relaxation(system, a, objective=obj), direction)

    root = PartialAssignment()
    out = solve(S, root)
    cuts: list[LinIneq] = []
    if out.status is Status.OPTIMAL and root_cut_variables:
        for k in root_cut_variables:
            for c in disjunctive_cuts(S, k, out.witness):
                if c not in cuts:
                    cuts.append(c)
        if cuts:
            out = solve(S.with_rows(cuts), root)
    work = S.with_rows(cuts)
    trace.cuts = tuple(cuts)
    incumbent: list = [None, None]  # value, point

    def visit(a: PartialAssignment, depth: int, res) -> None:
        if res.status is not Status.OPTIMAL:
            trace.note(depth, a, "infeasible")
            return
        if incumbent[0] is not None and not better(res.value, incumbent[0]):
            trace.note(depth, a, "bound", res.value)
            return
        j = _most_fractional(res.witness, S.n)
        if j is None:
            point = tuple(int(v) for v in res.witness)
            if not S.satisfied_by(point):
                raise AssertionError("integral LP optimum violates the system")
            incumbent[0], incumbent[1] = res.value, point
            trace.note(depth, a, "integral", res.value)
            return
        trace.note(depth, a, f"branch:x{j}", res.value)
        if strat.value_order is ValueOrder.LP_GUIDED:
            values = (1, 0) if res.witness[j - 1] > HALF else (0, 1)
        else:
            values = (1, 0) if strat.value_order is ValueOrder.ONE_FIRST else (0, 1)
        for v in values:
            child = a.extend(j, v)
            if strat.prune is Prune.ROWS and not violates_no_row(work, child):
                trace.note(depth + 1, child, "pruned:rows")
                continue
            child_res = solve(work, child)
            if strat.prune is Prune.LP and child_res.status is Status.INFEASIBLE:
                trace.note(depth + 1, child, "pruned:lp")
                continue
            trace.nodes += 1
            before = incumbent[1]
            visit(child, depth + 1, child_res)
            if incumbent[1] is before:
                trace.backtracks += 1

    visit(root, 0, out)
    trace.solution, trace.objective_value = incumbent[1], incumbent[0]
    return trace


def _instances(count: int, seed: int):
    """Half raw random systems, half made consistent by resolution closure."""
    for i in range(count):
        s = seed * 100003 + i
        rng = random.Random(s)
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        S = random_system(n, m, 4, "feasible", s)
        if i % 2:
            S = augment_with_closure(S, full_closure(clausal_core(S)))
        yield s, S


def no_backtrack_theorem_suite(seed_count: int = 200, seed: int = 0, parts: str = "abc") -> SuiteReport:
    """Backtrack-free search under the three sufficient conditions.

    (a) strong k-consistency with dependency width below k, row checks;
    (b) sequential k-consistency for every k, row checks;
    (c) after ``sequentialize`` for k = n..1, LP checks.
    """
    report = SuiteReport("no-backtrack")
    rows_strat, lp_strat = Strategy(prune=Prune.ROWS), Strategy(prune=Prune.LP)
    for s, S in _instances(seed_count, seed):
        report.checked += 1
        n = S.n
        if "a" in parts:
            width = dependency_width(S)
            ks = [k for k in range(width + 1, n + 1) if check(S, Property.STRONG_K, k).verdict]
            if ks:
                report.applicable += 1
                t = feasibility_search(S, rows_strat)
                if t.backtracks:
                    report.violations.append(("a", s, ks[0], S.text()))
        if "b" in parts and all(check(S, Property.SEQUENTIAL_K, k).verdict for k in range(1, n + 1)):
            report.applicable += 1
            t = feasibility_search(S, rows_strat)
            if t.backtracks:
                report.violations.append(("b", s, None, S.text()))
        if "c" in parts:
            T = sequentialize_all(S, mode=Mode.PAPER)
            report.applicable += 1
            if not all(check(T, Property.SEQUENTIAL_LP_K, k).verdict for k in range(1, n + 1)):
                report.violations.append(("c-precondition", s, None, T.text()))
            t = feasibility_search(T, lp_strat)
            if t.backtracks or t.solution is None:
                report.violations.append(("c", s, None, T.text()))
    return report


__all__ = [
    "Prune", "ValueOrder", "Strategy", "NodeLog", "SearchTrace",
    "feasibility_search", "branch_and_bound", "no_backtrack_theorem_suite",
]
