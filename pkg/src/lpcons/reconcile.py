"""Errata gate for the two-variable worked example.

The same two-row system is printed in three forms that disagree in sign.
This script evaluates every claim the worked examples make about that system
against each candidate, and reports which candidates satisfy all of them.
Run ``python3 -m lpcons.reconcile`` to regenerate the committed report.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .liftproject import Mode, disjunctive_cuts, fm_project, hull_rows, lift, sequentialize
from .lp import LpProblem, lp_optimize
from .model import BinarySystem, LinIneq, PartialAssignment
from .oracle import Property, check, enumerate_feasible, lp_consistent
from .search import Prune, Strategy, ValueOrder, branch_and_bound, feasibility_search

F = Fraction
OBJECTIVE = {1: -1, 2: 3}

CANDIDATES: dict[str, BinarySystem] = {
    "corrected {2x1+4x2>=1, 2x1-4x2>=-3}": BinarySystem(2, (
        LinIneq.make({1: 2, 2: 4}, 1), LinIneq.make({1: 2, 2: -4}, -3))),
    "variant A {2x1+4x2>=-1, 2x1-4x2>=-3}": BinarySystem(2, (
        LinIneq.make({1: 2, 2: 4}, -1), LinIneq.make({1: 2, 2: -4}, -3))),
    "variant B {2x1-4x2<=-1, -2x1+4x2<=3}": BinarySystem(2, (
        LinIneq.leq({1: 2, 2: -4}, -1), LinIneq.leq({1: -2, 2: 4}, 3))),
}

# The lifted table as printed, rewritten in >= form with y = y_{1,2}.
PRINTED_BOX_PRODUCTS = {
    LinIneq.make({3: 1}, 0), LinIneq.make({1: 1, 3: -1}, 0),
    LinIneq.make({2: 1, 3: -1}, 0), LinIneq.make({1: -1, 2: -1, 3: 1}, -1),
}
PRINTED_LIFT = PRINTED_BOX_PRODUCTS | {
    LinIneq.make({2: 3, 3: -2}, 0), LinIneq.make({1: -2, 2: 1, 3: 2}, 1),
    LinIneq.make({2: -1, 3: 2}, 0), LinIneq.make({1: 2, 2: -3, 3: -2}, -3),
}
PRINTED_CUT = LinIneq.make({1: -1, 2: 4}, -3)


def _pa(**kw) -> PartialAssignment:
    return PartialAssignment.of({int(k[1:]): v for k, v in kw.items()})


def _lp_opt(S: BinarySystem, fix=None, extra=()):
    return lp_optimize(LpProblem.relaxation(S, fix, objective=OBJECTIVE, extra_rows=extra), "max")


def _is_opt(S, point, fix=None, extra=()) -> bool:
    out = _lp_opt(S, fix, extra)
    if out.value is None:
        return False
    pt = tuple(F(v) for v in point)
    return (all(r.satisfied_by(pt) for r in S.rows + tuple(extra))
            and all(0 <= v <= 1 for v in pt)
            and all(pt[j - 1] == v for j, v in (fix.bindings if fix else ()))
            and sum(F(c) * pt[j - 1] for j, c in OBJECTIVE.items()) == out.value)


def _interval(S: BinarySystem) -> tuple | None:
    P = fm_project(lift(S, 2), [1], prune_redundant=True, assume_box=True)
    rows = list(P.rows) + [LinIneq.make({1: 1}, 0), LinIneq.make({1: -1}, -1)]
    lo = max((r.rhs / r.coef[1] for r in rows if r.coef.get(1, 0) > 0), default=None)
    hi = min((r.rhs / r.coef[1] for r in rows if r.coef.get(1, 0) < 0), default=None)
    if any(not r.coeffs and r.rhs > 0 for r in rows) or lo > hi:
        return None
    return lo, hi


def _cut_x1(S: BinarySystem) -> list[LinIneq]:
    out = _lp_opt(S)
    return disjunctive_cuts(S, 1, out.witness) if out.witness else []


@dataclass(frozen=True)
class Claim:
    label: str
    test: Callable[[BinarySystem], bool]


def _safe(fn: Callable[[BinarySystem], bool]) -> Callable[[BinarySystem], bool]:
    def run(S):
        try:
            return bool(fn(S))
        except Exception:  # a claim that cannot even be evaluated fails
            return False
    return run


CLAIMS: list[Claim] = [
    # not-LP-consistent example
    Claim("x1=0 is consistent with S_LP", lambda S: lp_consistent(S, _pa(x1=0))),
    Claim("(0,0) and (0,1) both violate S",
          lambda S: not S.satisfied_by((0, 0)) and not S.satisfied_by((0, 1))),
    Claim("S is not LP-consistent", lambda S: not check(S, Property.LP).verdict),
    # sequential LP-consistency example
    Claim("not sequentially LP 2-consistent, witness x1=0",
          lambda S: check(S, Property.SEQUENTIAL_LP_K, 2).witness == _pa(x1=0)),
    Claim("(0,0) and (0,1) are both LP-infeasible",
          lambda S: not lp_consistent(S, _pa(x1=0, x2=0)) and not lp_consistent(S, _pa(x1=0, x2=1))),
    Claim("branching x1=0 first forces a backtrack",
          lambda S: feasibility_search(S, Strategy((1, 2), Prune.LP)).backtracks >= 1),
    Claim("S + {x1+x2>=1} is sequentially LP 2-consistent and rejects x1=0",
          lambda S: (lambda T: check(T, Property.SEQUENTIAL_LP_K, 2).verdict
                     and not lp_consistent(T, _pa(x1=0)))(S.with_rows([LinIneq.make({1: 1, 2: 1}, 1)]))),
    Claim("(1,1) solves S", lambda S: S.satisfied_by((1, 1))),
    # lift-and-project example
    Claim("box-product rows of R_2 match the printed right column",
          lambda S: PRINTED_BOX_PRODUCTS <= set(lift(S, 2).rows)),
    Claim("R_2 projected onto x1 is exactly [1/2, 1]", lambda S: _interval(S) == (F(1, 2), F(1))),
    Claim("adding that projection achieves sequential LP 2-consistency",
          lambda S: check(sequentialize(S, 2, Mode.PAPER), Property.SEQUENTIAL_LP_K, 2).verdict),
    # branch-and-cut example
    Claim("root LP optimum of max 3x2-x1 is (1/2,1)", lambda S: _is_opt(S, (F(1, 2), 1))),
    Claim("x1-disjunction cuts off (1/2,1) with a single hull facet", lambda S: len(_cut_x1(S)) == 1),
    Claim("x2-disjunction hull contains x1>=1/2, tight but not violated at (1/2,1)",
          lambda S: LinIneq.make({1: 1}, F(1, 2)) in hull_rows(S, 2)
          and not disjunctive_cuts(S, 2, (F(1, 2), F(1))) and _is_opt(S, (F(1, 2), 1))),
    Claim("after the cut the LP optimum is (0,3/4)",
          lambda S: _is_opt(S, (0, F(3, 4)), extra=_cut_x1(S))),
    Claim("x2=0 branch LP optimum is (1/2,0)",
          lambda S: _is_opt(S, (F(1, 2), 0), _pa(x2=0), _cut_x1(S))),
    Claim("x2=1 branch LP optimum is (1,1)", lambda S: _is_opt(S, (1, 1), _pa(x2=1), _cut_x1(S))),
    Claim("branch-and-cut tree has 5 nodes and optimum (1,1)",
          lambda S: (lambda t: t.nodes == 5 and t.solution == (1, 1))(branch_and_bound(S, OBJECTIVE, "max", [1, 2]))),
    Claim("with x1>=1/2 added, 2 nodes and optimum (1,1)",
          lambda S: (lambda t: t.nodes == 2 and t.solution == (1, 1))(branch_and_bound(
              sequentialize(S, 2), OBJECTIVE, "max", [], Strategy(prune=Prune.LP)))),
]


def informational(S: BinarySystem) -> list[tuple[str, str]]:
    """Facts reported next to the claims but not part of the gate."""
    F_ = enumerate_feasible(S)
    # the printed table leaves out the bounds on x2 itself
    lifted = {r for r in lift(S, 2).rows if r.coeffs and r.variables != {2}}
    cut = _cut_x1(S)
    return [
        ("0-1 solutions", ", ".join(str(p) for p in F_) or "none"),
        ("lifted rows, x2 bounds aside, equal the printed table", str(lifted == PRINTED_LIFT)),
        ("x1-disjunction cut", "; ".join(str(c) for c in cut) or "none"),
        ("x1-disjunction cut equals printed -x1+4x2>=-3", str(any(c == PRINTED_CUT.normalized() for c in cut))),
        ("trace with ZeroFirst after sequentialize(2)",
         str(feasibility_search(sequentialize(S, 2), Strategy((1, 2), Prune.LP)).solution)),
        ("trace with OneFirst after sequentialize(2)",
         str(feasibility_search(sequentialize(S, 2), Strategy((1, 2), Prune.LP, ValueOrder.ONE_FIRST)).solution)),
    ]


def reconcile() -> dict[str, list[tuple[str, bool]]]:
    return {name: [(c.label, _safe(c.test)(S)) for c in CLAIMS] for name, S in CANDIDATES.items()}


def report() -> tuple[str, bool]:
    """Text report, and whether exactly the corrected system passes every claim."""
    results = reconcile()
    lines = ["Errata reconciliation for the two-variable worked example", ""]
    passing = []
    for name, rows in results.items():
        ok = all(v for _, v in rows)
        if ok:
            passing.append(name)
        lines.append(f"== {name}: {'ALL CLAIMS HOLD' if ok else 'fails ' + str(sum(not v for _, v in rows)) + ' claim(s)'}")
        for label, v in rows:
            lines.append(f"  [{'ok' if v else 'FAIL'}] {label}")
        for label, v in informational(CANDIDATES[name]):
            lines.append(f"  (info) {label}: {v}")
        lines.append("")
    gate = passing == [next(iter(CANDIDATES))]
    lines.append(f"gate: {'PASS' if gate else 'FAIL'} (systems satisfying every claim: {passing or 'none'})")
    return "\n".join(lines) + "\n", gate


def main(argv=None) -> int:
    text, gate = report()
    sys.stdout.write(text)
    return 0 if gate else 1


if __name__ == "__main__":
    raise SystemExit(main())
