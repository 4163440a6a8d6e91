"""Rank-1 Chvatal-Gomory machinery for clausal inequalities.

A clause ``a x >= beta`` is a (rank-1) C-G cut for ``S_LP`` when some
``u >= 0`` over ``[rows; x_j >= 0; -x_j >= -1]`` has ``uA = a`` and
``beta - 1 < u.b <= beta``.  Membership is decided by the exact LP
``max u.b  s.t.  uA = a, u.b <= beta, u >= 0``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .lp import LpProblem, Status, lp_feasible, lp_optimize
from .model import (
    BinarySystem,
    Clause,
    EMPTY_CLAUSE,
    LinIneq,
    PartialAssignment,
    clause_to_inequality,
)
from .oracle import ConsistencyReport, Property, enumerate_feasible, lp_consistent
from .resolution import ClauseSet, clausal_core, has_input_proof, input_closure

ZERO = Fraction(0)


class InfeasibleRelaxation(ValueError):
    """``S_LP`` itself is empty, so every inequality is a surrogate."""


class LpConsistentAssignment(ValueError):
    """Raised when asked to separate an assignment the LP cannot refute."""


@dataclass(frozen=True)
class CutCertificate:
    multipliers: tuple[Fraction, ...]  # over S.rows_with_box()
    target: LinIneq
    combined_rhs: Fraction

    def verify(self, S: BinarySystem) -> bool:
        return verify_certificate(S, self)


@dataclass(frozen=True)
class CutTest:
    certificate: CutCertificate | None
    reason: str
    best_rhs: Fraction | None = None


@dataclass(frozen=True)
class SeparatorTrace:
    surrogate: LinIneq  # sum_{J+} x_j - sum_{J-} x_j >= pi - |J-|
    pi: Fraction
    chosen_subset: tuple[int, ...]
    final_clause: Clause


def combine(S: BinarySystem, multipliers) -> LinIneq:
    rows = S.rows_with_box()
    if len(multipliers) != len(rows):
        raise ValueError(f"expected {len(rows)} multipliers, got {len(multipliers)}")
    coeffs: dict[int, Fraction] = {}
    rhs = ZERO
    for u, r in zip(multipliers, rows):
        if u:
            for j, c in r.coeffs:
                coeffs[j] = coeffs.get(j, ZERO) + u * c
            rhs += u * r.rhs
    return LinIneq.make(coeffs, rhs)


def verify_certificate(S: BinarySystem, cert: CutCertificate) -> bool:
    if any(u < 0 for u in cert.multipliers):
        return False
    combo = combine(S, cert.multipliers)
    beta = cert.target.rhs
    return (combo.coeffs == cert.target.coeffs and combo.rhs == cert.combined_rhs
            and beta - 1 < combo.rhs <= beta)


def _surrogate_lp(S: BinarySystem, direction: dict[int, Fraction], cap: Fraction | None):
    """max u.b  s.t.  uA = direction (A incl. box rows), optional u.b <= cap."""
    rows = S.rows_with_box()
    R = len(rows)
    cons: list[LinIneq] = []
    for j in range(1, S.n + 1):
        col = {i + 1: r.coef[j] for i, r in enumerate(rows) if j in r.coef}
        target = direction.get(j, ZERO)
        cons.append(LinIneq.make(col, target))
        cons.append(LinIneq.make({i: -c for i, c in col.items()}, -target))
    ub = {i + 1: r.rhs for i, r in enumerate(rows) if r.rhs != 0}
    if cap is not None:
        cons.append(LinIneq.make({i: -c for i, c in ub.items()}, -cap))
    p = LpProblem.build(cons, R, lower=[0] * R, upper=[None] * R, objective=ub)
    return lp_optimize(p, "max")


def _require_feasible_relaxation(S: BinarySystem):
    if not lp_feasible(LpProblem.relaxation(S)).feasible:
        raise InfeasibleRelaxation("the LP relaxation of the system is infeasible")


def cg_cut_test(S: BinarySystem, c: Clause) -> CutTest:
    _require_feasible_relaxation(S)
    if c.is_empty:
        # 0 >= 1 would need u.b > 0 with uA = 0: impossible once S_LP is nonempty
        return CutTest(None, "empty clause is never a cut of a feasible relaxation")
    target = clause_to_inequality(c)
    out = _surrogate_lp(S, target.coef, target.rhs)
    if out.status is Status.INFEASIBLE:
        return CutTest(None, "not a surrogate direction")
    u = out.witness
    if not out.value > target.rhs - 1:
        return CutTest(None, "surrogate exists but is too weak", out.value)
    cert = CutCertificate(tuple(u), target, out.value)
    if not verify_certificate(S, cert):
        raise AssertionError("C-G certificate failed re-verification")
    return CutTest(cert, "C-G cut", out.value)


def is_cg_cut(S: BinarySystem, c: Clause) -> CutCertificate | None:
    return cg_cut_test(S, c).certificate


def derive_cg_cut(S: BinarySystem, a: PartialAssignment) -> tuple[Clause, SeparatorTrace, CutCertificate]:
    """Build a clausal C-G cut violated by an LP-infeasible 0-1 assignment.

    The best surrogate in the direction ``sum_{J+} x_j + sum_{J-} (1-x_j)``
    has rhs ``pi > 0``; adding the bound rows of ``ceil(pi) - 1`` assigned
    variables and rounding up leaves a clause still violated by ``a``.
    """
    _require_feasible_relaxation(S)
    if lp_consistent(S, a):
        raise LpConsistentAssignment("partial assignment is LP-consistent")
    jplus = [j for j, v in a.bindings if v == 0]
    jminus = [j for j, v in a.bindings if v == 1]
    direction = {j: Fraction(1) for j in jplus}
    direction.update({j: Fraction(-1) for j in jminus})
    out = _surrogate_lp(S, direction, None)
    if out.status is not Status.OPTIMAL:
        raise AssertionError(f"surrogate LP ended {out.status}")
    u = list(out.witness)
    pi = out.value + len(jminus)
    assert 0 < pi <= len(a)
    drop = math.ceil(pi) - 1
    chosen = tuple(sorted(a.variables)[:drop])
    m = len(S.rows)
    for j in chosen:
        if a[j] == 0:
            u[m + S.n + j - 1] += 1  # -x_j >= -1
        else:
            u[m + j - 1] += 1  # x_j >= 0
    clause = Clause(frozenset(j for j in jplus if j not in chosen), frozenset(j for j in jminus if j not in chosen))
    target = clause_to_inequality(clause)
    combo = combine(S, u)
    # combo.rhs lies in (beta-1, beta]; rounding up gives exactly the clause
    cert = CutCertificate(tuple(u), target, combo.rhs)
    if not verify_certificate(S, cert) or not clause.falsified_by(a.as_dict):
        raise AssertionError("derived cut failed re-verification")
    trace = SeparatorTrace(LinIneq.make(direction, out.value), pi, chosen, clause)
    return clause, trace, cert


def clause_universe(n: int, include_empty: bool = False):
    """Every clause over x1..xn, shortest first."""
    if include_empty:
        yield EMPTY_CLAUSE
    for size in range(1, n + 1):
        for vs in itertools.combinations(range(1, n + 1), size):
            for signs in itertools.product((True, False), repeat=size):
                yield Clause(frozenset(v for v, s in zip(vs, signs) if s),
                             frozenset(v for v, s in zip(vs, signs) if not s))


def implied_prime_clauses(S: BinarySystem) -> list[Clause]:
    """Minimal clauses satisfied by every feasible 0-1 point (empty clause if none)."""
    F = list(enumerate_feasible(S).points)
    if not F:
        return [EMPTY_CLAUSE]
    implied: set[Clause] = set()
    primes = []
    for c in clause_universe(S.n):
        if any(c.falsified_by(p) for p in F):
            continue
        implied.add(c)
        subs = [Clause(c.pos - {l}, c.neg) if l > 0 else Clause(c.pos, c.neg - {-l}) for l in c.literals]
        if not any(d in implied for d in subs if not d.is_empty):
            primes.append(c)
    return primes


def lp_consistency_via_cg(S: BinarySystem) -> ConsistencyReport:
    """LP-consistency decided as "every implied clause is a C-G cut"."""
    if not lp_feasible(LpProblem.relaxation(S)).feasible:
        return ConsistencyReport(Property.LP, True, detail="LP relaxation empty; vacuously LP-consistent")
    evidence = []
    failed = None
    for c in implied_prime_clauses(S):
        test = cg_cut_test(S, c)
        evidence.append((c, test.certificate))
        if test.certificate is None and failed is None:
            failed = c
    if failed is None:
        return ConsistencyReport(Property.LP, True, evidence=tuple(evidence))
    return ConsistencyReport(Property.LP, False, None, failed.falsifying_assignment(),
                             f"implied clause {failed} is not a C-G cut", tuple(evidence))


@dataclass(frozen=True)
class CutProofAgreement:
    ok: bool
    checked: int
    discrepancy: tuple[Clause, bool, bool] | None = None  # clause, is_cut, has_proof

    def __bool__(self) -> bool:
        return self.ok


def verify_prop5(S: BinarySystem | ClauseSet, n: int | None = None, max_n: int = 4) -> CutProofAgreement:
    """Compare C-G membership over the clausal core with input provability.

    Every nonempty clause over the variables is checked; the first mismatch
    is reported.
    """
    if isinstance(S, BinarySystem):
        core, n = clausal_core(S), S.n
    else:
        core = S
        n = core.n if n is None else n
    if n > max_n:
        raise ValueError(f"clause universe over {n} variables exceeds max_n={max_n}")
    system = core.as_system(n)
    closure, _ = input_closure(core)
    checked = 0
    for c in clause_universe(n):
        cut = is_cg_cut(system, c) is not None
        proof = closure.absorbs(c)
        checked += 1
        if cut != proof:
            return CutProofAgreement(False, checked, (c, cut, proof))
    return CutProofAgreement(True, checked)


__all__ = [
    "CutCertificate", "CutTest", "SeparatorTrace", "InfeasibleRelaxation", "LpConsistentAssignment",
    "cg_cut_test", "is_cg_cut", "derive_cg_cut", "lp_consistency_via_cg", "verify_prop5",
    "verify_certificate", "combine", "clause_universe", "implied_prime_clauses", "has_input_proof",
]
