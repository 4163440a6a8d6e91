"""Clausal core extraction, resolvents, and full / input resolution closures.

Clause sets are kept as absorption antichains.  Dropping an absorbed clause
never loses a derivation: any resolution step that uses it is dominated by
the same step using its absorber (or by the absorber itself).  Input closure
keeps the original axioms separate from derived clauses because input steps
must take one parent from the axioms as given.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .model import EMPTY_CLAUSE, BinarySystem, Clause, LinIneq, clause_to_inequality, inequality_implies_clause


def antichain(clauses: Iterable[Clause]) -> list[Clause]:
    """Drop every clause absorbed by another; canonical order."""
    uniq = sorted(set(clauses), key=Clause.sort_key)
    kept: list[Clause] = []
    for c in uniq:  # shorter clauses come first, so absorbers are seen first
        if not any(k.absorbs(c) for k in kept):
            kept.append(c)
    return kept


@dataclass(frozen=True)
class ClauseSet:
    clauses: tuple[Clause, ...] = ()

    @classmethod
    def of(cls, clauses: Iterable[Clause]) -> "ClauseSet":
        return cls(tuple(antichain(clauses)))

    def __iter__(self):
        return iter(self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)

    def __contains__(self, c: Clause) -> bool:
        return c in self.clauses

    @property
    def infeasible(self) -> bool:
        return EMPTY_CLAUSE in self.clauses

    def absorbs(self, target: Clause) -> bool:
        return any(c.absorbs(target) for c in self.clauses)

    def inequalities(self) -> list[LinIneq]:
        if self.infeasible:
            return [LinIneq((), 1)]
        return [clause_to_inequality(c) for c in self.clauses]

    def as_system(self, n: int) -> BinarySystem:
        return BinarySystem(n, tuple(self.inequalities()))

    @property
    def n(self) -> int:
        return max((max(c.variables) for c in self.clauses if not c.is_empty), default=0)


@dataclass
class ProofDag:
    """Ordered derivation steps; ``parents`` is None for axioms."""

    steps: list[tuple[Clause, tuple[int, int] | None]] = field(default_factory=list)

    def add(self, c: Clause, parents: tuple[int, int] | None = None) -> int:
        self.steps.append((c, parents))
        return len(self.steps) - 1

    def replay(self) -> bool:
        for idx, (c, parents) in enumerate(self.steps):
            if parents is None:
                continue
            i, j = parents
            if not (i < idx and j < idx):
                return False
            res = resolvent(self.steps[i][0], self.steps[j][0])
            if res is None or res[0] != c:
                return False
        return True

    def proof_of(self, idx: int) -> list[int]:
        """Step indices needed to derive step ``idx``, in order."""
        need, stack = set(), [idx]
        while stack:
            i = stack.pop()
            if i in need:
                continue
            need.add(i)
            parents = self.steps[i][1]
            if parents:
                stack.extend(parents)
        return sorted(need)


def prime_clauses_of_row(a: LinIneq) -> list[Clause]:
    """Non-absorbed clauses implied by a single row.

    Start from each 0-1 point (over the row's variables) that violates the row
    -- its negation is an implied clause -- and drop literals while the clause
    stays implied.
    """
    vs = sorted(a.variables)
    if inequality_implies_clause(a, EMPTY_CLAUSE):
        return [EMPTY_CLAUSE]
    seen: set[Clause] = set()
    primes: set[Clause] = set()

    def strengthen(c: Clause):
        if c in seen:
            return
        seen.add(c)
        shorter = False
        for l in c.literals:
            d = Clause(c.pos - {l}, c.neg) if l > 0 else Clause(c.pos, c.neg - {-l})
            if inequality_implies_clause(a, d):
                shorter = True
                strengthen(d)
        if not shorter:
            primes.add(c)

    for vals in itertools.product((0, 1), repeat=len(vs)):
        point = dict(zip(vs, vals))
        if a.lhs(point) < a.rhs:
            c = Clause(frozenset(j for j in vs if point[j] == 0), frozenset(j for j in vs if point[j] == 1))
            strengthen(c)
    return antichain(primes)


def clausal_core(S: BinarySystem) -> ClauseSet:
    """Antichain of prime clauses implied by individual rows of ``S``."""
    out: list[Clause] = []
    for r in S.rows:
        out.extend(prime_clauses_of_row(r))
    return ClauseSet.of(out)


def resolvent(c1: Clause, c2: Clause) -> tuple[Clause, int] | None:
    """Resolvent and pivot, or None unless exactly one variable clashes."""
    clash = (c1.pos & c2.neg) | (c1.neg & c2.pos)
    if len(clash) != 1:
        return None
    (p,) = clash
    return Clause((c1.pos | c2.pos) - {p}, (c1.neg | c2.neg) - {p}), p


def full_closure(C: ClauseSet | Iterable[Clause]) -> ClauseSet:
    """Saturate under resolution, keeping only non-absorbed clauses."""
    kept = set(antichain(C))
    if EMPTY_CLAUSE in kept:
        return ClauseSet((EMPTY_CLAUSE,))
    queue = deque(sorted(kept, key=Clause.sort_key))
    while queue:
        c = queue.popleft()
        for d in sorted(kept, key=Clause.sort_key):
            if c not in kept:
                break
            if d not in kept:
                continue
            res = resolvent(c, d)
            if res is None:
                continue
            r = res[0]
            if any(e.absorbs(r) for e in kept):
                continue
            if r.is_empty:
                return ClauseSet((EMPTY_CLAUSE,))
            kept = {e for e in kept if not r.absorbs(e)}
            kept.add(r)
            queue.append(r)
    return ClauseSet.of(kept)


def input_closure(C: ClauseSet | Iterable[Clause]) -> tuple[ClauseSet, ProofDag]:
    """Saturate under input resolution (one parent always an original axiom)."""
    axioms = antichain(C)
    dag = ProofDag()
    index: dict[Clause, int] = {}
    for a in axioms:
        index[a] = dag.add(a)
    if EMPTY_CLAUSE in axioms:
        return ClauseSet((EMPTY_CLAUSE,)), dag
    derived: set[Clause] = set()
    queue = deque(axioms)
    while queue:
        c = queue.popleft()
        if c not in index or (c not in derived and c not in axioms):
            continue
        for a in axioms:
            if c not in derived and c not in axioms:
                break
            res = resolvent(c, a)
            if res is None:
                continue
            r = res[0]
            if any(e.absorbs(r) for e in axioms) or any(e.absorbs(r) for e in derived):
                continue
            index[r] = dag.add(r, (index[c], index[a]))
            if r.is_empty:
                return ClauseSet((EMPTY_CLAUSE,)), dag
            derived = {e for e in derived if not r.absorbs(e)}
            derived.add(r)
            queue.append(r)
    return ClauseSet.of([*axioms, *derived]), dag


def has_input_proof(C: ClauseSet | Iterable[Clause], target: Clause) -> bool:
    closure, _ = input_closure(C)
    return closure.absorbs(target)


def augment_with_closure(S: BinarySystem, closure: ClauseSet) -> BinarySystem:
    """``S`` plus the inequality of every closure clause not already a row."""
    have = set(S.rows)
    extra = [r for r in closure.inequalities() if r not in have]
    return S.with_rows(extra)
