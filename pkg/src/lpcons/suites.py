"""Seeded property suites, shared by the test-suite and ``lpcons verify``.

Every suite draws its instances from ``random.Random(seed * 100003 + i)`` so
a violation can be replayed from the seed printed in the report.
"""

from __future__ import annotations

import itertools
import random
from typing import Callable, Iterator

from .cuts import (
    LpConsistentAssignment,
    derive_cg_cut,
    is_cg_cut,
    lp_consistency_via_cg,
    verify_prop5,
)
from .liftproject import Mode, sequentialize
from .lp import relaxation_feasible
from .model import BinarySystem, PartialAssignment, evaluate
from .oracle import Property, SuiteReport, check, random_clauses, random_system
from .resolution import ClauseSet, augment_with_closure, clausal_core, full_closure
from .search import no_backtrack_theorem_suite

DEFAULT_SEED = 0


def instances(count: int, seed: int, n_range=(1, 4), m_range=(1, 4), coeff: int = 4,
              policy: str | None = "feasible") -> Iterator[tuple[int, BinarySystem]]:
    """``policy=None`` alternates between feasible and free right-hand sides."""
    for i in range(count):
        s = seed * 100003 + i
        rng = random.Random(s)
        n, m = rng.randint(*n_range), rng.randint(*m_range)
        pol = policy or ("feasible" if i % 2 == 0 else "free")
        yield s, random_system(n, m, coeff, pol, s)


def _points(n: int):
    return list(itertools.product((0, 1), repeat=n))


def suite_projection_consistency(count: int = 100, seed: int = DEFAULT_SEED) -> SuiteReport:
    """check(CONSISTENT) against a direct comparison of D_J(S_J) and D(S)|_J."""
    rep = SuiteReport("prop1")
    for s, S in instances(count, seed, (1, 5), (1, 5), policy=None):
        rep.checked += 1
        full = [p for p in _points(S.n) if all(evaluate(r, p) for r in S.rows)]
        expected = True
        for size in range(S.n + 1):
            for J in itertools.combinations(range(1, S.n + 1), size):
                inside = [r for r in S.rows if r.variables <= set(J)]
                local = {v for v in _points(size)
                         if all(evaluate(r, dict(zip(J, v))) for r in inside)}
                proj = {tuple(p[j - 1] for j in J) for p in full}
                if local != proj:
                    expected = False
        domain = all({(p[j],) for p in full} == {(0,), (1,)} for j in range(S.n))
        got, got_dom = check(S, Property.CONSISTENT).verdict, check(S, Property.DOMAIN).verdict
        rep.applicable += expected
        if got != expected or got_dom != domain:
            rep.violations.append((s, S.text(), got, expected, got_dom, domain))
    return rep


def suite_closure_consistency(count: int = 100, seed: int = DEFAULT_SEED) -> SuiteReport:
    """Augmenting with the full resolution closure of S_C gives a consistent system."""
    rep = SuiteReport("prop4")
    for s, S in instances(count, seed, (1, 5), (1, 5), policy=None):
        rep.checked += 1
        closure = full_closure(clausal_core(S))
        T = augment_with_closure(S, closure)
        rep.applicable += not check(S, Property.CONSISTENT).verdict
        if not check(T, Property.CONSISTENT).verdict:
            rep.violations.append((s, S.text()))
    return rep


def suite_input_proofs(count: int = 100, seed: int = DEFAULT_SEED, fixed: tuple = ()) -> SuiteReport:
    """C-G membership over S_C agrees with input provability, clause by clause.

    Random clause sets are kept only when their LP relaxation is feasible
    (membership is undefined otherwise).  ``fixed`` adds named systems.
    """
    rep = SuiteReport("prop5")
    for name, S in fixed:
        res = verify_prop5(S)
        rep.checked += 1
        rep.applicable += res.checked
        if not res.ok:
            rep.violations.append((name, res.discrepancy))
    i = 0
    while i < count:
        s = seed * 100003 + rep.checked
        rng = random.Random(s)
        n = rng.randint(1, 4)
        C = ClauseSet.of(random_clauses(n, rng.randint(1, 6), s))
        rep.checked += 1
        if C.infeasible or not relaxation_feasible(C.as_system(n)):
            rep.notes.append(f"seed {s}: LP-infeasible clause set skipped")
            continue
        i += 1
        res = verify_prop5(C, n)
        rep.applicable += res.checked
        if not res.ok:
            rep.violations.append((s, [str(c) for c in C], res.discrepancy))
    return rep


def suite_cut_refutation(count: int = 200, seed: int = DEFAULT_SEED) -> SuiteReport:
    """For every 0-1 partial assignment a: S_LP + a infeasible iff a C-G cut refutes a.

    Both constructive directions are exercised: ``derive_cg_cut`` must succeed
    exactly on LP-infeasible assignments, and the clause falsified by all of
    a's literals must pass ``is_cg_cut`` exactly then.  That clause is
    absorbed by every clause a falsifies, so it is a cut iff some such clause is.
    """
    rep = SuiteReport("prop-cc")
    for s, S in instances(count, seed, policy=None):
        rep.checked += 1
        if not relaxation_feasible(S):
            rep.notes.append(f"seed {s}: empty relaxation skipped")
            continue
        for size in range(1, S.n + 1):
            for J in itertools.combinations(range(1, S.n + 1), size):
                for vals in itertools.product((0, 1), repeat=size):
                    a = PartialAssignment(tuple(zip(J, vals)))
                    infeasible = not relaxation_feasible(S, a)
                    rep.applicable += infeasible
                    try:
                        clause, _, cert = derive_cg_cut(S, a)
                        derived = cert.verify(S) and clause.falsified_by(a.as_dict)
                    except LpConsistentAssignment:
                        derived = False
                    cut = is_cg_cut(S, a.falsified_clause()) is not None
                    if not (infeasible == derived == cut):
                        rep.violations.append((s, S.text(), str(a), infeasible, derived, cut))
    return rep


def _enriched(count: int, seed: int, keep: Callable[[BinarySystem], bool]):
    """Plain instances at even positions, ``keep``-filtered ones at odd positions."""
    plain = instances(count, seed, policy=None)
    pool = instances(10 ** 9, seed + 7919, (2, 4), (1, 4), policy=None)
    for i in range(count):
        if i % 2 == 0:
            yield next(plain)
        else:
            next(plain)
            yield next((s, S) for s, S in pool if keep(S))


def suite_cut_characterization(count: int = 200, seed: int = DEFAULT_SEED) -> SuiteReport:
    """LP-consistency agrees with "every implied prime clause is a C-G cut".

    Random systems are rarely LP-inconsistent, so every other instance is
    drawn from a seeded stream filtered to LP-inconsistent systems.
    """
    rep = SuiteReport("cor1")
    for s, S in _enriched(count, seed, lambda S: not check(S, Property.LP).verdict):
        rep.checked += 1
        direct = check(S, Property.LP)
        via = lp_consistency_via_cg(S)
        rep.applicable += not direct.verdict
        if direct.verdict != via.verdict:
            rep.violations.append((s, S.text(), direct.verdict, via.verdict))
    return rep


def suite_lift_project(count: int = 200, seed: int = DEFAULT_SEED, ks=(1, 2, 3)) -> SuiteReport:
    """sequentialize(k) yields sequential LP k-consistency, in both projection modes."""
    rep = SuiteReport("prop10")
    for s, S in instances(count, seed, (2, 4), (1, 4)):
        rep.checked += 1
        for k in ks:
            if k > S.n:
                continue
            for mode in Mode:
                rep.applicable += 1
                T = sequentialize(S, k, mode)
                r = check(T, Property.SEQUENTIAL_LP_K, k)
                if not r.verdict:
                    rep.violations.append((s, k, mode.value, S.text(), str(r.witness)))
    return rep


def suite_no_backtrack(count: int = 200, seed: int = DEFAULT_SEED) -> SuiteReport:
    return no_backtrack_theorem_suite(count, seed)


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "prop1": suite_projection_consistency,
    "prop4": suite_closure_consistency,
    "prop5": suite_input_proofs,
    "prop-cc": suite_cut_refutation,
    "cor1": suite_cut_characterization,
    "prop10": suite_lift_project,
    "no-backtrack": suite_no_backtrack,
}


def run_suite(name: str, count: int | None = None, seed: int = DEFAULT_SEED) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    fn = SUITES[name]
    return fn(seed=seed) if count is None else fn(count, seed)
