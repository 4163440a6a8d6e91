from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpcons.cuts import (
    CutCertificate, InfeasibleRelaxation, LpConsistentAssignment, cg_cut_test, combine,
    derive_cg_cut, is_cg_cut, lp_consistency_via_cg, verify_certificate, verify_prop5,
)
from lpcons.lp import LpProblem, Status, lp_optimize, relaxation_feasible
from lpcons.model import BinarySystem, Clause, LinIneq, PartialAssignment, clause_to_inequality
from lpcons.oracle import Property, check
from lpcons.resolution import ClauseSet

from conftest import brute_feasible, systems

C = Clause.of
PRINTED = (F(1, 4), F(1, 2), F(1, 4), F(1, 4), F(1, 2))  # three rows, x2 >= 0, x3 >= 0
FRACTIONAL_VERTICES = [(F(1, 3), F(1, 3), 0, F(1, 3)), (F(1, 2), 0, 0, F(1, 2)), (F(1, 2), F(1, 2), 0, 0)]


def _printed_vector(S):
    u = [F(0)] * len(S.rows_with_box())
    u[0:3] = PRINTED[:3]
    u[3 + 1], u[3 + 2] = PRINTED[3], PRINTED[4]
    return tuple(u)


def _rank(vectors):
    M = [list(v) for v in vectors]
    rank, cols = 0, len(M[0]) if M else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(M)) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(len(M)):
            if r != rank and M[r][c] != 0:
                f = M[r][c] / M[rank][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def test_printed_multipliers_certify_the_cut(ex1):
    u = _printed_vector(ex1)
    target = LinIneq.make({1: 1, 3: 1}, 1)
    assert combine(ex1, u) == LinIneq.make({1: 1, 3: 1}, F(1, 4))
    assert verify_certificate(ex1, CutCertificate(u, target, F(1, 4)))


def test_tampered_certificates_fail(ex1):
    u = list(_printed_vector(ex1))
    target = LinIneq.make({1: 1, 3: 1}, 1)
    assert not verify_certificate(ex1, CutCertificate(tuple(u), LinIneq.make({1: 1, 3: 1}, 2), F(1, 4)))
    u[0] = F(-1, 4)
    assert not verify_certificate(ex1, CutCertificate(tuple(u), target, F(1, 4)))


def test_both_resolvents_are_cuts_and_cut_off_the_printed_vertices(ex1):
    box = ex1.rows_with_box()
    for p in FRACTIONAL_VERTICES:
        assert all(r.satisfied_by(p) for r in box)
        tight = [[r.coef.get(j, 0) for j in range(1, 5)] for r in box if r.lhs(p) == r.rhs]
        assert _rank(tight) == 4  # a vertex of S_LP
    x12, x13 = clause_to_inequality(C(1, 2)), clause_to_inequality(C(1, 3))
    for c in (C(1, 2), C(1, 3)):
        cert = is_cg_cut(ex1, c)
        assert cert is not None and cert.verify(ex1)
    assert [x12.satisfied_by(p) for p in FRACTIONAL_VERTICES] == [False, False, True]
    assert [x13.satisfied_by(p) for p in FRACTIONAL_VERTICES] == [False, False, False]


def test_lp_consistent_partial_assignment_has_no_falsified_cut(ex1):
    a = PartialAssignment.of({1: 0, 3: 1})
    assert relaxation_feasible(ex1, a)
    for c in (C(1, -3), C(1), C(-3)):
        assert c.falsified_by(a.as_dict) and is_cg_cut(ex1, c) is None
    with pytest.raises(LpConsistentAssignment):
        derive_cg_cut(ex1, a)


def test_derive_refutes_lp_infeasible_assignment(ex1):
    clause, trace, cert = derive_cg_cut(ex1, PartialAssignment.of({1: 0, 3: 0}))
    assert clause == C(1, 3) and cert.verify(ex1)
    assert trace.pi == F(1, 3) and trace.final_clause == clause


def test_empty_relaxation_is_reported():
    S = BinarySystem(1, (LinIneq.make({1: 1}, 2),))
    with pytest.raises(InfeasibleRelaxation):
        cg_cut_test(S, C(1))


def _dual_bound_is_cut(S, c):
    """Strong duality: max{ub : uA = a, u >= 0} equals min{ax : x in S_LP}."""
    a = clause_to_inequality(c)
    out = lp_optimize(LpProblem.relaxation(S, objective=a.coef), "min")
    return out.value > a.rhs - 1


clauses = st.builds(lambda lits: Clause.of(*{abs(l): l for l in lits}.values()),
                    st.lists(st.sampled_from([1, 2, 3, -1, -2, -3]), min_size=1, max_size=3))


@given(systems(min_n=3, max_n=3, max_m=4), clauses)
def test_cut_membership_agrees_with_the_primal_bound(S, c):
    if not relaxation_feasible(S):
        return
    test = cg_cut_test(S, c)
    assert (test.certificate is not None) == _dual_bound_is_cut(S, c)
    if test.certificate is not None:
        assert test.certificate.verify(S)
        assert all(not c.falsified_by(p) for p in brute_feasible(S))


@given(systems(max_n=4, max_m=4))
def test_cut_based_lp_consistency_matches_the_oracle(S):
    assert lp_consistency_via_cg(S).verdict == check(S, Property.LP).verdict


@given(systems(max_n=3, max_m=4), st.lists(st.integers(0, 1), min_size=3, max_size=3))
def test_derivation_exactly_on_lp_infeasible_assignments(S, vals):
    if not relaxation_feasible(S):
        return
    a = PartialAssignment.of({j: vals[j - 1] for j in range(1, S.n + 1)})
    if relaxation_feasible(S, a):
        with pytest.raises(LpConsistentAssignment):
            derive_cg_cut(S, a)
    else:
        clause, _, cert = derive_cg_cut(S, a)
        assert cert.verify(S) and clause.falsified_by(a.as_dict)


def test_cut_and_input_proof_agree_on_named_systems(ex3, sec7):
    assert verify_prop5(ex3).ok
    assert verify_prop5(sec7).ok
    assert verify_prop5(ClauseSet.of([C(1, 2), C(1, -2)]), 2).ok
    with pytest.raises(ValueError):
        verify_prop5(BinarySystem(5, ()))
