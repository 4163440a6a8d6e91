from pathlib import Path

from lpcons.reconcile import CANDIDATES, CLAIMS, PRINTED_LIFT, main, reconcile, report
from lpcons.liftproject import lift

DOC = Path(__file__).resolve().parent.parent / "docs" / "errata_reconciliation.txt"


def test_only_the_corrected_system_satisfies_every_claim():
    results = reconcile()
    names = list(CANDIDATES)
    assert all(ok for _, ok in results[names[0]])
    for other in names[1:]:
        assert not all(ok for _, ok in results[other])


def test_printed_lift_table_is_the_lift_of_the_leq_variant():
    rows = {r for r in lift(CANDIDATES[list(CANDIDATES)[2]], 2).rows if r.coeffs}
    x2_bounds = {r for r in rows if r.variables == {2}}
    assert len(x2_bounds) == 2
    assert rows - x2_bounds == PRINTED_LIFT


def test_committed_report_is_current(capsys):
    text, gate = report()
    assert gate
    assert DOC.read_text(encoding="utf-8") == text
    assert main() == 0
    assert capsys.readouterr().out == text
    assert len(CLAIMS) >= 15
