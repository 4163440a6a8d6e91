import pytest

import lpcons.suites as suites
from lpcons.suites import SUITES, run_suite


@pytest.mark.parametrize("name", list(SUITES))
def test_small_runs_are_clean_and_deterministic(name):
    a, b = run_suite(name, 6, seed=5), run_suite(name, 6, seed=5)
    assert a.ok, a.violations
    assert (a.checked, a.applicable, a.notes) == (b.checked, b.applicable, b.notes)
    assert a.checked >= 6


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_lift_project_suite_catches_a_missing_projection(monkeypatch):
    monkeypatch.setattr(suites, "sequentialize", lambda S, k, mode: S)
    assert not run_suite("prop10", 30).ok


def test_cut_refutation_suite_catches_a_broken_separator(monkeypatch):
    monkeypatch.setattr(suites, "is_cg_cut", lambda S, c: None)
    assert not run_suite("prop-cc", 30).ok


def test_consistency_suite_catches_a_wrong_verdict(monkeypatch):
    real = suites.check
    monkeypatch.setattr(suites, "check", lambda S, p, *a, **k: type(real(S, p))(p, True))
    assert not run_suite("prop1", 30).ok
