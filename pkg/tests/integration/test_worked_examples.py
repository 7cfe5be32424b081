"""Integration tests for the worked examples and the acceptance suite.

Each acceptance criterion runs through ``run_acceptance`` so the failure detail shows up
in the assertion message. The exhaustive ones are marked slow.
"""
import pytest

from orthomat.config import settings
from orthomat.corpus import corpus_representations, round_trip_failures, run_acceptance
from orthomat.formats import parse_wick, read_text
from orthomat.ortho_matroid import fano_matroid, lift
from orthomat.represent import is_sixth_root_representable, search_representation
from orthomat.tract_core import make_tract
from orthomat.wick import check_wick

pytestmark = pytest.mark.integration

FAST_CRITERIA = [
    "eight-vector-table",
    "weak-not-moderate",
    "o-prime-not-o",
    "eight-vector-axioms",
    "census",
    "vector-minor",
    "vector-pushforward",
    "combining-maps",
]

SLOW_CRITERIA = ["round-trips", "regular", "sixth-root", "lagrangian", "weak-strong"]


@pytest.mark.parametrize("name", FAST_CRITERIA)
def test_acceptance_criterion(name):
    [outcome] = run_acceptance([name])
    assert outcome.ok, outcome.detail


@pytest.mark.slow
@pytest.mark.parametrize("name", SLOW_CRITERIA)
def test_slow_acceptance_criterion(name):
    [outcome] = run_acceptance([name])
    assert outcome.ok, outcome.detail


def test_weak_not_moderate_file(fixtures_dir):
    """The indicator of lift(U3,6) over ones(2,3) passes weak and fails moderate."""
    phi = parse_wick(read_text(fixtures_dir / "weak_not_moderate.wick"))
    assert check_wick(phi, "weak")
    result = check_wick(phi, "moderate")
    assert not result
    assert result.failed == "moderate"
    assert not check_wick(phi, "strong")


@pytest.mark.slow
def test_corpus_has_enough_representations():
    assert len(corpus_representations()) >= 10


@pytest.mark.slow
def test_round_trips_for_m4_over_f3(matroid_m4):
    result = search_representation(matroid_m4, make_tract("F3"))
    assert round_trip_failures("M4", "F3", result.wick) == []


@pytest.mark.slow
def test_fano_lift(monkeypatch):
    """Binary but not ternary, so not sixth-root; the search limit is raised to 7."""
    monkeypatch.setattr(settings, "SEARCH_MAX_N", 7)
    fano = lift(fano_matroid())
    result = search_representation(fano, make_tract("F2"))
    assert result.found
    assert len(result.wick.support) == 28
    report = is_sixth_root_representable(fano)
    assert not report.representable
