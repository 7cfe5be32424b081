"""Unit tests for the named matroids and worked-example families."""
import random

import pytest

from orthomat import corpus
from orthomat.corpus import (
    ACCEPTANCE,
    NAMED_MATROIDS,
    CorpusError,
    census_matroid,
    eight_vector_family,
    eight_vector_wick_table,
    lift_u13_family,
    named_matroid,
    perturb,
    probe_candidates,
    round_trip_failures,
    run_acceptance,
    unique_signature,
)
from orthomat.formats import parse_signature, read_text
from orthomat.ground_set import low_mask
from orthomat.models import CheckResult
from orthomat.ortho_matroid import m4
from orthomat.represent import search_representation
from orthomat.tract_core import make_tract
from orthomat.wick import indicator

pytestmark = pytest.mark.unit


def test_every_named_matroid_builds():
    for name in ("M3", "M4", "lift(U1,3)", "lift(U2,4)", "census5", "eight4"):
        assert named_matroid(name).bases
    assert set(NAMED_MATROIDS) >= {"lift(U3,6)", "lift(U4,8)", "lift(M(K4))"}


def test_unknown_name():
    with pytest.raises(CorpusError):
        named_matroid("Fano")


def test_census_matroid_bases():
    """16 even transversals minus two."""
    assert len(census_matroid().bases) == 14


def test_eight_vector_matroid():
    """Bases [4], [4]* and the six with two stars."""
    family = eight_vector_family(make_tract("F5"), 1)
    assert len(family) == 8
    assert len(family.matroid.bases) == 8


@pytest.mark.parametrize("x", [0, 2, 5])
def test_eight_vector_excluded_parameters(x):
    """Over F5, x = 0 and x = -3 = 2 are excluded."""
    with pytest.raises(CorpusError):
        eight_vector_family(make_tract("F5"), x)


def test_eight_vector_wick_table_values():
    table = eight_vector_wick_table(make_tract("F5"), 1)
    assert table[low_mask(4)] == 1
    assert table[low_mask(4) << 4] == 4
    assert sorted(table.values()).count(4) == 6


def test_eight_vector_file_matches_family(fixtures_dir):
    family = parse_signature(read_text(fixtures_dir / "eight_f5.sig"))
    assert family == eight_vector_family(make_tract("F5"), 1)


def test_lift_u13_family_matches_file(fixtures_dir):
    family = parse_signature(read_text(fixtures_dir / "lift_u13_u0.sig"))
    assert lift_u13_family(make_tract("U0")) == family


def test_unique_signature_over_trivial_group(lift_u13):
    family = unique_signature(lift_u13, make_tract("ones(2,3)"))
    assert len(family) == 4


def test_perturb_keeps_support(matroid_m4):
    phi = indicator(matroid_m4, make_tract("F3"))
    candidate = perturb(phi, random.Random(3))
    assert candidate.support == phi.support


def test_probe_candidates():
    names = [name for name, _ in probe_candidates()]
    assert names[0] == "M4"
    assert len(names) == 5
    assert dict(probe_candidates())["dual M4"] == m4()


def test_acceptance_registry():
    assert len(ACCEPTANCE) == 13
    assert all("run" in entry and "description" in entry for entry in ACCEPTANCE.values())


def test_run_acceptance_rejects_unknown_names():
    with pytest.raises(CorpusError):
        run_acceptance(["no-such-criterion"])


def test_run_single_criterion():
    [outcome] = run_acceptance(["combining-maps"])
    assert outcome.name == "combining-maps"
    assert outcome.ok, outcome.detail
    assert outcome.seconds >= 0


@pytest.mark.parametrize("matroid,tract", [
    ("M4", "S"),
    ("M4", "K"),
    pytest.param("lift(M(K4))", "K", marks=pytest.mark.slow),
])
def test_round_trips_over_hyperfields(matroid, tract):
    result = search_representation(named_matroid(matroid), make_tract(tract))
    assert round_trip_failures(matroid, tract, result.wick) == []


def test_round_trips_report_a_bad_vector_set(monkeypatch, matroid_m4):
    """A failing vector set check shows up as its own message."""
    result = search_representation(matroid_m4, make_tract("S"))
    monkeypatch.setattr(corpus, "check_vector_set",
                        lambda vectors: CheckResult.failure("vector set", "V3", detail="stub"))
    assert round_trip_failures("M4", "S", result.wick) == ["M4/S: C^perp fails V3: stub"]
