"""Unit tests for vector families, perps and Lagrangian subspaces."""
import random

import pytest

from orthomat.corpus import lift_u13_family, named_matroid
from orthomat.formats import parse_signature, parse_vector_family, read_text
from orthomat.represent import search_representation
from orthomat.signature import TractVector, circuits_from_wick
from orthomat.tract_core import canonical_hom, make_tract
from orthomat.vector_set import (
    SizeLimitError,
    VectorFamily,
    VectorSetError,
    all_vectors,
    check_enumerable,
    check_vector_set,
    elementary_vectors,
    is_consistent,
    is_lagrangian,
    is_orthogonal,
    perp,
    random_lagrangian,
    signature_perp,
    subspace_span,
    support_bases,
    vector_minor,
    vector_pushforward,
)

pytestmark = pytest.mark.unit


@pytest.fixture(scope="module")
def f2_family(fixtures_dir):
    return parse_signature(read_text(fixtures_dir / "lift_u13_f2.sig"))


@pytest.fixture(scope="module")
def f2_vectors(f2_family):
    """(a,b,c | d,d,d) with a + b + c = 0."""
    return signature_perp(f2_family)


def test_perp_of_lift_u13_over_f2(f2_vectors):
    assert len(f2_vectors) == 8
    f2 = make_tract("F2")
    assert TractVector.from_parts(f2, (1, 1, 0), (1, 1, 1)) in f2_vectors
    assert TractVector.from_parts(f2, (1, 1, 1), (0, 0, 0)) not in f2_vectors


def test_elementary_vectors_are_the_circuits(f2_family, f2_vectors):
    assert set(elementary_vectors(f2_vectors)) == set(f2_family.all_vectors())


def test_support_bases_are_the_matroid(f2_family, f2_vectors):
    assert set(support_bases(f2_vectors)) == f2_family.matroid.bases


def test_perp_is_a_vector_set(f2_vectors):
    assert check_vector_set(f2_vectors)


def test_diagonal_is_not_a_vector_set(fixtures_dir):
    """{(0|0), (1|1)} over F2 has no vector with support inside {1*}."""
    diagonal = parse_vector_family(read_text(fixtures_dir / "diagonal_f2.vec"))
    result = check_vector_set(diagonal)
    assert not result
    assert result.failed == "V2"
    assert is_lagrangian(make_tract("F2"), diagonal)


def test_orthogonality_membership(f2_family):
    f2 = make_tract("F2")
    assert is_orthogonal(TractVector.from_parts(f2, (1, 0, 1), (1, 1, 1)), f2_family.reps)
    assert not is_orthogonal(TractVector.from_parts(f2, (1, 0, 0), (0, 0, 0)), f2_family.reps)


def test_consistency_with_fundamental_circuits(f2_family):
    for x in f2_family.reps:
        assert is_consistent(f2_family, x)


def test_enumeration_limits():
    with pytest.raises(SizeLimitError):
        check_enumerable(make_tract("F7"), 6)
    with pytest.raises(VectorSetError):
        check_enumerable(make_tract("T"), 1)
    assert len(all_vectors(make_tract("K"), 1)) == 4


def test_perp_of_nothing_is_everything():
    f3 = make_tract("F3")
    assert perp(f3, 1, []) == all_vectors(f3, 1)


def test_family_rejects_foreign_vectors():
    f3 = make_tract("F3")
    with pytest.raises(VectorSetError):
        VectorFamily(f3, 2, [TractVector.from_parts(f3, (1,), (0,))])


def test_pushforward_to_k(f2_vectors):
    pushed = vector_pushforward(canonical_hom(make_tract("F2"), make_tract("K")), f2_vectors)
    assert pushed.tract.name == "K"
    assert len(pushed) == 8
    with pytest.raises(VectorSetError):
        vector_pushforward(canonical_hom(make_tract("F3"), make_tract("K")), f2_vectors)


def test_subspace_span_size():
    f3 = make_tract("F3")
    line = subspace_span(f3, 1, [TractVector.from_parts(f3, (1,), (0,))])
    assert len(line) == 3
    assert is_lagrangian(f3, line)


def test_random_lagrangian_is_lagrangian():
    f3 = make_tract("F3")
    space = random_lagrangian(f3, 2, rng=random.Random(0))
    assert len(space) == 9
    assert is_lagrangian(f3, space)


def test_lagrangian_needs_a_field():
    s = make_tract("S")
    with pytest.raises(VectorSetError):
        is_lagrangian(s, VectorFamily(s, 1, []))


@pytest.mark.parametrize("matroid,tract", [
    ("M4", "S"),
    ("M4", "K"),
    pytest.param("lift(M(K4))", "K", marks=pytest.mark.slow),
])
def test_perp_of_a_hyperfield_signature_is_a_vector_set(matroid, tract):
    """REGRESSION: one basis's span may be larger than the family over K and S."""
    result = search_representation(named_matroid(matroid), make_tract(tract))
    assert result.found
    vectors = signature_perp(circuits_from_wick(result.wick, level="strong"))
    check = check_vector_set(vectors)
    assert check, check.detail


def test_minors_over_f3_stay_vector_sets(matroid_m4):
    phi = search_representation(matroid_m4, make_tract("F3")).wick
    vectors = signature_perp(circuits_from_wick(phi, level="strong"))
    for e in range(2 * vectors.n):
        reduced, check = vector_minor(vectors, e)
        assert reduced.n == 3
        assert check, check.detail


def test_minor_over_u0_is_not_a_vector_set():
    """V|3 for lift(U1,3) over U0 misses (1,1,0,0), which its only support basis spans."""
    u0 = make_tract("U0")
    vectors = signature_perp(lift_u13_family(u0))
    reduced, check = vector_minor(vectors, 2)
    assert len(reduced.representatives()) == 3
    assert not check
    assert check.failed == "V3"
    assert check.witness[1].normalized() == TractVector.of(u0, (1, 1, 0, 0))
    assert support_bases(reduced) == [0b1100]


def test_minor_element_out_of_range(f2_vectors):
    with pytest.raises(VectorSetError):
        vector_minor(f2_vectors, 6)
