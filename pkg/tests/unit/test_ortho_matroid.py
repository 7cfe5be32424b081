"""Unit tests for orthogonal matroids, circuits, minors and lifts."""
import pytest

from orthomat.ground_set import format_set, pair_mask, parse_set, parse_transversal
from orthomat.ortho_matroid import (
    MatroidError,
    OrdinaryMatroid,
    OrthoMatroid,
    basis_graph,
    check_bases,
    check_circuit_axioms,
    check_strong_exchange,
    contains_minor,
    dual,
    extend_circuit_to_transversal,
    fano_matroid,
    find_isomorphism,
    fundamental_circuit,
    is_lift_like,
    k4_cycle_matroid,
    lift,
    m3,
    minor,
    minor_set,
    twist,
    uniform_matroid,
)

pytestmark = pytest.mark.unit


def test_named_matroids_satisfy_exchange(matroid_m3, matroid_m4):
    assert len(matroid_m3.bases) == 4
    assert len(matroid_m4.bases) == 8
    assert check_bases(3, matroid_m3.bases)
    assert check_bases(4, matroid_m4.bases)


def test_exchange_failure_reports_witness():
    """Two transversals one flip apart cannot both be the only bases."""
    bases = [parse_transversal("1 2", 2), parse_transversal("1* 2", 2)]
    result = check_bases(2, bases)
    assert not result
    assert result.failed == "exchange"
    assert "divergence 1 1*" in result.detail
    with pytest.raises(MatroidError):
        OrthoMatroid(2, bases)


def test_bases_must_be_transversals():
    with pytest.raises(MatroidError):
        OrthoMatroid(3, [parse_set("1 2", 3)])
    with pytest.raises(MatroidError):
        OrthoMatroid(3, [])


def test_strong_exchange_on_m3(matroid_m3):
    assert check_strong_exchange(matroid_m3)


def test_lift_u13_circuits(lift_u13):
    found = {format_set(c, 3) for c in lift_u13.circuits}
    assert found == {"1 2", "1 3", "2 3", "1* 2* 3*"}
    assert check_circuit_axioms(3, lift_u13.circuits)


def test_circuit_axiom_violation_is_tagged():
    """A circuit inside another breaks incomparability."""
    result = check_circuit_axioms(3, [parse_set("1 2", 3), parse_set("1 2 3", 3)])
    assert result.failed == "C2"


def test_empty_circuit_rejected():
    assert check_circuit_axioms(2, [0]).failed == "C1"


def test_fundamental_circuit(lift_u13):
    """C(1 2* 3*, 2) = {1, 2}."""
    b = parse_transversal("1 2* 3*", 3)
    assert fundamental_circuit(lift_u13, b, 1) == parse_set("1 2", 3)
    with pytest.raises(MatroidError):
        fundamental_circuit(lift_u13, b, 0)


def test_extend_circuit_to_transversal(lift_u13):
    for c in lift_u13.circuits:
        t = extend_circuit_to_transversal(lift_u13, c)
        assert t & c == c


def test_m4_is_self_dual(matroid_m4):
    assert dual(matroid_m4) == matroid_m4


def test_dual_is_involutive(lift_u24):
    assert dual(dual(lift_u24)) == lift_u24
    assert dual(lift_u24) == lift(uniform_matroid(2, 4).dual())


def test_minor_of_m4_is_m3(matroid_m4, matroid_m3):
    """Keeping the bases through 4 and deleting the position gives M3."""
    smaller = minor(matroid_m4, 3)
    assert smaller == matroid_m3
    assert smaller.history[-1].applied == 3


def test_minor_redirects_singular_elements():
    """In lift(U0,1) the element 1 is in no basis, so 1* is used."""
    m = lift(uniform_matroid(0, 1))
    assert m.is_singular(0)
    smaller = minor(m, 0)
    assert smaller.n == 0
    assert smaller.history[0].redirected
    assert "singular" in str(smaller.history[0])


def test_minor_set_matches_single_steps(matroid_m4):
    assert minor_set(matroid_m4, [3]) == minor(matroid_m4, 3)
    with pytest.raises(MatroidError):
        minor_set(matroid_m4, [0, 4])


def test_twist_needs_star_closed_set(matroid_m3):
    twisted = twist(matroid_m3, pair_mask(0, 3))
    assert twisted.n == 3 and len(twisted.bases) == 4
    assert twist(twisted, pair_mask(0, 3)) == matroid_m3
    with pytest.raises(MatroidError):
        twist(matroid_m3, 1)


def test_contains_minor(matroid_m4, matroid_m3):
    assert contains_minor(matroid_m4, matroid_m3)
    assert not contains_minor(matroid_m3, matroid_m4)


def test_isomorphism_needs_matching_sizes(matroid_m3, lift_u13):
    assert find_isomorphism(matroid_m3, lift_u13) is None
    assert find_isomorphism(lift_u13, lift_u13) is not None


def test_isomorphism_follows_a_twist(matroid_m4):
    """Twisting at one pair relabels 1 and 1*."""
    assert find_isomorphism(matroid_m4, twist(matroid_m4, pair_mask(0, 4))) is not None


def test_basis_graph_of_m3(matroid_m3):
    """Any two bases of M3 differ in two positions."""
    graph = basis_graph(matroid_m3)
    assert graph.number_of_edges() == 6


def test_lift_like(lift_u24, matroid_m4):
    assert is_lift_like(lift_u24)
    assert not is_lift_like(matroid_m4)


def test_ordinary_matroids():
    assert len(uniform_matroid(2, 4).circuits) == 4
    assert len(k4_cycle_matroid().bases) == 16
    assert len(fano_matroid().bases) == 28
    assert uniform_matroid(1, 3).dual() == uniform_matroid(2, 3)
    assert uniform_matroid(1, 3).loops() == []


def test_ordinary_exchange_violation():
    with pytest.raises(MatroidError):
        OrdinaryMatroid(4, [0b0011, 0b1100])


def test_lift_bases(lift_u13):
    assert lift_u13.format_bases() == ["1 2* 3*", "1* 2 3*", "1* 2* 3"]
    assert m3().name == "M3"
