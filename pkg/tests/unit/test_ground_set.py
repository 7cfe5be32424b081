"""Unit tests for ground set masks and the transversal order."""
import pytest

from orthomat.ground_set import (
    GroundSetError,
    check_n,
    delete_position,
    differing_positions,
    divergences,
    enumerate_subtransversals,
    enumerate_transversals,
    flip,
    format_set,
    insert_position,
    interval_count,
    is_admissible,
    is_transversal,
    parse_element,
    parse_set,
    parse_transversal,
    star,
    transversal_key,
)

pytestmark = pytest.mark.unit


def test_element_bits():
    """Bit i-1 is i, bit n+i-1 is i*."""
    assert parse_element("1", 4) == 0
    assert parse_element("3*", 4) == 6
    with pytest.raises(GroundSetError):
        parse_element("5", 4)
    with pytest.raises(GroundSetError):
        parse_element("x*", 4)


def test_transversal_order_for_two():
    """12, 12*, 1*2, 1*2*."""
    order = [format_set(t, 2) for t in enumerate_transversals(2)]
    assert order == ["1 2", "1 2*", "1* 2", "1* 2*"]


def test_transversal_key_matches_enumeration():
    for n in (1, 3, 4):
        keys = [transversal_key(t, n) for t in enumerate_transversals(n)]
        assert keys == list(range(2**n))


def test_star_swaps_halves():
    n = 3
    assert star(parse_set("1 2* 3", n), n) == parse_set("1* 2 3*", n)


def test_admissible_and_transversal():
    n = 3
    assert is_admissible(parse_set("1 3*", n), n)
    assert not is_admissible(parse_set("1 1*", n, admissible=False), n)
    assert is_transversal(parse_set("1 2* 3", n), n)
    assert not is_transversal(parse_set("1 2*", n), n)


def test_parse_set_rejects_repeats_and_divergences():
    with pytest.raises(GroundSetError):
        parse_set("1 1", 3)
    with pytest.raises(GroundSetError):
        parse_set("2 2*", 3)
    with pytest.raises(GroundSetError):
        parse_transversal("1 2", 3)


def test_flip_and_differences():
    n = 3
    t = parse_set("1 2 3", n)
    u = flip(t, 1, n)
    assert format_set(u, n) == "1 2* 3"
    assert differing_positions(t, u, n) == [1]
    assert divergences(t | u, n) == [1]


def test_interval_count_ignores_stars():
    """|T n (|i|, |j|]| with T = 1 2 3* 4."""
    n = 4
    t = parse_set("1 2 3* 4", n)
    assert interval_count(t, 0, 3, n) == 2
    assert interval_count(t, 7, 0, n) == 2
    assert interval_count(t, 0, 1, n) == 1


def test_delete_then_insert_restores():
    n = 4
    t = parse_set("1 2* 3 4*", n)
    smaller = delete_position(t, 2, n)
    assert format_set(smaller, 3) == "1 2* 3*"
    assert insert_position(smaller, 2, parse_element("3", n), n) == t


def test_insert_rejects_wrong_position():
    with pytest.raises(GroundSetError):
        insert_position(0, 1, parse_element("3", 4), 4)


def test_subtransversals_count():
    assert len(list(enumerate_subtransversals(3))) == 27


def test_empty_set_format():
    assert format_set(0, 3) == "{}"


def test_check_n_bounds():
    with pytest.raises(GroundSetError):
        check_n(-1)
    assert check_n(0) == 0
