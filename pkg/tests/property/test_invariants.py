"""Property tests with hypothesis.

Structural invariants that hold for every input: involutions, bijections, scaling
closure of null sets, and the agreement of weak and strong Wick checks over partial
fields.
"""
import random
from functools import cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthomat.corpus import perturb
from orthomat.ground_set import (
    delete_position,
    enumerate_transversals,
    format_set,
    insert_position,
    is_admissible,
    is_transversal,
    parse_set,
    star,
    transversal_key,
)
from orthomat.ortho_matroid import m4
from orthomat.represent import search_representation
from orthomat.signature import TractVector, star_product
from orthomat.tract_core import make_tract
from orthomat.wick import check_wick, equivalent

pytestmark = pytest.mark.property

NULL_TRACTS = ["F2", "F3", "F5", "F4", "F9:id", "S", "K", "U0", "R6", "F7/3"]


def _build(choices):
    """0 leaves a position unused, 1 takes i, 2 takes i*."""
    n = len(choices)
    mask = 0
    for p, c in enumerate(choices):
        if c == 1:
            mask |= 1 << p
        elif c == 2:
            mask |= 1 << (n + p)
    return n, mask


def admissible_sets(max_n=6):
    return st.lists(st.integers(0, 2), min_size=1, max_size=max_n).map(_build)


def transversals(max_n=6):
    return st.lists(st.integers(1, 2), min_size=1, max_size=max_n).map(_build)


@cache
def m4_over_f3():
    return search_representation(m4(), make_tract("F3")).wick


## Ground set

@given(admissible_sets())
def test_star_is_an_involution(case):
    n, mask = case
    assert star(star(mask, n), n) == mask
    assert is_admissible(star(mask, n), n)


@given(admissible_sets())
def test_set_text_round_trip(case):
    n, mask = case
    if mask:
        assert parse_set(format_set(mask, n), n) == mask


@given(st.integers(1, 6))
def test_transversal_key_is_the_enumeration_rank(n):
    for rank, t in enumerate(enumerate_transversals(n)):
        assert transversal_key(t, n) == rank


@given(transversals(), st.data())
def test_delete_then_insert_restores_a_transversal(case, data):
    n, t = case
    p = data.draw(st.integers(0, n - 1))
    reduced = delete_position(t, p, n)
    assert is_transversal(reduced, n - 1)
    bit = p if t >> p & 1 else n + p
    assert insert_position(reduced, p, bit, n) == t


## Tracts

@given(st.sampled_from(NULL_TRACTS), st.data())
def test_null_sets_are_closed_under_scaling(descriptor, data):
    t = make_tract(descriptor)
    terms = data.draw(st.lists(st.sampled_from(t.units), max_size=5))
    c = data.draw(st.sampled_from(t.units))
    assert t.is_null(terms) == t.is_null([t.mul(c, x) for x in terms])


@given(st.sampled_from(NULL_TRACTS), st.data())
def test_null_sets_ignore_order(descriptor, data):
    t = make_tract(descriptor)
    terms = data.draw(st.lists(st.sampled_from(t.units), max_size=5))
    assert t.is_null(terms) == t.is_null(list(reversed(terms)))


@given(st.sampled_from(NULL_TRACTS), st.data())
def test_one_plus_epsilon_is_null(descriptor, data):
    t = make_tract(descriptor)
    c = data.draw(st.sampled_from(t.units))
    assert t.is_null([c, t.mul(t.epsilon, c)])


## Vectors

@given(st.lists(st.integers(0, 2), min_size=6, max_size=6),
       st.lists(st.integers(0, 2), min_size=6, max_size=6))
def test_star_product_is_symmetric_over_f3(xs, ys):
    f3 = make_tract("F3")
    x, y = TractVector.of(f3, xs), TractVector.of(f3, ys)
    assert star_product(f3, x, y).is_null() == star_product(f3, y, x).is_null()


@given(st.lists(st.integers(0, 3), min_size=4, max_size=4), st.integers(1, 3))
def test_scaling_is_invertible_over_f4(coords, alpha):
    f4 = make_tract("F4")
    x = TractVector.of(f4, coords)
    assert x.scale(alpha).scale(f4.inv(alpha)) == x
    if not x.is_zero():
        assert x.scale(alpha).normalized() == x.normalized()


## Wick functions

@settings(deadline=None)
@given(st.integers(1, 2))
def test_wick_checks_are_invariant_under_scaling(c):
    phi = m4_over_f3()
    psi = phi.scaled(c)
    assert equivalent(phi, psi)
    for level in ("strong", "weak"):
        assert bool(check_wick(psi, level)) == bool(check_wick(phi, level))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_weak_and_strong_agree_over_f3(seed):
    """F3 is a partial field, so the two checks must agree on every perturbation."""
    candidate = perturb(m4_over_f3(), random.Random(seed))
    assert bool(check_wick(candidate, "weak")) == bool(check_wick(candidate, "strong"))
