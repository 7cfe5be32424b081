"""Unit tests for Wick functions."""
import pytest

from orthomat.ground_set import format_set, parse_transversal
from orthomat.ortho_matroid import minor
from orthomat.tract_core import canonical_hom, make_tract
from orthomat.wick import (
    WickError,
    WickFunction,
    check_wick,
    dual_wick,
    equivalent,
    from_gp,
    gp_from_matrix,
    indicator,
    product_wick,
    pushforward,
    to_gp,
    wick_from_table,
    wick_minor,
    wick_relation_sum,
)

pytestmark = pytest.mark.unit


def _t(text, n):
    return parse_transversal(text, n)


def test_normalized_at_first_support_transversal():
    f5 = make_tract("F5")
    phi = WickFunction(f5, 2, {_t("1 2*", 2): 4, _t("1* 2", 2): 2})
    assert phi(_t("1 2*", 2)) == 1
    assert phi(_t("1* 2", 2)) == 3
    assert phi(_t("1 2", 2)) == 0


def test_zero_function_rejected():
    with pytest.raises(WickError):
        WickFunction(make_tract("F3"), 2, {_t("1 2", 2): 0})


def test_non_transversal_rejected():
    with pytest.raises(WickError):
        WickFunction(make_tract("K"), 2, {0b11: 1, 0b1111: 1})


def test_scaling_is_equivalent():
    f5 = make_tract("F5")
    phi = WickFunction(f5, 2, {_t("1 2", 2): 1, _t("1* 2*", 2): 3})
    assert equivalent(phi, phi.scaled(2))
    assert phi.scaled(2) != phi


def test_indicators_of_orthogonal_matroids_over_k(matroid_m4, matroid_m3):
    """Over K the strong relations are the symmetric exchange axiom."""
    assert check_wick(indicator(matroid_m4, make_tract("K")))
    assert check_wick(indicator(matroid_m3, make_tract("K")), "weak")


def test_m3_over_f2(matroid_m3):
    assert check_wick(indicator(matroid_m3, make_tract("F2")))


def test_failing_relation_witness():
    """Bases one flip apart give a single nonzero product."""
    phi = WickFunction(make_tract("F3"), 2, {_t("1 2", 2): 1, _t("1 2*", 2): 1})
    result = check_wick(phi)
    assert not result
    assert result.failed == "strong"
    t1, t2, total = result.witness
    assert (format_set(t1, 2), format_set(t2, 2)) == ("1 2", "1 2*")
    assert len(total) == 1


def test_weak_level_needs_matroid_support():
    phi = WickFunction(make_tract("K"), 2, {_t("1 2", 2): 1, _t("1* 2", 2): 1})
    with pytest.raises(WickError):
        check_wick(phi, "weak")
    with pytest.raises(WickError):
        check_wick(phi, "medium")


def test_relation_sum_signs():
    """T1 = 1 2, T2 = 1* 2*: the two products cancel with alternating signs."""
    f3 = make_tract("F3")
    phi = WickFunction(f3, 2, {_t("1 2*", 2): 1, _t("1* 2", 2): 2})
    total = wick_relation_sum(phi, _t("1 2", 2), _t("1* 2*", 2))
    assert len(total) == 2
    assert total.is_null()


def test_dual_of_m4_indicator(matroid_m4):
    phi = indicator(matroid_m4, make_tract("K"))
    assert dual_wick(phi) == phi


def test_minor_support_is_matroid_minor(matroid_m4):
    phi = indicator(matroid_m4, make_tract("S"))
    assert wick_minor(phi, 3).support == minor(matroid_m4, 3).bases


def test_pushforward_to_k_is_indicator(matroid_m3):
    f2 = make_tract("F2")
    k = make_tract("K")
    phi = indicator(matroid_m3, f2)
    assert pushforward(canonical_hom(f2, k), phi) == indicator(matroid_m3, k)
    with pytest.raises(WickError):
        pushforward(canonical_hom(make_tract("F3"), k), phi)


def test_product_needs_same_support(matroid_m3, lift_u13):
    f2, s = make_tract("F2"), make_tract("S")
    both = product_wick(indicator(matroid_m3, f2), indicator(matroid_m3, s))
    assert both.tract.name == "product(F2,S)"
    with pytest.raises(WickError):
        product_wick(indicator(matroid_m3, f2), indicator(lift_u13, s))


def test_lift_of_matrix_minors():
    """The rank 2 matrix [[1,0,1,1],[0,1,1,2]] over F3 has all six minors nonzero."""
    f3 = make_tract("F3")
    psi = gp_from_matrix(f3, [[1, 0, 1, 1], [0, 1, 1, 2]])
    assert len(psi.values) == 6
    phi = from_gp(psi)
    assert len(phi.support) == 6
    assert psi.equivalent(to_gp(phi))


def test_gp_alternates():
    f3 = make_tract("F3")
    psi = gp_from_matrix(f3, [[1, 0, 1], [0, 1, 1]])
    assert psi((1, 0)) == f3.neg(psi((0, 1)))
    assert psi((0, 0)) == 0


def test_rank_deficient_matrix_rejected():
    with pytest.raises(WickError):
        gp_from_matrix(make_tract("F3"), [[1, 1], [2, 2]])


def test_to_gp_needs_lift(matroid_m4):
    with pytest.raises(WickError):
        to_gp(indicator(matroid_m4, make_tract("K")))


def test_table_rejects_duplicates():
    k = make_tract("K")
    t = _t("1 2", 2)
    with pytest.raises(WickError):
        wick_from_table(k, 2, [(t, 1), (t, 1)])
