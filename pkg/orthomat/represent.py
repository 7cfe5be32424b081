"""Representability of orthogonal matroids over finite tracts.

``search_representation`` is a backtracking search for a Wick function supported on
the bases of M. phi is fixed to 1 on the first basis, the remaining bases are taken
in a greedy order that completes as many four-position relations as early as
possible, and every relation is checked the moment its last basis gets a value.
Completed assignments are then re-checked at the requested level.

On top of it sit the regularity pipelines: F2 + F3 combined into U0, F2 + S for
matroids without an M4 minor, and F3 + F4 transported to the sixth-root tract.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cache
from typing import Iterable

import structlog

from orthomat.config import settings
from orthomat.ground_set import enumerate_transversals, flip, transversal_key
from orthomat.models import (
    M4FreeReport,
    ProbeRecord,
    RegularityReport,
    RepSearchResult,
    SixthRootReport,
    TargetCheck,
)
from orthomat.ortho_matroid import OrthoMatroid, contains_minor, m4
from orthomat.tract_core import (
    Element,
    Tract,
    TractHom,
    canonical_hom,
    is_tract_hom,
    make_tract,
    product_tract,
)
from orthomat.wick import (
    WickFunction,
    check_wick,
    indicator,
    map_values,
    max_nonzero_products,
    product_wick,
    pushforward,
)

logger = structlog.get_logger()

REGULAR_PUSH_TARGETS = ("F2", "F3", "F5", "F7")
SIXTH_ROOT_TARGETS = ("F4", "F9:id", "F7", "F13")
R6_TRANSPORT_LENGTH = 3


class SearchError(Exception):
    """Raised when a representation search cannot run."""
    pass


@dataclass(frozen=True)
class _Relation:
    """One four-position relation restricted to its nonzero products.

    ``terms`` holds (sign exponent k, basis a, basis b) for each product
    phi(T1 + x_k) phi(T2 + x_k) whose two transversals are both bases.
    """

    terms: tuple[tuple[int, int, int], ...]


def _relations(m: OrthoMatroid) -> list[_Relation]:
    n, bases = m.n, m.bases
    found = []
    for t1 in enumerate_transversals(n):
        for diff in itertools.combinations(range(n), 4):
            t2 = t1
            for p in diff:
                t2 = flip(t2, p, n)
            if transversal_key(t2, n) <= transversal_key(t1, n):
                continue
            terms = tuple((k, flip(t1, p, n), flip(t2, p, n))
                          for k, p in enumerate(diff, start=1)
                          if flip(t1, p, n) in bases and flip(t2, p, n) in bases)
            if terms:
                found.append(_Relation(terms))
    return found


def _search_order(m: OrthoMatroid, relations: list[_Relation]) -> list[int]:
    """Greedy order: next basis is the one completing the most relations."""
    root = m.sorted_bases[0]
    order, placed = [root], {root}
    remaining = [b for b in m.sorted_bases if b != root]
    touching = {b: [r for r in relations if any(b in (a, c) for _, a, c in r.terms)]
                for b in m.sorted_bases}

    def completes(b: int) -> int:
        done = 0
        for r in touching[b]:
            involved = {x for _, a, c in r.terms for x in (a, c)}
            if involved - placed <= {b}:
                done += 1
        return done

    while remaining:
        best = max(remaining, key=lambda b: (completes(b), -transversal_key(b, m.n)))
        remaining.remove(best)
        order.append(best)
        placed.add(best)
    return order


class _Search:
    """Backtracking state for one (matroid, tract, level) search."""

    def __init__(self, m: OrthoMatroid, tract: Tract, level: str):
        self.m, self.tract, self.level = m, tract, level
        relations = _relations(m)
        self.order = _search_order(m, relations)
        index = {b: i for i, b in enumerate(self.order)}
        self.ready: dict[int, list[_Relation]] = {i: [] for i in range(len(self.order))}
        for r in relations:
            last = max(index[x] for _, a, c in r.terms for x in (a, c))
            self.ready[last].append(r)
        self.nodes = 0

    def _holds(self, r: _Relation, values: dict[int, Element]) -> bool:
        t = self.tract
        terms = [t.mul(t.sign(k), t.mul(values[a], values[c])) for k, a, c in r.terms]
        return t.is_null(terms, check=False)

    def run(self, branch: Iterable[Element] | None = None) -> WickFunction | None:
        values: dict[int, Element] = {self.order[0]: self.tract.one}
        if not all(self._holds(r, values) for r in self.ready[0]):
            return None
        return self._extend(1, values, branch)

    def _extend(self, i: int, values: dict[int, Element],
                branch: Iterable[Element] | None = None) -> WickFunction | None:
        if i == len(self.order):
            phi = WickFunction(self.tract, self.m.n, values)
            return phi if check_wick(phi, self.level) else None  # type: ignore[arg-type]
        b = self.order[i]
        for v in (branch if branch is not None else self.tract.units):
            self.nodes += 1
            values[b] = v
            if all(self._holds(r, values) for r in self.ready[i]):
                found = self._extend(i + 1, values)
                if found is not None:
                    return found
            del values[b]
        return None


def search_representation(m: OrthoMatroid, tract: Tract, level: str = "strong") -> RepSearchResult:
    """A Wick function over ``tract`` with underlying matroid M, or none."""
    if not tract.is_finite:
        raise SearchError(f"{tract.name} is infinite; representation search needs a finite tract")
    if m.n > settings.SEARCH_MAX_N:
        raise SearchError(f"n = {m.n} exceeds SEARCH_MAX_N = {settings.SEARCH_MAX_N}")
    search = _Search(m, tract, level)
    workers = max(1, settings.WORKERS)
    if workers == 1 or len(search.order) < 2:
        phi, nodes = search.run(), search.nodes
    else:
        branches = [[u] for u in tract.units]

        def run_branch(values: list[Element]) -> tuple[WickFunction | None, int]:
            own = _Search(m, tract, level)
            return own.run(values), own.nodes

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_branch, branches))
        phi = next((p for p, _ in results if p is not None), None)
        nodes = sum(k for _, k in results)
    status = "found" if phi is not None else "none"
    logger.info("search_complete", tract=tract.name, n=m.n, level=level, status=status,
                nodes=nodes)
    return RepSearchResult(status=status, tract=tract.name, level=level,
                           nodes_explored=nodes, wick=phi)


def sign_of_second(pair: tuple) -> int:
    """(1, v) -> 1 when v is the one of its field or of S, -1 otherwise."""
    return 1 if pair[1] == 1 else -1


def is_regular(m: OrthoMatroid) -> RegularityReport:
    """Representable over F2 and F3, combined into a strong U0 Wick function."""
    f2 = search_representation(m, make_tract("F2"))
    if not f2.found:
        return RegularityReport(regular=False, f2=f2)
    f3 = search_representation(m, make_tract("F3"))
    if not f3.found:
        return RegularityReport(regular=False, f2=f2, f3=f3)
    u0 = make_tract("U0")
    phi = map_values(product_wick(f2.wick, f3.wick), u0, sign_of_second)
    regular = bool(check_wick(phi, "weak")) and bool(check_wick(phi, "strong"))
    pushes = {}
    if regular:
        for name in REGULAR_PUSH_TARGETS:
            pushes[name] = bool(check_wick(pushforward(canonical_hom(u0, make_tract(name)), phi),
                                           "strong"))
    logger.info("regularity_checked", n=m.n, regular=regular)
    return RegularityReport(regular=regular, f2=f2, f3=f3, wick=phi if regular else None,
                            pushforwards=pushes)


def lemma_three_products(m: OrthoMatroid, phi: WickFunction | None = None) -> bool:
    """No four-position relation of M has more than three nonzero products."""
    return max_nonzero_products(phi if phi is not None else indicator(m, make_tract("K"))) <= 3


def check_m4_free_theorem(m: OrthoMatroid) -> M4FreeReport:
    """F2 + S => regular, for matroids without an M4 minor."""
    if contains_minor(m, m4()):
        return M4FreeReport(
            applicable=False,
            note="M has a minor isomorphic to M4; whether F2 + S suffices there is open")
    f2 = search_representation(m, make_tract("F2"))
    if not f2.found:
        return M4FreeReport(applicable=True, f2=f2, note="not representable over F2")
    sign = search_representation(m, make_tract("S"))
    if not sign.found:
        return M4FreeReport(applicable=True, f2=f2, sign=sign, note="not representable over S")
    phi = map_values(product_wick(f2.wick, sign.wick), make_tract("U0"), sign_of_second)
    three = lemma_three_products(m, phi)
    regular = bool(check_wick(phi, "weak")) and bool(check_wick(phi, "strong"))
    return M4FreeReport(applicable=True, f2=f2, sign=sign, regular=regular, three_products=three,
                        wick=phi if regular else None,
                        note="regular" if regular else "combined function is not strong")


@cache
def r6_transport() -> TractHom:
    """F3 x F4 -> R6 on values, the inverse of the pair of canonical maps out of R6.

    The pair is a homomorphism and a bijection on units. Its inverse keeps null sums of
    up to three terms only (1|1 + 1|1 + 2|2 + 2|2 is null in F3 x F4, 2 + 2z is not in
    R6), so anything transported through it is re-checked over R6.
    """
    r6 = make_tract("R6")
    to_f3 = canonical_hom(r6, make_tract("F3"))
    to_f4 = canonical_hom(r6, make_tract("F4"))
    product = product_tract(to_f3.target, to_f4.target)
    pair = TractHom(r6, product, lambda x: (to_f3(x), to_f4(x)),
                    name="R6->F3xF4", length=settings.HOM_CHECK_LENGTH)
    inverse = {v: k for k, v in pair.table().items()}
    if len(inverse) != len(r6.elements) or len(product.units) != len(r6.units):
        raise SearchError("R6 -> F3 x F4 is not a bijection on units")
    transport = TractHom(product, r6, inverse, name="F3xF4->R6", validate=False)
    result = is_tract_hom(product, r6, transport, R6_TRANSPORT_LENGTH)
    if not result:
        raise SearchError(f"F3 x F4 -> R6 breaks a short null sum: {result.detail}")
    logger.debug("r6_transport", table={str(k): v for k, v in inverse.items()})
    return transport


def pushforward_targets(phi: WickFunction, targets: Iterable[str] = SIXTH_ROOT_TARGETS
                        ) -> list[TargetCheck]:
    """Push an R6 Wick function to fields with a root of x^2 - x + 1 and re-check.

    The targets are a sample (F4, F9 and primes 1 mod 3), not every admissible field.
    """
    checks = []
    for name in targets:
        target = make_tract(name)
        hom = canonical_hom(phi.tract, target)
        ok = bool(check_wick(pushforward(hom, phi), "strong"))
        checks.append(TargetCheck(target=name, root=target.format_element(hom(1)), ok=ok))
    return checks


def is_sixth_root_representable(m: OrthoMatroid, *, targets: bool = False) -> SixthRootReport:
    """Representable over F3 and F4, transported from F3 x F4 to R6 and re-checked."""
    f3 = search_representation(m, make_tract("F3"))
    if not f3.found:
        return SixthRootReport(representable=False, f3=f3)
    f4 = search_representation(m, make_tract("F4"))
    if not f4.found:
        return SixthRootReport(representable=False, f3=f3, f4=f4)
    phi = pushforward(r6_transport(), product_wick(f3.wick, f4.wick))
    ok = bool(check_wick(phi, "strong"))
    checks = pushforward_targets(phi) if ok and targets else []
    return SixthRootReport(representable=ok, f3=f3, f4=f4, wick=phi if ok else None,
                           targets=checks)


def probe_conjecture(candidates: Iterable[tuple[str, OrthoMatroid]]) -> list[ProbeRecord]:
    """F2 and S representability against regularity for each candidate; asserts nothing."""
    records = []
    for name, m in candidates:
        record = ProbeRecord(
            name=name,
            has_m4_minor=contains_minor(m, m4()),
            over_f2=search_representation(m, make_tract("F2")).found,
            over_sign=search_representation(m, make_tract("S")).found,
            regular=is_regular(m).regular,
        )
        if record.counterexample:
            logger.warning("probe_counterexample", name=name)
        records.append(record)
    return records
