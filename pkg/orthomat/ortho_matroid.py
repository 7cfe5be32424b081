"""Ordinary orthogonal matroids and the ordinary matroids they are lifted from.

An orthogonal matroid on [n] u [n]* is a nonempty family of transversals closed under
symmetric exchange. Bases, circuits and subsets are bitmasks (see ground_set).
Derived data (independent sets, circuits, singular elements) is computed once per
instance and cached; instances are never mutated after construction.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import networkx as nx
import structlog
from networkx.algorithms.isomorphism import (
    GraphMatcher,
    categorical_edge_match,
    categorical_node_match,
)

from orthomat.ground_set import (
    bit_of,
    check_n,
    delete_position,
    differing_positions,
    divergences,
    elements,
    enumerate_subtransversals,
    enumerate_transversals,
    flip,
    format_element,
    format_set,
    is_admissible,
    is_starred,
    is_transversal,
    least_element,
    low_mask,
    position,
    star,
    star_bit,
    transversal_key,
)
from orthomat.models import CheckResult

logger = structlog.get_logger()


class MatroidError(Exception):
    """Raised when a basis family or a matroid operation is invalid."""
    pass


@dataclass(frozen=True)
class MinorStep:
    """One elementary minor: the element asked for and the one actually removed."""

    n: int
    requested: int
    applied: int
    redirected: bool

    def __str__(self) -> str:
        text = f"|{format_element(self.requested, self.n)}"
        if self.redirected:
            text += f" (singular, used {format_element(self.applied, self.n)})"
        return text


class OrthoMatroid:
    """An orthogonal matroid given by its bases."""

    def __init__(self, n: int, bases: Iterable[int], *, validate: bool = True,
                 history: Iterable[MinorStep] = (), name: str | None = None):
        self.n = check_n(n)
        self.bases = frozenset(bases)
        self.history = tuple(history)
        self.name = name
        if not self.bases:
            raise MatroidError("an orthogonal matroid needs at least one basis")
        for b in self.bases:
            if not is_transversal(b, n):
                raise MatroidError(f"{format_set(b, n)} is not a transversal")
        if validate:
            result = check_bases(n, self.bases)
            if not result:
                raise MatroidError(f"symmetric exchange fails: {result.detail}")

    @cached_property
    def sorted_bases(self) -> tuple[int, ...]:
        return tuple(sorted(self.bases, key=lambda b: transversal_key(b, self.n)))

    @cached_property
    def independent_sets(self) -> frozenset[int]:
        """Every subset of a basis."""
        found = set()
        for b in self.bases:
            sub = b
            while True:
                found.add(sub)
                if not sub:
                    break
                sub = (sub - 1) & b
        return frozenset(found)

    def is_independent(self, mask: int) -> bool:
        return mask in self.independent_sets

    @cached_property
    def circuits(self) -> tuple[int, ...]:
        """Minimal admissible sets contained in no basis, by size then mask."""
        independent = self.independent_sets
        found = []
        for a in enumerate_subtransversals(self.n):
            if a in independent:
                continue
            if all(a ^ (1 << e) in independent for e in elements(a)):
                found.append(a)
        logger.debug("circuits_enumerated", n=self.n, circuits=len(found))
        return tuple(found)

    @cached_property
    def singular_elements(self) -> frozenset[int]:
        covered = 0
        for b in self.bases:
            covered |= b
        return frozenset(bit for bit in range(2 * self.n) if not covered >> bit & 1)

    def is_singular(self, bit: int) -> bool:
        return bit in self.singular_elements

    def is_basis(self, mask: int) -> bool:
        return mask in self.bases

    def format_bases(self) -> list[str]:
        return [format_set(b, self.n) for b in self.sorted_bases]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OrthoMatroid):
            return NotImplemented
        return self.n == other.n and self.bases == other.bases

    def __hash__(self) -> int:
        return hash((self.n, self.bases))

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"OrthoMatroid{label}(n={self.n}, bases={len(self.bases)})"


def check_bases(n: int, candidate: Iterable[int]) -> CheckResult:
    """Symmetric exchange on a candidate basis family.

    Returns the first violating (B1, B2, position) on failure.
    """
    bases = frozenset(candidate)
    if not bases:
        raise MatroidError("empty basis family")
    for b in bases:
        if not is_transversal(b, n):
            raise MatroidError(f"{format_set(b, n)} is not a transversal")
    ordered = sorted(bases, key=lambda b: transversal_key(b, n))
    for b1 in ordered:
        for b2 in ordered:
            diff = differing_positions(b1, b2, n)
            for x in diff:
                swapped = flip(b1, x, n)
                if not any(flip(swapped, y, n) in bases for y in diff if y != x):
                    detail = (f"B1 = {format_set(b1, n)}, B2 = {format_set(b2, n)}, "
                              f"divergence {x + 1} {x + 1}*")
                    return CheckResult.failure("bases", "exchange", (b1, b2, x), detail)
    return CheckResult.passed("bases")


def check_strong_exchange(m: OrthoMatroid) -> CheckResult:
    """Both B1 and B2 exchange along the same second divergence."""
    n, bases = m.n, m.bases
    for b1 in m.sorted_bases:
        for b2 in m.sorted_bases:
            diff = differing_positions(b1, b2, n)
            for x in diff:
                ok = any(flip(flip(b1, x, n), y, n) in bases and flip(flip(b2, x, n), y, n) in bases
                         for y in diff if y != x)
                if not ok:
                    detail = (f"B1 = {format_set(b1, n)}, B2 = {format_set(b2, n)}, "
                              f"divergence {x + 1} {x + 1}*")
                    return CheckResult.failure("strong exchange", "exchange", (b1, b2, x), detail)
    return CheckResult.passed("strong exchange")


def circuits(m: OrthoMatroid) -> tuple[int, ...]:
    return m.circuits


def check_circuit_axioms(n: int, family: Iterable[int]) -> CheckResult:
    """The five circuit axioms, checked exhaustively. Tags: admissible, C1..C5."""
    family = sorted(set(family), key=lambda c: (c.bit_count(), c))
    check = "circuit axioms"
    for c in family:
        if not is_admissible(c, n):
            return CheckResult.failure(check, "admissible", (c,), f"{format_set(c, n)}")
    if 0 in family:
        return CheckResult.failure(check, "C1", (0,), "the empty set is a circuit")
    for c1, c2 in itertools.permutations(family, 2):
        if c1 & c2 == c1:
            return CheckResult.failure(check, "C2", (c1, c2),
                                       f"{format_set(c1, n)} inside {format_set(c2, n)}")
    for c1, c2 in itertools.permutations(family, 2):
        union = c1 | c2
        if not is_admissible(union, n):
            continue
        for x in elements(c1 & c2):
            rest = union ^ (1 << x)
            if not any(c3 & rest == c3 for c3 in family):
                detail = (f"{format_set(c1, n)} and {format_set(c2, n)} at "
                          f"{format_element(x, n)}")
                return CheckResult.failure(check, "C3", (c1, c2, x), detail)
    for c1, c2 in itertools.combinations_with_replacement(family, 2):
        union = c1 | c2
        if not is_admissible(union, n) and len(divergences(union, n)) < 2:
            return CheckResult.failure(
                check, "C4", (c1, c2),
                f"{format_set(c1, n)} u {format_set(c2, n)} has one divergence")
    for t in enumerate_transversals(n):
        for bit in elements(star(t, n)):
            grown = t | (1 << bit)
            if not any(c & grown == c for c in family):
                return CheckResult.failure(
                    check, "C5", (t, bit),
                    f"{format_set(t, n)} + {format_element(bit, n)} contains no circuit")
    return CheckResult.passed(check)


def fundamental_circuit(m: OrthoMatroid, b: int, x: int) -> int:
    """C(B, x): the unique circuit inside B u {x}."""
    n = m.n
    if b not in m.bases:
        raise MatroidError(f"{format_set(b, n)} is not a basis")
    if b >> x & 1:
        raise MatroidError(f"{format_element(x, n)} is already in the basis")
    xs, p = star_bit(x, n), position(x, n)
    swapped = flip(b, p, n)
    circuit = 1 << x
    for e in elements(b):
        if e != xs and flip(swapped, position(e, n), n) in m.bases:
            circuit |= 1 << e
    return circuit


def circuit_transversals(m: OrthoMatroid, c: int) -> list[int]:
    """Every transversal T containing C with T sym-diff {x, x*} a basis for all x in C."""
    n = m.n
    return [t for t in enumerate_transversals(n)
            if t & c == c and all(flip(t, position(x, n), n) in m.bases for x in elements(c))]


def extend_circuit_to_transversal(m: OrthoMatroid, c: int) -> int:
    """A transversal T containing C whose flips at C are all bases.

    Built as in the classical argument: y is the least element of C and T is the first
    basis containing C - {y}, flipped at y.
    """
    n = m.n
    if c not in m.circuits:
        raise MatroidError(f"{format_set(c, n)} is not a circuit")
    y = least_element(c)
    rest = c ^ (1 << y)
    for b in m.sorted_bases:
        if b & rest == rest:
            t = flip(b, position(y, n), n)
            if all(flip(t, position(x, n), n) in m.bases for x in elements(c)):
                return t
    raise MatroidError(f"no transversal extends {format_set(c, n)}")


def dual(m: OrthoMatroid) -> OrthoMatroid:
    return OrthoMatroid(m.n, (star(b, m.n) for b in m.bases), validate=False)


def minor(m: OrthoMatroid, x: int) -> OrthoMatroid:
    """Elementary minor M|x on E - {x, x*}; a singular x is replaced by x*."""
    n = m.n
    if not 0 <= x < 2 * n:
        raise MatroidError(f"element bit {x} outside the ground set")
    applied = star_bit(x, n) if m.is_singular(x) else x
    p = position(x, n)
    bases = {delete_position(b, p, n) for b in m.bases if b >> applied & 1}
    step = MinorStep(n=n, requested=x, applied=applied, redirected=applied != x)
    if step.redirected:
        logger.debug("minor_redirected", element=format_element(x, n))
    return OrthoMatroid(n - 1, bases, validate=False, history=(*m.history, step))


def minor_set(m: OrthoMatroid, subset: Iterable[int]) -> OrthoMatroid:
    """M|S for an admissible S, applied from the highest position down."""
    n = m.n
    bits = sorted(set(subset), key=lambda b: position(b, n), reverse=True)
    seen = [position(b, n) for b in bits]
    if len(seen) != len(set(seen)):
        raise MatroidError("minor set contains both x and x*")
    current = m
    for bit in bits:
        current = minor(current, bit_of(position(bit, n), is_starred(bit, n), current.n))
    return current


def twist(m: OrthoMatroid, a: int) -> OrthoMatroid:
    """Bases B sym-diff A for a star-closed A."""
    if star(a, m.n) != a:
        raise MatroidError(f"{format_set(a, m.n)} is not closed under *")
    return OrthoMatroid(m.n, (b ^ a for b in m.bases), validate=False)


def _incidence_graph(m: OrthoMatroid) -> nx.Graph:
    graph = nx.Graph()
    for bit in range(2 * m.n):
        graph.add_node(("e", bit), kind="element")
    for p in range(m.n):
        graph.add_edge(("e", p), ("e", p + m.n), kind="pair")
    for b in m.bases:
        graph.add_node(("b", b), kind="basis")
        for bit in elements(b):
            graph.add_edge(("b", b), ("e", bit), kind="member")
    return graph


def find_isomorphism(m1: OrthoMatroid, m2: OrthoMatroid) -> dict[int, int] | None:
    """An involution-respecting bijection E(M1) -> E(M2) sending bases to bases.

    Matches the element/basis incidence graphs, where pair edges join x and x*.
    """
    if m1.n != m2.n:
        raise MatroidError(f"ground sets differ: {m1.n} vs {m2.n}")
    if len(m1.bases) != len(m2.bases):
        return None
    matcher = GraphMatcher(_incidence_graph(m1), _incidence_graph(m2),
                           node_match=categorical_node_match("kind", None),
                           edge_match=categorical_edge_match("kind", None))
    for mapping in matcher.isomorphisms_iter():
        return {a[1]: b[1] for a, b in mapping.items() if a[0] == "e"}
    return None


def contains_minor(m: OrthoMatroid, target: OrthoMatroid) -> bool:
    """Some iterated elementary minor of M is isomorphic to target."""
    k = m.n - target.n
    if k < 0:
        return False
    seen: set[frozenset[int]] = set()
    for chosen in itertools.combinations(range(m.n), k):
        for stars in itertools.product((False, True), repeat=k):
            subset = [bit_of(p, s, m.n) for p, s in zip(chosen, stars)]
            candidate = minor_set(m, subset)
            if candidate.bases in seen:
                continue
            seen.add(candidate.bases)
            if find_isomorphism(candidate, target) is not None:
                logger.debug("minor_found", removed=format_set(sum(1 << b for b in subset), m.n))
                return True
    return False


def basis_graph(m: OrthoMatroid) -> nx.Graph:
    """Bases joined when their symmetric difference has four elements."""
    graph = nx.Graph()
    graph.add_nodes_from(m.sorted_bases)
    for b1, b2 in itertools.combinations(m.sorted_bases, 2):
        if (b1 ^ b2).bit_count() == 4:
            graph.add_edge(b1, b2)
    return graph


def is_lift_like(m: OrthoMatroid) -> bool:
    """|B n [n]| is the same for every basis."""
    low = low_mask(m.n)
    return len({(b & low).bit_count() for b in m.bases}) == 1


## Ordinary matroids on [n], bases as masks over the low n bits

class OrdinaryMatroid:
    """A matroid on [n] given by its bases."""

    def __init__(self, n: int, bases: Iterable[int], *, validate: bool = True,
                 name: str | None = None):
        self.n = check_n(n)
        self.bases = frozenset(bases)
        self.name = name
        if not self.bases:
            raise MatroidError("a matroid needs at least one basis")
        sizes = {b.bit_count() for b in self.bases}
        if len(sizes) != 1 or any(b >> n for b in self.bases):
            raise MatroidError("bases must be equicardinal subsets of [n]")
        self.rank = sizes.pop()
        if validate:
            self._check_exchange()

    def _check_exchange(self) -> None:
        for b1, b2 in itertools.product(self.bases, repeat=2):
            for x in elements(b1 & ~b2):
                if not any((b1 ^ (1 << x)) | (1 << y) in self.bases for y in elements(b2 & ~b1)):
                    raise MatroidError(
                        f"basis exchange fails for {format_set(b1, self.n)}, "
                        f"{format_set(b2, self.n)} at {x + 1}")

    @cached_property
    def circuits(self) -> tuple[int, ...]:
        found = []
        for size in range(1, self.n + 1):
            for combo in itertools.combinations(range(self.n), size):
                mask = sum(1 << i for i in combo)
                if any(b & mask == mask for b in self.bases):
                    continue
                if not any(c & mask == c for c in found):
                    found.append(mask)
        return tuple(found)

    def dual(self) -> "OrdinaryMatroid":
        low = low_mask(self.n)
        return OrdinaryMatroid(self.n, (low ^ b for b in self.bases), validate=False)

    @property
    def cocircuits(self) -> tuple[int, ...]:
        return self.dual().circuits

    def loops(self) -> list[int]:
        covered = 0
        for b in self.bases:
            covered |= b
        return [i for i in range(self.n) if not covered >> i & 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OrdinaryMatroid):
            return NotImplemented
        return self.n == other.n and self.bases == other.bases

    def __hash__(self) -> int:
        return hash((self.n, self.bases))

    def __repr__(self) -> str:
        return f"OrdinaryMatroid(n={self.n}, r={self.rank}, bases={len(self.bases)})"


def lift(matroid: OrdinaryMatroid) -> OrthoMatroid:
    """The orthogonal matroid with bases B u ([n] - B)*."""
    n = matroid.n
    low = low_mask(n)
    bases = (b | ((low & ~b) << n) for b in matroid.bases)
    name = f"lift({matroid.name})" if matroid.name else None
    return OrthoMatroid(n, bases, validate=False, name=name)


def uniform_matroid(r: int, n: int) -> OrdinaryMatroid:
    if not 0 <= r <= n:
        raise MatroidError(f"U({r},{n}) needs 0 <= r <= n")
    bases = (sum(1 << i for i in combo) for combo in itertools.combinations(range(n), r))
    return OrdinaryMatroid(n, bases, validate=False, name=f"U{r},{n}")


def graphic_matroid(graph: nx.Graph, *, name: str | None = None) -> OrdinaryMatroid:
    """Cycle matroid of a connected graph; edges are numbered in graph.edges order."""
    edges = list(graph.edges)
    rank = graph.number_of_nodes() - 1
    bases = []
    for combo in itertools.combinations(range(len(edges)), rank):
        forest = nx.Graph([edges[i] for i in combo])
        if forest.number_of_nodes() == graph.number_of_nodes() and nx.is_tree(forest):
            bases.append(sum(1 << i for i in combo))
    return OrdinaryMatroid(len(edges), bases, validate=False, name=name)


def k4_cycle_matroid() -> OrdinaryMatroid:
    return graphic_matroid(nx.complete_graph(4), name="M(K4)")


FANO_LINES = ((0, 1, 3), (1, 2, 4), (2, 3, 5), (3, 4, 6), (0, 4, 5), (1, 5, 6), (0, 2, 6))


def fano_matroid() -> OrdinaryMatroid:
    lines = {sum(1 << i for i in line) for line in FANO_LINES}
    bases = (mask for combo in itertools.combinations(range(7), 3)
             if (mask := sum(1 << i for i in combo)) not in lines)
    return OrdinaryMatroid(7, bases, validate=False, name="F7")


def m3() -> OrthoMatroid:
    """Bases abc* for abc = [3], and [3]*."""
    n, low = 3, low_mask(3)
    bases = {(low ^ (1 << p)) | (1 << (n + p)) for p in range(n)} | {low << n}
    return OrthoMatroid(n, bases, name="M3")


def m4() -> OrthoMatroid:
    """Bases abcd* and a*b*c*d for abcd = [4]."""
    n, low = 4, low_mask(4)
    bases = set()
    for p in range(n):
        single = 1 << p
        bases.add((low ^ single) | (single << n))
        bases.add(single | ((low ^ single) << n))
    return OrthoMatroid(n, bases, name="M4")
