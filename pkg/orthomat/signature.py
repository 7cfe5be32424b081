"""Tract vectors, signatures of orthogonal matroids and circuit sets.

An F-signature of an orthogonal matroid M is a family of vectors in F^E, closed under
scaling, whose supports are exactly the circuits of M. Families are stored by one
representative per circuit. Scaling acts on the conjugated vector (unstarred
coordinates times a, starred coordinates times conj(a)), which is ordinary scaling
whenever the involution is trivial; by T4 it never changes whether an inner product
is null, so every check below runs on representatives.

The two constructions between Wick functions and signatures live here as well:
``circuits_from_wick`` (a circuit vector from the ratios of phi around a transversal)
and ``wick_from_circuits`` (phi spread over the basis graph by gamma).
"""

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import networkx as nx
import structlog

from orthomat.ground_set import (
    check_n,
    elements,
    enumerate_transversals,
    flip,
    format_element,
    format_set,
    interval_count,
    is_admissible,
    least_element,
    low_mask,
    position,
    star,
    star_bit,
)
from orthomat.models import CheckResult
from orthomat.ortho_matroid import (
    MatroidError,
    OrdinaryMatroid,
    OrthoMatroid,
    basis_graph,
    circuit_transversals,
    dual,
    extend_circuit_to_transversal,
    fundamental_circuit,
    lift,
    minor,
)
from orthomat.tract_core import Element, FormalSum, Tract, TractHom, TropicalHyperfield
from orthomat.wick import (
    WickError,
    WickFunction,
    check_wick,
    underlying_matroid,
)

logger = structlog.get_logger()

Axiom = Literal["O", "O'", "Ot2", "Ot3", "Ot2'"]
AXIOMS: tuple[str, ...] = ("O", "O'", "Ot2", "Ot3", "Ot2'")


class SignatureError(Exception):
    """Raised for malformed signatures or failed construction preconditions."""
    pass


@dataclass(frozen=True)
class TractVector:
    """A vector in F^E; ``coords[bit]`` is the coordinate of that element."""

    tract: Tract
    n: int
    coords: tuple
    support: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.coords) != 2 * self.n:
            raise SignatureError(f"vector needs {2 * self.n} coordinates, got {len(self.coords)}")
        mask = 0
        for bit, v in enumerate(self.coords):
            if not self.tract.contains(v):
                raise SignatureError(f"{v!r} is not an element of {self.tract.name}")
            if v != self.tract.zero:
                mask |= 1 << bit
        object.__setattr__(self, "support", mask)

    @classmethod
    def of(cls, tract: Tract, coords: Sequence[Element]) -> "TractVector":
        if len(coords) % 2:
            raise SignatureError("a vector on [n] u [n]* has an even number of coordinates")
        return cls(tract, len(coords) // 2, tuple(coords))

    @classmethod
    def from_parts(cls, tract: Tract, low: Sequence[Element],
                   high: Sequence[Element]) -> "TractVector":
        """Unstarred coordinates 1..n, then starred coordinates 1*..n*."""
        if len(low) != len(high):
            raise SignatureError("both halves of a vector need n coordinates")
        return cls(tract, len(low), (*low, *high))

    @classmethod
    def zero(cls, tract: Tract, n: int) -> "TractVector":
        return cls(tract, n, (tract.zero,) * (2 * n))

    def __getitem__(self, bit: int) -> Element:
        return self.coords[bit]

    def is_zero(self) -> bool:
        return self.support == 0

    def conj(self) -> "TractVector":
        """conj(X)(i) = X(i) on [n] and the involution of X(i) on [n]*."""
        t, n = self.tract, self.n
        return TractVector(t, n, (*self.coords[:n], *(t.conj(v) for v in self.coords[n:])))

    def starred(self) -> "TractVector":
        """X*(i) = X(i*)."""
        n = self.n
        return TractVector(self.tract, n, (*self.coords[n:], *self.coords[:n]))

    def scale(self, alpha: Element) -> "TractVector":
        """The vector whose conjugate is alpha * conj(X)."""
        t, n = self.tract, self.n
        beta = t.conj(alpha)
        return TractVector(t, n, (*(t.mul(alpha, v) for v in self.coords[:n]),
                                  *(t.mul(beta, v) for v in self.coords[n:])))

    def normalized(self) -> "TractVector":
        """Scaled so that conj(X) is 1 at the least support element."""
        if not self.support:
            return self
        lead = self.conj().coords[least_element(self.support)]
        return self.scale(self.tract.inv(lead))

    def project(self, p: int) -> "TractVector":
        """Drop the coordinates of position p."""
        n = self.n
        low = self.coords[:p] + self.coords[p + 1:n]
        high = self.coords[n:n + p] + self.coords[n + p + 1:]
        return TractVector(self.tract, n - 1, (*low, *high))

    def map(self, f: TractHom) -> "TractVector":
        return TractVector(f.target, self.n, tuple(f(v) for v in self.coords))

    def __str__(self) -> str:
        fmt = self.tract.format_element
        low = ",".join(fmt(v) for v in self.coords[:self.n])
        high = ",".join(fmt(v) for v in self.coords[self.n:])
        return f"({low} | {high})"


def inner_product(tract: Tract, x: TractVector, y: TractVector) -> FormalSum:
    """<X, Y> = sum over i in [n] of X(i) conj(Y(i)) + conj(X(i*)) Y(i*)."""
    n, conj, mul = x.n, tract.conj, tract.mul
    terms = []
    for i in range(n):
        terms.append(mul(x[i], conj(y[i])))
        terms.append(mul(conj(x[n + i]), y[n + i]))
    return FormalSum.of(tract, terms)


def star_product(tract: Tract, x: TractVector, y: TractVector) -> FormalSum:
    """<X, Y*> as the sum over i in E of conj(X)(i) conj(Y)(i*)."""
    n = x.n
    cx, cy = x.conj(), y.conj()
    overlap = x.support & star(y.support, n)
    terms = [tract.mul(cx[i], cy[star_bit(i, n)]) for i in elements(overlap)]
    return FormalSum(tract, tuple(terms))


class SignatureFamily:
    """Representatives of an F-signature, one per circuit of the underlying matroid."""

    def __init__(self, tract: Tract, n: int, vectors: Iterable[TractVector],
                 matroid: OrthoMatroid | None = None):
        self.tract = tract
        self.n = check_n(n)
        by_support: dict[int, TractVector] = {}
        for x in vectors:
            if x.tract != tract or x.n != n:
                raise SignatureError(f"vector {x} does not live in {tract.name}^E for n = {n}")
            if x.is_zero():
                raise SignatureError("the zero vector is not an F-circuit")
            if not is_admissible(x.support, n):
                raise SignatureError(f"support {format_set(x.support, n)} is not admissible")
            rep = x.normalized()
            known = by_support.get(x.support)
            if known is not None and known != rep:
                raise SignatureError(
                    f"two vectors on {format_set(x.support, n)} are not scalar multiples")
            by_support[x.support] = rep
        self.by_support = dict(sorted(by_support.items(),
                                      key=lambda kv: (kv[0].bit_count(), kv[0])))
        self.reps = tuple(self.by_support.values())
        self.matroid = matroid if matroid is not None else self._derive_matroid()
        circuits = set(self.matroid.circuits)
        if set(self.by_support) != circuits:
            missing = sorted(circuits - set(self.by_support))
            extra = sorted(set(self.by_support) - circuits)
            raise SignatureError(
                "supports are not the circuits of the matroid: "
                f"missing {[format_set(c, n) for c in missing]}, "
                f"extra {[format_set(c, n) for c in extra]}")

    def _derive_matroid(self) -> OrthoMatroid:
        supports = list(self.by_support)
        bases = [t for t in enumerate_transversals(self.n)
                 if not any(s & t == s for s in supports)]
        if not bases:
            raise SignatureError("every transversal contains a support")
        try:
            return OrthoMatroid(self.n, bases)
        except MatroidError as e:
            raise SignatureError(f"supports do not come from an orthogonal matroid: {e}") from e

    def vector(self, support: int) -> TractVector:
        try:
            return self.by_support[support]
        except KeyError as e:
            raise SignatureError(f"no F-circuit on {format_set(support, self.n)}") from e

    def all_vectors(self) -> list[TractVector]:
        """Every scalar multiple of every representative (finite tracts only)."""
        if not self.tract.is_finite:
            raise SignatureError(f"{self.tract.name} has infinitely many units")
        seen: dict[TractVector, None] = {}
        for x in self.reps:
            for alpha in self.tract.units:
                seen.setdefault(x.scale(alpha), None)
        return list(seen)

    def __len__(self) -> int:
        return len(self.reps)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignatureFamily):
            return NotImplemented
        return (self.tract == other.tract and self.n == other.n
                and self.by_support == other.by_support)

    def __hash__(self) -> int:
        return hash((self.tract, self.n, tuple(self.by_support)))

    def __repr__(self) -> str:
        return f"SignatureFamily({self.tract.name}, n={self.n}, circuits={len(self.reps)})"


def _overlap(x: TractVector, y: TractVector) -> int:
    return (x.support & star(y.support, x.n)).bit_count()


def _axiom_pairs(family: SignatureFamily, axiom: str) -> Iterable[tuple[TractVector, TractVector]]:
    if axiom == "Ot2'":
        m = family.matroid
        seen = set()
        for b in m.sorted_bases:
            fundamentals = [family.vector(fundamental_circuit(m, b, e))
                            for e in elements(star(b, m.n))]
            for x, y in itertools.product(fundamentals, repeat=2):
                if (x.support, y.support) not in seen:
                    seen.add((x.support, y.support))
                    yield x, y
        return
    bound = {"O": None, "O'": 4, "Ot3": 3, "Ot2": 2}[axiom]
    for x, y in itertools.product(family.reps, repeat=2):
        k = _overlap(x, y)
        if bound is None or (k == 2 if axiom == "Ot2" else k <= bound):
            yield x, y


def check_signature_axiom(family: SignatureFamily, axiom: Axiom) -> CheckResult:
    """<X, Y*> null for the pairs the axiom covers.

    O: all pairs. O': overlap |X n Y*| <= 4. Ot3: <= 3. Ot2: exactly 2.
    Ot2': pairs of fundamental circuits of a common basis.
    """
    if axiom not in AXIOMS:
        raise SignatureError(f"unknown signature axiom {axiom!r}")
    for x, y in _axiom_pairs(family, axiom):
        total = star_product(family.tract, x, y)
        if not total.is_null():
            detail = f"X = {x}, Y = {y}, <X,Y*> = {total}"
            logger.info("signature_axiom_failed", axiom=axiom, x=str(x), y=str(y))
            return CheckResult.failure(axiom, axiom, (x, y, total), detail)
    return CheckResult.passed(axiom)


def _candidates(tract: Tract, target: Sequence[Element],
                generators: Sequence[Sequence[Element]], i: int) -> list[Element]:
    if tract.is_finite:
        return list(tract.elements)
    if isinstance(tract, TropicalHyperfield):
        values = {v for v in target if v != tract.zero}
        for g in generators:
            values.update(v for v in g if v != tract.zero)
        own = [v for v in generators[i] if v != tract.zero]
        ratios = {tract.div(a, b) for a in values for b in own}
        return [tract.zero, *sorted(ratios)]
    raise SignatureError(f"no span search over {tract.name}")


def span_coefficients(tract: Tract, target: Sequence[Element],
                      generators: Sequence[Sequence[Element]]) -> tuple | None:
    """Coefficients c with sum c_i G_i - target null in every coordinate, or None.

    Coordinates covered by a single generator force its coefficient; the rest are
    found by depth-first search, checking each coordinate as soon as every generator
    that touches it has a value.
    """
    zero, k, width = tract.zero, len(generators), len(target)
    forced: dict[int, Element] = {}
    for j in range(width):
        touching = [i for i in range(k) if generators[i][j] != zero]
        if not touching:
            if target[j] != zero:
                return None
            continue
        if len(touching) == 1:
            i = touching[0]
            value = zero if target[j] == zero else tract.div(target[j], generators[i][j])
            if forced.setdefault(i, value) != value:
                return None

    ready: dict[int, list[int]] = {i: [] for i in range(k)}
    for j in range(width):
        touching = [i for i in range(k) if generators[i][j] != zero]
        if touching:
            ready[max(touching)].append(j)
    eps = tract.epsilon
    negated = [tract.mul(eps, v) for v in target]

    def coordinate_ok(coeffs: list, j: int) -> bool:
        terms = [tract.mul(coeffs[i], generators[i][j]) for i in range(len(coeffs))]
        terms.append(negated[j])
        return tract.is_null(terms, check=False)

    choices = [[forced[i]] if i in forced else _candidates(tract, target, generators, i)
               for i in range(k)]
    coeffs: list = []

    def extend(i: int) -> bool:
        if i == k:
            return True
        for c in choices[i]:
            coeffs.append(c)
            if all(coordinate_ok(coeffs, j) for j in ready[i]) and extend(i + 1):
                return True
            coeffs.pop()
        return False

    if k == 0:
        return () if all(v == zero for v in target) else None
    return tuple(coeffs) if extend(0) else None


def in_span(tract: Tract, target: TractVector, generators: Sequence[TractVector]) -> bool:
    """conj(target) in the span of the conj(generators)."""
    return span_coefficients(tract, target.conj().coords,
                             [g.conj().coords for g in generators]) is not None


def fundamental_vectors(family: SignatureFamily, b: int) -> dict[int, TractVector]:
    """X_e on C(B, e) for e in B*, scaled so that conj(X_e)(e) = 1."""
    m, t = family.matroid, family.tract
    out = {}
    for e in elements(star(b, m.n)):
        x = family.vector(fundamental_circuit(m, b, e))
        out[e] = x.scale(t.inv(x.conj()[e]))
    return out


SpanAxiom = Literal["L", "L1", "L2"]


def _l_failure(family: SignatureFamily, b: int,
               fundamentals: dict[int, TractVector]) -> tuple | None:
    tract, n = family.tract, family.n
    generators = list(fundamentals.values())
    for x in family.reps:
        if not in_span(tract, x, generators):
            return (b, x), f"B = {format_set(b, n)}, X = {x} is not in the span"
    return None


def _l1_failure(family: SignatureFamily, b: int,
                fundamentals: dict[int, TractVector]) -> tuple | None:
    tract, n = family.tract, family.n
    for (e1, x1), (e2, x2) in itertools.combinations(fundamentals.items(), 2):
        if not is_admissible(x1.support | x2.support, n):
            continue
        for f in elements(x1.support & x2.support):
            if not any(y[f] == tract.zero and in_span(tract, y, [x1, x2])
                       for y in family.reps):
                detail = (f"B = {format_set(b, n)}, e = {format_element(e1, n)}, "
                          f"{format_element(e2, n)}, f = {format_element(f, n)}")
                return (b, e1, e2, f), detail
    return None


def _l2_failure(family: SignatureFamily, b: int,
                fundamentals: dict[int, TractVector]) -> tuple | None:
    tract, n = family.tract, family.n
    for triple in itertools.combinations(fundamentals.items(), 3):
        xs = [x for _, x in triple]
        if any(is_admissible(a.support | c.support, n) for a, c in itertools.combinations(xs, 2)):
            continue
        blocked = [star_bit(e, n) for e, _ in triple]
        if not any(all(y[g] == tract.zero for g in blocked) and in_span(tract, y, xs)
                   for y in family.reps):
            detail = (f"B = {format_set(b, n)}, e = "
                      + ", ".join(format_element(e, n) for e, _ in triple))
            return (b, *(e for e, _ in triple)), detail
    return None


_SPAN_CHECKS = {"L": _l_failure, "L1": _l1_failure, "L2": _l2_failure}


def check_span_axiom(family: SignatureFamily, axiom: SpanAxiom) -> CheckResult:
    """One span axiom at every basis, fundamental circuit vectors scaled to 1 at e.

    L: every F-circuit is in the span of the fundamental ones.
    L1: two fundamental circuits with admissible union eliminate a common element.
    L2: three fundamental circuits, pairwise inadmissible, eliminate e1*, e2*, e3*.
    """
    if axiom not in _SPAN_CHECKS:
        raise SignatureError(f"unknown span axiom {axiom!r}")
    for b in family.matroid.sorted_bases:
        failure = _SPAN_CHECKS[axiom](family, b, fundamental_vectors(family, b))
        if failure is not None:
            return CheckResult.failure(axiom, axiom, *failure)
    return CheckResult.passed(axiom)


def check_circuit_set(family: SignatureFamily, level: Literal["strong", "weak"] = "strong"
                      ) -> CheckResult:
    """Ot2 plus L (strong) or plus L1 and L2 (weak)."""
    if level not in ("strong", "weak"):
        raise SignatureError(f"unknown circuit set level {level!r}")
    check = f"circuit set {level}"
    axioms = ("L",) if level == "strong" else ("L1", "L2")
    for result in (check_signature_axiom(family, "Ot2"),
                   *(check_span_axiom(family, a) for a in axioms)):  # type: ignore[arg-type]
        if not result:
            return CheckResult.failure(check, result.failed or result.check, result.witness,
                                       result.detail)
    return CheckResult.passed(check)


def _circuit_vector(phi: WickFunction, c: int, t: int) -> TractVector:
    tract, n = phi.tract, phi.n
    f = least_element(c)
    base = phi(flip(t, position(f, n), n))
    conj_coords = [tract.zero] * (2 * n)
    for e in elements(c):
        ratio = tract.div(phi(flip(t, position(e, n), n)), base)
        conj_coords[e] = tract.mul(tract.sign(interval_count(t, e, f, n)), ratio)
    # conj is an involution, so applying it again recovers X
    return TractVector(tract, n, tuple(conj_coords)).conj()


def circuits_from_wick(phi: WickFunction, level: str | None = "weak") -> SignatureFamily:
    """The signature C_phi.

    ``level`` is the Wick strength phi is validated at first; None skips the check
    and only requires the support to be an orthogonal matroid.
    """
    if level is not None:
        result = check_wick(phi, level)  # type: ignore[arg-type]
        if not result:
            raise SignatureError(f"not a {level} Wick function: {result.detail}")
    try:
        m = underlying_matroid(phi)
    except WickError as e:
        raise SignatureError(str(e)) from e
    vectors = []
    for c in m.circuits:
        t = extend_circuit_to_transversal(m, c)
        x = _circuit_vector(phi, c, t)
        others = [u for u in circuit_transversals(m, c) if u != t]
        if others and _circuit_vector(phi, c, others[0]).normalized() != x.normalized():
            raise SignatureError(
                f"circuit vector on {format_set(c, m.n)} depends on the transversal chosen")
        vectors.append(x)
    logger.debug("circuits_from_wick", tract=phi.tract.name, circuits=len(vectors))
    return SignatureFamily(phi.tract, phi.n, vectors, matroid=m)


def gamma(family: SignatureFamily, b1: int, b2: int) -> Element:
    """gamma(B1, B2) for adjacent bases; equals phi(B2) / phi(B1) for the matching phi."""
    m, tract, n = family.matroid, family.tract, family.n
    if b1 not in m.bases or b2 not in m.bases:
        raise SignatureError("gamma is defined on pairs of bases")
    if (b1 ^ b2).bit_count() != 4:
        raise SignatureError(f"{format_set(b1, n)} and {format_set(b2, n)} are not adjacent")
    p, q = elements((b1 ^ b2) & low_mask(n))
    e = next(bit for bit in elements(b1 & ~b2) if position(bit, n) == p)
    f = next(bit for bit in elements(b2 & ~b1) if position(bit, n) == q)
    t = (b1 & b2) | (1 << e) | (1 << f)
    x = family.vector(fundamental_circuit(m, b1, f)).conj()
    if x[e] == tract.zero or x[f] == tract.zero:
        raise SignatureError("fundamental circuit misses the exchanged elements")
    return tract.mul(tract.sign(interval_count(t, e, f, n)), tract.div(x[e], x[f]))


def wick_from_circuits(family: SignatureFamily) -> WickFunction:
    """The Wick function phi_C with phi = 1 at the first basis.

    Values spread along a breadth-first tree of the basis graph; every other edge is
    checked against gamma and a mismatch raises.
    """
    ot2 = check_signature_axiom(family, "Ot2")
    if not ot2:
        raise SignatureError(f"Ot2 fails: {ot2.detail}")
    m, tract, n = family.matroid, family.tract, family.n
    graph = basis_graph(m)
    if not nx.is_connected(graph):
        raise SignatureError("basis graph is not connected")
    root = m.sorted_bases[0]
    values = {root: tract.one}
    for parent, child in nx.bfs_edges(graph, root):
        values[child] = tract.mul(gamma(family, parent, child), values[parent])
    for u, v in graph.edges:
        if values[v] != tract.mul(gamma(family, u, v), values[u]):
            raise SignatureError(
                f"gamma is path dependent between {format_set(u, n)} and {format_set(v, n)}")
    return WickFunction(tract, n, values)


def gamma_cycle_products(family: SignatureFamily) -> CheckResult:
    """gamma multiplies to 1 around every 2-, 3- and 4-cycle of the basis graph."""
    m, tract, n = family.matroid, family.tract, family.n
    graph = basis_graph(m)
    for u, v in graph.edges:
        if tract.mul(gamma(family, u, v), gamma(family, v, u)) != tract.one:
            return CheckResult.failure("gamma cycles", "2-cycle", (u, v),
                                       f"{format_set(u, n)} <-> {format_set(v, n)}")
    for cycle in nx.simple_cycles(graph, length_bound=4):
        product = tract.one
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            product = tract.mul(product, gamma(family, a, b))
        if product != tract.one:
            detail = " -> ".join(format_set(b, n) for b in cycle)
            return CheckResult.failure("gamma cycles", f"{len(cycle)}-cycle", tuple(cycle), detail)
    return CheckResult.passed("gamma cycles")


def weak_circuit_to_weak_wick(family: SignatureFamily) -> WickFunction:
    """phi_C for a weak circuit set, validated on both ends."""
    result = check_circuit_set(family, "weak")
    if not result:
        raise SignatureError(f"not a weak circuit set: {result.detail}")
    phi = wick_from_circuits(family)
    out = check_wick(phi, "weak")
    if not out:
        raise SignatureError(f"phi_C is not weak: {out.detail}")
    return phi


def weak_wick_to_weak_circuit(phi: WickFunction) -> SignatureFamily:
    """C_phi for a weak Wick function, validated on both ends."""
    family = circuits_from_wick(phi, level="weak")
    out = check_circuit_set(family, "weak")
    if not out:
        raise SignatureError(f"C_phi is not a weak circuit set: {out.detail}")
    return family


def signature_dual(family: SignatureFamily) -> SignatureFamily:
    return SignatureFamily(family.tract, family.n, (x.starred() for x in family.reps),
                           matroid=dual(family.matroid))


def signature_minor(family: SignatureFamily, e: int) -> SignatureFamily:
    """C|e: vectors vanishing at the removed element's partner, projected, minimal supports."""
    m, n = family.matroid, family.n
    reduced = minor(m, e)
    applied = reduced.history[-1].applied
    partner, p = star_bit(applied, n), position(applied, n)
    kept = [x.project(p) for x in family.reps
            if x[partner] == family.tract.zero and x.support != 1 << applied]
    supports = {x.support for x in kept}
    minimal = [x for x in kept if not any(s != x.support and s & x.support == s for s in supports)]
    return SignatureFamily(family.tract, n - 1, minimal, matroid=reduced)


def signature_pushforward(f: TractHom, family: SignatureFamily) -> SignatureFamily:
    """f applied coordinatewise; f must commute with the involutions."""
    if f.source != family.tract:
        raise SignatureError(f"{f.name} does not start at {family.tract.name}")
    if not f.involution_compatible:
        raise SignatureError(f"{f.name} does not respect the involutions")
    return SignatureFamily(f.target, family.n, (x.map(f) for x in family.reps),
                           matroid=family.matroid)


def embedded_dual_pair(matroid: OrdinaryMatroid, tract: Tract,
                       circuit_vectors: Iterable[Sequence[Element]],
                       cocircuit_vectors: Iterable[Sequence[Element]]) -> SignatureFamily:
    """C1 u D1* on the lift: circuit vectors on [n], cocircuit vectors moved to [n]*."""
    n = matroid.n
    zeros = (tract.zero,) * n
    vectors = [TractVector.from_parts(tract, tuple(c), zeros) for c in circuit_vectors]
    vectors += [TractVector.from_parts(tract, zeros, tuple(d)) for d in cocircuit_vectors]
    return SignatureFamily(tract, n, vectors, matroid=lift(matroid))
