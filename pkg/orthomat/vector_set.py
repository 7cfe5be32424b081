"""Orthogonal F-vector sets.

Vector families are materialized sets of TractVector and only exist for finite
tracts; anything that has to walk F^E refuses once |F|^(2n) passes
``settings.MAX_ENUMERATION``. For the tropical hyperfield only membership style
questions (``is_orthogonal``, ``is_consistent``) are available.
"""

import itertools
import random
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Iterator, Sequence

import structlog

from orthomat.config import settings
from orthomat.ground_set import (
    check_n,
    elements,
    enumerate_transversals,
    format_element,
    format_set,
    is_admissible,
    position,
    star,
    star_bit,
)
from orthomat.models import CheckResult
from orthomat.signature import (
    SignatureFamily,
    TractVector,
    fundamental_vectors,
    in_span,
    star_product,
)
from orthomat.tract_core import Element, FiniteField, Tract, TractHom

logger = structlog.get_logger()


class VectorSetError(Exception):
    """Raised for operations a vector family cannot support."""
    pass


class SizeLimitError(VectorSetError):
    """Raised when F^E is too large to enumerate."""
    pass


def _vector_key(x: TractVector) -> tuple:
    return (x.support.bit_count(), x.support, tuple(x.tract.sort_key(v) for v in x.coords))


class VectorFamily:
    """A finite set of vectors in F^E."""

    def __init__(self, tract: Tract, n: int, vectors: Iterable[TractVector]):
        self.tract = tract
        self.n = check_n(n)
        kept = frozenset(vectors)
        for x in kept:
            if x.tract != tract or x.n != n:
                raise VectorSetError(f"vector {x} does not live in {tract.name}^E for n = {n}")
        self.vectors = kept

    def __contains__(self, x: object) -> bool:
        return x in self.vectors

    def __iter__(self) -> Iterator[TractVector]:
        return iter(sorted(self.vectors, key=_vector_key))

    def __len__(self) -> int:
        return len(self.vectors)

    def nonzero(self) -> list[TractVector]:
        return [x for x in self if not x.is_zero()]

    def representatives(self) -> list[TractVector]:
        """One vector per scaling class of nonzero vectors."""
        return sorted({x.normalized() for x in self.vectors if not x.is_zero()}, key=_vector_key)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorFamily):
            return NotImplemented
        return self.tract == other.tract and self.n == other.n and self.vectors == other.vectors

    def __hash__(self) -> int:
        return hash((self.tract, self.n, self.vectors))

    def __repr__(self) -> str:
        return f"VectorFamily({self.tract.name}, n={self.n}, vectors={len(self.vectors)})"


def check_enumerable(tract: Tract, n: int) -> None:
    if not tract.is_finite:
        raise VectorSetError(f"{tract.name} is infinite; vector families cannot be enumerated")
    size = len(tract.elements) ** (2 * n)
    if size > settings.MAX_ENUMERATION:
        raise SizeLimitError(
            f"|{tract.name}|^{2 * n} = {size} exceeds MAX_ENUMERATION = {settings.MAX_ENUMERATION}")


def all_vectors(tract: Tract, n: int) -> VectorFamily:
    """F^E, the complement of the empty family."""
    check_enumerable(tract, n)
    return VectorFamily(tract, n, (TractVector(tract, n, c)
                                   for c in itertools.product(tract.elements, repeat=2 * n)))


def is_orthogonal(x: TractVector, generators: Iterable[TractVector]) -> bool:
    """<X, Y*> is null for every generator Y."""
    return all(star_product(x.tract, x, y).is_null() for y in generators)


def _perp_scan(tract: Tract, n: int, generators: Sequence[TractVector],
               first: Sequence[Element]) -> list[TractVector]:
    width = 2 * n
    conj_gens = [y.conj() for y in generators]
    # generator j can be checked once the last coordinate of supp(Y_j)* is assigned
    ready: dict[int, list[int]] = {i: [] for i in range(width)}
    for j, y in enumerate(generators):
        touched = elements(star(y.support, n))
        if touched:
            ready[touched[-1]].append(j)
    coords: list = []
    found = []

    def ok(j: int) -> bool:
        y = conj_gens[j]
        terms = []
        for i in elements(star(generators[j].support, n)):
            xi = coords[i] if i < n else tract.conj(coords[i])
            terms.append(tract.mul(xi, y[star_bit(i, n)]))
        return tract.is_null(terms, check=False)

    def extend(i: int) -> None:
        if i == width:
            found.append(TractVector(tract, n, tuple(coords)))
            return
        for v in (first if i == 0 else tract.elements):
            coords.append(v)
            if all(ok(j) for j in ready[i]):
                extend(i + 1)
            coords.pop()

    if n == 0:
        return [TractVector(tract, 0, ())]
    extend(0)
    return found


def perp(tract: Tract, n: int, generators: Iterable[TractVector]) -> VectorFamily:
    """W^perp = {X : <X, Y*> null for all Y in W}, by filtered enumeration of F^E."""
    check_enumerable(tract, n)
    gens = list(generators)
    for y in gens:
        if y.tract != tract or y.n != n:
            raise VectorSetError(f"generator {y} does not live in {tract.name}^E for n = {n}")
    values = list(tract.elements)
    workers = max(1, settings.WORKERS)
    if workers == 1 or n == 0:
        found = _perp_scan(tract, n, gens, values)
    else:
        step = -(-len(values) // workers)
        chunks = [values[k:k + step] for k in range(0, len(values), step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda vs: _perp_scan(tract, n, gens, vs), chunks))
        found = [x for part in parts for x in part]
    logger.debug("perp_computed", tract=tract.name, n=n, generators=len(gens), size=len(found))
    return VectorFamily(tract, n, found)


def signature_perp(family: SignatureFamily) -> VectorFamily:
    """C^perp taken against every scalar multiple of the representatives."""
    return perp(family.tract, family.n, family.all_vectors())


def elementary_vectors(vectors: VectorFamily) -> list[TractVector]:
    """Nonzero vectors of minimal support whose support is admissible."""
    supports = {x.support for x in vectors.vectors if not x.is_zero()}
    minimal = {s for s in supports if not any(t != s and t & s == t for t in supports)}
    return [x for x in vectors
            if x.support in minimal and is_admissible(x.support, vectors.n)]


def support_bases(vectors: VectorFamily) -> list[int]:
    """Transversals containing the support of no nonzero vector."""
    supports = {x.support for x in vectors.vectors if not x.is_zero()}
    return [t for t in enumerate_transversals(vectors.n)
            if not any(s & t == s for s in supports)]


def fundamental_circuit_form(vectors: VectorFamily, b: int) -> list[TractVector]:
    """X_{B,e} for each e outside B: supp inside B sym-diff {e, e*} and X(e) = 1."""
    n, tract = vectors.n, vectors.tract
    out = []
    for e in elements(star(b, n)):
        allowed = (b | (1 << e)) & ~(1 << star_bit(e, n))
        match = next((x for x in vectors if x[e] == tract.one and x.support & allowed == x.support),
                     None)
        if match is None:
            raise VectorSetError(
                f"no fundamental circuit vector for B = {format_set(b, n)}, "
                f"e = {format_element(e, n)}")
        out.append(match)
    return out


def span_set(tract: Tract, n: int, b: int, form: Sequence[TractVector]) -> VectorFamily:
    """Every X with conj(X) in the span of the conj(X_{B,e}).

    Coordinate e of conj(X_{B,e'}) is 1 when e = e' and 0 otherwise, so the coefficient
    of X_{B,e} is conj(X)(e); the coordinates on B are then any value that closes the
    null sum.
    """
    outside = elements(star(b, n))
    inside = elements(b)
    conj_form = [x.conj() for x in form]
    eps = tract.epsilon
    found = []
    for coeffs in itertools.product(tract.elements, repeat=len(outside)):
        choices: list[list[Element]] = [[] for _ in range(2 * n)]
        for e, c in zip(outside, coeffs):
            choices[e] = [c]
        for j in inside:
            partial = [tract.mul(c, g[j]) for c, g in zip(coeffs, conj_form)]
            choices[j] = [v for v in tract.elements
                          if tract.is_null([*partial, tract.mul(eps, v)], check=False)]
        for conj_coords in itertools.product(*choices):
            found.append(TractVector(tract, n, tuple(conj_coords)).conj())
    return VectorFamily(tract, n, found)


def check_vector_set(vectors: VectorFamily) -> CheckResult:
    """V1, V2 and V3 by enumeration. Tags: V1, V2, V3."""
    tract, n = vectors.tract, vectors.n
    check = "vector set"
    elementary = elementary_vectors(vectors)
    for x, y in itertools.product(elementary, repeat=2):
        if (x.support & star(y.support, n)).bit_count() > 2:
            continue
        total = star_product(tract, x, y)
        if not total.is_null():
            return CheckResult.failure(check, "V1", (x, y, total),
                                       f"X = {x}, Y = {y}, <X,Y*> = {total}")
    bases = support_bases(vectors)
    if not bases:
        return CheckResult.failure(check, "V2", None, "no support basis")
    forms = {}
    for b in bases:
        try:
            forms[b] = fundamental_circuit_form(vectors, b)
        except VectorSetError as e:
            return CheckResult.failure(check, "V2", (b,), str(e))
    # V3: the vectors are the X whose conj is spanned at every support basis.
    common: frozenset[TractVector] | None = None
    for b in bases:
        spanned = span_set(tract, n, b, forms[b]).vectors
        missing = sorted(vectors.vectors - spanned, key=_vector_key)
        if missing:
            return CheckResult.failure(check, "V3", (b, missing[0]),
                                       f"B = {format_set(b, n)}, X = {missing[0]} "
                                       "present but not spanned")
        common = spanned if common is None else common & spanned
    extra = sorted((common or frozenset()) - vectors.vectors, key=_vector_key)
    if extra:
        return CheckResult.failure(check, "V3", (None, extra[0]),
                                   f"X = {extra[0]} spanned at every support basis but missing")
    return CheckResult.passed(check)


def vector_minor(vectors: VectorFamily, e: int) -> tuple[VectorFamily, CheckResult]:
    """V|e = projections of the vectors vanishing at e*, with its vector set check."""
    n = vectors.n
    if not 0 <= e < 2 * n:
        raise VectorSetError(f"element bit {e} outside the ground set")
    partner, p = star_bit(e, n), position(e, n)
    zero = vectors.tract.zero
    reduced = VectorFamily(vectors.tract, n - 1,
                           (x.project(p) for x in vectors.vectors if x[partner] == zero))
    return reduced, check_vector_set(reduced)


def vector_pushforward(f: TractHom, vectors: VectorFamily) -> VectorFamily:
    if f.source != vectors.tract:
        raise VectorSetError(f"{f.name} does not start at {vectors.tract.name}")
    return VectorFamily(f.target, vectors.n, (x.map(f) for x in vectors.vectors))


def is_consistent(family: SignatureFamily, x: TractVector) -> bool:
    """conj(X) lies in the span of the fundamental circuit vectors at every basis."""
    return all(in_span(family.tract, x, list(fundamental_vectors(family, b).values()))
               for b in family.matroid.sorted_bases)


## Linear algebra over finite fields

def _add(field: FiniteField, x: TractVector, y: TractVector) -> TractVector:
    return TractVector(field, x.n, tuple(field.add(a, b) for a, b in zip(x.coords, y.coords)))


def _times(field: FiniteField, c: Element, x: TractVector) -> TractVector:
    return TractVector(field, x.n, tuple(field.mul(c, v) for v in x.coords))


def _form(field: FiniteField, x: TractVector, y: TractVector) -> Element:
    return star_product(field, x, y).evaluate()


def subspace_span(field: FiniteField, n: int, generators: Iterable[TractVector]) -> VectorFamily:
    """All linear combinations of the generators."""
    span = {TractVector.zero(field, n)}
    for g in generators:
        multiples = [_times(field, c, g) for c in field.elements]
        span = {_add(field, s, m) for s in span for m in multiples}
    return VectorFamily(field, n, span)


def is_lagrangian(field: FiniteField, vectors: VectorFamily) -> bool:
    """A subspace of dimension n on which <X, Y*> vanishes."""
    if not isinstance(field, FiniteField) or vectors.tract != field:
        raise VectorSetError("Lagrangian subspaces need a finite field")
    n, members = vectors.n, vectors.vectors
    if len(members) != field.order ** n or TractVector.zero(field, n) not in members:
        return False
    for x in members:
        if any(_times(field, c, x) not in members for c in field.units):
            return False
    for x, y in itertools.product(members, repeat=2):
        if _add(field, x, y) not in members or _form(field, x, y) != field.zero:
            return False
    return True


def random_lagrangian(field: FiniteField, n: int, rng: random.Random | None = None,
                      attempts: int = 10_000) -> VectorFamily:
    """A Lagrangian subspace grown one isotropic vector at a time."""
    rng = rng or random.Random(settings.SEED)
    basis: list[TractVector] = []
    span = subspace_span(field, n, basis)
    values = list(field.elements)
    for _ in range(attempts):
        if len(basis) == n:
            logger.debug("random_lagrangian", field=field.name, n=n)
            return span
        x = TractVector(field, n, tuple(rng.choice(values) for _ in range(2 * n)))
        if x in span or _form(field, x, x) != field.zero:
            continue
        if any(_form(field, x, y) != field.zero for y in basis):
            continue
        basis.append(x)
        span = subspace_span(field, n, basis)
    raise VectorSetError(f"no Lagrangian found over {field.name} after {attempts} draws")
