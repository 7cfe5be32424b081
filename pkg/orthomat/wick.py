"""Wick functions over tracts.

A Wick function assigns a tract element to every transversal of [n] u [n]*. It is
stored sparsely (zeros omitted) and, unless asked otherwise, normalized so that it
takes the value 1 at the first support transversal in ground_set order; equivalence
of Wick functions is then plain equality.

The three strengths of the Wick relations are checked by ``check_wick``:

    strong    every pair T1, T2
    moderate  pairs where at most four products are nonzero
    weak      pairs differing in exactly four positions

Also here: duality, minors, pushforward along tract homomorphisms, products, and
the bridge to Grassmann-Pluecker functions of ordinary matroids (lifts).
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from typing import Callable, Iterable, Literal, Mapping, Sequence

import structlog

from orthomat.config import settings
from orthomat.ground_set import (
    check_n,
    delete_position,
    differing_positions,
    flip,
    format_set,
    is_transversal,
    low_mask,
    position,
    star,
    star_bit,
    transversal_key,
)
from orthomat.models import CheckResult
from orthomat.ortho_matroid import MatroidError, OrthoMatroid, check_bases
from orthomat.tract_core import (
    Element,
    FiniteField,
    FormalSum,
    Tract,
    TractHom,
    product_tract,
)

logger = structlog.get_logger()

Level = Literal["strong", "moderate", "weak"]
LEVELS: tuple[str, ...] = ("strong", "moderate", "weak")


class WickError(Exception):
    """Raised for malformed Wick functions or operations on them."""
    pass


class WickFunction:
    """A map from transversals to a tract, zero outside ``values``."""

    def __init__(self, tract: Tract, n: int, values: Mapping[int, Element], *,
                 normalize: bool = True):
        self.tract = tract
        self.n = check_n(n)
        kept = {}
        for t, v in values.items():
            if not is_transversal(t, n):
                raise WickError(f"{format_set(t, n)} is not a transversal")
            if not tract.contains(v):
                raise WickError(f"{v!r} is not an element of {tract.name}")
            if v != tract.zero:
                kept[t] = v
        if not kept:
            raise WickError("a Wick function is not identically zero")
        if normalize:
            anchor = min(kept, key=lambda t: transversal_key(t, n))
            scale = tract.inv(kept[anchor])
            kept = {t: tract.mul(scale, v) for t, v in kept.items()}
        self.values = kept

    def __call__(self, t: int) -> Element:
        return self.values.get(t, self.tract.zero)

    @cached_property
    def support(self) -> frozenset[int]:
        return frozenset(self.values)

    @cached_property
    def anchor(self) -> int:
        """First support transversal in ground_set order."""
        return min(self.values, key=lambda t: transversal_key(t, self.n))

    @cached_property
    def neighbourhood(self) -> tuple[int, ...]:
        """Transversals one flip away from the support, in order.

        Only pairs drawn from here can carry a nonzero product in a Wick relation.
        """
        near = {flip(t, p, self.n) for t in self.values for p in range(self.n)}
        return tuple(sorted(near, key=lambda t: transversal_key(t, self.n)))

    def items(self) -> list[tuple[int, Element]]:
        return sorted(self.values.items(), key=lambda kv: transversal_key(kv[0], self.n))

    def scaled(self, c: Element) -> "WickFunction":
        return WickFunction(self.tract, self.n,
                            {t: self.tract.mul(c, v) for t, v in self.values.items()},
                            normalize=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WickFunction):
            return NotImplemented
        return self.tract == other.tract and self.n == other.n and self.values == other.values

    def __hash__(self) -> int:
        return hash((self.tract, self.n, frozenset(self.values.items())))

    def __repr__(self) -> str:
        return f"WickFunction({self.tract.name}, n={self.n}, support={len(self.values)})"


def wick_relation_sum(phi: WickFunction, t1: int, t2: int) -> FormalSum:
    """Sum over k of e^k phi(T1 sym-diff x_k) phi(T2 sym-diff x_k), k counted from 1."""
    tract, n = phi.tract, phi.n
    terms = []
    for k, x in enumerate(differing_positions(t1, t2, n), start=1):
        product = tract.mul(phi(flip(t1, x, n)), phi(flip(t2, x, n)))
        if product != tract.zero:
            terms.append(tract.mul(tract.sign(k), product))
    return FormalSum(tract, tuple(terms))


def _nonzero_products(phi: WickFunction, t1: int, t2: int, diff: Sequence[int]) -> int:
    n, values = phi.n, phi.values
    return sum(1 for x in diff if flip(t1, x, n) in values and flip(t2, x, n) in values)


def _relation_applies(phi: WickFunction, level: str, t1: int, t2: int) -> bool:
    diff = differing_positions(t1, t2, phi.n)
    if level == "weak":
        return len(diff) == 4
    if level == "moderate":
        return _nonzero_products(phi, t1, t2, diff) <= 4
    return True


def _scan(phi: WickFunction, level: str, rows: range) -> tuple[int, int, FormalSum] | None:
    near = phi.neighbourhood
    for i in rows:
        t1 = near[i]
        for t2 in near[i + 1:]:
            if not _relation_applies(phi, level, t1, t2):
                continue
            total = wick_relation_sum(phi, t1, t2)
            if not total.is_null():
                return t1, t2, total
    return None


def check_wick(phi: WickFunction, level: Level = "strong") -> CheckResult:
    """Check the Wick relations at the given strength.

    For moderate and weak the support must already be a basis family. The witness is
    the first failing (T1, T2) with T1 before T2 in transversal order.
    """
    if level not in LEVELS:
        raise WickError(f"unknown Wick level {level!r}")
    if level != "strong":
        bases = check_bases(phi.n, phi.support)
        if not bases:
            raise WickError(f"support is not an orthogonal matroid: {bases.detail}")

    rows = len(phi.neighbourhood)
    workers = max(1, settings.WORKERS)
    if workers == 1 or rows < 2 * workers:
        found = _scan(phi, level, range(rows))
    else:
        step = -(-rows // workers)
        chunks = [range(start, min(start + step, rows)) for start in range(0, rows, step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda rs: _scan(phi, level, rs), chunks))
        found = next((r for r in results if r is not None), None)

    check = f"wick {level}"
    if found is None:
        return CheckResult.passed(check)
    t1, t2, total = found
    n = phi.n
    detail = f"T1 = {format_set(t1, n)}, T2 = {format_set(t2, n)}, sum = {total}"
    logger.info("wick_check_failed", level=level, t1=format_set(t1, n), t2=format_set(t2, n))
    return CheckResult.failure(check, level, (t1, t2, total), detail)


def underlying_matroid(phi: WickFunction) -> OrthoMatroid:
    try:
        return OrthoMatroid(phi.n, phi.support)
    except MatroidError as e:
        raise WickError(f"support is not an orthogonal matroid: {e}") from e


def equivalent(phi: WickFunction, psi: WickFunction) -> bool:
    """psi = c * phi for a unit c."""
    if phi.tract != psi.tract or phi.n != psi.n or phi.support != psi.support:
        return False
    tract = phi.tract
    c = tract.div(psi(phi.anchor), phi(phi.anchor))
    return all(psi(t) == tract.mul(c, v) for t, v in phi.values.items())


def dual_wick(phi: WickFunction) -> WickFunction:
    """phi*(T) = phi(T*)."""
    return WickFunction(phi.tract, phi.n, {star(t, phi.n): v for t, v in phi.values.items()})


def wick_minor(phi: WickFunction, e: int) -> WickFunction:
    """(phi|e)(T) = phi(T + e), or phi(T + e*) when e is singular."""
    n = phi.n
    if not 0 <= e < 2 * n:
        raise WickError(f"element bit {e} outside the ground set")
    applied = e if any(t >> e & 1 for t in phi.values) else star_bit(e, n)
    p = position(e, n)
    values = {delete_position(t, p, n): v for t, v in phi.values.items() if t >> applied & 1}
    return WickFunction(phi.tract, n - 1, values)


def pushforward(f: TractHom, phi: WickFunction) -> WickFunction:
    """f . phi."""
    if f.source != phi.tract:
        raise WickError(f"{f.name} does not start at {phi.tract.name}")
    return WickFunction(f.target, phi.n, {t: f(v) for t, v in phi.values.items()})


def product_wick(phi1: WickFunction, phi2: WickFunction) -> WickFunction:
    """(phi1, phi2) over F1 x F2; both must have the same support."""
    if phi1.n != phi2.n or phi1.support != phi2.support:
        raise WickError("product needs Wick functions with the same underlying matroid")
    tract = product_tract(phi1.tract, phi2.tract)
    return WickFunction(tract, phi1.n, {t: (v, phi2(t)) for t, v in phi1.values.items()})


def indicator(m: OrthoMatroid, tract: Tract) -> WickFunction:
    """1 on the bases of M, 0 elsewhere."""
    return WickFunction(tract, m.n, {b: tract.one for b in m.bases})


def map_values(phi: WickFunction, target: Tract, fn: Callable[[Element], Element]) -> WickFunction:
    """Apply an arbitrary value map (not necessarily a homomorphism)."""
    return WickFunction(target, phi.n, {t: fn(v) for t, v in phi.values.items()})


def max_nonzero_products(phi: WickFunction) -> int:
    """Largest number of nonzero products in any four-position relation."""
    near, n = phi.neighbourhood, phi.n
    best = 0
    for i, t1 in enumerate(near):
        for t2 in near[i + 1:]:
            diff = differing_positions(t1, t2, n)
            if len(diff) == 4:
                best = max(best, _nonzero_products(phi, t1, t2, diff))
    return best


## Grassmann-Pluecker functions of rank r on [n] and the lift bijection

class GPFunction:
    """An alternating function on r-tuples of [n], stored on sorted tuples (0-based)."""

    def __init__(self, tract: Tract, n: int, r: int, values: Mapping[tuple[int, ...], Element]):
        self.tract, self.n, self.r = tract, n, r
        self.values = {}
        for args, v in values.items():
            key = tuple(args)
            if len(key) != r or list(key) != sorted(set(key)) or (key and not 0 <= key[-1] < n):
                raise WickError(f"GP keys must be increasing {r}-tuples over [{n}], got {key}")
            if v != tract.zero:
                self.values[key] = v
        if not self.values:
            raise WickError("a Grassmann-Pluecker function is not identically zero")

    def __call__(self, args: Sequence[int]) -> Element:
        if len(set(args)) != len(args):
            return self.tract.zero
        inversions = sum(1 for a, b in itertools.combinations(args, 2) if a > b)
        value = self.values.get(tuple(sorted(args)), self.tract.zero)
        return self.tract.mul(self.tract.sign(inversions), value)

    def equivalent(self, other: "GPFunction") -> bool:
        if (self.tract, self.n, self.r) != (other.tract, other.n, other.r):
            return False
        if set(self.values) != set(other.values):
            return False
        key = min(self.values)
        c = self.tract.div(other.values[key], self.values[key])
        return all(other.values[k] == self.tract.mul(c, v) for k, v in self.values.items())

    def __repr__(self) -> str:
        return f"GPFunction({self.tract.name}, n={self.n}, r={self.r})"


def from_gp(psi: GPFunction) -> WickFunction:
    """phi(B u ([n] - B)*) = psi(sorted B), zero off the lift."""
    n, low = psi.n, low_mask(psi.n)
    values = {}
    for args, v in psi.values.items():
        b = sum(1 << a for a in args)
        values[b | ((low & ~b) << n)] = v
    return WickFunction(psi.tract, n, values)


def to_gp(phi: WickFunction) -> GPFunction:
    """Inverse of from_gp; the support must be a lift."""
    n, low = phi.n, low_mask(phi.n)
    ranks = {(t & low).bit_count() for t in phi.values}
    if len(ranks) != 1:
        raise WickError("support is not the lift of a matroid")
    values = {}
    for t, v in phi.values.items():
        args = tuple(p for p in range(n) if t >> p & 1)
        values[args] = v
    return GPFunction(phi.tract, n, ranks.pop(), values)


def gp_from_matrix(field: FiniteField, rows: Sequence[Sequence[int]]) -> GPFunction:
    """Maximal minors of an r x n matrix over a finite field."""
    r = len(rows)
    n = len(rows[0]) if rows else 0
    if any(len(row) != n for row in rows):
        raise WickError("matrix rows have different lengths")
    values = {}
    for cols in itertools.combinations(range(n), r):
        det = 0
        for perm in itertools.permutations(range(r)):
            inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
            term = field.sign(inversions)
            for i in range(r):
                term = field.mul(term, rows[i][cols[perm[i]]])
            det = field.add(det, term)
        if det:
            values[cols] = det
    if not values:
        raise WickError("matrix does not have full row rank")
    return GPFunction(field, n, r, values)


def wick_from_table(tract: Tract, n: int, table: Iterable[tuple[int, Element]], *,
                    normalize: bool = True) -> WickFunction:
    """Build from (transversal, value) pairs, rejecting duplicates."""
    values: dict[int, Element] = {}
    for t, v in table:
        if t in values:
            raise WickError(f"transversal {format_set(t, n)} listed twice")
        values[t] = v
    return WickFunction(tract, n, values, normalize=normalize)

