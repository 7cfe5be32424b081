"""Tracts, formal sums and tract homomorphisms.

A tract is a multiplicative group with a zero, an involution and a "null set" of
formal sums (the sums that vanish). Fields, partial fields and hyperfields are all
tracts; the ones used here are built from a short descriptor string:

    K, S, T, I, U0, R6, F<q>[:id|:frob], F<q>/<k>, product(<d1>,<d2>), ones(<k>,...), custom:<file>

ones(2,3) is the tract ({1}, {1+1, 1+1+1}) with trivial unit group.
F<q>/<k> is the quotient hyperfield of F_q by its subgroup of order k.

Elements are plain hashable values so vectors and Wick functions can be tuples and
dicts keyed by them. The encoding per tract is documented on each class.
"""

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cache, cached_property
from typing import Any, Callable, Iterable, Mapping, Sequence

import structlog

from orthomat.config import settings
from orthomat.models import CheckResult

logger = structlog.get_logger()

Element = Any


class TractError(Exception):
    """Raised when a tract is malformed or an element does not belong to it."""
    pass


class HomError(Exception):
    """Raised when a map between tracts is not a tract homomorphism."""
    pass


class Tract:
    """Base class for tracts.

    Subclasses set ``name``, ``zero``, ``one``, ``epsilon`` and ``units`` (None when the
    unit group is infinite) and implement ``_mul``, ``inv``, ``conj`` and ``_null``.
    ``_null`` only ever sees nonzero terms.
    """

    name: str = "tract"
    zero: Element = 0
    one: Element = 1
    epsilon: Element = 1
    units: tuple | None = None
    null_bound: int | None = None
    involution_is_identity: bool = True

    @property
    def is_finite(self) -> bool:
        return self.units is not None

    @cached_property
    def elements(self) -> tuple:
        """Zero followed by the units, in a fixed order."""
        if self.units is None:
            raise TractError(f"{self.name} has infinitely many elements")
        return (self.zero, *self.units)

    @cached_property
    def _order_index(self) -> dict:
        return {x: i for i, x in enumerate(self.elements)}

    def contains(self, x: Element) -> bool:
        return x in self._order_index

    def is_unit(self, x: Element) -> bool:
        return x != self.zero and self.contains(x)

    def mul(self, a: Element, b: Element) -> Element:
        if a == self.zero or b == self.zero:
            return self.zero
        return self._mul(a, b)

    def _mul(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    def inv(self, a: Element) -> Element:
        raise NotImplementedError

    def div(self, a: Element, b: Element) -> Element:
        if b == self.zero:
            raise TractError(f"division by zero in {self.name}")
        return self.mul(a, self.inv(b))

    def neg(self, a: Element) -> Element:
        return self.mul(self.epsilon, a)

    def power(self, a: Element, k: int) -> Element:
        if k < 0:
            a, k = self.inv(a), -k
        result = self.one
        for _ in range(k):
            result = self.mul(result, a)
        return result

    def sign(self, k: int) -> Element:
        """epsilon ** k."""
        return self.epsilon if k % 2 else self.one

    def conj(self, a: Element) -> Element:
        return a

    def is_null(self, terms: Iterable[Element], *, check: bool = True) -> bool:
        """True iff the formal sum of ``terms`` lies in the null set.

        Zero terms are dropped. With ``check`` every term is validated first.
        """
        nonzero = [t for t in terms if t != self.zero]
        if check:
            for t in nonzero:
                if not self.contains(t):
                    raise TractError(f"{t!r} is not an element of {self.name}")
        if self.null_bound is not None and len(nonzero) > self.null_bound:
            raise TractError(
                f"{self.name} only knows null sums up to length {self.null_bound}, "
                f"got {len(nonzero)} terms"
            )
        return self._null(nonzero)

    def _null(self, terms: list) -> bool:
        raise NotImplementedError

    def parse_element(self, text: str) -> Element:
        raise NotImplementedError

    def format_element(self, x: Element) -> str:
        return str(x)

    def sort_key(self, x: Element) -> Any:
        return self._order_index[x]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Tract) and other.name == self.name

    def __hash__(self) -> int:
        return hash(self.name)

    def __repr__(self) -> str:
        return f"Tract({self.name})"


## Finite fields. Elements are table indices 0..q-1 (base-p coefficient digits for
## extensions), so the constants of the prime subfield keep their integer value.

class FiniteField(Tract):
    """Common additive interface of the finite fields."""

    order: int
    characteristic: int

    def add(self, a: int, b: int) -> int:
        raise NotImplementedError

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def contains(self, x: Element) -> bool:
        return isinstance(x, int) and not isinstance(x, bool) and 0 <= x < self.order

    def sort_key(self, x: Element) -> Any:
        return x

    def parse_element(self, text: str) -> int:
        try:
            value = int(text)
        except ValueError as e:
            raise TractError(f"bad {self.name} literal {text!r}") from e
        if -self.characteristic < value < 0:
            value %= self.characteristic
        if not 0 <= value < self.order:
            raise TractError(f"{self.name} literal out of range: {text}")
        return value


class PrimeField(FiniteField):
    """The field Z/p with the identity involution."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise TractError(f"{p} is not prime")
        self.name = f"F{p}"
        self.order = self.characteristic = p
        self.zero, self.one = 0, 1
        self.epsilon = p - 1 if p > 2 else 1
        self.units = tuple(range(1, p))

    def _mul(self, a: int, b: int) -> int:
        return (a * b) % self.order

    def inv(self, a: int) -> int:
        return pow(a, -1, self.order)

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.order

    def _null(self, terms: list) -> bool:
        return sum(terms) % self.order == 0


# Irreducible polynomials, coefficients from x^0 up
FIELD_MODULI: dict[int, tuple[int, int, tuple[int, ...]]] = {
    4: (2, 2, (1, 1, 1)),       # x^2 + x + 1
    8: (2, 3, (1, 1, 0, 1)),    # x^3 + x + 1
    9: (3, 2, (1, 0, 1)),       # x^2 + 1
}


class ExtensionField(FiniteField):
    """GF(p^k) from an explicit irreducible polynomial, with add/mul tables."""

    def __init__(self, q: int, involution: str):
        if q not in FIELD_MODULI:
            raise TractError(f"no table for F{q}")
        p, k, modulus = FIELD_MODULI[q]
        self.order, self.characteristic, self.degree = q, p, k
        self.involution = involution
        self.involution_is_identity = involution == "id"
        self.name = f"F{q}" if (q == 4 and involution == "frob") else f"F{q}:{involution}"
        self.zero, self.one = 0, 1
        self.epsilon = p - 1 if p > 2 else 1
        self.units = tuple(range(1, q))

        digits = [self._digits(x) for x in range(q)]
        self._add = [[self._number([(a + b) % p for a, b in zip(da, db)]) for db in digits]
                     for da in digits]
        self._mult = [[self._number(_poly_mul_mod(da, db, modulus, p)) for db in digits]
                      for da in digits]
        self._inv = {a: b for a in self.units for b in self.units if self._mult[a][b] == 1}
        self._frob = [self.power(x, p) if x else 0 for x in range(q)]

    def _digits(self, x: int) -> list[int]:
        out = []
        for _ in range(self.degree):
            x, d = divmod(x, self.characteristic)
            out.append(d)
        return out

    def _number(self, digits: Sequence[int]) -> int:
        return sum(d * self.characteristic**i for i, d in enumerate(digits))

    def _mul(self, a: int, b: int) -> int:
        return self._mult[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def conj(self, a: int) -> int:
        return a if self.involution_is_identity else self._frob[a]

    def _null(self, terms: list) -> bool:
        total = 0
        for t in terms:
            total = self._add[total][t]
        return total == 0


def _poly_mul_mod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int], p: int) -> list[int]:
    """Multiply two coefficient lists over Z/p and reduce by a monic modulus."""
    k = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for deg in range(len(prod) - 1, k - 1, -1):
        coef = prod[deg]
        if coef:
            for i, m in enumerate(modulus):
                prod[deg - k + i] = (prod[deg - k + i] - coef * m) % p
    return prod[:k]


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def finite_field(q: int, involution: str | None = None) -> FiniteField:
    """Return F_q. Extension fields other than F4 need an explicit involution."""
    if _is_prime(q):
        if involution not in (None, "id", "frob"):
            raise TractError(f"unknown involution {involution!r}")
        return PrimeField(q)
    if q in FIELD_MODULI:
        if involution is None:
            if q != 4:
                raise TractError(f"F{q} needs an explicit involution (F{q}:id or F{q}:frob)")
            involution = "frob"
        if involution not in ("id", "frob"):
            raise TractError(f"unknown involution {involution!r}")
        return ExtensionField(q, involution)
    base = next((p for p in range(2, q + 1) if q % p == 0), None)
    if base is not None and _is_prime(base) and _is_power_of(q, base):
        raise TractError(f"F{q}: extension fields are only tabulated up to q = 9")
    raise TractError(f"{q} is not a prime power")


def _is_power_of(q: int, p: int) -> bool:
    while q % p == 0:
        q //= p
    return q == 1


## Hyperfields and partial fields on {0, 1, -1}

class KrasnerHyperfield(Tract):
    """K: units {1}; a sum is null unless it has exactly one term."""

    name = "K"
    zero, one, epsilon = 0, 1, 1
    units = (1,)

    def _mul(self, a, b):
        return 1

    def inv(self, a):
        return 1

    def _null(self, terms):
        return len(terms) != 1

    def parse_element(self, text):
        if text.strip() not in ("0", "1"):
            raise TractError(f"bad K literal {text!r}")
        return int(text)


class _SignedUnits(Tract):
    """Shared plumbing for tracts whose units are {1, -1}."""

    zero, one, epsilon = 0, 1, -1
    units = (1, -1)

    def _mul(self, a, b):
        return a * b

    def inv(self, a):
        return a

    def parse_element(self, text):
        try:
            value = int(text)
        except ValueError as e:
            raise TractError(f"bad {self.name} literal {text!r}") from e
        if value not in (0, 1, -1):
            raise TractError(f"bad {self.name} literal {text!r}")
        return value


class SignHyperfield(_SignedUnits):
    """S: null iff empty or both signs occur."""

    name = "S"

    def _null(self, terms):
        return not terms or (1 in terms and -1 in terms)


class InitialTract(_SignedUnits):
    """I: the only nonempty null sum is 1 + (-1)."""

    name = "I"

    def _null(self, terms):
        return not terms or sorted(terms) == [-1, 1]


class RegularPartialField(_SignedUnits):
    """U0: units {1, -1} inside Z; null iff the integer sum is zero."""

    name = "U0"

    def _null(self, terms):
        return sum(terms) == 0


## Sixth roots of unity. Units are exponents k of z, zero is None; null sums are
## evaluated in Z[z] with z^2 = z - 1, as integer pairs a + b z.

ZETA_POWERS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))


class SixthRootTract(Tract):
    """R6: the partial field (<z>, Z[z]), z a primitive sixth root of unity."""

    name = "R6"
    zero, one, epsilon = None, 0, 3
    units = (0, 1, 2, 3, 4, 5)
    involution_is_identity = False

    def _mul(self, a, b):
        return (a + b) % 6

    def inv(self, a):
        return (-a) % 6

    def conj(self, a):
        return None if a is None else (-a) % 6

    def _null(self, terms):
        a = sum(ZETA_POWERS[t][0] for t in terms)
        b = sum(ZETA_POWERS[t][1] for t in terms)
        return a == 0 and b == 0

    def parse_element(self, text):
        text = text.strip()
        aliases = {"0": None, "1": 0, "-1": 3}
        if text in aliases:
            return aliases[text]
        match = re.fullmatch(r"z\^([0-5])", text)
        if not match:
            raise TractError(f"bad R6 literal {text!r}")
        return int(match.group(1))

    def format_element(self, x):
        return "0" if x is None else f"z^{x}"


## Tropical hyperfield: exact rationals with +inf as zero, multiplication is addition.

class TropicalHyperfield(Tract):
    """T: null iff empty or the minimum is attained at least twice."""

    name = "T"
    zero = math.inf
    one = Fraction(0)
    epsilon = Fraction(0)

    def contains(self, x):
        return x == math.inf or isinstance(x, (Fraction, int)) and not isinstance(x, bool)

    def mul(self, a, b):
        if a == math.inf or b == math.inf:
            return math.inf
        return Fraction(a) + Fraction(b)

    def inv(self, a):
        return -Fraction(a)

    def _null(self, terms):
        if not terms:
            return True
        low = min(terms)
        return sum(1 for t in terms if t == low) >= 2

    def parse_element(self, text):
        text = text.strip()
        if text == "inf":
            return math.inf
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise TractError(f"bad T literal {text!r}") from e

    def format_element(self, x):
        return "inf" if x == math.inf else str(x)

    def sort_key(self, x):
        return x


## Quotient hyperfields F/G of a finite field by a subgroup of its units. Units are
## exponents j of the coset g^j G for a fixed generator g, zero is None.

class QuotientHyperfield(Tract):
    """F/G: a sum of cosets is null iff some choice of representatives sums to zero."""

    def __init__(self, field: FiniteField, k: int):
        size = len(field.units)
        if k < 1 or size % k:
            raise TractError(f"{field.name} has no subgroup of order {k}")
        self.field, self.k = field, k
        self.name = f"{field.name}/{k}"
        self.modulus = size // k
        self.zero, self.one = None, 0
        self.units = tuple(range(self.modulus))
        g = _generator(field)
        self._rep = [field.power(g, j) for j in range(size)]
        self._log = {x: j for j, x in enumerate(self._rep)}
        self._group = [field.power(g, self.modulus * j) for j in range(k)]
        self.epsilon = self._log[field.epsilon] % self.modulus
        self.involution_is_identity = field.involution_is_identity

    def coset(self, x: Element) -> Element:
        """Class of a field element."""
        return None if x == self.field.zero else self._log[x] % self.modulus

    def _mul(self, a, b):
        return (a + b) % self.modulus

    def inv(self, a):
        return (-a) % self.modulus

    def conj(self, a):
        return None if a is None else self.coset(self.field.conj(self._rep[a]))

    def _null(self, terms):
        if not terms:
            return True
        field = self.field
        reachable = {self._rep[terms[0]]}
        for t in terms[1:]:
            x = self._rep[t]
            reachable = {field.add(s, field.mul(x, h)) for s in reachable for h in self._group}
        return field.zero in reachable

    def parse_element(self, text):
        text = text.strip()
        aliases = {"0": None, "1": 0, "-1": self.epsilon}
        if text in aliases:
            return aliases[text]
        match = re.fullmatch(r"g\^(\d+)", text)
        if not match or int(match.group(1)) >= self.modulus:
            raise TractError(f"bad {self.name} literal {text!r}")
        return int(match.group(1))

    def format_element(self, x):
        return "0" if x is None else f"g^{x}"


## Products

class ProductTract(Tract):
    """F1 x F2 with coordinate-wise multiplication; null iff both projections are null."""

    def __init__(self, first: Tract, second: Tract):
        self.first, self.second = first, second
        self.name = f"product({first.name},{second.name})"
        self.zero = (first.zero, second.zero)
        self.one = (first.one, second.one)
        self.epsilon = (first.epsilon, second.epsilon)
        self.units = (tuple(itertools.product(first.units, second.units))
                      if first.is_finite and second.is_finite else None)
        bounds = [b for b in (first.null_bound, second.null_bound) if b is not None]
        self.null_bound = min(bounds) if bounds else None
        self.involution_is_identity = first.involution_is_identity and second.involution_is_identity

    def contains(self, x):
        if not (isinstance(x, tuple) and len(x) == 2):
            return False
        if x == self.zero:
            return True
        return self.first.is_unit(x[0]) and self.second.is_unit(x[1])

    def _mul(self, a, b):
        return (self.first.mul(a[0], b[0]), self.second.mul(a[1], b[1]))

    def inv(self, a):
        return (self.first.inv(a[0]), self.second.inv(a[1]))

    def conj(self, a):
        return (self.first.conj(a[0]), self.second.conj(a[1]))

    def _null(self, terms):
        return (self.first.is_null([t[0] for t in terms], check=False)
                and self.second.is_null([t[1] for t in terms], check=False))

    def pair(self, a: Element, b: Element) -> Element:
        if (a == self.first.zero) != (b == self.second.zero):
            raise TractError(f"({a!r}, {b!r}) is not an element of {self.name}")
        return (a, b)

    def parse_element(self, text):
        if text.strip() == "0":
            return self.zero
        left, sep, right = text.partition("|")
        if not sep:
            raise TractError(f"bad {self.name} literal {text!r}, expected a|b")
        return self.pair(self.first.parse_element(left), self.second.parse_element(right))

    def format_element(self, x):
        if x == self.zero:
            return "0"
        return f"{self.first.format_element(x[0])}|{self.second.format_element(x[1])}"

    def sort_key(self, x):
        return (self.first.sort_key(x[0]), self.second.sort_key(x[1]))


def product_tract(first: Tract, second: Tract) -> ProductTract:
    """F1 x F2."""
    return ProductTract(first, second)


## Custom finite tracts with an explicit null list (labels are strings, "0" is zero)

class CustomTract(Tract):
    """A finite tract given by a Cayley table and an explicit list of null sums.

    With ``bound=None`` the list is the whole null set. With an integer bound the
    list is complete up to that length and longer queries raise TractError.
    """

    def __init__(self, name: str, units: Sequence[str], table: Sequence[Sequence[str]],
                 nulls: Iterable[Sequence[str]], bound: int | None = None,
                 involution: Mapping[str, str] | None = None):
        self.name = name
        self.zero = "0"
        self.units = tuple(units)
        self.null_bound = bound
        if "0" in self.units or len(set(self.units)) != len(self.units):
            raise TractError("custom units must be distinct and must not contain '0'")
        self._table = {(a, b): table[i][j] for i, a in enumerate(self.units)
                       for j, b in enumerate(self.units)}
        self._validate_group()
        self._index = {u: i for i, u in enumerate(self.units)}
        self._nulls = {self._key(s) for s in nulls if s}
        self._involution = dict(involution or {u: u for u in self.units})
        self.involution_is_identity = all(self._involution[u] == u for u in self.units)
        self.epsilon = self._validate_nulls()
        self._validate_involution()

    def _key(self, terms: Iterable[str]) -> tuple:
        terms = [t for t in terms if t != "0"]
        for t in terms:
            if t not in self._index:
                raise TractError(f"{t!r} is not a unit of {self.name}")
        return tuple(sorted(terms, key=self._index.__getitem__))

    def _validate_group(self) -> None:
        units = self.units
        for (a, b), c in self._table.items():
            if c not in units:
                raise TractError(f"{a}*{b} = {c} is not a unit")
            if self._table[(b, a)] != c:
                raise TractError(f"table is not commutative at {a}, {b}")
        ones = [e for e in units if all(self._table[(e, x)] == x for x in units)]
        if len(ones) != 1:
            raise TractError("table has no identity element")
        self.one = ones[0]
        for a, b, c in itertools.product(units, repeat=3):
            if self._table[(self._table[(a, b)], c)] != self._table[(a, self._table[(b, c)])]:
                raise TractError(f"table is not associative at {a}, {b}, {c}")
        self._inverse = {}
        for a in units:
            inverse = [b for b in units if self._table[(a, b)] == self.one]
            if not inverse:
                raise TractError(f"{a} has no inverse")
            self._inverse[a] = inverse[0]

    def _validate_nulls(self) -> Element:
        for s in self._nulls:
            if len(s) == 1:
                raise TractError(f"a single unit {s[0]} cannot be null")
            if self.null_bound is not None and len(s) > self.null_bound:
                raise TractError(f"null sum {'+'.join(s)} is longer than the bound")
            for g in self.units:
                if self._key(self._table[(g, t)] for t in s) not in self._nulls:
                    raise TractError(f"null set is not closed under scaling by {g}")
        eps = [u for u in self.units if self._key((self.one, u)) in self._nulls]
        if len(eps) != 1:
            raise TractError(f"need exactly one unit e with 1 + e null, found {len(eps)}")
        return eps[0]

    def _validate_involution(self) -> None:
        inv = self._involution
        for a in self.units:
            if inv.get(a) not in self.units or inv[inv[a]] != a:
                raise TractError("involution must be an order-two map on the units")
            for b in self.units:
                if inv[self._table[(a, b)]] != self._table[(inv[a], inv[b])]:
                    raise TractError("involution is not multiplicative")
        for s in self._nulls:
            if self._key(inv[t] for t in s) not in self._nulls:
                raise TractError("involution does not preserve the null set")

    @property
    def null_sums(self) -> list[tuple]:
        """The declared null sums, shortest first."""
        return sorted(self._nulls, key=lambda s: (len(s), s))

    def contains(self, x):
        return x == "0" or x in self._index

    def _mul(self, a, b):
        return self._table[(a, b)]

    def inv(self, a):
        return self._inverse[a]

    def conj(self, a):
        return a if a == "0" else self._involution[a]

    def _null(self, terms):
        return not terms or self._key(terms) in self._nulls

    def parse_element(self, text):
        text = text.strip()
        if not self.contains(text):
            raise TractError(f"bad {self.name} literal {text!r}")
        return text


def make_custom_tract(units: Sequence[str], table: Sequence[Sequence[str]],
                      nulls: Iterable[Sequence[str]], *, bound: int | None = None,
                      name: str = "custom", involution: Mapping[str, str] | None = None
                      ) -> CustomTract:
    """Build and validate a custom finite tract."""
    return CustomTract(name, units, table, nulls, bound, involution)


def trivial_group_tract(null_lengths: Iterable[int], *, name: str | None = None) -> CustomTract:
    """Tract ({1}, {1+...+1 of the given lengths}) with the trivial involution."""
    lengths = sorted(set(null_lengths))
    nulls = [["1"] * k for k in lengths]
    label = name or "ones(" + ",".join(str(k) for k in lengths) + ")"
    return make_custom_tract(["1"], [["1"]], nulls, name=label)


## Descriptors

BUILTIN_TRACTS: dict[str, Callable[[], Tract]] = {
    "K": KrasnerHyperfield,
    "S": SignHyperfield,
    "T": TropicalHyperfield,
    "I": InitialTract,
    "U0": RegularPartialField,
    "R6": SixthRootTract,
}


def make_tract(descriptor: str) -> Tract:
    """Build a tract from its descriptor."""
    descriptor = descriptor.strip()
    if descriptor.startswith("custom:"):
        from orthomat.formats import load_custom_tract
        return load_custom_tract(descriptor.removeprefix("custom:"))
    return _builtin_tract(descriptor)


@cache
def _builtin_tract(descriptor: str) -> Tract:
    if descriptor in BUILTIN_TRACTS:
        return BUILTIN_TRACTS[descriptor]()
    match = re.fullmatch(r"F(\d+)(?::(id|frob))?", descriptor)
    if match:
        return finite_field(int(match.group(1)), match.group(2))
    match = re.fullmatch(r"F(\d+)(?::(id|frob))?/(\d+)", descriptor)
    if match:
        field = finite_field(int(match.group(1)), match.group(2))
        return QuotientHyperfield(field, int(match.group(3)))
    match = re.fullmatch(r"ones\((\d+(?:,\d+)*)\)", descriptor)
    if match:
        return trivial_group_tract(int(k) for k in match.group(1).split(","))
    if descriptor.startswith("product(") and descriptor.endswith(")"):
        first, second = _split_pair(descriptor[len("product("):-1])
        return product_tract(make_tract(first), make_tract(second))
    raise TractError(f"unknown tract descriptor {descriptor!r}")


def _split_pair(inner: str) -> tuple[str, str]:
    depth = 0
    for i, ch in enumerate(inner):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return inner[:i], inner[i + 1:]
    raise TractError(f"product needs two descriptors: {inner!r}")


@dataclass(frozen=True)
class FormalSum:
    """A formal sum of nonzero tract elements (zeros are dropped on construction)."""

    tract: Tract
    terms: tuple

    @classmethod
    def of(cls, tract: Tract, terms: Iterable[Element]) -> "FormalSum":
        kept = []
        for t in terms:
            if not tract.contains(t):
                raise TractError(f"{t!r} is not an element of {tract.name}")
            if t != tract.zero:
                kept.append(t)
        return cls(tract, tuple(kept))

    def is_null(self) -> bool:
        return self.tract.is_null(self.terms, check=False)

    def evaluate(self) -> Element:
        """Field value of the sum (finite fields only)."""
        if not isinstance(self.tract, FiniteField):
            raise TractError(f"{self.tract.name} has no addition")
        total = 0
        for t in self.terms:
            total = self.tract.add(total, t)
        return total

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(self.tract.format_element(t) for t in self.terms)


def is_null(tract: Tract, s: FormalSum | Iterable[Element]) -> bool:
    """Null-set membership of a formal sum."""
    terms = s.terms if isinstance(s, FormalSum) else s
    return tract.is_null(terms)


## Homomorphisms

class TractHom:
    """A map between tracts, validated on construction.

    ``mapping`` is a dict or a callable on elements; zero is sent to zero when a dict
    leaves it out. Null preservation is checked on every multiset of units of length
    up to ``length`` (finite sources only).
    """

    def __init__(self, source: Tract, target: Tract,
                 mapping: Mapping[Element, Element] | Callable[[Element], Element], *,
                 name: str | None = None, validate: bool = True, length: int | None = None):
        self.source = source
        self.target = target
        self.name = name or f"{source.name}->{target.name}"
        if callable(mapping):
            self._fn = mapping
        else:
            table = dict(mapping)
            table.setdefault(source.zero, target.zero)
            self._fn = table.__getitem__
        if validate:
            result = is_tract_hom(source, target, self._fn, length)
            if not result:
                raise HomError(f"{self.name} is not a tract homomorphism: {result.detail}")

    def __call__(self, x: Element) -> Element:
        return self._fn(x)

    @cached_property
    def involution_compatible(self) -> bool:
        """map . conj == conj . map (checked on all units of a finite source)."""
        if not self.source.is_finite:
            return self.source.involution_is_identity and self.target.involution_is_identity
        return all(self.target.conj(self(x)) == self(self.source.conj(x))
                   for x in self.source.units)

    def table(self) -> dict:
        return {x: self(x) for x in self.source.elements}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TractHom):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.table() == other.table())

    def __hash__(self) -> int:
        return hash((self.source, self.target))

    def __repr__(self) -> str:
        return f"TractHom({self.name})"


def is_tract_hom(source: Tract, target: Tract, mapping: Callable[[Element], Element] | Mapping,
                 length: int | None = None) -> CheckResult:
    """Check the homomorphism conditions without raising."""
    fn = mapping if callable(mapping) else dict(mapping).get
    length = settings.HOM_CHECK_LENGTH if length is None else length
    check = f"hom {source.name}->{target.name}"
    if fn(source.zero) != target.zero:
        return CheckResult.failure(check, "zero", detail="0 is not sent to 0")
    if fn(source.one) != target.one:
        return CheckResult.failure(check, "one", detail="1 is not sent to 1")
    if not source.is_finite:
        return CheckResult.passed(check)
    for x in source.units:
        if not target.is_unit(fn(x)):
            return CheckResult.failure(check, "units", (x,),
                                       f"{source.format_element(x)} is not sent to a unit")
    for a, b in itertools.product(source.units, repeat=2):
        if fn(source.mul(a, b)) != target.mul(fn(a), fn(b)):
            return CheckResult.failure(
                check, "multiplicative", (a, b),
                f"f({source.format_element(a)}*{source.format_element(b)}) != f(a)*f(b)")
    for k in range(2, length + 1):
        if source.null_bound is not None and k > source.null_bound:
            break
        for combo in itertools.combinations_with_replacement(source.units, k):
            if not source.is_null(combo, check=False):
                continue
            image = [fn(x) for x in combo]
            if target.null_bound is not None and k > target.null_bound:
                continue
            if not target.is_null(image, check=False):
                detail = (f"{FormalSum(source, combo)} is null but "
                          f"{FormalSum(target, tuple(image))} is not")
                return CheckResult.failure(check, "null", (combo, tuple(image)), detail)
    return CheckResult.passed(check)


def identity_hom(tract: Tract) -> TractHom:
    return TractHom(tract, tract, lambda x: x, name=f"id:{tract.name}", validate=False)


def compose_hom(f: TractHom, g: TractHom) -> TractHom:
    """g . f, defined when f's target is g's source."""
    if f.target != g.source:
        raise HomError(f"cannot compose {f.name} with {g.name}: {f.target.name} != {g.source.name}")
    return TractHom(f.source, g.target, lambda x: g(f(x)), name=f"{f.name}|{g.name}",
                    validate=False)


def _generator(tract: Tract) -> Element:
    size = len(tract.units)
    for g in tract.units:
        x, order = g, 1
        while x != tract.one:
            x, order = tract.mul(x, g), order + 1
        if order == size:
            return g
    raise HomError(f"unit group of {tract.name} is not cyclic")


def find_homs(source: Tract, target: Tract, length: int | None = None) -> list[TractHom]:
    """All homomorphisms out of a finite tract with cyclic unit group."""
    if not (source.is_finite and target.is_finite):
        raise HomError("hom search needs finite tracts")
    g = _generator(source)
    size = len(source.units)
    found = []
    for h in target.units:
        if target.power(h, size) != target.one:
            continue
        table = {source.zero: target.zero}
        x, y = source.one, target.one
        for _ in range(size):
            table[x] = y
            x, y = source.mul(x, g), target.mul(y, h)
        if is_tract_hom(source, target, table, length):
            found.append(TractHom(source, target, table, validate=False))
    logger.debug("hom_search_complete", source=source.name, target=target.name, found=len(found))
    return found


def is_isomorphism(hom: TractHom, length: int | None = None) -> bool:
    """Bijective on units with a homomorphic inverse."""
    source, target = hom.source, hom.target
    if not (source.is_finite and target.is_finite) or len(source.units) != len(target.units):
        return False
    table = hom.table()
    if len(set(table.values())) != len(table):
        return False
    inverse = {v: k for k, v in table.items()}
    return bool(is_tract_hom(target, source, inverse, length))


def canonical_hom(source: Tract, target: Tract) -> TractHom:
    """The natural homomorphism between two tracts, when there is one."""
    if source == target:
        return identity_hom(source)
    if isinstance(target, KrasnerHyperfield):
        return TractHom(source, target, lambda x: 0 if x == source.zero else 1,
                        validate=source.is_finite)
    if isinstance(source, (InitialTract, RegularPartialField)):
        table = {0: target.zero, 1: target.one, -1: target.epsilon}
        return TractHom(source, target, table)
    if isinstance(source, SixthRootTract) and target.is_finite:
        for x in target.units:
            if target.is_null([target.mul(x, x), target.neg(x), target.one], check=False):
                table = {None: target.zero}
                table.update({k: target.power(x, k) for k in source.units})
                return TractHom(source, target, table)
        raise HomError(f"{target.name} has no root of x^2 - x + 1")
    if (isinstance(source, PrimeField) and isinstance(target, ExtensionField)
            and target.characteristic == source.order):
        return TractHom(source, target, lambda x: x)
    if isinstance(target, QuotientHyperfield) and source == target.field:
        return TractHom(source, target, target.coset, name=f"quot:{target.name}")
    if isinstance(source, ProductTract):
        if target == source.first:
            return TractHom(source, target, lambda x: x[0], name=f"pr1:{source.name}")
        if target == source.second:
            return TractHom(source, target, lambda x: x[1], name=f"pr2:{source.name}")
    raise HomError(f"no canonical homomorphism {source.name} -> {target.name}")


def _top_level(text: str, token: str) -> list[int]:
    """Offsets of ``token`` outside parentheses."""
    depth, found = 0, []
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(token, i):
            found.append(i)
    return found


def parse_hom(text: str) -> TractHom:
    """``<src>-><tgt>`` or ``<src>:<tgt>`` descriptor pair -> canonical homomorphism.

    Descriptors may contain colons themselves (``F9:id``), so the colon form uses the
    first split at which both halves are valid descriptors.
    """
    arrows = _top_level(text, "->")
    if arrows:
        i = arrows[0]
        return canonical_hom(make_tract(text[:i]), make_tract(text[i + 2:]))
    for i in _top_level(text, ":"):
        try:
            source, target = make_tract(text[:i]), make_tract(text[i + 1:])
        except (TractError, OSError):
            continue
        return canonical_hom(source, target)
    raise HomError(f"expected <src>-><tgt> or <src>:<tgt>, got {text!r}")
