"""Combinatorics of the ground set E = [n] u [n]*.

Subsets of E are bitmasks: bit i-1 is the element i and bit n+i-1 is i*. A position
is the 0-based index p of the pair {p+1, (p+1)*}. Masks are plain ints, so every
helper here takes n explicitly.

Transversals are enumerated in a fixed order: position 1 is the most significant
choice and the unstarred element comes first, so for n = 2 the order is
12, 12*, 1*2, 1*2*. "T1 < T2" elsewhere in the package always refers to this order.
"""

import itertools
from typing import Iterator

from orthomat.config import settings


class GroundSetError(Exception):
    """Raised for a bad ground set size, element or subset."""
    pass


def check_n(n: int) -> int:
    if not 0 <= n <= settings.MAX_N:
        raise GroundSetError(f"n must be between 0 and {settings.MAX_N}, got {n}")
    return n


def low_mask(n: int) -> int:
    """Mask of the unstarred elements [n]."""
    return (1 << n) - 1


def full_mask(n: int) -> int:
    return (1 << 2 * n) - 1


def star(mask: int, n: int) -> int:
    """Swap the starred and unstarred halves."""
    low = low_mask(n)
    return ((mask & low) << n) | (mask >> n)


def sym_diff(a: int, b: int) -> int:
    return a ^ b


def is_admissible(mask: int, n: int) -> bool:
    return (mask & low_mask(n)) & (mask >> n) == 0


def is_transversal(mask: int, n: int) -> bool:
    return mask >> 2 * n == 0 and is_admissible(mask, n) and mask.bit_count() == n


def pair_mask(p: int, n: int) -> int:
    """Mask of the divergence {p+1, (p+1)*}."""
    return (1 << p) | (1 << (n + p))


def flip(mask: int, p: int, n: int) -> int:
    """mask sym-diff {p+1, (p+1)*}."""
    return mask ^ pair_mask(p, n)


def position(bit: int, n: int) -> int:
    return bit - n if bit >= n else bit


def is_starred(bit: int, n: int) -> bool:
    return bit >= n


def bit_of(p: int, starred: bool, n: int) -> int:
    return p + n if starred else p


def star_bit(bit: int, n: int) -> int:
    return bit - n if bit >= n else bit + n


def elements(mask: int) -> list[int]:
    """Set bits in increasing order (unstarred elements before starred ones)."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def least_element(mask: int) -> int:
    if not mask:
        raise GroundSetError("empty set has no least element")
    return (mask & -mask).bit_length() - 1


def positions(mask: int, n: int) -> list[int]:
    """Sorted positions touched by mask."""
    return sorted({position(b, n) for b in elements(mask)})


def differing_positions(t1: int, t2: int, n: int) -> list[int]:
    """Positions of (T1 sym-diff T2) n [n], ascending."""
    return elements((t1 ^ t2) & low_mask(n))


def divergences(mask: int, n: int) -> list[int]:
    """Positions p with both p+1 and (p+1)* in mask."""
    return elements((mask & low_mask(n)) & (mask >> n))


def interval_count(t: int, i: int, j: int, n: int) -> int:
    """|T n (|i|, |j|]| counting unstarred elements of T only.

    ``i`` and ``j`` are element bits; stars are dropped before forming the
    half-open integer interval, and the interval is oriented low to high.
    """
    lo, hi = sorted((position(i, n) + 1, position(j, n) + 1))
    window = ((1 << hi) - 1) ^ ((1 << lo) - 1)
    return (t & window).bit_count()


def enumerate_transversals(n: int) -> Iterator[int]:
    """All 2^n transversals in the package order."""
    check_n(n)
    for choice in itertools.product((False, True), repeat=n):
        yield sum(1 << bit_of(p, starred, n) for p, starred in enumerate(choice))


def transversal_key(t: int, n: int) -> int:
    """Rank of a transversal in the order of enumerate_transversals."""
    starred = t >> n
    key = 0
    for p in range(n):
        key = (key << 1) | ((starred >> p) & 1)
    return key


def enumerate_subtransversals(n: int) -> Iterator[int]:
    """All 3^n admissible sets, by increasing size and then by mask."""
    check_n(n)
    masks = []
    for choice in itertools.product((0, 1, 2), repeat=n):
        mask = 0
        for p, c in enumerate(choice):
            if c == 1:
                mask |= 1 << p
            elif c == 2:
                mask |= 1 << (n + p)
        masks.append(mask)
    masks.sort(key=lambda m: (m.bit_count(), m))
    yield from masks


def delete_position(mask: int, p: int, n: int) -> int:
    """Drop the pair at position p and shift later positions down (result lives on n-1)."""
    low, high = mask & low_mask(n), mask >> n
    below = (1 << p) - 1

    def squeeze(half: int) -> int:
        return (half & below) | ((half >> (p + 1)) << p)

    return squeeze(low) | (squeeze(high) << (n - 1))


def insert_position(mask: int, p: int, bit: int | None, n: int) -> int:
    """Inverse of delete_position on a set over n-1 positions.

    ``bit`` is the element (in the n-position numbering) to add at position p, or None
    to leave the new pair empty.
    """
    m = n - 1
    low, high = mask & low_mask(m), mask >> m
    below = (1 << p) - 1

    def spread(half: int) -> int:
        return (half & below) | ((half >> p) << (p + 1))

    out = spread(low) | (spread(high) << n)
    if bit is not None:
        if position(bit, n) != p:
            raise GroundSetError(f"element {format_element(bit, n)} is not at position {p + 1}")
        out |= 1 << bit
    return out


## Text syntax: "3" and "3*", sets as whitespace separated tokens

def parse_element(text: str, n: int) -> int:
    text = text.strip()
    starred = text.endswith("*")
    digits = text[:-1] if starred else text
    if not digits.isdigit():
        raise GroundSetError(f"bad element {text!r}")
    i = int(digits)
    if not 1 <= i <= n:
        raise GroundSetError(f"element {text} outside [{n}]")
    return bit_of(i - 1, starred, n)


def format_element(bit: int, n: int) -> str:
    return f"{position(bit, n) + 1}{'*' if is_starred(bit, n) else ''}"


def parse_set(text: str, n: int, *, admissible: bool = True) -> int:
    mask = 0
    for token in text.split():
        bit = parse_element(token, n)
        if mask >> bit & 1:
            raise GroundSetError(f"element {token} repeated")
        mask |= 1 << bit
    if admissible and not is_admissible(mask, n):
        raise GroundSetError(f"{text!r} is not admissible")
    return mask


def format_set(mask: int, n: int) -> str:
    """Elements ordered by position, e.g. ``1 2* 3``; the empty set prints as ``{}``."""
    if not mask:
        return "{}"
    bits = sorted(elements(mask), key=lambda b: (position(b, n), is_starred(b, n)))
    return " ".join(format_element(b, n) for b in bits)


def parse_transversal(text: str, n: int) -> int:
    mask = parse_set(text, n)
    if mask.bit_count() != n:
        raise GroundSetError(f"{text!r} is not a transversal of [{n}] u [{n}]*")
    return mask
