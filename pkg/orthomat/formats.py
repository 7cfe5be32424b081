"""
Text file formats for matroids, Wick functions, signatures, vector families and
custom tracts.

Every format is line oriented with a one-line header; blank lines and lines starting
with ``#`` are ignored. Everything the CLI writes re-parses to an equal object.

    n <n>                                   orthogonal matroid, one basis per line
    matroid n <n> r <r>                     ordinary matroid on [n], one basis per line
    wick tract <descriptor> n <n>           lines "<transversal> <element>"
    signature tract <descriptor> n <n>      lines "(v1,...,vn | v1*,...,vn*)"
    vectors tract <descriptor> n <n>        same vector syntax

A custom tract file lists its units, one multiplication row per unit, optional
involution pairs ("involution a b"), the null sums and an optional length bound.
The sign hyperfield restricted to sums of at most three terms reads:

    units 1 m
    row 1 1 m
    row m m 1
    null 1 m
    null 1 1 m
    null 1 m m
    bound 3
"""

import re
from pathlib import Path
from typing import Iterable, Mapping

import structlog

from orthomat.ground_set import GroundSetError, format_set, parse_set, parse_transversal
from orthomat.ortho_matroid import MatroidError, OrdinaryMatroid, OrthoMatroid
from orthomat.signature import SignatureError, SignatureFamily, TractVector
from orthomat.tract_core import CustomTract, Tract, TractError, make_custom_tract, make_tract
from orthomat.vector_set import VectorFamily, VectorSetError
from orthomat.wick import WickError, WickFunction

logger = structlog.get_logger()

KINDS = ("matroid", "ordinary", "wick", "signature", "vectors")


class FormatError(Exception):
    """Raised when a file does not follow its format."""
    pass


def _lines(text: str) -> list[tuple[int, str]]:
    """Numbered content lines, comments and blanks dropped."""
    out = []
    for k, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append((k, line))
    return out


def read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}") from e


def detect_kind(text: str) -> str:
    """Kind of object a file holds, from its header line.

    Args:
        text: File contents

    Returns:
        One of "matroid", "ordinary", "wick", "signature", "vectors"

    Raises:
        FormatError: If the header is missing or unknown
    """
    lines = _lines(text)
    if not lines:
        raise FormatError("empty file")
    head = lines[0][1].split()[0]
    kind = {"n": "matroid", "matroid": "ordinary"}.get(head, head)
    if kind not in KINDS:
        raise FormatError(f"line {lines[0][0]}: unknown header {lines[0][1]!r}")
    return kind


def _header(text: str, pattern: str, example: str) -> tuple[re.Match, list[tuple[int, str]]]:
    lines = _lines(text)
    if not lines:
        raise FormatError("empty file")
    k, head = lines[0]
    match = re.fullmatch(pattern, head)
    if not match:
        raise FormatError(f"line {k}: expected header {example!r}, got {head!r}")
    return match, lines[1:]


def _tract_header(text: str, kind: str) -> tuple[Tract, int, list[tuple[int, str]]]:
    match, body = _header(text, rf"{kind}\s+tract\s+(\S+)\s+n\s+(\d+)",
                          f"{kind} tract <descriptor> n <n>")
    try:
        tract = make_tract(match.group(1))
    except TractError as e:
        raise FormatError(f"header: {e}") from e
    return tract, int(match.group(2)), body


## Orthogonal and ordinary matroids

def parse_matroid(text: str, *, validate: bool = True) -> OrthoMatroid:
    """Parse an orthogonal matroid file.

    Args:
        text: File contents
        validate: Check symmetric exchange; off for files that are about to be checked

    Raises:
        FormatError: On a bad header or basis line, or when validating and the bases
            fail the symmetric exchange axiom
    """
    match, body = _header(text, r"n\s+(\d+)", "n <n>")
    n = int(match.group(1))
    bases = []
    for k, line in body:
        try:
            bases.append(parse_transversal(line, n))
        except GroundSetError as e:
            raise FormatError(f"line {k}: {e}") from e
    try:
        return OrthoMatroid(n, bases, validate=validate)
    except MatroidError as e:
        raise FormatError(str(e)) from e


def format_matroid(m: OrthoMatroid) -> str:
    return "\n".join([f"n {m.n}", *m.format_bases()]) + "\n"


def parse_ordinary(text: str) -> OrdinaryMatroid:
    match, body = _header(text, r"matroid\s+n\s+(\d+)\s+r\s+(\d+)", "matroid n <n> r <r>")
    n, r = int(match.group(1)), int(match.group(2))
    bases = []
    for k, line in body:
        try:
            mask = parse_set(line, n)
        except GroundSetError as e:
            raise FormatError(f"line {k}: {e}") from e
        if mask >> n or mask.bit_count() != r:
            raise FormatError(f"line {k}: a basis is {r} unstarred elements, got {line!r}")
        bases.append(mask)
    try:
        return OrdinaryMatroid(n, bases)
    except MatroidError as e:
        raise FormatError(str(e)) from e


def format_ordinary(matroid: OrdinaryMatroid) -> str:
    n = matroid.n
    rows = [format_set(b, n) for b in sorted(matroid.bases)]
    return "\n".join([f"matroid n {n} r {matroid.rank}", *rows]) + "\n"


## Wick functions

def parse_wick(text: str) -> WickFunction:
    """Parse a Wick function file; values are normalized to 1 at the first support transversal."""
    tract, n, body = _tract_header(text, "wick")
    values = {}
    for k, line in body:
        *tokens, literal = line.split()
        try:
            t = parse_transversal(" ".join(tokens), n)
            values[t] = tract.parse_element(literal)
        except (GroundSetError, TractError) as e:
            raise FormatError(f"line {k}: {e}") from e
    try:
        return WickFunction(tract, n, values)
    except WickError as e:
        raise FormatError(str(e)) from e


def format_wick(phi: WickFunction) -> str:
    rows = [f"{format_set(t, phi.n)} {phi.tract.format_element(v)}" for t, v in phi.items()]
    return "\n".join([f"wick tract {phi.tract.name} n {phi.n}", *rows]) + "\n"


## Vectors

def parse_vector(text: str, tract: Tract, n: int) -> TractVector:
    """``(v1,...,vn | v1*,...,vn*)``; the bar needs whitespace on both sides."""
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise FormatError(f"vector must be parenthesized: {text!r}")
    inner = text[1:-1]
    parts = re.split(r"\s+\|\s+", f" {inner} ")
    if len(parts) != 2:
        raise FormatError(f"vector needs one ' | ' between its halves: {text!r}")
    halves = []
    for part in parts:
        tokens = [tok.strip() for tok in part.split(",")] if part.strip() else []
        if len(tokens) != n:
            raise FormatError(f"each half needs {n} coordinates: {text!r}")
        try:
            halves.append([tract.parse_element(tok) for tok in tokens])
        except TractError as e:
            raise FormatError(str(e)) from e
    return TractVector.from_parts(tract, halves[0], halves[1])


def _parse_vectors(text: str, kind: str) -> tuple[Tract, int, list[TractVector]]:
    tract, n, body = _tract_header(text, kind)
    vectors = []
    for k, line in body:
        try:
            vectors.append(parse_vector(line, tract, n))
        except (FormatError, SignatureError) as e:
            raise FormatError(f"line {k}: {e}") from e
    return tract, n, vectors


def parse_signature(text: str) -> SignatureFamily:
    """Parse a signature file; each line is one representative F-circuit."""
    tract, n, vectors = _parse_vectors(text, "signature")
    try:
        return SignatureFamily(tract, n, vectors)
    except SignatureError as e:
        raise FormatError(str(e)) from e


def format_signature(family: SignatureFamily) -> str:
    header = f"signature tract {family.tract.name} n {family.n}"
    return "\n".join([header, *(str(x) for x in family.reps)]) + "\n"


def parse_vector_family(text: str) -> VectorFamily:
    tract, n, vectors = _parse_vectors(text, "vectors")
    try:
        return VectorFamily(tract, n, vectors)
    except VectorSetError as e:
        raise FormatError(str(e)) from e


def format_vector_family(vectors: VectorFamily) -> str:
    header = f"vectors tract {vectors.tract.name} n {vectors.n}"
    return "\n".join([header, *(str(x) for x in vectors)]) + "\n"


def format_vectors(tract: Tract, n: int, vectors: Iterable[TractVector]) -> str:
    """A plain list of vectors under a ``vectors`` header."""
    return "\n".join([f"vectors tract {tract.name} n {n}", *(str(x) for x in vectors)]) + "\n"


def parse_any(text: str) -> object:
    """Dispatch on the header."""
    kind = detect_kind(text)
    parser = {
        "matroid": parse_matroid,
        "ordinary": parse_ordinary,
        "wick": parse_wick,
        "signature": parse_signature,
        "vectors": parse_vector_family,
    }[kind]
    return parser(text)


def format_any(obj: object) -> str:
    if isinstance(obj, OrthoMatroid):
        return format_matroid(obj)
    if isinstance(obj, OrdinaryMatroid):
        return format_ordinary(obj)
    if isinstance(obj, WickFunction):
        return format_wick(obj)
    if isinstance(obj, SignatureFamily):
        return format_signature(obj)
    if isinstance(obj, VectorFamily):
        return format_vector_family(obj)
    raise FormatError(f"no file format for {type(obj).__name__}")


## Custom tracts

def parse_custom_tract(text: str, name: str = "custom") -> CustomTract:
    """Parse a custom tract description (see the module docstring).

    Args:
        text: File contents
        name: Name given to the tract; ``load_custom_tract`` uses ``custom:<path>``
            so the name is also a descriptor

    Returns:
        The validated tract

    Raises:
        FormatError: On unknown keywords, a missing row, or a tract that fails
            validation
    """
    units: list[str] = []
    rows: dict[str, list[str]] = {}
    involution: dict[str, str] = {}
    nulls: list[list[str]] = []
    bound = None
    for k, line in _lines(text):
        keyword, *rest = line.split()
        if keyword == "units":
            units = rest
        elif keyword == "row" and rest:
            rows[rest[0]] = rest[1:]
        elif keyword == "involution" and len(rest) == 2:
            involution[rest[0]] = rest[1]
            involution[rest[1]] = rest[0]
        elif keyword == "null":
            nulls.append(rest)
        elif keyword == "bound" and len(rest) == 1 and rest[0].isdigit():
            bound = int(rest[0])
        else:
            raise FormatError(f"line {k}: cannot read {line!r}")
    if not units:
        raise FormatError("custom tract needs a units line")
    missing = [u for u in units if u not in rows]
    if missing:
        raise FormatError(f"no multiplication row for {', '.join(missing)}")
    try:
        return make_custom_tract(units, [rows[u] for u in units], nulls, bound=bound, name=name,
                                 involution=involution or None)
    except TractError as e:
        raise FormatError(str(e)) from e


def load_custom_tract(path: str) -> CustomTract:
    return parse_custom_tract(read_text(path), name=f"custom:{path}")


def format_custom_tract(tract: CustomTract) -> str:
    units = list(tract.units)
    lines = ["units " + " ".join(units)]
    for u in units:
        lines.append("row " + " ".join([u, *(tract.mul(u, v) for v in units)]))
    for u in units:
        image = tract.conj(u)
        if image != u and units.index(u) < units.index(image):
            lines.append(f"involution {u} {image}")
    for terms in tract.null_sums:
        lines.append("null " + " ".join(terms))
    if tract.null_bound is not None:
        lines.append(f"bound {tract.null_bound}")
    return "\n".join(lines) + "\n"


## Key-value output

def format_kv(record: Mapping[str, object]) -> str:
    """``key=value`` lines, in insertion order."""
    out = []
    for key, value in record.items():
        if isinstance(value, bool):
            value = "yes" if value else "no"
        out.append(f"{key}={value}")
    return "\n".join(out) + "\n"
