"""Contract tests for the file formats and CLI output.

Whatever the CLI prints for a matroid, Wick function, signature or vector family must
parse back with the same parser that reads input files.
"""
import math
from fractions import Fraction

import pytest

from orthomat.formats import (
    format_vector_family,
    format_wick,
    parse_any,
    parse_signature,
    parse_vector_family,
    parse_wick,
    read_text,
)
from orthomat.signature import TractVector
from orthomat.tract_core import make_tract
from orthomat.vector_set import VectorFamily
from orthomat.wick import WickFunction

pytestmark = pytest.mark.contract


@pytest.mark.parametrize("descriptor,unit", [
    ("F3", 2),
    ("F4", 3),
    ("S", -1),
    ("U0", -1),
    ("R6", 1),
    ("T", Fraction(1, 2)),
    ("F7/3", 1),
    ("product(F3,F4)", (2, 3)),
    ("ones(2,3)", "1"),
])
def test_wick_text_round_trip(descriptor, unit):
    """Every tract's literals survive format then parse."""
    t = make_tract(descriptor)
    phi = WickFunction(t, 1, {0b01: t.one, 0b10: unit})
    text = format_wick(phi)
    assert text.splitlines()[0] == f"wick tract {descriptor} n 1"
    assert parse_wick(text) == phi


def test_tropical_vectors_round_trip():
    t = make_tract("T")
    x = TractVector.from_parts(t, (Fraction(0), math.inf), (Fraction(-3, 2), math.inf))
    family = VectorFamily(t, 2, [x])
    text = format_vector_family(family)
    assert text == "vectors tract T n 2\n(0,inf | -3/2,inf)\n"
    assert parse_vector_family(text) == family


def test_signature_lines(fixtures_dir):
    text = read_text(fixtures_dir / "lift_u13_f2.sig")
    family = parse_signature(text)
    assert str(family.reps[0]).startswith("(")
    assert all(" | " in str(x) for x in family.reps)


@pytest.mark.parametrize("verb,name", [
    ("dual", "m4.txt"),
    ("dual", "lift_u13_u0.sig"),
    ("dual", "weak_not_moderate.wick"),
    ("minor", "eight_f5.sig"),
    ("minor", "lift_u13.txt"),
    ("perp", "lift_u13_f2.sig"),
    ("circuits-to-wick", "eight_f5.sig"),
    ("lift", "u24.txt"),
])
def test_cli_output_parses(run_cli, fixtures_dir, verb, name):
    extra = ["--elem", "1*"] if verb == "minor" else []
    code, out, _ = run_cli(verb, *extra, fixtures_dir / name)
    assert code == 0
    parse_any(out)


def test_push_output_parses(run_cli, fixtures_dir):
    code, out, _ = run_cli("push", "--hom", "U0->F3", fixtures_dir / "lift_u13_u0.sig")
    assert code == 0
    family = parse_signature(out)
    assert family.tract.name == "F3"
    assert len(family) == 4


def test_failure_report_shape(run_cli, fixtures_dir):
    """FAIL line, then an indented witness in input syntax."""
    code, out, _ = run_cli("check-wick", "--level", "moderate",
                           fixtures_dir / "weak_not_moderate.wick")
    assert code == 1
    lines = out.splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("  ")


def test_kv_failure_record(run_cli, fixtures_dir):
    code, out, _ = run_cli("--format", "kv", "check-vectors", fixtures_dir / "diagonal_f2.vec")
    assert code == 1
    record = dict(line.split("=", 1) for line in out.splitlines())
    assert record["check"] == "vector set"
    assert record["ok"] == "no"
    assert record["failed"] == "V2"
    assert record["witness"]


def test_kv_search_record(run_cli, fixtures_dir):
    code, out, _ = run_cli("--format", "kv", "search-rep", "--tract", "F2",
                           fixtures_dir / "m3.txt")
    assert code == 0
    head = out.split("wick tract", 1)[0]
    record = dict(line.split("=", 1) for line in head.splitlines())
    assert record["tract"] == "F2"
    assert record["representable"] == "yes"
    assert record["level"] == "strong"
    assert int(record["nodes"]) >= 0
