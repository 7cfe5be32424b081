"""
Named matroids, worked-example families and the acceptance runner.

The registries below are data, kept as TypedDict tables. ``CORPUS_PAIRS`` lists
the (matroid, tract) pairs used by the round-trip criterion; they are chosen so
that |F|^(2n) stays small enough to enumerate F^E quickly.
"""

import random
import time
from functools import cache
from typing import Callable, TypedDict

import structlog

from orthomat.config import settings
from orthomat.ground_set import enumerate_transversals, low_mask, parse_set, parse_transversal
from orthomat.models import AcceptanceOutcome
from orthomat.ortho_matroid import (
    OrthoMatroid,
    dual,
    k4_cycle_matroid,
    lift,
    m3,
    m4,
    twist,
    uniform_matroid,
)
from orthomat.represent import (
    is_regular,
    is_sixth_root_representable,
    r6_transport,
    search_representation,
    sign_of_second,
)
from orthomat.signature import (
    SignatureFamily,
    TractVector,
    check_circuit_set,
    check_signature_axiom,
    check_span_axiom,
    circuits_from_wick,
    embedded_dual_pair,
    gamma_cycle_products,
    signature_minor,
    signature_pushforward,
    wick_from_circuits,
)
from orthomat.tract_core import (
    FiniteField,
    Tract,
    canonical_hom,
    is_tract_hom,
    make_tract,
)
from orthomat.vector_set import (
    VectorFamily,
    check_vector_set,
    elementary_vectors,
    is_lagrangian,
    perp,
    signature_perp,
    vector_minor,
    vector_pushforward,
)
from orthomat.wick import (
    WickFunction,
    check_wick,
    equivalent,
    indicator,
    wick_relation_sum,
)

logger = structlog.get_logger()


class CorpusError(Exception):
    """Raised for unknown corpus names or a broken worked example."""
    pass


## Named matroids

class NamedMatroid(TypedDict, total=False):
    """A named orthogonal matroid."""
    build: Callable[[], OrthoMatroid]
    description: str


def census_matroid() -> OrthoMatroid:
    """Transversals of [5] u [5]* with |B n [5]| even, except 1*2345 and 12*345."""
    n, low = 5, low_mask(5)
    excluded = {parse_transversal("1* 2 3 4 5", n), parse_transversal("1 2* 3 4 5", n)}
    bases = [t for t in enumerate_transversals(n)
             if (t & low).bit_count() % 2 == 0 and t not in excluded]
    return OrthoMatroid(n, bases, name="census5")


NAMED_MATROIDS: dict[str, NamedMatroid] = {
    "M3": {"build": m3, "description": "bases abc* and [3]*"},
    "M4": {"build": m4, "description": "bases abcd* and a*b*c*d"},
    "lift(U1,3)": {"build": lambda: lift(uniform_matroid(1, 3)),
                   "description": "circuits 12, 13, 23, 1*2*3*"},
    "lift(U2,3)": {"build": lambda: lift(uniform_matroid(2, 3)),
                   "description": "lift of the triangle"},
    "lift(U2,4)": {"build": lambda: lift(uniform_matroid(2, 4)),
                   "description": "ternary and quaternary, not binary"},
    "lift(M(K4))": {"build": lambda: lift(k4_cycle_matroid()),
                    "description": "regular, n = 6"},
    "lift(U3,6)": {"build": lambda: lift(uniform_matroid(3, 6)),
                   "description": "weak but not moderate over ones(2,3)"},
    "lift(U4,8)": {"build": lambda: lift(uniform_matroid(4, 8)),
                   "description": "O' but not O over ones(2,3,4)"},
    "census5": {"build": census_matroid,
                "description": "K-vector set whose perp is larger than itself"},
    "eight4": {"build": lambda: eight_vector_family(make_tract("F5"), 1).matroid,
               "description": "bases [4], [4]* and ijk*l*"},
}


def named_matroid(name: str) -> OrthoMatroid:
    try:
        entry = NAMED_MATROIDS[name]
    except KeyError as e:
        raise CorpusError(f"unknown matroid {name!r}; known: {', '.join(NAMED_MATROIDS)}") from e
    return entry["build"]()


## Worked-example families

# Rows over 1,2,3,4 then 1*,2*,3*,4*; "x" stands for the parameter, "-x" for its negative
EIGHT_VECTORS: tuple[tuple[str, ...], ...] = (
    ("0", "1", "1", "1", "1", "0", "0", "0"),
    ("-1", "0", "1", "-1", "0", "1", "0", "0"),
    ("-1", "-1", "0", "1", "0", "0", "1", "0"),
    ("-1", "1", "-1", "0", "0", "0", "0", "1"),
    ("x", "0", "0", "0", "0", "1", "1", "1"),
    ("0", "x", "0", "0", "-1", "0", "1", "-1"),
    ("0", "0", "-x", "0", "1", "1", "0", "-1"),
    ("0", "0", "0", "-x", "1", "-1", "1", "0"),
)


def eight_vector_family(field: FiniteField, x: int) -> SignatureFamily:
    """The eight-vector signature on [4] u [4]*; x must avoid 0 and -3."""
    p = field.order
    if x % p == 0 or (x + 3) % p == 0:
        raise CorpusError(f"x = {x} is excluded over {field.name}")
    literal = {"0": 0, "1": 1, "-1": p - 1, "x": x % p, "-x": (-x) % p}
    vectors = [TractVector.of(field, [literal[v] for v in row]) for row in EIGHT_VECTORS]
    return SignatureFamily(field, 4, vectors)


def eight_vector_wick_table(field: FiniteField, x: int) -> dict[int, int]:
    """Expected phi: 1 on [4] and 1*23*4, -1 on the other ijk*l*, -x on [4]*."""
    p, n = field.order, 4
    m = eight_vector_family(field, x).matroid
    table = {}
    for b in m.bases:
        if b == low_mask(n) or b == parse_transversal("1* 2 3* 4", n):
            table[b] = 1
        elif b == low_mask(n) << n:
            table[b] = (-x) % p
        else:
            table[b] = p - 1
    return table


def unique_signature(m: OrthoMatroid, tract: Tract) -> SignatureFamily:
    """All-ones vectors on the circuits (the only signature over a trivial unit group)."""
    vectors = [TractVector(tract, m.n, tuple(tract.one if c >> bit & 1 else tract.zero
                                              for bit in range(2 * m.n)))
               for c in m.circuits]
    return SignatureFamily(tract, m.n, vectors, matroid=m)


def lift_u13_family(tract: Tract) -> SignatureFamily:
    """C = {(1,-1,0|000), (1,0,1|000), (0,1,1|000), (000|1,1,-1)} on lift(U1,3)."""
    one, neg, zero = tract.one, tract.epsilon, tract.zero
    circuits = [(one, neg, zero), (one, zero, one), (zero, one, one)]
    cocircuits = [(one, one, neg)]
    return embedded_dual_pair(uniform_matroid(1, 3), tract, circuits, cocircuits)


## Corpus pairs for the round-trip criterion

class CorpusPair(TypedDict, total=False):
    """One (matroid, tract) pair of the round-trip suite."""
    matroid: str
    tract: str


CORPUS_PAIRS: list[CorpusPair] = [
    {"matroid": "M3", "tract": "F2"},
    {"matroid": "M3", "tract": "U0"},
    {"matroid": "M4", "tract": "F3"},
    {"matroid": "M4", "tract": "S"},
    {"matroid": "M4", "tract": "K"},
    {"matroid": "lift(U1,3)", "tract": "F5"},
    {"matroid": "lift(U1,3)", "tract": "S"},
    {"matroid": "lift(U2,3)", "tract": "F4"},
    {"matroid": "lift(U2,4)", "tract": "F3"},
    {"matroid": "lift(U2,4)", "tract": "F4"},
    {"matroid": "lift(M(K4))", "tract": "F2"},
    {"matroid": "lift(M(K4))", "tract": "K"},
]

PARTIAL_FIELDS = ("F2", "F3", "F4", "F5", "U0")


@cache
def corpus_representations() -> list[tuple[str, str, WickFunction]]:
    """(matroid name, tract name, phi) for every corpus pair with a representation."""
    found = []
    for pair in CORPUS_PAIRS:
        m = named_matroid(pair["matroid"])
        result = search_representation(m, make_tract(pair["tract"]))
        if result.found:
            found.append((pair["matroid"], pair["tract"], result.wick))
    return found


def probe_candidates() -> list[tuple[str, OrthoMatroid]]:
    """Small matroids used by the M4 conjecture probe."""
    n4 = m4()
    return [
        ("M4", n4),
        ("M4 twisted at 1", twist(n4, parse_set("1 1*", 4, admissible=False))),
        ("dual M4", dual(n4)),
        ("lift(U2,4)", named_matroid("lift(U2,4)")),
        ("lift(M(K4))", named_matroid("lift(M(K4))")),
    ]


## Acceptance criteria. Each returns a list of failure messages (empty when it passes).

def _eight_vector_table() -> list[str]:
    failures = []
    n = 4
    t1, t2 = parse_transversal("1 2 3 4*", n), parse_transversal("1* 2* 3* 4", n)
    for name, x in (("F5", 1), ("F7", 2)):
        field = make_tract(name)
        phi = wick_from_circuits(eight_vector_family(field, x))
        if not equivalent(phi, WickFunction(field, 4, eight_vector_wick_table(field, x))):
            failures.append(f"{name}: phi differs from the expected table")
        total = wick_relation_sum(phi, t1, t2)
        if total.evaluate() != (-3 - x) % field.order or total.is_null():
            failures.append(f"{name}: relation sum is {total}")
    return failures


def _weak_not_moderate() -> list[str]:
    tract = make_tract("ones(2,3)")
    phi = indicator(named_matroid("lift(U3,6)"), tract)
    failures = []
    if not check_wick(phi, "weak"):
        failures.append("indicator is not weak")
    moderate = check_wick(phi, "moderate")
    t1 = parse_transversal("1 2 3 4 5* 6*", 6)
    t2 = parse_transversal("1* 2* 3* 4* 5 6", 6)
    if moderate or moderate.witness is None or moderate.witness[:2] != (t1, t2):
        failures.append(f"moderate witness is {moderate.detail}")
    elif moderate.witness[2].terms != ("1",) * 4:
        failures.append(f"moderate sum is {moderate.witness[2]}")
    return failures


def _o_prime_not_o() -> list[str]:
    m = named_matroid("lift(U4,8)")
    family = unique_signature(m, make_tract("ones(2,3,4)"))
    failures = []
    if not check_signature_axiom(family, "O'"):
        failures.append("O' fails")
    result = check_signature_axiom(family, "O")
    five = low_mask(5)
    if result or result.witness is None:
        failures.append("O holds")
    elif (result.witness[0].support, result.witness[1].support) != (five, five << 8):
        failures.append(f"O witness is {result.detail}")
    elif len(result.witness[2]) != 5:
        failures.append(f"O sum is {result.witness[2]}")
    return failures


def _eight_vector_axioms() -> list[str]:
    family = eight_vector_family(make_tract("F5"), 1)
    expected = {
        "Ot3": bool(check_signature_axiom(family, "Ot3")),
        "L1": bool(check_span_axiom(family, "L1")),
        "O'": not check_signature_axiom(family, "O'"),
        "L2": not check_span_axiom(family, "L2"),
    }
    return [f"{axiom} has the wrong outcome" for axiom, ok in expected.items() if not ok]


def _census() -> list[str]:
    m = named_matroid("census5")
    family = unique_signature(m, make_tract("K"))
    vectors = signature_perp(family)
    dual_vectors = perp(family.tract, family.n, vectors)
    got = (len(family), len(vectors), len(dual_vectors))
    return [] if got == (15, 256, 169) else [f"counts are {got}, expected (15, 256, 169)"]


def _representatives(vectors: VectorFamily) -> set[TractVector]:
    return set(vectors.representatives())


def _minor_of_vector_set() -> list[str]:
    tract = make_tract("U0")
    family = lift_u13_family(tract)
    vectors = signature_perp(family)
    minor_vectors, minor_check = vector_minor(vectors, 2)
    stated = {TractVector.of(tract, v).normalized()
              for v in ((1, -1, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0))}
    failures = []
    if minor_check or minor_check.failed != "V3":
        failures.append(f"V|3 should fail V3, got {minor_check.failed or 'ok'}")
    if _representatives(minor_vectors) != stated:
        failures.append("V|3 differs from the stated vectors")
    minor_circuits = signature_minor(family, 2)
    complement = perp(tract, 2, minor_circuits.all_vectors())
    extra = TractVector.of(tract, (1, 1, 0, 0))
    if _representatives(complement) != stated | {extra}:
        failures.append("(C|3)^perp is not V|3 plus (1,1,0,0)")
    return failures


def _pushforward_not_vector_set() -> list[str]:
    f2, k = make_tract("F2"), make_tract("K")
    family = lift_u13_family(f2)
    vectors = signature_perp(family)
    f = canonical_hom(f2, k)
    pushed_family = signature_pushforward(f, family)
    pushed_vectors = vector_pushforward(f, vectors)
    witness = TractVector.of(k, (1, 1, 1, 0, 0, 0))
    failures = []
    if TractVector.of(f2, (1, 1, 1, 0, 0, 0)) in vectors:
        failures.append("(1,1,1,0,0,0) is in V")
    if witness not in perp(k, 3, pushed_family.all_vectors()) or witness in pushed_vectors:
        failures.append("(1,1,1,0,0,0) is not in f(C)^perp - f(V)")
    if check_vector_set(pushed_vectors):
        failures.append("f(V) passes the vector set axioms")
    if set(elementary_vectors(pushed_vectors)) != set(pushed_family.all_vectors()):
        failures.append("Elem(f(V)) differs from f(C)")
    return failures


def round_trip_failures(matroid: str, tract: str, phi: WickFunction) -> list[str]:
    """Every cryptomorphism round trip for one representation."""
    label = f"{matroid}/{tract}"
    failures = []
    family = circuits_from_wick(phi, level="strong")
    back = wick_from_circuits(family)
    if not equivalent(back, phi):
        failures.append(f"{label}: phi_C_phi is not equivalent to phi")
    if circuits_from_wick(back, level="strong") != family:
        failures.append(f"{label}: C_phi_C differs from C")
    vectors = signature_perp(family)
    vector_check = check_vector_set(vectors)
    if not vector_check:
        failures.append(f"{label}: C^perp fails {vector_check.failed}: {vector_check.detail}")
    elementary = elementary_vectors(vectors)
    if set(elementary) != set(family.all_vectors()):
        failures.append(f"{label}: Elem(C^perp) differs from C")
    if perp(family.tract, family.n, elementary) != vectors:
        failures.append(f"{label}: perp(Elem(C^perp)) differs from C^perp")
    if bool(check_signature_axiom(family, "O")) != bool(check_circuit_set(family, "strong")):
        failures.append(f"{label}: O and L disagree")
    if not gamma_cycle_products(family):
        failures.append(f"{label}: gamma is not 1 around some cycle")
    return failures


def _round_trips() -> list[str]:
    found = corpus_representations()
    failures = [] if len(found) >= 10 else [f"only {len(found)} representations found"]
    for matroid, tract, phi in found:
        failures += round_trip_failures(matroid, tract, phi)
    return failures


def _regular_pipeline() -> list[str]:
    failures = []
    for name in ("M4", "lift(M(K4))"):
        report = is_regular(named_matroid(name))
        if not report.regular or not all(report.pushforwards.values()):
            failures.append(f"{name} is not verified regular")
    if is_regular(named_matroid("lift(U2,4)")).f2.found:
        failures.append("lift(U2,4) is representable over F2")
    return failures


def _sixth_root_pipeline() -> list[str]:
    failures = []
    transport = r6_transport()
    if not is_tract_hom(transport.source, transport.target, transport, 3):
        failures.append("F3 x F4 -> R6 breaks a null sum of three terms")
    report = is_sixth_root_representable(named_matroid("lift(U2,4)"), targets=True)
    if not report.representable:
        failures.append("lift(U2,4) is not R6-representable")
    pushed = {check.target: check.ok for check in report.targets}
    for target in ("F7", "F9:id"):
        if not pushed.get(target):
            failures.append(f"pushforward to {target} fails")
    return failures


def _lagrangian() -> list[str]:
    failures = []
    for matroid, tract, phi in corpus_representations():
        if tract not in ("F3", "F5"):
            continue
        vectors = signature_perp(circuits_from_wick(phi, level="strong"))
        if not is_lagrangian(phi.tract, vectors):
            failures.append(f"{matroid}/{tract}: C^perp is not Lagrangian")
    f2 = make_tract("F2")
    diagonal = VectorFamily(f2, 1, [TractVector.of(f2, (0, 0)), TractVector.of(f2, (1, 1))])
    if not is_lagrangian(f2, diagonal) or check_vector_set(diagonal):
        failures.append("{(x,x)} over F2 is not the expected counterexample")
    return failures


def perturb(phi: WickFunction, rng: random.Random) -> WickFunction:
    """Multiply one or two support values by random units; the support is unchanged."""
    tract = phi.tract
    values = dict(phi.values)
    for t in rng.sample(sorted(values), k=min(len(values), rng.choice((1, 2)))):
        values[t] = tract.mul(values[t], rng.choice(tract.units))
    return WickFunction(tract, phi.n, values, normalize=False)


def _weak_strong_agree() -> list[str]:
    entries = [(m, t, phi) for m, t, phi in corpus_representations() if t in PARTIAL_FIELDS]
    if not entries:
        return ["no partial field representations in the corpus"]
    rng = random.Random(settings.SEED)
    failures = []
    for k in range(settings.PERTURBATION_TRIALS):
        matroid, tract, phi = entries[k % len(entries)]
        candidate = perturb(phi, rng)
        weak, strong = check_wick(candidate, "weak"), check_wick(candidate, "strong")
        if bool(weak) != bool(strong):
            failures.append(f"{matroid}/{tract}: weak and strong disagree on trial {k}")
    return failures


def _zero_or_sign(source: Tract, target: Tract) -> Callable[[tuple], object]:
    return lambda pair: target.zero if pair == source.zero else sign_of_second(pair)


def _combining_maps_are_not_homs() -> list[str]:
    """The sign-combining maps of the regularity pipelines are not tract homomorphisms."""
    u0 = make_tract("U0")
    failures = []
    for second in ("F3", "S"):
        source = make_tract(f"product(F2,{second})")
        if is_tract_hom(source, u0, _zero_or_sign(source, u0)):
            failures.append(f"F2 x {second} -> U0 passes as a homomorphism")
    return failures


class Criterion(TypedDict, total=False):
    """One acceptance criterion."""
    run: Callable[[], list[str]]
    description: str


ACCEPTANCE: dict[str, Criterion] = {
    "eight-vector-table": {"run": _eight_vector_table,
                           "description": "phi_C of the eight-vector family and its failing sum"},
    "weak-not-moderate": {"run": _weak_not_moderate,
                          "description": "lift(U3,6) over ones(2,3)"},
    "o-prime-not-o": {"run": _o_prime_not_o, "description": "lift(U4,8) over ones(2,3,4)"},
    "eight-vector-axioms": {"run": _eight_vector_axioms,
                            "description": "Ot3 and L1 hold, O' and L2 fail"},
    "census": {"run": _census, "description": "15 circuits, |V| = 256, |V^perp| = 169 over K"},
    "vector-minor": {"run": _minor_of_vector_set, "description": "V|3 and (C|3)^perp over U0"},
    "vector-pushforward": {"run": _pushforward_not_vector_set,
                           "description": "f(V) over K is not a vector set"},
    "round-trips": {"run": _round_trips, "description": "cryptomorphisms on the corpus"},
    "regular": {"run": _regular_pipeline, "description": "F2 + F3 => U0"},
    "sixth-root": {"run": _sixth_root_pipeline, "description": "F3 + F4 => R6"},
    "lagrangian": {"run": _lagrangian, "description": "C^perp is Lagrangian over fields"},
    "weak-strong": {"run": _weak_strong_agree,
                    "description": "weak and strong agree over partial fields"},
    "combining-maps": {"run": _combining_maps_are_not_homs,
                       "description": "sign-combining maps are not homomorphisms"},
}


def run_acceptance(names: list[str] | None = None) -> list[AcceptanceOutcome]:
    """Run the acceptance criteria in order.

    Args:
        names: Criteria to run; all of them when None

    Returns:
        One AcceptanceOutcome per criterion

    Raises:
        CorpusError: If a name is unknown
    """
    selected = names or list(ACCEPTANCE)
    unknown = [n for n in selected if n not in ACCEPTANCE]
    if unknown:
        raise CorpusError(f"unknown criteria: {', '.join(unknown)}")
    outcomes = []
    for name in selected:
        start = time.perf_counter()
        try:
            failures = ACCEPTANCE[name]["run"]()
        except Exception as e:
            logger.error("criterion_error", criterion=name, error=str(e))
            failures = [f"{type(e).__name__}: {e}"]
        seconds = round(time.perf_counter() - start, 3)
        outcomes.append(AcceptanceOutcome(name=name, ok=not failures,
                                          detail="; ".join(failures), seconds=seconds))
        logger.info("criterion_complete", criterion=name, ok=not failures, seconds=seconds)
    return outcomes
