"""orthomat command line.

Usage:
    python -m orthomat check-matroid m4.txt
    python -m orthomat check-wick --level moderate weak_not_moderate.txt
    python -m orthomat search-rep --tract F3 m4.txt
    python -m orthomat push --hom "F2->K" lift_u13_f2.sig
    python -m orthomat corpus-verify
    python -m orthomat --help

Exit codes: 0 when a check passes or an object was produced, 1 when a check fails
(the witness is printed in input syntax), 2 on usage, format or precondition errors.
Results go to stdout, logs to stderr.
"""

import argparse
import logging
import sys
from typing import Callable, Sequence

import structlog

from orthomat.config import settings
from orthomat.corpus import CorpusError, probe_candidates, run_acceptance
from orthomat.formats import (
    FormatError,
    detect_kind,
    format_kv,
    format_matroid,
    format_signature,
    format_vector_family,
    format_vectors,
    format_wick,
    parse_any,
    parse_matroid,
    parse_ordinary,
    parse_signature,
    parse_vector_family,
    parse_wick,
    read_text,
)
from orthomat.ground_set import GroundSetError, format_set, parse_element
from orthomat.models import CheckResult
from orthomat.ortho_matroid import (
    MatroidError,
    OrthoMatroid,
    check_bases,
    check_strong_exchange,
    contains_minor,
    dual,
    lift,
    m3,
    m4,
    minor,
)
from orthomat.represent import (
    SearchError,
    check_m4_free_theorem,
    is_regular,
    is_sixth_root_representable,
    probe_conjecture,
    search_representation,
)
from orthomat.signature import (
    AXIOMS,
    SignatureError,
    SignatureFamily,
    check_circuit_set,
    check_signature_axiom,
    check_span_axiom,
    circuits_from_wick,
    signature_dual,
    signature_minor,
    signature_pushforward,
    wick_from_circuits,
)
from orthomat.tract_core import HomError, TractError, make_tract, parse_hom
from orthomat.vector_set import (
    VectorFamily,
    VectorSetError,
    check_vector_set,
    elementary_vectors,
    perp,
    signature_perp,
    vector_minor,
    vector_pushforward,
)
from orthomat.wick import (
    LEVELS,
    WickError,
    WickFunction,
    check_wick,
    dual_wick,
    pushforward,
    wick_minor,
)

logger = structlog.get_logger()

INPUT_ERRORS = (FormatError, GroundSetError, MatroidError, TractError, HomError, WickError,
                SignatureError, VectorSetError, SearchError, CorpusError)

SPAN_AXIOMS = ("L", "L1", "L2")
CIRCUIT_LEVELS = ("circuit-strong", "circuit-weak")


def configure_logging(level: str, as_json: bool) -> None:
    """structlog on stderr, filtered at ``level``."""
    renderer = structlog.processors.JSONRenderer() if as_json else structlog.dev.ConsoleRenderer()
    numeric = logging.getLevelName(level.upper())
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            numeric if isinstance(numeric, int) else logging.WARNING),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def report_check(result: CheckResult, args: argparse.Namespace) -> int:
    """Print a check outcome; exit 0 on pass, 1 with the witness on failure."""
    if args.format == "kv":
        emit(format_kv({"check": result.check, "ok": result.ok, "failed": result.failed or "",
                        "witness": result.detail or ""}))
    elif result:
        emit(f"OK {result.check}")
    else:
        emit(f"FAIL {result.check} [{result.failed}]")
        if result.detail:
            emit(f"  {result.detail}")
    return 0 if result else 1


def report_representable(tract: str, found: bool, wick: WickFunction | None,
                         args: argparse.Namespace, extra: dict | None = None) -> int:
    record = {"tract": tract, "representable": found, **(extra or {})}
    if args.format == "kv":
        emit(format_kv(record))
    else:
        emit(f"REPRESENTABLE {tract} {'yes' if found else 'no'}")
    if wick is not None:
        emit(format_wick(wick))
    return 0 if found else 1


def _load(path: str) -> object:
    return parse_any(read_text(path))


def _yes_no(value: object) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)


## Verbs

def cmd_check_matroid(args: argparse.Namespace) -> int:
    m = parse_matroid(read_text(args.file), validate=False)
    result = check_bases(m.n, m.bases)
    if result and args.strong:
        result = check_strong_exchange(OrthoMatroid(m.n, m.bases, validate=False))
    return report_check(result, args)


def cmd_circuits(args: argparse.Namespace) -> int:
    m = parse_matroid(read_text(args.file))
    if args.format == "kv":
        emit(format_kv({"n": m.n, "bases": len(m.bases), "circuits": len(m.circuits)}))
    for c in m.circuits:
        emit(format_set(c, m.n))
    return 0


def cmd_check_wick(args: argparse.Namespace) -> int:
    return report_check(check_wick(parse_wick(read_text(args.file)), args.level), args)


def cmd_wick_to_circuits(args: argparse.Namespace) -> int:
    phi = parse_wick(read_text(args.file))
    level = None if args.level == "none" else args.level
    emit(format_signature(circuits_from_wick(phi, level=level)))
    return 0


def cmd_circuits_to_wick(args: argparse.Namespace) -> int:
    emit(format_wick(wick_from_circuits(parse_signature(read_text(args.file)))))
    return 0


def cmd_check_signature(args: argparse.Namespace) -> int:
    family = parse_signature(read_text(args.file))
    if args.axiom in SPAN_AXIOMS:
        result = check_span_axiom(family, args.axiom)
    elif args.axiom in CIRCUIT_LEVELS:
        result = check_circuit_set(family, args.axiom.removeprefix("circuit-"))
    else:
        result = check_signature_axiom(family, args.axiom)
    return report_check(result, args)


def cmd_dual(args: argparse.Namespace) -> int:
    obj = _load(args.file)
    if isinstance(obj, OrthoMatroid):
        emit(format_matroid(dual(obj)))
    elif isinstance(obj, WickFunction):
        emit(format_wick(dual_wick(obj)))
    elif isinstance(obj, SignatureFamily):
        emit(format_signature(signature_dual(obj)))
    else:
        raise FormatError(f"dual is not defined for {detect_kind(read_text(args.file))} files")
    return 0


def cmd_minor(args: argparse.Namespace) -> int:
    obj = _load(args.file)
    if isinstance(obj, OrthoMatroid):
        emit(format_matroid(minor(obj, parse_element(args.elem, obj.n))))
    elif isinstance(obj, WickFunction):
        emit(format_wick(wick_minor(obj, parse_element(args.elem, obj.n))))
    elif isinstance(obj, SignatureFamily):
        emit(format_signature(signature_minor(obj, parse_element(args.elem, obj.n))))
    elif isinstance(obj, VectorFamily):
        reduced, result = vector_minor(obj, parse_element(args.elem, obj.n))
        emit(format_vector_family(reduced))
        if not result:
            emit(f"# not a vector set [{result.failed}]: {result.detail}")
    else:
        raise FormatError(f"minor is not defined for {detect_kind(read_text(args.file))} files")
    return 0


def cmd_push(args: argparse.Namespace) -> int:
    f = parse_hom(args.hom)
    obj = _load(args.file)
    if isinstance(obj, WickFunction):
        emit(format_wick(pushforward(f, obj)))
    elif isinstance(obj, SignatureFamily):
        emit(format_signature(signature_pushforward(f, obj)))
    elif isinstance(obj, VectorFamily):
        emit(format_vector_family(vector_pushforward(f, obj)))
    else:
        raise FormatError(f"push is not defined for {detect_kind(read_text(args.file))} files")
    return 0


def cmd_perp(args: argparse.Namespace) -> int:
    obj = _load(args.file)
    if isinstance(obj, SignatureFamily):
        emit(format_vector_family(signature_perp(obj)))
    elif isinstance(obj, VectorFamily):
        emit(format_vector_family(perp(obj.tract, obj.n, obj)))
    else:
        raise FormatError("perp needs a signature or vectors file")
    return 0


def cmd_elem(args: argparse.Namespace) -> int:
    vectors = parse_vector_family(read_text(args.file))
    emit(format_vectors(vectors.tract, vectors.n, elementary_vectors(vectors)))
    return 0


def cmd_check_vectors(args: argparse.Namespace) -> int:
    return report_check(check_vector_set(parse_vector_family(read_text(args.file))), args)


def cmd_search_rep(args: argparse.Namespace) -> int:
    m = parse_matroid(read_text(args.file))
    result = search_representation(m, make_tract(args.tract), args.level)
    return report_representable(result.tract, result.found, result.wick, args,
                                {"level": result.level, "nodes": result.nodes_explored})


def cmd_is_regular(args: argparse.Namespace) -> int:
    m = parse_matroid(read_text(args.file))
    if args.m4_free:
        report = check_m4_free_theorem(m)
        if args.format != "kv":
            emit(f"# {report.note}")
        return report_representable("U0", report.regular, report.wick, args,
                                    {"applicable": report.applicable})
    regular = is_regular(m)
    extra = {f"push_{name}": ok for name, ok in regular.pushforwards.items()}
    code = report_representable("U0", regular.regular, regular.wick, args, extra)
    if args.format != "kv":
        for name, ok in regular.pushforwards.items():
            emit(f"PUSH {name} {'ok' if ok else 'FAIL'}")
    return code


def cmd_is_r6(args: argparse.Namespace) -> int:
    m = parse_matroid(read_text(args.file))
    report = is_sixth_root_representable(m, targets=args.targets)
    code = report_representable("R6", report.representable, None, args)
    for check in report.targets:
        line = f"PUSH {check.target} z={check.root} {'ok' if check.ok else 'FAIL'}"
        emit(f"push_{check.target}={'yes' if check.ok else 'no'}" if args.format == "kv" else line)
    if report.targets and args.format != "kv":
        emit("# sampled targets, not every admissible field")
    if report.wick is not None:
        emit(format_wick(report.wick))
    return code


def cmd_detect_minor(args: argparse.Namespace) -> int:
    m = parse_matroid(read_text(args.file))
    target = {"M3": m3, "M4": m4}[args.target]()
    found = contains_minor(m, target)
    if args.format == "kv":
        emit(format_kv({"target": args.target, "minor": found}))
    else:
        emit(f"MINOR {args.target} {'yes' if found else 'no'}")
    return 0 if found else 1


def cmd_lift(args: argparse.Namespace) -> int:
    emit(format_matroid(lift(parse_ordinary(read_text(args.file)))))
    return 0


def cmd_corpus_verify(args: argparse.Namespace) -> int:
    names = [n.strip() for n in args.only.split(",")] if args.only else None
    print("==> Running acceptance criteria", file=sys.stderr)
    outcomes = run_acceptance(names)
    for outcome in outcomes:
        if args.format == "kv":
            emit(format_kv({"criterion": outcome.name, "ok": outcome.ok,
                            "seconds": outcome.seconds, "detail": outcome.detail}))
        else:
            status = "PASS" if outcome.ok else "FAIL"
            line = f"{status} {outcome.name} ({outcome.seconds:.2f}s)"
            emit(line if outcome.ok else f"{line}: {outcome.detail}")
    passed = sum(o.ok for o in outcomes)
    print(f"==> {passed}/{len(outcomes)} criteria passed", file=sys.stderr)
    return 0 if passed == len(outcomes) else 1


def cmd_probe_conjecture(args: argparse.Namespace) -> int:
    candidates = ([(path, parse_matroid(read_text(path))) for path in args.files]
                  if args.files else probe_candidates())
    records = probe_conjecture(candidates)
    for record in records:
        fields = {"name": record.name, "m4_minor": record.has_m4_minor, "f2": record.over_f2,
                  "sign": record.over_sign, "regular": record.regular,
                  "counterexample": record.counterexample}
        emit(format_kv(fields) if args.format == "kv"
             else " ".join(f"{k}={_yes_no(v)}" for k, v in fields.items()))
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "check-matroid": cmd_check_matroid,
    "circuits": cmd_circuits,
    "check-wick": cmd_check_wick,
    "wick-to-circuits": cmd_wick_to_circuits,
    "circuits-to-wick": cmd_circuits_to_wick,
    "check-signature": cmd_check_signature,
    "dual": cmd_dual,
    "minor": cmd_minor,
    "push": cmd_push,
    "perp": cmd_perp,
    "elem": cmd_elem,
    "check-vectors": cmd_check_vectors,
    "search-rep": cmd_search_rep,
    "is-regular": cmd_is_regular,
    "is-r6": cmd_is_r6,
    "detect-minor": cmd_detect_minor,
    "lift": cmd_lift,
    "corpus-verify": cmd_corpus_verify,
    "probe-conjecture": cmd_probe_conjecture,
}


def build_parser() -> argparse.ArgumentParser:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        prog="orthomat",
        description="Orthogonal matroids, Wick functions and signatures over tracts"
    )
    parser.add_argument("--format", choices=("text", "kv"), default="text",
                        help="Report style; kv prints key=value lines")
    parser.add_argument("--seed", type=int, default=None,
                        help="Seed for randomised checks (default: SEED setting)")
    parser.add_argument("--log-level", default=None,
                        help="structlog level (default: LOG_LEVEL setting)")
    sub = parser.add_subparsers(dest="command", required=True)

    def verb(name: str, help_text: str, file: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        if file:
            p.add_argument("file", help="Input file")
        return p

    verb("check-matroid", "Check the symmetric exchange axiom").add_argument(
        "--strong", action="store_true", help="Also check strong exchange")
    verb("circuits", "List the circuits of an orthogonal matroid")
    verb("check-wick", "Check the Wick relations").add_argument(
        "--level", choices=LEVELS, default="strong", help="Relation strength")
    verb("wick-to-circuits", "Signature C_phi of a Wick function").add_argument(
        "--level", choices=(*LEVELS, "none"), default="weak",
        help="Validate phi at this level first (none skips it)")
    verb("circuits-to-wick", "Wick function phi_C of a signature")
    verb("check-signature", "Check an orthogonality or span axiom").add_argument(
        "--axiom", choices=(*AXIOMS, *SPAN_AXIOMS, *CIRCUIT_LEVELS), required=True,
        help="Axiom to check")
    verb("dual", "Dual of a matroid, Wick function or signature")
    verb("minor", "Elementary minor").add_argument(
        "--elem", required=True, help="Element, e.g. 3 or 3*")
    verb("push", "Pushforward along a tract homomorphism").add_argument(
        "--hom", required=True, help="src->tgt or src:tgt")
    verb("perp", "Orthogonal complement of a signature or vector family")
    verb("elem", "Elementary vectors of a vector family")
    verb("check-vectors", "Check the vector set axioms")
    p = verb("search-rep", "Search for a representation over a finite tract")
    p.add_argument("--tract", required=True, help="Tract descriptor")
    p.add_argument("--level", choices=LEVELS, default="strong", help="Wick level to verify")
    verb("is-regular", "Regularity through F2 and F3").add_argument(
        "--m4-free", action="store_true", help="Use F2 and S for matroids without an M4 minor")
    verb("is-r6", "Sixth-root representability through F3 and F4").add_argument(
        "--targets", action="store_true", help="Also push to sampled fields")
    verb("detect-minor", "Look for an M3 or M4 minor").add_argument(
        "--target", choices=("M3", "M4"), required=True, help="Minor to look for")
    verb("lift", "Lift of an ordinary matroid")
    verb("corpus-verify", "Run the acceptance suite", file=False).add_argument(
        "--only", default=None, help="Comma separated criteria")
    verb("probe-conjecture", "F2 and S against regularity on small matroids",
         file=False).add_argument("files", nargs="*", help="Matroid files (default: built-in)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run one verb and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_level or settings.LOG_LEVEL, settings.LOG_JSON)
    if args.seed is not None:
        settings.SEED = args.seed
    logger.debug("command_start", command=args.command, seed=settings.SEED)

    try:
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as e:
        logger.debug("command_error", command=args.command, error=str(e))
        print(f"Error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
