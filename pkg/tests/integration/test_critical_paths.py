"""Integration tests for the main CLI paths.

Each test runs one verb in-process against the fixture files and checks the exit code
and what lands on stdout.
"""
import pytest

from orthomat.formats import parse_matroid, parse_signature, parse_wick, read_text
from orthomat.ortho_matroid import m3, m4
from orthomat.wick import check_wick

pytestmark = pytest.mark.integration


def test_check_matroid_ok(run_cli, fixtures_dir):
    code, out, _ = run_cli("check-matroid", fixtures_dir / "m4.txt")
    assert code == 0
    assert out == "OK bases\n"


def test_check_matroid_strong(run_cli, fixtures_dir):
    code, out, _ = run_cli("check-matroid", "--strong", fixtures_dir / "m3.txt")
    assert code == 0
    assert out == "OK strong exchange\n"


def test_check_matroid_reports_witness(run_cli, fixtures_dir):
    """A failed exchange names the pair and the divergence in input syntax."""
    code, out, _ = run_cli("check-matroid", fixtures_dir / "bad_exchange.txt")
    assert code == 1
    first, detail = out.splitlines()
    assert first == "FAIL bases [exchange]"
    assert "divergence 1 1*" in detail


def test_circuits_of_lift_u13(run_cli, fixtures_dir):
    code, out, _ = run_cli("circuits", fixtures_dir / "lift_u13.txt")
    assert code == 0
    assert out.splitlines() == ["1 2", "1 3", "2 3", "1* 2* 3*"]


def test_check_wick_levels(run_cli, fixtures_dir):
    path = fixtures_dir / "weak_not_moderate.wick"
    code, out, _ = run_cli("check-wick", "--level", "weak", path)
    assert (code, out) == (0, "OK wick weak\n")
    code, out, _ = run_cli("check-wick", "--level", "moderate", path)
    assert code == 1
    assert out.startswith("FAIL wick moderate [moderate]")


def test_signature_wick_round_trip(run_cli, fixtures_dir, tmp_path):
    """circuits-to-wick then wick-to-circuits gives the U0 family back."""
    sig = fixtures_dir / "lift_u13_u0.sig"
    code, out, _ = run_cli("circuits-to-wick", sig)
    assert code == 0
    wick_file = tmp_path / "phi.wick"
    wick_file.write_text(out)
    code, out, _ = run_cli("wick-to-circuits", "--level", "strong", wick_file)
    assert code == 0
    assert parse_signature(out) == parse_signature(read_text(sig))


@pytest.mark.parametrize("axiom,check", [
    ("O", "O"),
    ("L", "L"),
    ("circuit-weak", "circuit set weak"),
])
def test_check_signature(run_cli, fixtures_dir, axiom, check):
    code, out, _ = run_cli("check-signature", "--axiom", axiom, fixtures_dir / "lift_u13_u0.sig")
    assert code == 0
    assert out == f"OK {check}\n"


def test_dual_and_minor(run_cli, fixtures_dir):
    code, out, _ = run_cli("dual", fixtures_dir / "m4.txt")
    assert code == 0
    assert parse_matroid(out) == m4()
    code, out, _ = run_cli("minor", "--elem", "4", fixtures_dir / "m4.txt")
    assert code == 0
    assert parse_matroid(out) == m3()


def test_push_signature_to_k(run_cli, fixtures_dir):
    code, out, _ = run_cli("push", "--hom", "F2->K", fixtures_dir / "lift_u13_f2.sig")
    assert code == 0
    assert out.splitlines()[0] == "signature tract K n 3"


def test_perp_of_signature(run_cli, fixtures_dir):
    code, out, _ = run_cli("perp", fixtures_dir / "lift_u13_f2.sig")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "vectors tract F2 n 3"
    assert len(lines) == 9


def test_check_vectors_diagonal(run_cli, fixtures_dir):
    code, out, _ = run_cli("check-vectors", fixtures_dir / "diagonal_f2.vec")
    assert code == 1
    assert out.startswith("FAIL vector set [V2]")


def test_elementary_vectors(run_cli, fixtures_dir):
    code, out, _ = run_cli("elem", fixtures_dir / "diagonal_f2.vec")
    assert code == 0
    assert out.splitlines()[0] == "vectors tract F2 n 1"


def test_search_rep_found(run_cli, fixtures_dir):
    code, out, _ = run_cli("search-rep", "--tract", "F3", fixtures_dir / "m4.txt")
    assert code == 0
    head, _, wick_text = out.partition("\n")
    assert head == "REPRESENTABLE F3 yes"
    phi = parse_wick(wick_text)
    assert phi.support == m4().bases
    assert check_wick(phi)


def test_search_rep_not_found(run_cli, fixtures_dir, tmp_path):
    """lift(U2,4) is not binary."""
    code, out, _ = run_cli("lift", fixtures_dir / "u24.txt")
    assert code == 0
    lifted = tmp_path / "lift_u24.txt"
    lifted.write_text(out)
    code, out, _ = run_cli("search-rep", "--tract", "F2", lifted)
    assert code == 1
    assert out == "REPRESENTABLE F2 no\n"


def test_is_regular(run_cli, fixtures_dir):
    code, out, _ = run_cli("is-regular", fixtures_dir / "m4.txt")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "REPRESENTABLE U0 yes"
    assert [line for line in lines if line.startswith("PUSH")] == [
        "PUSH F2 ok", "PUSH F3 ok", "PUSH F5 ok", "PUSH F7 ok"]


def test_is_regular_m4_free(run_cli, fixtures_dir):
    code, out, _ = run_cli("is-regular", "--m4-free", fixtures_dir / "lift_u13.txt")
    assert code == 0
    assert out.startswith("# ")
    assert "REPRESENTABLE U0 yes" in out.splitlines()


def test_detect_minor(run_cli, fixtures_dir):
    code, out, _ = run_cli("detect-minor", "--target", "M3", fixtures_dir / "m4.txt")
    assert (code, out) == (0, "MINOR M3 yes\n")
    code, out, _ = run_cli("detect-minor", "--target", "M4", fixtures_dir / "m3.txt")
    assert (code, out) == (1, "MINOR M4 no\n")


def test_corpus_verify_single(run_cli):
    code, out, err = run_cli("corpus-verify", "--only", "combining-maps")
    assert code == 0
    assert out.startswith("PASS combining-maps (")
    assert "==> 1/1 criteria passed" in err


def test_probe_conjecture_on_file(run_cli, fixtures_dir):
    path = fixtures_dir / "m4.txt"
    code, out, _ = run_cli("probe-conjecture", path)
    assert code == 0
    assert out == (f"name={path} m4_minor=yes f2=yes sign=yes regular=yes "
                   "counterexample=no\n")


def test_kv_format(run_cli, fixtures_dir):
    code, out, _ = run_cli("--format", "kv", "check-matroid", fixtures_dir / "m4.txt")
    assert code == 0
    assert out == "check=bases\nok=yes\nfailed=\nwitness=\n"


@pytest.mark.slow
def test_is_r6_with_targets(run_cli, fixtures_dir, tmp_path):
    code, out, _ = run_cli("lift", fixtures_dir / "u24.txt")
    lifted = tmp_path / "lift_u24.txt"
    lifted.write_text(out)
    code, out, _ = run_cli("is-r6", "--targets", lifted)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "REPRESENTABLE R6 yes"
    pushes = [line for line in lines if line.startswith("PUSH")]
    assert len(pushes) == 4
    assert all(line.endswith(" ok") for line in pushes)
    assert "# sampled targets, not every admissible field" in lines
