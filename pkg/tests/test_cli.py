"""End-to-end runs of every CLI subcommand over the golden corpus.

Each test drives run_cli exactly as a shell would, asserting on exit
codes and on the printed report lines, which are part of the stable
interface.
"""

from __future__ import annotations

import contextlib
import io
import os
import subprocess
import sys

import pytest

from gerbe.cli import run_cli
from gerbe.documents import load

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def g(name: str) -> str:
    return os.path.join(GOLDEN, name)


def run(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = run_cli(list(argv))
    return code, buf.getvalue()


# -- verify -------------------------------------------------------------------------


def test_verify_valid_crossed_module_prints_the_stable_line():
    assert run("verify", g("cm-s3-conj.json")) == (0, "crossed module: valid\n")


@pytest.mark.parametrize(
    "name, line",
    [
        ("group-s3.json", "group: valid"),
        ("nerve-triangle.json", "nerve: valid"),
        ("nerve-map-hexagon-to-triangle.json", "nerve map: valid"),
        ("cm-a3-in-s3.json", "crossed module: valid"),
        ("tcm-sub-z2-z4.json", "2-crossed module: valid"),
        ("morphism-to-quotient-a3-s3.json", "crossed module morphism: valid"),
        ("morphism-descend-sub.json", "2-crossed module morphism: valid"),
        ("bundle1-mobius.json", "bundle1 cocycle: valid"),
        ("gerbe2-q-sub.json", "gerbe2 cocycle: valid"),
        ("coboundary1-shift.json", "bundle1 coboundary: valid"),
        ("obstruction-trivial-s3.json", "obstruction cocycle: valid"),
        ("context-lift-a3-s3.json", "lift context: valid"),
        ("context-extension-sub.json", "extension context: valid"),
        ("context-twist-z2.json", "twist context: valid"),
        ("bundle1-mobius-pathrefs.json", "bundle1 cocycle: valid"),
    ],
)
def test_verify_accepts_every_valid_corpus_document(name, line):
    assert run("verify", g(name)) == (0, line + "\n")


def test_verify_invalid_cocycle_prints_the_witness():
    code, out = run("verify", g("bundle1-invalid.json"))
    assert code == 1
    lines = out.splitlines()
    assert lines[0] == "bundle1 cocycle: invalid"
    assert any(line.startswith("FAIL") and "witness" in line for line in lines[1:])


def test_verify_context_with_broken_precondition_is_a_negative_answer():
    code, out = run("verify", g("context-invalid-kernel.json"))
    assert code == 1
    lines = out.splitlines()
    assert lines[0] == "lift context: invalid"
    assert "trivial kernel" in lines[1]


def test_verify_unknown_kind_is_a_structural_error():
    code, out = run("verify", g("unknown-kind.json"))
    assert code == 2
    assert out == "error: unknown document kind 'grp'\n"


def test_verify_version_mismatch_is_a_structural_error():
    code, out = run("verify", g("version-2.json"))
    assert code == 2
    assert "unsupported document version 2" in out


def test_verify_truncated_document_reports_the_location():
    code, out = run("verify", g("truncated.json"))
    assert code == 2
    assert out.startswith("error: parse error at line 1 column ")


def test_verify_missing_file_is_a_structural_error():
    code, out = run("verify", g("no-such-document.json"))
    assert code == 2
    assert out.startswith("error: cannot read document")


def test_verify_class_table_is_a_structural_error():
    code, out = run("verify", g("class-table-bundle1-z2-triangle.json"))
    assert code == 2
    assert "export-only" in out


# -- equiv --------------------------------------------------------------------------


def test_equiv_negative_prints_the_exhausted_search_line():
    code, out = run("equiv", g("bundle1-mobius.json"), g("bundle1-trivial.json"))
    assert code == 1
    assert out == "inequivalent (search exhausted 8 candidates)\n"


def test_equiv_positive():
    assert run("equiv", g("bundle1-mobius.json"), g("bundle1-mobius.json")) == (
        0,
        "equivalent\n",
    )


def test_equiv_on_obstruction_documents():
    code, out = run(
        "equiv", g("obstruction-trivial-s3.json"), g("obstruction-nontrivial-s3.json")
    )
    assert code == 1
    assert out.startswith("inequivalent (search exhausted ")


def test_equiv_level_mismatch_is_a_structural_error():
    code, out = run("equiv", g("bundle1-mobius.json"), g("gerbe2-q-quotient.json"))
    assert code == 2
    assert "levels differ" in out


def test_equiv_rejects_non_cocycle_documents():
    code, out = run("equiv", g("group-z2.json"), g("group-z2.json"))
    assert code == 2
    assert "expected a cocycle or obstruction document" in out


def test_equiv_workers_must_be_positive():
    code, out = run(
        "equiv", g("bundle1-mobius.json"), g("bundle1-mobius.json"), "--workers", "0"
    )
    assert code == 2
    assert "workers must be at least 1" in out


# -- enumerate ----------------------------------------------------------------------


def test_enumerate_classes_prints_the_stable_count_line():
    code, out = run(
        "enumerate",
        "--level", "bundle1",
        "--structure", "z2-to-1",
        "--nerve", "triangle",
        "--classes",
    )
    assert (code, out) == (0, "2 classes (sizes 4,4)\n")


def test_enumerate_cocycle_count():
    code, out = run(
        "enumerate",
        "--level", "bundle1",
        "--structure", "z2-to-1",
        "--nerve", "triangle",
    )
    assert (code, out) == (0, "cocycles: 8\n")


def test_enumerate_accepts_documents_in_place_of_builtin_names():
    code, out = run(
        "enumerate",
        "--level", "bundle1",
        "--structure", g("cm-z2-to-1.json"),
        "--nerve", g("nerve-triangle.json"),
        "--classes",
    )
    assert (code, out) == (0, "2 classes (sizes 4,4)\n")


def test_enumerate_output_matches_corpus_and_is_worker_independent(tmp_path):
    one = tmp_path / "w1.json"
    four = tmp_path / "w4.json"
    base = [
        "enumerate",
        "--level", "bundle1",
        "--structure", "z2-to-1",
        "--nerve", "triangle",
        "--classes",
        "--product-table",
    ]
    code1, out1 = run(*base, "--workers", "1", "-o", str(one))
    code4, out4 = run(*base, "--workers", "4", "-o", str(four))
    assert code1 == code4 == 0
    assert out1.splitlines()[0] == out4.splitlines()[0] == "2 classes (sizes 4,4)"
    assert one.read_bytes() == four.read_bytes()
    with open(g("class-table-bundle1-z2-triangle.json"), "rb") as fh:
        assert one.read_bytes() == fh.read()


def test_enumerate_usage_errors():
    code, out = run(
        "enumerate", "--level", "bundle1", "--structure", "z2-to-1",
        "--nerve", "triangle", "-o", "x.json",
    )
    assert code == 2 and "-o requires --classes" in out
    code, out = run(
        "enumerate", "--level", "bundle1", "--structure", "z2-to-1",
        "--nerve", "triangle", "--product-table",
    )
    assert code == 2 and "--product-table requires --classes" in out
    code, out = run(
        "enumerate", "--level", "bundle1", "--structure", "no-such-thing",
        "--nerve", "triangle", "--classes",
    )
    assert code == 2 and "neither a file nor a built-in name" in out
    code, out = run(
        "enumerate", "--level", "bundle1", "--structure", "z2-to-1",
        "--nerve", "moebius-strip", "--classes",
    )
    assert code == 2 and "neither a file nor a built-in name" in out


def test_enumerate_rejects_wrong_document_type_for_nerve():
    code, out = run(
        "enumerate", "--level", "bundle1", "--structure", "z2-to-1",
        "--nerve", g("group-z2.json"), "--classes",
    )
    assert code == 2
    assert "holds a FiniteGroup" in out


# -- product and inverse ------------------------------------------------------------


def test_product_of_mobius_with_itself_is_trivial(tmp_path):
    square = tmp_path / "square.json"
    code, out = run(
        "product", g("bundle1-mobius.json"), g("bundle1-mobius.json"),
        "-o", str(square),
    )
    assert code == 0
    assert out == f"level: bundle1\noutput: {square}\n"
    assert run("verify", str(square))[0] == 0
    assert run("equiv", str(square), g("bundle1-trivial.json"))[0] == 0


def test_inverse_of_an_order_two_class_is_equivalent_to_itself(tmp_path):
    inv = tmp_path / "inv.json"
    code, _ = run("inverse", g("bundle1-mobius.json"), "-o", str(inv))
    assert code == 0
    assert run("equiv", str(inv), g("bundle1-mobius.json"))[0] == 0


def test_product_rejects_non_cocycles(tmp_path):
    code, out = run(
        "product", g("group-z2.json"), g("group-z2.json"),
        "-o", str(tmp_path / "x.json"),
    )
    assert code == 2
    assert "expected a cocycle or obstruction document" in out


# -- lift ---------------------------------------------------------------------------


def test_lift_bundle1_then_change_structure_recovers_the_input(tmp_path):
    lifted = tmp_path / "lifted.json"
    code, out = run(
        "lift", "--level", "bundle1",
        "--context", g("context-lift-a3-s3.json"),
        "--input", g("bundle1-g-odd.json"),
        "-o", str(lifted),
    )
    assert code == 0
    assert out == f"level: bundle1\noutput: {lifted}\n"
    assert run("verify", str(lifted)) == (0, "bundle1 cocycle: valid\n")

    back = tmp_path / "back.json"
    code, out = run(
        "change-structure", str(lifted),
        "--morphism", g("morphism-to-quotient-a3-s3.json"),
        "-o", str(back),
    )
    assert code == 0
    assert run("equiv", str(back), g("bundle1-g-odd.json"))[0] == 0


def test_lift_of_a_nonconstant_function_is_a_negative_answer(tmp_path):
    code, out = run(
        "lift", "--level", "bundle1",
        "--context", g("context-lift-a3-s3.json"),
        "--input", g("bundle1-g-split.json"),
        "-o", str(tmp_path / "never.json"),
    )
    assert code == 1
    assert "input not liftable at" in out
    assert not (tmp_path / "never.json").exists()


def test_lift_gerbe2(tmp_path):
    out_path = tmp_path / "gerbe.json"
    code, out = run(
        "lift", "--level", "gerbe2",
        "--context", g("context-lift-a3-s3.json"),
        "--input", g("gerbe2-q-quotient.json"),
        "-o", str(out_path),
    )
    assert code == 0
    assert out.splitlines()[0] == "level: gerbe2"
    assert run("verify", str(out_path)) == (0, "gerbe2 cocycle: valid\n")


def test_lift_tcm_gerbe2(tmp_path):
    out_path = tmp_path / "tcm.json"
    code, out = run(
        "lift", "--level", "tcm-gerbe2",
        "--context", g("context-extension-sub.json"),
        "--input", g("bundle1-p-sub.json"),
        "-o", str(out_path),
    )
    assert code == 0
    assert out.splitlines()[0] == "level: tcm-gerbe2"
    assert run("verify", str(out_path)) == (0, "tcm-gerbe2 cocycle: valid\n")


def test_lift_two_gerbe3(tmp_path):
    out_path = tmp_path / "two.json"
    code, out = run(
        "lift", "--level", "two-gerbe3",
        "--context", g("context-extension-sub.json"),
        "--input", g("gerbe2-q-sub.json"),
        "-o", str(out_path),
    )
    assert code == 0
    assert out.splitlines()[0] == "level: two-gerbe3"
    assert run("verify", str(out_path)) == (0, "two-gerbe3 cocycle: valid\n")


def test_lift_with_the_wrong_context_kind_is_a_usage_error(tmp_path):
    code, out = run(
        "lift", "--level", "bundle1",
        "--context", g("context-extension-sub.json"),
        "--input", g("bundle1-g-odd.json"),
        "-o", str(tmp_path / "x.json"),
    )
    assert code == 2
    assert "needs a lift context" in out


def test_lift_with_an_input_over_the_wrong_structure_is_a_usage_error(tmp_path):
    code, out = run(
        "lift", "--level", "bundle1",
        "--context", g("context-lift-a3-s3.json"),
        "--input", g("bundle1-mobius.json"),
        "-o", str(tmp_path / "x.json"),
    )
    assert code == 2
    assert "over the quotient" in out


# -- obstruct -----------------------------------------------------------------------


def test_obstruct_trivial_case(tmp_path):
    obs = tmp_path / "obs.json"
    code, out = run(
        "obstruct",
        "--context", g("context-twist-z2.json"),
        "--input", g("gerbe2-q-twist.json"),
        "-o", str(obs),
    )
    assert code == 0
    assert out == f"obstruction: trivial\noutput: {obs}\n"
    assert run("verify", str(obs)) == (0, "obstruction cocycle: valid\n")


def test_obstruct_rejects_a_non_twist_context(tmp_path):
    code, out = run(
        "obstruct",
        "--context", g("context-lift-a3-s3.json"),
        "--input", g("gerbe2-q-twist.json"),
        "-o", str(tmp_path / "x.json"),
    )
    assert code == 2
    assert "TwistContext" in out


# -- change-structure and pullback ---------------------------------------------------


def test_change_structure_rejects_non_morphism_documents(tmp_path):
    code, out = run(
        "change-structure", g("bundle1-mobius.json"),
        "--morphism", g("group-z2.json"),
        "-o", str(tmp_path / "x.json"),
    )
    assert code == 2
    assert "holds a FiniteGroup" in out


def test_pullback_along_the_hexagon_refinement(tmp_path):
    pulled = tmp_path / "hex.json"
    code, out = run(
        "pullback", g("bundle1-mobius.json"),
        "--map", g("nerve-map-hexagon-to-triangle.json"),
        "-o", str(pulled),
    )
    assert code == 0
    assert run("verify", str(pulled)) == (0, "bundle1 cocycle: valid\n")
    pulled_cocycle = load(pulled)
    assert pulled_cocycle.nerve == load(g("nerve-hexagon.json"))


def test_pullback_rejects_non_map_documents(tmp_path):
    code, out = run(
        "pullback", g("bundle1-mobius.json"),
        "--map", g("nerve-triangle.json"),
        "-o", str(tmp_path / "x.json"),
    )
    assert code == 2
    assert "holds a Nerve" in out


# -- argument handling ---------------------------------------------------------------


def test_no_arguments_is_a_usage_error(capsys):
    assert run_cli([]) == 2
    capsys.readouterr()


def test_unknown_subcommand_is_a_usage_error(capsys):
    assert run_cli(["frobnicate"]) == 2
    capsys.readouterr()


def test_help_exits_cleanly(capsys):
    assert run_cli(["--help"]) == 0
    assert "subcommand" not in capsys.readouterr().err


def test_reports_are_deterministic_across_runs():
    first = run("enumerate", "--level", "bundle1", "--structure", "z2-to-1",
                "--nerve", "triangle", "--classes")
    second = run("enumerate", "--level", "bundle1", "--structure", "z2-to-1",
                 "--nerve", "triangle", "--classes")
    assert first == second


def test_console_entry_point_roundtrip(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "gerbe.cli", "verify", g("cm-s3-conj.json")],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert result.stdout == "crossed module: valid\n"
    result = subprocess.run(
        [sys.executable, "-m", "gerbe.cli", "equiv",
         g("bundle1-mobius.json"), g("bundle1-trivial.json")],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 1
    assert result.stdout == "inequivalent (search exhausted 8 candidates)\n"
