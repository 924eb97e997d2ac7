import io
import json
import os
import subprocess
import sys

import pytest

from posetrank.cli import main, parse_document, ParseError

DATA = os.path.join(os.path.dirname(__file__), "data")


def path(name):
    return os.path.join(DATA, name)


def run(argv):
    out = io.StringIO()
    err = io.StringIO()
    old_out, old_err = sys.stdout, sys.stderr
    sys.stdout, sys.stderr = out, err
    try:
        code = main(argv)
    finally:
        sys.stdout, sys.stderr = old_out, old_err
    return code, out.getvalue(), err.getvalue()


def test_genrank_fig_rank1():
    code, out, _ = run(["genrank", path("fig_rank1.txt")])
    assert code == 0
    assert out.splitlines()[0] == "rank: 1"


def test_genrank_fig_rank0():
    code, out, _ = run(["genrank", path("fig_rank0.txt")])
    assert code == 0
    assert out.splitlines()[0] == "rank: 0"


def test_genrank_bad_input_exits_2_and_names_edge():
    code, out, err = run(["genrank", path("bad_monotone.txt")])
    assert code == 2
    assert out == ""  # no partial output on validation failure
    assert "(p, q)" in err


def test_genrank_audit_shows_conversion():
    code, out, _ = run(["genrank", path("conversion.txt"), "--audit"])
    assert code == 0
    assert "rank: 1" in out
    assert "nonzero_alpha=1" in out
    assert "complete=True" in out


def test_genrank_sections_output():
    code, out, _ = run(["genrank", path("fig_rank1.txt"), "--sections"])
    assert code == 0
    assert "section 0:" in out
    for pt in ("A:", "B:", "C:", "D:"):
        assert pt in out


def test_oracle_fig_rank0():
    code, out, _ = run(["oracle", path("fig_rank0.txt")])
    assert code == 0
    assert out.strip() == "rank: 0"


def test_oracle_module_block():
    code, out, _ = run(["oracle", path("module_dim3.txt")])
    assert code == 0
    assert out.strip() == "rank: 3"


def test_commands_agree_on_fixture_files():
    for name in ("fig_rank1.txt", "fig_rank0.txt", "conversion.txt", "graph_cycle.txt"):
        _, g, _ = run(["genrank", path(name)])
        _, o, _ = run(["oracle", path(name)])
        assert g.splitlines()[0] == o.splitlines()[0]


def test_fastpath_graph_agrees():
    code, out, _ = run(["fastpath", path("graph_cycle.txt"), "--graph"])
    assert code == 0
    assert out.strip() == "rank: 1"
    code, out2, _ = run(["fastpath", path("graph_cycle.txt"), "--dcomplex", "1"])
    assert out2.strip() == "rank: 1"


def test_unfold_one_edge_poset_output():
    doc = "poset:\n  point A\n  point B\n  edge A B\n"
    p = path("_tmp_edge.txt")
    with open(p, "w") as fh:
        fh.write(doc)
    try:
        code, out, _ = run(["unfold", p])
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "path: A -> B <- A"
        assert "fold: q0=A q1=B q2=A" in out
        assert "partners A: q0 q2 leader=q0" in out
    finally:
        os.remove(p)


def test_unfold_fig_explicit_tour():
    code, out, _ = run(["unfold", path("fig_rank1.txt")])
    assert code == 0
    assert out.splitlines()[0] == "path: A -> D -> C <- D <- B"


def test_unfold_default_mode_reports_bound():
    doc = "poset:\n  point A\n  point B\n  edge A B\n"
    p = path("_tmp_bound.txt")
    with open(p, "w") as fh:
        fh.write(doc)
    try:
        _, out, _ = run(["unfold", p])
        lines = {l.split(":")[0]: l for l in out.splitlines()}
        pts = int(lines["points"].split(":")[1])
        bound = int(lines["bound"].split(":")[1])
        assert pts <= bound
    finally:
        os.remove(p)


def test_zigzag_barcode_output():
    code, out, _ = run(["zigzag", path("fig_rank1.txt")])
    assert code == 0
    assert "[0, 4] open-open" in out
    assert "[1, 1] closed-open" in out
    assert "[3, 3] open-closed" in out


def test_output_byte_identical_across_runs():
    for argv in (
        ["genrank", path("fig_rank1.txt"), "--audit", "--sections"],
        ["zigzag", path("fig_rank1.txt"), "--reps"],
        ["unfold", path("fig_rank1.txt")],
        ["genrank", path("conversion.txt"), "--json", "--audit"],
    ):
        _, a, _ = run(argv)
        _, b, _ = run(argv)
        assert a == b


def test_json_report():
    code, out, _ = run(["genrank", path("conversion.txt"), "--json", "--audit"])
    assert code == 0
    payload = json.loads(out)
    assert payload["rank"] == 1
    assert payload["command"] == "genrank"
    assert payload["audit"][0]["nonzero_alpha"] == 1


def test_random_check_subcommand():
    code, out, _ = run(["random", "--seed", "7", "--count", "8", "--check"])
    assert code == 0
    assert "checked: 8" in out
    assert "agree: 8" in out


def test_random_emits_reusable_documents():
    code, out, _ = run(["random", "--seed", "3", "--count", "1"])
    assert code == 0
    doc = parse_document(out)
    assert doc.poset is not None
    assert doc.complexes is not None


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError, match="line 2"):
        parse_document("poset:\n  vertex A\n")
    with pytest.raises(ParseError, match="outside any section"):
        parse_document("stray content\n")
    with pytest.raises(ParseError, match="exactly one"):
        parse_document(
            "poset:\n  point a\ncomplexes:\n  at a: 0\nmodule:\n  dim a 1\n"
        )


def test_field_and_degree_flags_override_document():
    code, out, _ = run(["genrank", path("fig_rank1.txt"), "--degree", "0", "--json"])
    payload = json.loads(out)
    assert payload["degree"] == 0
    assert payload["rank"] == 1  # one component everywhere, identity maps


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "posetrank.cli", "genrank", path("fig_rank1.txt")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "rank: 1"
