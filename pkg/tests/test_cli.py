import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from loosemat.cli import (
    MatrixFile,
    MatrixFileError,
    analyze_report,
    format_matrix_file,
    main,
    parse_matrix_file,
    report_schema,
)
from loosemat.families import FamilyTag, build_figure
from loosemat.matroid import circuits

GOLDEN = Path(__file__).parent / "golden"

CONSTRUCT_ARGS = {
    "Lr5.mat": ["--family", "Lr", "--rank", "5"],
    "Jr5.mat": ["--family", "Jr", "--rank", "5"],
    "Mr5.mat": ["--family", "Mr", "--rank", "5"],
    "Nr5.mat": ["--family", "Nr", "--rank", "5"],
    "Pr5.mat": ["--family", "Pr", "--rank", "5"],
    "Mr5_structural.mat": ["--family", "Mr", "--rank", "5", "--structural"],
    "CircuitU5_q3.mat": ["--family", "CircuitU", "--rank", "5", "--q", "3"],
    "U57_q7.mat": ["--family", "U", "--m", "5", "--n", "7", "--q", "7"],
    "U25_q4.mat": ["--family", "U", "--m", "2", "--n", "5", "--q", "4"],
    "Fano.mat": ["--family", "Fano"],
    "AG32.mat": ["--family", "AG32"],
    "Golay12.mat": ["--family", "golay12"],
}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(CONSTRUCT_ARGS))
def test_golden_round_trip(name):
    text = (GOLDEN / name).read_text()
    assert format_matrix_file(parse_matrix_file(text)) == text


@pytest.mark.parametrize("name", sorted(CONSTRUCT_ARGS))
def test_construct_matches_golden(name, capsys):
    code, out, _ = run(capsys, "construct", *CONSTRUCT_ARGS[name])
    assert code == 0
    assert out == (GOLDEN / name).read_text()


def test_construct_shapes(capsys, tmp_path):
    out = tmp_path / "m6.mat"
    assert run(capsys, "construct", "--family", "Mr", "--rank", 6, "--out", out)[0] == 0
    mf = parse_matrix_file(out.read_text())
    assert (mf.rows, mf.cols, mf.q) == (6, 12, 2)
    assert "# designated b=b1 e=e" in out.read_text()
    _, text, _ = run(capsys, "construct", "--family", "golay12")
    mf = parse_matrix_file(text)
    assert (mf.q, mf.rows, mf.cols) == (3, 6, 12)
    _, text, _ = run(capsys, "construct", "--family", "U", "--m", 2, "--n", 4, "--q", 3)
    M = parse_matrix_file(text).to_matroid()
    assert M.rank == 2 and M.n == 4 and len(circuits(M)) == 4


@pytest.mark.parametrize(
    "argv",
    [
        ["construct", "--family", "Zr", "--rank", "5"],
        ["construct", "--family", "Mr", "--rank", "2"],
        ["construct", "--family", "U", "--m", "3", "--n", "9", "--q", "3"],
        ["construct", "--family", "Fano", "--structural"],
        ["construct"],
        ["frobnicate"],
        ["verify", "thm-ternary-bound", "--rank", "4"],
        ["verify", "thm-binary", "--q", "3"],
        ["verify", "thm-binary", "--rank", "5", "--exhaustive"],
        ["verify", "thm-paving", "--fault", "nonsense"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "usage:" in err


def test_parse_errors_have_line_numbers():
    cases = {
        "q 2\nrows 1\ncols 2\n1 2\n": "line 4",
        "q 2\nrows 1\ncols 2\n1\n": "line 4",
        "q 6\nrows 1\ncols 1\n1\n": "line 1",
        "q 2\nrows 1\ncols 2\nlabels a\n1 0\n": "line 4",
        "q 2\nrows 1\n# hi\ncols 2\n1 0\nq 3\n": "line 6",
        "q 2\nrows 2\ncols 1\n1\n1\n1\n": "line 6",
        "q x\n": "line 1",
        "# designated e\nq 2\nrows 1\ncols 1\n1\n": "line 1",
    }
    for text, where in cases.items():
        with pytest.raises(MatrixFileError) as info:
            parse_matrix_file(text)
        assert where in str(info.value), text
    with pytest.raises(MatrixFileError):
        parse_matrix_file("rows 1\ncols 1\n1\n")
    with pytest.raises(MatrixFileError):
        parse_matrix_file("# designated e=zz\nq 2\nrows 1\ncols 1\n1\n")


def test_comments_anywhere_and_default_labels():
    text = "# top\nq 3\n# middle\nrows 2\ncols 3\n1 0 2\n# between rows\n0 1 1\n"
    mf = parse_matrix_file(text)
    assert mf.column_labels() == ("c1", "c2", "c3")
    assert mf.comments == ["top", "middle", "between rows"]
    assert np.array_equal(mf.entries, [[1, 0, 2], [0, 1, 1]])
    again = parse_matrix_file(format_matrix_file(mf))
    assert format_matrix_file(again) == format_matrix_file(mf)


def test_matrix_file_from_matroid_keeps_designations():
    M = build_figure(FamilyTag("Nr", r=5))
    mf = MatrixFile.from_matroid(M)
    N = parse_matrix_file(format_matrix_file(mf)).to_matroid()
    assert N.designated == M.designated and N.labels == M.labels
    assert np.array_equal(N.rep.entries, M.rep.entries)


def test_analyze_figure(capsys, tmp_path):
    path = GOLDEN / "Mr5.mat"
    code, out, _ = run(capsys, "analyze", path, "--json")
    assert code == 0
    rep = json.loads(out)
    jsonschema.validate(rep, report_schema())
    a = rep["analysis"]
    assert a["rank"] == 5 and a["size"] == 10 and a["loose"] == ["e"]
    assert not a["paving"]
    er = a["element_report"]
    assert er["loose"] and er["binary_classification"]["family"] == "Mr_restriction"
    code, text, _ = run(capsys, "analyze", path)
    assert code == 0 and "Mr_restriction" in text and "loose: e" in text


def test_analyze_ag32(capsys):
    code, out, _ = run(capsys, "analyze", GOLDEN / "AG32.mat", "--json")
    a = json.loads(out)["analysis"]
    assert code == 0 and a["paving"] and a["sparse_paving"] and len(a["loose"]) == 8


def test_analyze_ternary_census(capsys, tmp_path):
    from loosemat.verify import ternary_loose_sample

    M = ternary_loose_sample(np.random.default_rng(3), 6)
    path = tmp_path / "t.mat"
    path.write_text(format_matrix_file(MatrixFile.from_matroid(M)))
    code, out, _ = run(capsys, "analyze", path, "--element", "e", "--json")
    rep = json.loads(out)
    jsonschema.validate(rep, report_schema())
    assert code == 0 and rep["analysis"]["element_report"]["ternary_census"]["r"] == 6


def test_analyze_degenerate_input(capsys, tmp_path):
    path = tmp_path / "dup.mat"
    path.write_text("q 2\nrows 3\ncols 4\n1 1 0 0\n0 0 1 0\n0 0 0 1\n")
    code, out, _ = run(capsys, "analyze", path, "--json")
    a = json.loads(out)["analysis"]
    assert code == 0 and a["simple"] is False and a["rank"] == 3
    assert a["coloops"] == ["c3", "c4"]


def test_analyze_circuits_and_restrict(capsys, tmp_path):
    out = tmp_path / "r.mat"
    code, _, _ = run(capsys, "transform", "restrict", GOLDEN / "Mr5.mat", "--keep", "b1,b2,b3,b4,b5,e", "--out", out)
    assert code == 0
    code, text, _ = run(capsys, "analyze", out, "--circuits", "--json")
    a = json.loads(text)["analysis"]
    assert a["circuits"] == [["b1", "b2", "b3", "b4", "b5", "e"]]


def test_dual_round_trip_and_iso(capsys, tmp_path):
    d = tmp_path / "d.mat"
    dd = tmp_path / "dd.mat"
    assert run(capsys, "transform", "dual", GOLDEN / "Mr5.mat", "--out", d)[0] == 0
    assert run(capsys, "transform", "dual", d, "--out", dd)[0] == 0
    code, out, _ = run(capsys, "iso", GOLDEN / "Mr5.mat", d, "--json")
    rep = json.loads(out)
    jsonschema.validate(rep, report_schema())
    assert code == 0 and rep["isomorphism"] is not None
    A = parse_matrix_file((GOLDEN / "Mr5.mat").read_text()).to_matroid()
    B = parse_matrix_file(dd.read_text()).to_matroid()
    assert set(circuits(A)) == set(circuits(B))
    code, _, _ = run(capsys, "iso", GOLDEN / "Mr5.mat", GOLDEN / "Lr5.mat")
    assert code == 1


def test_two_sum_and_series_sub(capsys, tmp_path):
    u56, u24, out = tmp_path / "a.mat", tmp_path / "b.mat", tmp_path / "s.mat"
    run(capsys, "construct", "--family", "U", "--m", 5, "--n", 6, "--q", 3, "--out", u56)
    run(capsys, "construct", "--family", "U", "--m", 2, "--n", 4, "--q", 3, "--out", u24)
    code, _, _ = run(capsys, "transform", "two-sum", u56, u24, "--a", "c1", "--b", "c1", "--out", out)
    assert code == 0
    _, text, _ = run(capsys, "analyze", out, "--json")
    a = json.loads(text)["analysis"]
    assert a["rank"] == 6 and a["size"] == 8
    code, text, _ = run(capsys, "transform", "series-sub", u24, "--element", "c1", "--size", 3)
    M = parse_matrix_file(text).to_matroid()
    assert code == 0 and M.rank == 4 and M.n == 6
    assert run(capsys, "transform", "series-sub", u24)[0] == 2
    assert run(capsys, "transform", "two-sum", u56, "--a", "c1")[0] == 2
    assert run(capsys, "transform", "restrict", u24, "--keep", "zz")[0] == 2


def test_verify_exit_codes_and_json(capsys):
    code, out, _ = run(capsys, "verify", "thm-binary", "--rank", 3, "--json")
    rep = json.loads(out)
    jsonschema.validate(rep, report_schema())
    assert code == 0 and rep["outcome"]["passed"]
    # the threshold fault is invisible at rank 3, where every simple element has girth 3
    code, out, _ = run(
        capsys, "verify", "thm-binary", "--rank", 5, "--samples", 20, "--chunk-size", 20, "--fault", "loose_threshold", "--json"
    )
    rep = json.loads(out)
    jsonschema.validate(rep, report_schema())
    assert code == 1 and rep["outcome"]["violations"]
    code, text, _ = run(capsys, "verify", "prop-free", "--q", 3, "--rank", "2,3")
    assert code == 0 and "PASS" in text


def test_verify_json_is_deterministic(capsys):
    argv = ["verify", "thm-two-loose", "--q", 3, "--rank", 7, "--samples", 6, "--chunk-size", 3, "--controls", 2, "--seed", 7, "--json"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--workers", 2)
    assert a == b


def test_schema_is_valid_json_schema():
    jsonschema.Draft202012Validator.check_schema(report_schema())


def test_analyze_report_without_element():
    rep = analyze_report(build_figure(FamilyTag("Lr", r=4)))
    # b4 only meets the other basis vectors through e, so it is loose too
    assert "element_report" not in rep and rep["loose"] == ["b4", "e"]
