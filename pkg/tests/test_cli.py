"""Command-line behaviour: outputs, determinism, exit codes."""

import json

import pytest

from twoflags.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_classify_model_ex2(capsys):
    code, out, _ = run(capsys, "classify", "--model", "ex_2")
    assert code == 0
    payload = json.loads(out)
    assert payload["word"] == "1.2"


def test_classify_word_with_constants(capsys):
    code, out, _ = run(capsys, "classify", "--word", "1.2.1.3", "--c", "3=1", "--b", "3=1")
    assert code == 0
    assert json.loads(out)["word"] == "1.2.1.3"


def test_classify_at_point_off_hypersurface(capsys):
    code, out, _ = run(capsys, "classify", "--word", "1.2", "--point", "0,0,0,0,0,1,0")
    assert code == 0
    assert json.loads(out)["word"] == "1.1"


def test_classify_generic_geometry(capsys):
    code, out, _ = run(capsys, "classify", "--model", "ex_2", "--generic-geometry")
    assert code == 0
    assert json.loads(out)["word"] == "1.2"


def test_classify_constants_file(tmp_path, capsys):
    constants = tmp_path / "constants.json"
    constants.write_text('{"b": {"3": "1/2"}, "c": {"3": "-2", "4": "5"}}')
    code, out, _ = run(capsys, "classify", "--word", "1.2.1.2", "--constants", str(constants))
    assert code == 0
    assert json.loads(out)["word"] == "1.2.1.2"


def test_classify_invalid_word_exits_2(capsys):
    code, _, err = run(capsys, "classify", "--word", "1.1.3")
    assert code == 2
    assert "3" in err


def test_classify_non_admitted_constant_exits_2(capsys):
    code, _, err = run(capsys, "classify", "--word", "1.2", "--b", "2=1")
    assert code == 2
    assert "admits no b" in err


def test_classify_bad_point_exits_2(capsys):
    code, _, err = run(capsys, "classify", "--word", "1.2", "--point", "1,2")
    assert code == 2


def test_classify_degenerate_model_exits_3(capsys):
    # the corank-2 model is not a rank-3 flag, so its big flag fails
    code, _, err = run(capsys, "classify", "--model", "bcd")
    assert code == 3
    assert "special 2-flag" in err


def test_verify_length_two(capsys):
    code, out, _ = run(capsys, "verify", "--length", "2", "--trials", "2", "--seed", "5")
    assert code == 0
    assert "2 words" in out and "0 failures" in out


def test_verify_is_deterministic(capsys):
    _, first, _ = run(capsys, "verify", "--length", "3", "--trials", "2", "--seed", "9", "--zero-constants")
    _, second, _ = run(capsys, "verify", "--length", "3", "--trials", "2", "--seed", "9", "--zero-constants")
    assert first == second
    _, third, _ = run(capsys, "verify", "--length", "3", "--trials", "2", "--seed", "10", "--zero-constants")
    assert first != third or "0 failures" in third  # different draws, same verdict


def test_classify_appendix_models_with_constants(capsys):
    code, out, _ = run(
        capsys, "classify", "--model", "appxB_D", "--b", "3=1/2", "--c", "3=-2", "--c", "4=5/3"
    )
    assert code == 0 and json.loads(out)["word"] == "1.2.1.2"
    code, out, _ = run(capsys, "classify", "--model", "appxB_E", "--b", "3=1/2", "--c", "3=-2")
    assert code == 0 and json.loads(out)["word"] == "1.2.1.3"


def test_verify_out_file(tmp_path, capsys):
    target = tmp_path / "verify.txt"
    code, out, _ = run(
        capsys, "verify", "--length", "2", "--trials", "1", "--seed", "3", "--out", str(target)
    )
    assert code == 0 and out == ""
    assert "0 failures" in target.read_text()


def test_count_table_values(capsys):
    code, out, _ = run(capsys, "count", "--width", "2", "--length", "7")
    assert code == 0 and out.strip() == "365"
    code, out, _ = run(capsys, "count", "--width", "6", "--length", "7")
    assert code == 0 and out.strip() == "877"


def test_atlas_csv_row_count(capsys):
    code, out, _ = run(capsys, "atlas", "--length", "4", "--format", "csv")
    assert code == 0
    assert len(out.strip().split("\n")) == 15  # header + 14 records


def test_atlas_to_file(tmp_path, capsys):
    target = tmp_path / "atlas.jsonl"
    code, out, _ = run(capsys, "atlas", "--length", "2", "--format", "jsonl", "--out", str(target))
    assert code == 0 and out == ""
    lines = target.read_text().strip().split("\n")
    assert [json.loads(line)["word"] for line in lines] == ["1.1", "1.2"]


def test_atlas_dot(capsys):
    code, out, _ = run(capsys, "atlas", "--length", "3", "--format", "dot")
    assert code == 0
    assert out.startswith("digraph") and '"1.2.3" -> "1.2.2";' in out


def test_locus_command(capsys):
    code, out, _ = run(capsys, "locus", "--word", "1.2.1.3")
    assert code == 0
    payload = json.loads(out)
    assert payload == {
        "word": "1.2.1.3",
        "codimension": 3,
        "equations": ["x2=0", "x4=0", "y4=0"],
    }


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["classify"])  # neither --word nor --model
    assert exc.value.code == 2
