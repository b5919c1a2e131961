import json
import subprocess
import sys

import pytest

from b1sets.bset import verify
from b1sets.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_48(capsys):
    code, out, _ = run(capsys, "construct", "--q", "48")
    assert code == 0
    payload = json.loads(out)
    assert payload["set"]["elements"] == [1, 5, 8, 9, 39, 43, 47]
    assert payload["report"]["exactness"] == "exact"


def test_construct_54_is_lower_bound(capsys):
    code, out, _ = run(capsys, "construct", "--q", "54")
    payload = json.loads(out)
    assert code == 0 and len(payload["set"]["elements"]) == 8
    assert payload["report"]["exactness"] == "lower-bound"
    assert payload["report"]["discrepancy"] is True


@pytest.mark.parametrize("argv", [["--q", "1"], ["--q", "48", "--lambda", "3"]])
def test_construct_usage_errors(capsys, argv):
    code, out, err = run(capsys, "construct", *argv)
    assert code == 2 and out == "" and err.startswith("error:")


def test_construct_without_base_budget(capsys):
    code, out, err = run(capsys, "construct", "--q", "1100", "--max-nodes", "1")
    assert code == 3 and out == "" and "budget" in err


def test_construct_writes_reverifiable_file(capsys, tmp_path):
    path = tmp_path / "s.json"
    run(capsys, "construct", "--q", "120", "--out", str(path))
    saved = json.loads(path.read_text())
    assert verify(saved["q"], saved["lambda"], saved["elements"])
    code, out, _ = run(capsys, "verify", "--set", str(path))
    assert code == 0 and json.loads(out)["valid"]


@pytest.mark.parametrize(
    "q, s, want",
    [("48", "1,5,8,9,39,43,47", 0), ("2", "1", 1), ("54", "1,5,7,8,9,40,46,49,51", 0)],
)
def test_verify(capsys, q, s, want):
    code, out, _ = run(capsys, "verify", "--q", q, "--set", s)
    assert code == want
    assert json.loads(out)["valid"] is (want == 0)


def test_verify_collision_payload(capsys):
    _, out, err = run(capsys, "verify", "--q", "2", "--set", "1")
    assert json.loads(out)["collision"] == {"first": [1, 1], "second": [3, 1], "residue": 1}
    assert "collision" in err


def test_verify_inline_needs_q(capsys):
    code, _, _ = run(capsys, "verify", "--set", "1,2")
    assert code == 2


@pytest.mark.parametrize("q, size", [("60", 12), ("84", 16)])
def test_search(capsys, q, size):
    code, out, _ = run(capsys, "search", "--q", q)
    assert code == 0 and json.loads(out)["max_size"] == size


def test_search_budget(capsys):
    code, out, _ = run(capsys, "search", "--q", "300", "--max-nodes", "10")
    payload = json.loads(out)
    assert code == 3 and payload["status"] == "budget-exceeded"
    assert verify(300, 4, payload["witness"])


def test_search_other_lambda(capsys):
    code, out, _ = run(capsys, "search", "--q", "20", "--lambda", "2")
    assert code == 0 and json.loads(out)["lambda"] == 2


def test_msize(capsys):
    _, out, _ = run(capsys, "msize", "--q", "384")
    assert json.loads(out) == {
        "q": 384, "lambda": 4, "max_size": 55, "status": "exact", "source": "construction"
    }
    _, out, _ = run(capsys, "msize", "--q", "54")
    assert json.loads(out)["max_size"] == 9


def test_table_conjecture(capsys):
    code, out, _ = run(capsys, "table", "--mode", "conjecture", "--r", "5,7")
    assert code == 0
    assert out == "q,oracle,lower_bound\n60,12,12\n84,16,16\n"


def test_table_formula(capsys):
    _, out, _ = run(capsys, "table", "--mode", "formula-vs-oracle", "--r", "13")
    assert out == "q,predicted,oracle\n39,8,8\n"


def test_table_empty(capsys):
    code, out, _ = run(capsys, "table", "--mode", "conjecture", "--r-range", "2", "4")
    assert code == 0 and out == "q,oracle,lower_bound\n"


def test_table_rejects_bad_r(capsys):
    code, _, _ = run(capsys, "table", "--mode", "conjecture", "--r", "9")
    assert code == 2


@pytest.fixture
def ex1(tmp_path):
    path = tmp_path / "ex1.json"
    path.write_text('{"q": 48, "lambda": 4, "elements": [1, 5, 8, 9, 39, 43, 47]}')
    return str(path)


def test_code_decode(capsys, ex1):
    code, out, _ = run(capsys, "code", "decode", "--set", ex1, "--word", "5,3,2,3,3,1,1")
    assert code == 0
    assert json.loads(out) == {
        "status": "corrected",
        "syndrome": 30,
        "word": [5, 3, 2, 3, 1, 1, 1],
        "error": {"position": 4, "magnitude": 2},
    }


def test_code_decode_codeword(capsys, ex1):
    _, out, _ = run(capsys, "code", "decode", "--set", ex1, "--word", "5,3,2,3,1,1,1")
    assert json.loads(out)["status"] == "no-error"


def test_code_decode_uncorrectable(capsys, ex1):
    code, out, _ = run(capsys, "code", "decode", "--set", ex1, "--word", "6,0,0,0,0,0,0")
    assert code == 1 and json.loads(out)["word"] == [6, 0, 0, 0, 0, 0, 0]


def test_code_encode_then_check(capsys, ex1):
    _, out, _ = run(capsys, "code", "encode", "--set", ex1, "--message", "5,3,2,3,1,1")
    word = json.loads(out)["word"]
    assert len(word) == 7 and json.loads(out)["syndrome"] == 0
    _, out, _ = run(capsys, "code", "decode", "--set", ex1, "--word", ",".join(map(str, word)))
    assert json.loads(out)["status"] == "no-error"


def test_code_build(capsys):
    _, out, _ = run(capsys, "code", "build", "--set", "1", "--q", "6")
    payload = json.loads(out)
    assert [(s["syndrome"], s["position"], s["magnitude"]) for s in payload["syndromes"]] == [
        (1, 0, 1), (2, 0, 2), (3, 0, 3), (4, 0, 4)
    ]


def test_text_format(capsys):
    _, out, _ = run(capsys, "construct", "--q", "48", "--format", "text")
    assert out.splitlines()[0] == "q=48 size=7 exact"


def test_base_dir_env(capsys, tmp_path, monkeypatch):
    (tmp_path / "b.json").write_text('{"q": 22, "lambda": 4, "elements": [1, 5]}')
    monkeypatch.setenv("B1SET_BASE_DIR", str(tmp_path))
    _, out, _ = run(capsys, "construct", "--q", "132", "--max-nodes", "1")
    steps = json.loads(out)["report"]["steps"]
    assert steps[-1]["source"] == "user-file"


def test_output_is_byte_identical():
    cmd = [sys.executable, "-m", "b1sets", "construct", "--q", "240"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
    cmd = [sys.executable, "-m", "b1sets", "search", "--q", "90"]
    assert (
        subprocess.run(cmd, capture_output=True).stdout
        == subprocess.run(cmd, capture_output=True).stdout
    )
