import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from autonorm import load_schema
from autonorm.cli import run
from autonorm.flows import eggbeater
from autonorm.winding import generator_motions

EGG = "eggbeater:a^4 b^3 a^2 b:0.1:5e-5"


def out_of(capsys, argv):
    code = run(argv)
    cap = capsys.readouterr()
    return code, cap.out.strip(), cap.err.strip()


def test_spec_examples(capsys):
    assert out_of(capsys, ["qm", "eval", "--qm", "cm:2", "--word", "a^4 b^3 a^2 b"])[:2] == (0, "3")
    assert out_of(capsys, ["qm", "homogenize", "--qm", "snake", "--word", "a b A B"])[:2] == (0, "4 exact")
    assert out_of(capsys, ["norm", "lower-bound", "--psi", "0", "--defect", "9"])[:2] == (0, "0")
    assert out_of(capsys, ["norm", "lower-bound", "--psi", "9", "--defect", "3"])[:2] == (0, "4")


def test_homogenize_json_schema(capsys):
    code, out, _ = out_of(capsys, ["qm", "homogenize", "--qm", "cm:2", "--word", "a^4 b^3 a^2 b", "--format", "json"])
    d = json.loads(out)
    jsonschema.validate(d, load_schema("homogenization"))
    assert d["value"] == 2 and d["exact"] is True


def test_words_commands(capsys):
    code, out, _ = out_of(capsys, ["words", "factor-palindromes", "--word", "a^2 b"])
    assert code == 0 and out.splitlines() == ["u = a^2", "v = b"]
    code, out, _ = out_of(capsys, ["words", "primitive", "--word", "a b A B"])
    assert code == 0 and out == "not primitive"
    code, out, _ = out_of(capsys, ["words", "primitive", "--word", "a b a", "--format", "json"])
    assert json.loads(out)["primitive"] is True
    code, _, err = out_of(capsys, ["words", "factor-palindromes", "--word", "a b A B"])
    assert code == 2 and "not primitive" in err


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["qm", "eval", "--qm", "cm:2", "--word", "a^x"], "cannot parse word"),
        (["qm", "eval", "--qm", "bogus", "--word", "a"], "unknown quasimorphism"),
        (["gg", "estimate", "--qm", "cm:2", "--map", "warp:1"], "unknown map spec"),
        (["gg", "estimate", "--qm", "cm:2", "--map", "shear-v:0.4:1e-6"], "s must lie"),
        (["braid", "from-csv", "/nonexistent/x.csv", "/nonexistent/y.csv"], "missing file"),
        (["norm", "lower-bound", "--psi", "1", "--defect", "0"], "defect must be positive"),
    ],
)
def test_validation_errors_exit_2(capsys, argv, needle):
    code, _, err = out_of(capsys, argv)
    assert code == 2
    assert needle in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["qm", "nothing"])
    assert exc.value.code == 2


def test_unsound_exit_3(capsys):
    code, _, err = out_of(capsys, ["gg", "estimate", "--qm", "cm:2", "--map", EGG, "-N", "5000", "--seed", "1", "--nonfixed-cap", "0"])
    assert code == 3 and "numerical failure" in err


def test_braid_from_csv(tmp_path, capsys):
    X, Y = generator_motions()["a2"]
    X.to_csv(tmp_path / "x.csv")
    Y.to_csv(tmp_path / "y.csv")
    code, out, _ = out_of(capsys, ["braid", "from-csv", str(tmp_path / "x.csv"), str(tmp_path / "y.csv")])
    d = json.loads(out)
    jsonschema.validate(d, load_schema("pure_braid"))
    assert code == 0 and d == {"free": "A", "lattice": [1, 0]}


def test_braid_from_csv_of_map_trajectories(tmp_path, capsys):
    g = eggbeater("a^4 b^3 a^2 b", 0.1, 5e-5)
    g.trace(np.array([0.2, 0.8])).to_csv(tmp_path / "x.csv")
    g.trace(np.array([0.7, 0.3])).to_csv(tmp_path / "y.csv")
    code, out, _ = out_of(capsys, ["braid", "from-csv", str(tmp_path / "x.csv"), str(tmp_path / "y.csv"), "--format", "json"])
    assert code == 0 and json.loads(out)["free"] == "A B^2 A^3 B^4"


def test_gg_estimate_reproducible_with_echoed_seed(capsys):
    base = ["gg", "estimate", "--qm", "cm:2", "--map", EGG, "-N", "3000"]
    code, first, _ = out_of(capsys, base)
    d = json.loads(first)
    jsonschema.validate(d, load_schema("gg_estimate"))
    code, again, _ = out_of(capsys, base + ["--seed", str(d["seed"])])
    assert again == first


def test_gg_estimate_thread_independent(capsys, monkeypatch):
    base = ["gg", "estimate", "--qm", "homog(cm:2)", "--map", EGG, "-N", "5000", "--seed", "42"]
    one = out_of(capsys, base + ["--threads", "1"])[1]
    eight = out_of(capsys, base + ["--threads", "8"])[1]
    monkeypatch.setenv("AUTONORM_THREADS", "3")
    env = out_of(capsys, base)[1]
    assert one == eight == env


def test_output_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out, _ = out_of(capsys, ["qm", "eval", "--qm", "snake", "--word", "a b A B", "--format", "json", "-o", str(path)])
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["value"] == 3


def test_qm_defect_and_invariance(capsys):
    code, out, _ = out_of(capsys, ["qm", "defect", "--qm", "cm:2", "--trials", "300", "--seed", "5", "--format", "json"])
    d = json.loads(out)
    assert code == 0 and d["within_bound"] and d["seed"] == 5 and d["bound"] == 9
    code, out, _ = out_of(capsys, ["qm", "invariance", "--qm", "cm:3", "--trials", "100", "--seed", "1"])
    assert code == 0 and "not invariant" not in out and "seed=1" in out


def test_gg_oracle(capsys):
    code, out, _ = out_of(capsys, ["gg", "oracle", "--format", "json"])
    d = json.loads(out)
    assert code == 0 and d["total"] == pytest.approx(-0.1992)


def test_autonomous_check_small(capsys):
    code, out, _ = out_of(capsys, ["gg", "autonomous-check", "-N", "2000", "--seed", "3", "--map", "shear-v:0.1:5e-5", "--map", "shear-h:0.1:5e-5"])
    assert code == 0
    assert out.count("PASS") == 6


def test_demo_small(capsys):
    code, out, _ = out_of(capsys, ["demo", "eggbeater", "-N", "2000", "--K", "2", "--seed", "8", "--format", "json"])
    d = json.loads(out)
    assert code == 0 and [r["k"] for r in d["rows"]] == [1, 2]
    assert d["rows"][1]["value"] == pytest.approx(2 * d["rows"][0]["value"])


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "autonorm", "qm", "eval", "--qm", "cm:2", "--word", "a^4 b^3 a^2 b"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "3"
