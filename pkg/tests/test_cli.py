import json

import numpy as np
import pytest

from scorebias.cli import main
from scorebias.ingest import AuditFrame, UNIT_RANGE, write_csv
from scorebias.report import parse_measures, round_sig

from conftest import COMPAS_CSV

COMMON = ["--score-col", "score", "--group-col", "group", "--outcome-col", "outcome",
          "--group-a", "a", "--group-b", "b", "--quiet"]


def _write(tmp_path, frame, name="in.csv"):
    path = tmp_path / name
    write_csv(frame, path)
    return str(path)


def random_frame(seed=0, n=200, dup=False):
    rng = np.random.default_rng(seed)
    if dup:
        s, y = rng.uniform(0, 1, n // 2), rng.integers(0, 2, n // 2)
        y[:2] = [0, 1]
        return AuditFrame.from_arrays(np.concatenate([s, s]), np.repeat([False, True], n // 2),
                                      np.concatenate([y, y]), UNIT_RANGE)
    return AuditFrame.from_arrays(np.round(rng.uniform(0, 1, n), 2), rng.integers(0, 2, n),
                                  rng.integers(0, 2, n), UNIT_RANGE)


def test_audit_report_shape(tmp_path):
    src = _write(tmp_path, random_frame())
    out = tmp_path / "r.json"
    assert main(["audit", "--input", src, *COMMON, "--permutations", "10", "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    labels = [m["measure"] for m in report["measures"]]
    assert labels == ["IND^score", "IND^uniform", "EO^score", "EO^uniform", "PE^score",
                      "PE^uniform", "CALI^score", "CALI^uniform", "ROC", "xROC"]
    assert sum(report["dataset"]["cell_weights"].values()) == pytest.approx(1.0, abs=1e-9)
    for m in report["measures"]:
        assert 0 <= m["total"] <= 1 and 0 < m["p_value"] <= 1
        assert m["pos_share"] + m["neg_share"] == pytest.approx(1.0 if m["total"] > 0 else 0.0)


def test_duplicated_groups_all_zero(tmp_path):
    src = _write(tmp_path, random_frame(1, dup=True))
    out = tmp_path / "r.json"
    assert main(["audit", "--input", src, *COMMON, "--permutations", "10", "--bins", "5",
                 "--output", str(out)]) == 0
    for m in json.loads(out.read_text())["measures"]:
        assert m["total"] == 0 and m["p_value"] == 1


def test_byte_identical_outputs(tmp_path):
    src = _write(tmp_path, random_frame(2))
    runs = []
    for i, workers in enumerate(("1", "3")):
        out, cdir = tmp_path / f"r{i}.json", tmp_path / f"c{i}"
        assert main(["audit", "--input", src, *COMMON, "--permutations", "15", "--seed", "5",
                     "--workers", workers, "--output", str(out)]) == 0
        assert main(["curves", "--input", src, *COMMON, "--curves-dir", str(cdir)]) == 0
        runs.append((out.read_bytes(), {p.name: p.read_bytes() for p in cdir.iterdir()}))
    assert runs[0] == runs[1]


def test_measure_selection(tmp_path):
    src = _write(tmp_path, random_frame(3))
    out = tmp_path / "r.json"
    assert main(["audit", "--input", src, *COMMON, "--permutations", "0",
                 "--measures", "EO^score,xroc", "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert [m["measure"] for m in report["measures"]] == ["EO^score", "xROC"]
    assert "p_value" not in report["measures"][0]


def test_parse_measures():
    assert [m.label for m in parse_measures("PE")] == ["PE^score", "PE^uniform"]
    assert len(parse_measures(None)) == 10
    with pytest.raises(ValueError):
        parse_measures("FOO")


def test_round_sig():
    assert round_sig({"x": [1 / 3, 2]}) == {"x": [0.3333333333, 2]}
    assert round_sig(float("nan")) is None


def test_curves(tmp_path):
    src = _write(tmp_path, random_frame(4))
    cdir = tmp_path / "curves"
    assert main(["curves", "--input", src, *COMMON, "--curves-dir", str(cdir)]) == 0
    roc = np.genfromtxt(cdir / "roc_curves.csv", delimiter=",", names=True, dtype=None, encoding="utf-8")
    for name in set(roc["curve"]):
        rows = roc[roc["curve"] == name]
        assert (rows["fpr"][0], rows["tpr"][0]) == (0, 0)
        assert (rows["fpr"][-1], rows["tpr"][-1]) == (1, 1)


def test_identical_groups_zero_curves(tmp_path):
    src = _write(tmp_path, random_frame(5, dup=True))
    cdir = tmp_path / "curves"
    assert main(["curves", "--input", src, *COMMON, "--curves-dir", str(cdir)]) == 0
    th = np.genfromtxt(cdir / "threshold_curves.csv", delimiter=",", names=True, dtype=None,
                       encoding="utf-8")
    assert np.all(th["cbias"] == 0) and np.all(th["cbias_inclusive"] == 0)


def test_exit_codes(tmp_path, capsys):
    src = _write(tmp_path, random_frame(6))
    assert main(["audit", "--input", str(tmp_path / "missing.csv"), *COMMON]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_bytes(b"score,group,outcome\n\xff\xfe,a,0\n")
    assert main(["audit", "--input", str(bad), *COMMON]) == 1
    assert main(["audit", "--input", src, *COMMON[:-3], "--group-b", "zzz", "--quiet"]) == 2
    assert main(["audit", "--input", src, "--score-col", "nope", *COMMON[2:]]) == 2
    assert main(["audit", "--input", src, *COMMON, "--bins", "1"]) == 2
    assert main(["audit", "--input", src, "--group-col", "group"]) == 2
    assert main(["verify", "--tolerance", "-1"]) == 2
    one_cell = AuditFrame.from_arrays([0.1, 0.2, 0.3], [0, 0, 1], [0, 1, 0], UNIT_RANGE)
    assert main(["audit", "--input", _write(tmp_path, one_cell, "cell.csv"), *COMMON,
                 "--measures", "EO"]) == 2
    assert "undefined conditional" in capsys.readouterr().err


def test_verify_exit_codes(capsys):
    assert main(["verify", "--splits", "2"]) == 0
    assert main(["verify", "--splits", "2", "--tolerance", "0"]) == 3
    assert "FAIL" in capsys.readouterr().out


def test_verify_on_input(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--input", str(COMPAS_CSV), "--preset", "compas", "--quiet",
                 "--json", str(out)]) == 0
    checks = json.loads(out.read_text())["checks"]
    assert all(c["passed"] for c in checks)


def test_load_report_on_stderr(tmp_path, capsys):
    src = _write(tmp_path, random_frame(7))
    args = ["audit", "--input", src, *COMMON[:-1], "--permutations", "0", "--output", str(tmp_path / "o.json")]
    assert main(args) == 0
    assert "rows read" in capsys.readouterr().err
