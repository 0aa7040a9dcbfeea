import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from kendep.cache import CalibrationCache
from kendep.cli import build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestIndex:
    def test_fixture_full_vector(self, capsys):
        doc = run_json(capsys, "index", "--seed", "0")
        assert doc["schema_version"] == 1 and doc["command"] == "index"
        (result,) = doc["results"]["subvectors"]
        assert result["columns"] == ["DB", "AST", "ALT", "AP"]
        assert result["I"] == pytest.approx(0.2546, abs=5e-4)
        assert doc["provenance"]["phi"]["4"]["source"] == "calibrated"

    def test_pairs_report_tau(self, capsys):
        doc = run_json(capsys, "index", "--subsets", "pairs")
        rows = {tuple(r["columns"]): r for r in doc["results"]["subvectors"]}
        assert len(rows) == 6
        assert rows[("AST", "ALT")]["I"] == pytest.approx(0.468, abs=1e-3)
        assert rows[("AST", "ALT")]["tau"] == pytest.approx(0.619, abs=1e-3)

    def test_json_file_and_columns(self, capsys, tmp_path):
        path = tmp_path / "r.json"
        code, out, _ = run(capsys, "index", "--columns", "DB,AST,ALT", "--json", str(path))
        assert code == 0 and out == ""
        doc = json.loads(path.read_text())
        assert doc["results"]["subvectors"][0]["I"] == pytest.approx(0.322, abs=1e-3)

    def test_no_calibrate_without_cache_fails(self, capsys):
        code, _, err = run(capsys, "index", "--no-calibrate")
        assert code == 1
        assert "kendep calibrate --d 4" in err

    def test_bad_input(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,x\n2,3\n")
        code, _, err = run(capsys, "index", "--input", str(path))
        assert code == 1 and "non-numeric" in err
        code, _, err = run(capsys, "index", "--input", str(tmp_path / "missing.csv"))
        assert code == 1 and err.startswith("kendep: error:")


class TestTest:
    def test_pair_is_dependent(self, capsys):
        doc = run_json(capsys, "test", "--columns", "AST,ALT", "--r", "2000")
        test = doc["results"]["test"]
        assert test["reject"] and test["critical_source"] == "calibrated"
        assert test["sigma"]["source"] == "exact_d2"

    def test_table_sigma_option(self, capsys):
        doc = run_json(capsys, "test", "--columns", "DB,AST,ALT", "--sigma", "table", "--r", "500")
        assert doc["results"]["test"]["sigma"]["value"] == 0.19383

    def test_no_calibrate(self, capsys):
        code, _, err = run(capsys, "test", "--columns", "DB,AST,ALT", "--no-calibrate")
        assert code == 1 and "calibration is disabled" in err


class TestCalibrate:
    def test_byte_identical_reruns(self, capsys, tmp_path):
        texts = []
        for name in ("a.json", "b.json"):
            path = tmp_path / name
            run_json(capsys, "calibrate", "--d", "4", "--seed", "7", "--what", "phi", "--cache", str(path))
            texts.append(CalibrationCache(path).entry_text("phi", "4"))
        assert texts[0] == texts[1]

    def test_sigma_d2(self, capsys, tmp_path):
        doc = run_json(capsys, "calibrate", "--d", "2", "--what", "sigma", "--r", "4000",
                       "--sigma-n", "500", "--cache", str(tmp_path / "c.json"))
        assert doc["results"]["sigma"]["value"] == pytest.approx(math.sqrt(19 / 432), rel=0.03)

    def test_percentiles_monotone(self, capsys, tmp_path):
        doc = run_json(capsys, "calibrate", "--d", "2", "--n", "60", "--r", "1000",
                       "--what", "percentiles", "--cache", str(tmp_path / "c.json"))
        p = doc["results"]["percentiles"]["percentiles"]
        assert p["0.90"] < p["0.95"] < p["0.99"]

    def test_errors(self, capsys):
        assert run(capsys, "calibrate", "--d", "2", "--what", "percentiles")[0] == 1
        assert run(capsys, "calibrate", "--d", "2", "--what", "nonsense")[0] == 1


class TestSimulate:
    def test_deterministic(self, capsys, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            run_json(capsys, "simulate", "--family", "clayton", "--param", "theta=2", "--n", "50",
                     "--seed", "3", "--out", str(p))
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_circle(self, capsys, tmp_path):
        out = tmp_path / "c.csv"
        doc = run_json(capsys, "simulate", "--family", "circle", "--n", "20", "--out", str(out))
        assert doc["results"]["columns"] == ["X", "Y"]
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        x = np.array(rows, dtype=float)
        np.testing.assert_allclose(np.hypot(x[:, 0], x[:, 1]), 1.0, rtol=1e-14)

    def test_invalid_parameters(self, capsys, tmp_path):
        out = str(tmp_path / "x.csv")
        code, _, err = run(capsys, "simulate", "--family", "equicorrelated", "--param", "rho=-0.7",
                           "--n", "10", "--out", out)
        assert code == 1 and "positive semidefinite" in err
        assert run(capsys, "simulate", "--family", "exp", "--param", "l12=2.5", "--n", "10", "--out", out)[0] == 1
        assert run(capsys, "simulate", "--family", "bogus", "--n", "10", "--out", out)[0] == 1
        assert run(capsys, "simulate", "--family", "uniform", "--param", "oops", "--n", "10", "--out", out)[0] == 1


class TestKplot:
    def test_four_dimensional_fixture(self, capsys, tmp_path):
        out = tmp_path / "k.csv"
        doc = run_json(capsys, "kplot", "--out", str(out), "--grid-size", "64")
        assert doc["results"]["patterns"] == 16
        assert doc["results"]["rows"] == 16 * 64

    def test_three_columns(self, capsys, tmp_path):
        out = tmp_path / "k.csv"
        doc = run_json(capsys, "kplot", "--columns", "DB,AST,ALT", "--out", str(out), "--tolerance", "0.1")
        assert doc["results"]["patterns"] == 8
        assert doc["inputs"]["tolerance"] == 0.1
        assert set(doc["results"]["decision"]) >= {"in_X1", "in_X2"}


class TestReproduce:
    def test_table6(self, capsys, tmp_path):
        code, out, err = run(capsys, "reproduce", "T6", "--out", str(tmp_path))
        assert code == 0
        assert ("PASS T6" in err) or ("FAIL T6" in err)
        doc = json.loads(out)
        (summary,) = doc["results"]["tables"]
        assert (tmp_path / "T6_comparison.csv").exists()
        assert (tmp_path / "T6_layout.csv").exists()
        assert summary["cells"] > 0

    def test_unknown_table(self, capsys, tmp_path):
        assert run(capsys, "reproduce", "T99", "--out", str(tmp_path))[0] == 1


class TestParser:
    def test_usage_errors_exit_2(self):
        with pytest.raises(SystemExit) as info:
            main(["index", "--subsets", "quads"])
        assert info.value.code == 2
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == 2

    def test_subcommands(self):
        actions = [a for a in build_parser()._actions if a.dest == "command"]
        assert set(actions[0].choices) == {"index", "test", "calibrate", "simulate", "kplot", "reproduce"}

    def test_console_entry_point(self):
        result = subprocess.run([sys.executable, "-m", "kendep.cli", "--version"],
                                capture_output=True, text=True, check=True)
        assert result.stdout.startswith("kendep ")
