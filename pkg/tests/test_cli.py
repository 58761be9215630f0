"""Command-line interface: outputs, exit codes, determinism."""

import json
import math
import os

import pytest

from luceopt.cli import main


@pytest.fixture
def rev_ord_fail_file(tmp_path):
    doc = {
        "products": [
            {"id": 1, "revenue": 88.0, "attractiveness": 13.0},
            {"id": 2, "revenue": 47.0, "attractiveness": 26.0},
            {"id": 3, "revenue": 46.0, "attractiveness": 15.0},
        ],
        "a0": 55.0,
        "dominance": {"type": "threshold", "t": 0.6},
    }
    path = tmp_path / "rev_ord_fail.json"
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def fixed_price_num_file(tmp_path):
    utilities = [2.0] + [1.0] * 10
    doc = {
        "products": [
            {"id": i + 1, "revenue": 1.0, "attractiveness": math.exp(u), "utility": u}
            for i, u in enumerate(utilities)
        ],
        "a0": 1.0,
        "dominance": {"type": "threshold", "t": 1.0},
    }
    path = tmp_path / "fixed_price_num.json"
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSolveCommand:
    def test_unconstrained(self, capsys, rev_ord_fail_file):
        code, out, _ = run(capsys, ["solve", "--instance", rev_ord_fail_file])
        assert code == 0
        doc = json.loads(out)
        assert doc["assortment"] == [1, 3]
        assert doc["revenue"] == pytest.approx(22.096, abs=1e-3)

    def test_capacity_one(self, capsys, rev_ord_fail_file):
        code, out, _ = run(
            capsys, ["solve", "--instance", rev_ord_fail_file, "--capacity", "1"]
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["assortment"] == [1]
        assert doc["revenue"] == pytest.approx(16.824, abs=1e-3)

    def test_malformed_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, out, err = run(capsys, ["solve", "--instance", str(bad)])
        assert code == 1 and out == "" and err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, ["solve", "--instance", "/nonexistent.json"])
        assert code == 1 and err

    def test_method_tree_on_non_tree_is_exit_2(self, capsys, tmp_path):
        doc = {
            "products": [
                {"id": 1, "revenue": 1.0, "attractiveness": 3.0},
                {"id": 2, "revenue": 2.0, "attractiveness": 3.0},
                {"id": 3, "revenue": 3.0, "attractiveness": 1.0},
            ],
            "a0": 1.0,
            "dominance": {"type": "explicit", "edges": [[1, 3], [2, 3]]},
        }
        path = tmp_path / "diamond.json"
        path.write_text(json.dumps(doc))
        code, _, err = run(
            capsys,
            ["solve", "--instance", str(path), "--capacity", "2", "--method", "tree"],
        )
        assert code == 2 and err

    def test_deterministic_output(self, capsys, rev_ord_fail_file):
        _, out1, _ = run(capsys, ["solve", "--instance", rev_ord_fail_file])
        _, out2, _ = run(capsys, ["solve", "--instance", rev_ord_fail_file])
        assert out1 == out2


class TestPriceCommand:
    def test_fixed_policy(self, capsys, fixed_price_num_file):
        code, out, _ = run(
            capsys, ["price", "--instance", fixed_price_num_file, "--policy", "fixed"]
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["revenue"] == pytest.approx(1.0, abs=1e-6)
        assert doc["k"] == 1

    def test_tlm_opt_beats_hand_prices(self, capsys, fixed_price_num_file):
        code, out, _ = run(
            capsys, ["price", "--instance", fixed_price_num_file, "--policy", "tlm-opt"]
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["revenue"] >= 1.298
        assert doc["mode"] == "boundary-tight"
        assert len(doc["prices"]) == doc["k"] == 11

    def test_policy_ordering(self, capsys, fixed_price_num_file):
        values = {}
        for policy in ("fixed", "quasi", "tlm-opt"):
            _, out, _ = run(
                capsys,
                ["price", "--instance", fixed_price_num_file, "--policy", policy],
            )
            values[policy] = json.loads(out)["revenue"]
        assert values["fixed"] <= values["quasi"] + 1e-6
        assert values["quasi"] <= values["tlm-opt"] + 2e-6

    def test_zero_outside_option_is_exit_2(self, capsys, tmp_path):
        doc = {
            "products": [{"id": 1, "revenue": 1.0, "attractiveness": 2.7,
                          "utility": 1.0}],
            "a0": 0.0,
            "dominance": {"type": "threshold", "t": 1.0},
        }
        path = tmp_path / "a0zero.json"
        path.write_text(json.dumps(doc))
        code, _, err = run(capsys, ["price", "--instance", str(path)])
        assert code == 2 and err


class TestVerifyCommand:
    def test_assortment_suite_passes(self, capsys):
        code, out, _ = run(
            capsys,
            ["verify", "--suite", "assortment", "--count", "25", "--max-n", "8",
             "--seed", "2"],
        )
        assert code == 0
        assert json.loads(out)["ok"] is True

    def test_pricing_suite_passes(self, capsys):
        code, out, _ = run(
            capsys,
            ["verify", "--suite", "pricing", "--count", "6", "--max-n", "2",
             "--seed", "2"],
        )
        assert code == 0
        assert json.loads(out)["ok"] is True

    def test_guard_exceeded_is_exit_1(self, capsys):
        code, _, err = run(
            capsys, ["verify", "--suite", "assortment", "--count", "1", "--max-n", "30"]
        )
        assert code == 1 and "guard" in err


class TestGenAndBench:
    def test_gen_is_stable_across_reruns(self, capsys, tmp_path):
        out1 = tmp_path / "g1"
        out2 = tmp_path / "g2"
        for out in (out1, out2):
            code, _, _ = run(
                capsys,
                ["gen", "--n", "5", "--a0", "1", "--density", "0.2", "--seed", "7",
                 "--count", "3", "--out", str(out)],
            )
            assert code == 0
        names = sorted(os.listdir(out1))
        assert names == ["instance_0000.json", "instance_0001.json",
                         "instance_0002.json"]
        for name in names:
            assert (out1 / name).read_text() == (out2 / name).read_text()

    def test_generated_instances_are_loadable(self, capsys, tmp_path):
        out = tmp_path / "g"
        run(capsys, ["gen", "--n", "4", "--a0", "1", "--density", "0.5",
                     "--seed", "3", "--count", "1", "--out", str(out)])
        code, solved, _ = run(
            capsys, ["solve", "--instance", str(out / "instance_0000.json")]
        )
        assert code == 0 and "revenue" in json.loads(solved)

    def test_bench_csv(self, capsys, tmp_path):
        cfg = {
            "experiment": "assortment",
            "cells": [{"n": 5, "a0": 1, "d": 0.0}, {"n": 5, "a0": 2, "d": 0.5}],
            "count": 10,
            "seed": 7,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        report = tmp_path / "report.csv"
        code, _, _ = run(
            capsys, ["bench", "--config", str(cfg_path), "--out", str(report)]
        )
        assert code == 0
        lines = report.read_text().strip().splitlines()
        assert len(lines) == 4  # comment + header + 2 cells
        import csv as csv_mod

        rows = list(csv_mod.reader(lines[1:]))
        zero_cell = rows[1]
        assert float(zero_cell[1]) == 0.0  # d=0: RO is optimal

    def test_bench_bad_config_is_exit_1(self, capsys, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"experiment": "nope", "cells": [],
                                        "count": 1, "seed": 0}))
        code, _, err = run(
            capsys, ["bench", "--config", str(cfg_path), "--out",
                     str(tmp_path / "r.csv")]
        )
        assert code == 1 and err
