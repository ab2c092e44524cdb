"""End-to-end tests for the sgntk command line."""

import argparse
import json

import numpy as np
import pytest

from sgntk.cli import Resolver, _int_list, _normalize_activation, main
from sgntk.experiments import sphere_points, target_polynomial
from sgntk.tableio import read_csv, write_csv


class TestHelpers:
    def test_int_list(self):
        assert _int_list("10,100") == [10, 100]
        assert _int_list([1, 2]) == [1, 2]
        assert _int_list("5") == [5]

    def test_activation_shorthand(self):
        assert _normalize_activation("erf:2") == "erf:m=2"
        assert _normalize_activation("erf:m=5") == "erf:m=5"
        assert _normalize_activation("sign") == "sign"

    def test_resolver_precedence(self):
        args = argparse.Namespace(steps=7, width=None)
        res = Resolver(args, {"steps": 99, "width": 42}, "fig3", paper_scale=False)
        assert res.get("steps") == 7  # flag beats config
        assert res.get("width") == 42  # config beats scale default
        empty = argparse.Namespace()
        assert Resolver(empty, {}, "fig3", paper_scale=True).get("steps") == 30_000
        assert Resolver(empty, {}, "fig3", paper_scale=False).get("steps") == 10_000
        assert Resolver(empty, {}, "fig3", paper_scale=False).get("missing", 5) == 5


class TestKernelTable:
    def test_writes_table(self, tmp_path, capsys):
        out = tmp_path / "k.csv"
        rc = main(["kernel-table", "--kind", "ntk", "--activation", "erf:2",
                   "--depth", "2", "--grid", "8", "--out", str(out)])
        assert rc == 0
        assert f"wrote {out}" in capsys.readouterr().out
        header, rows = read_csv(out)
        assert header == ["angle", "value"]
        assert len(rows) == 8
        assert all(float(row[1]) == float(row[1]) for row in rows)

    def test_sign_limit_marks_divergence(self, tmp_path):
        out = tmp_path / "sign.csv"
        rc = main(["kernel-table", "--kind", "ntk", "--activation", "sign",
                   "--depth", "2", "--grid", "8", "--out", str(out)])
        assert rc == 0
        _, rows = read_csv(out)
        assert rows[0][1] == "DIV"
        assert all(row[1] != "DIV" for row in rows[1:])

    def test_out_dir_after_subcommand(self, tmp_path):
        rc = main(["kernel-table", "--kind", "ntk", "--activation", "erf:2",
                   "--depth", "2", "--grid", "4", "--out-dir", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "kernel_table.csv").exists()


def write_points(path, angles, with_targets):
    pts = sphere_points(angles)
    header = ["x0", "x1"] + (["y"] if with_targets else [])
    rows = []
    for p in pts:
        row = [float(p[0]), float(p[1])]
        if with_targets:
            row.append(float(target_polynomial(p)))
        rows.append(row)
    write_csv(path, header, rows)


class TestGpPredict:
    def test_interpolates_training_targets(self, tmp_path):
        train = tmp_path / "train.csv"
        test = tmp_path / "test.csv"
        angles = np.linspace(0.3, 5.9, 9)
        write_points(train, angles, with_targets=True)
        write_points(test, angles, with_targets=False)
        out = tmp_path / "pred.csv"
        rc = main(["gp-predict", "--kernel", "ntk", "--mode", "erf:2",
                   "--depth", "2", "--train-csv", str(train),
                   "--test-csv", str(test), "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out)
        assert header == ["x0", "x1", "mean", "std"]
        targets = [target_polynomial(p) for p in sphere_points(angles)]
        for row, y in zip(rows, targets):
            assert float(row[2]) == pytest.approx(y, abs=1e-8)
            assert 0.0 <= float(row[3]) <= 1e-4

    def test_finite_time_between_prior_and_limit(self, tmp_path):
        train = tmp_path / "train.csv"
        test = tmp_path / "test.csv"
        write_points(train, np.linspace(0.3, 5.9, 9), with_targets=True)
        write_points(test, [1.0], with_targets=False)
        means = {}
        for label, t in [("short", "2"), ("long", "inf")]:
            out = tmp_path / f"{label}.csv"
            rc = main(["gp-predict", "--kernel", "ntk", "--mode", "erf:2",
                       "--depth", "2", "--train-csv", str(train),
                       "--test-csv", str(test), "--t", t, "--out", str(out)])
            assert rc == 0
            means[label] = float(read_csv(out)[1][0][2])
        assert means["short"] != means["long"]

    def test_missing_targets_rejected(self, tmp_path, capsys):
        train = tmp_path / "train.csv"
        test = tmp_path / "test.csv"
        write_points(train, [0.3, 1.4], with_targets=False)  # no y column
        write_points(test, [1.0], with_targets=False)
        rc = main(["gp-predict", "--kernel", "ntk", "--mode", "erf:2",
                   "--train-csv", str(train), "--test-csv", str(test),
                   "--out", str(tmp_path / "p.csv")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_divergent_kernel_reported(self, tmp_path, capsys):
        train = tmp_path / "train.csv"
        test = tmp_path / "test.csv"
        write_points(train, [0.3, 1.4, 2.8], with_targets=True)
        write_points(test, [1.0], with_targets=False)
        rc = main(["gp-predict", "--kernel", "ntk", "--mode", "sign",
                   "--train-csv", str(train), "--test-csv", str(test),
                   "--out", str(tmp_path / "p.csv")])
        assert rc == 1
        assert "divergent" in capsys.readouterr().err


class TestReportCommands:
    def test_train_ensemble_bundle(self, tmp_path):
        rc = main(["train-ensemble", "--width", "8", "--count", "2",
                   "--steps", "10", "--grid", "4",
                   "--out", str(tmp_path / "bundle")])
        assert rc == 0
        assert (tmp_path / "bundle_outputs.csv").exists()
        assert (tmp_path / "bundle_losses.csv").exists()
        doc = json.loads((tmp_path / "bundle_report.json").read_text())
        assert doc["metadata"]["width"] == 8

    def test_config_file_and_echo(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text('width = 8\ncount = 2\nsteps = 10\ngrid = 4\n')
        rc = main(["train-ensemble", "--config", str(cfg), "--steps", "4",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "ensemble_report.json").read_text())
        assert doc["metadata"]["width"] == 8  # from config
        assert doc["metadata"]["steps"] == 4  # flag wins
        assert doc["metadata"]["config_file"]["steps"] == 10

    def test_json_config(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"width": 8, "count": 2, "steps": 3, "grid": 4}))
        rc = main(["train-ensemble", "--config", str(cfg),
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "ensemble_report.json").read_text())
        assert doc["metadata"]["steps"] == 3

    def test_unknown_config_suffix(self, tmp_path, capsys):
        cfg = tmp_path / "run.ini"
        cfg.write_text("width = 8\n")
        rc = main(["train-ensemble", "--config", str(cfg)])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_fig1_bundle(self, tmp_path):
        rc = main(["fig1", "--widths", "8", "--m-values", "2", "--seeds", "0",
                   "--steps", "0", "--grid", "4", "--out-dir", str(tmp_path)])
        assert rc == 0
        doc = json.loads((tmp_path / "fig1_report.json").read_text())
        assert doc["tables"]["curves"]["file"] == "fig1_curves.csv"
        header, rows = read_csv(tmp_path / "fig1_curves.csv")
        assert len(rows) == 4
        assert "empirical_trained" not in header

    def test_fig3_bundle_reruns_identically(self, tmp_path):
        args = ["fig3", "--width", "8", "--count", "2", "--steps", "5",
                "--grid", "4", "--out-dir", str(tmp_path)]
        assert main(args) == 0
        band = (tmp_path / "fig3_band.csv").read_bytes()
        report = (tmp_path / "fig3_report.json").read_bytes()
        assert main(args) == 0
        assert (tmp_path / "fig3_band.csv").read_bytes() == band
        assert (tmp_path / "fig3_report.json").read_bytes() == report


class TestValidateCommand:
    def test_passes(self, capsys):
        rc = main(["validate", "--mc-samples", "50000",
                   "--ensemble-count", "100"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "all checks passed" in out
        assert out.count("PASS") == 6
